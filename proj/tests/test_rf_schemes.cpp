#include "oracles.hpp"

#include "rotframe/rf_schemes.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <numbers>

using namespace rotframe;
using namespace rotframe::literals;

namespace {

cmat pauli_x() {
  cmat x = cmat::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1;
  return x;
}

cmat hadamard_like() {
  cmat h(2, 2);
  h << 1, 1, 1, -1;
  return h / std::sqrt(2.0);
}

DistanceOptions quick(std::uint64_t seed) {
  DistanceOptions o;
  o.seed = seed;
  o.grid_points = 20000;
  return o;
}

} // namespace

TEST(ZInv, FromMatrixRejectsNonCommuting) {
  const SystemSpace s = SystemSpace::irrep(HalfInt::half());
  EXPECT_THROW(ZInvUnitary::from_matrix(s, pauli_x()), std::invalid_argument);
  Rng rng(1);
  const SystemSpace m({{HalfInt::half(), 1}, {3_h2, 1}});
  const ZInvUnitary v = oracle::random_zinv(m, rng);
  const auto L = angular_momentum_operators(m);
  EXPECT_LT(commutator(v.matrix(), L.z).norm(), 1e-12);
  EXPECT_LT(unitarity_residual(v.matrix()), 1e-12);
  EXPECT_LT((ZInvUnitary::from_matrix(m, v.matrix()).matrix() - v.matrix()).norm(), 1e-14);
}

TEST(RInv, CommutesWithRotations) {
  Rng rng(2);
  const SystemSpace s({{HalfInt::half(), 2}, {1, 1}});
  const RInvUnitary r(s, {{HalfInt::half(), haar_unitary(2, rng)}, {1, haar_unitary(1, rng)}});
  const cmat T = rotation_unitary(s, Eigen::Vector3d(0.6, 0, 0.8), 1.1);
  EXPECT_LT(commutator(r.matrix(), T).norm(), 1e-12);
}

TEST(FrameQuality, Formula) {
  EXPECT_NEAR(frame_quality(HalfInt::half(), 50), 0.01, 1e-16);
  EXPECT_NEAR(zinv_error_bound(HalfInt::half(), {50, 0}), 0.04, 1e-15);
  EXPECT_NEAR(zinv_error_bound(HalfInt::half(), {50, 1}), 0.12, 1e-15);
  EXPECT_NEAR(zinv_error_bound(1, {100, 0}), 0.045, 1e-15);
  EXPECT_LT(zinv_error_bound(HalfInt::half(), {1000000000, 0}), 1e-8);
}

TEST(LiftZinv, IdentityLiftsToIdentity) {
  const SystemSpace s({{HalfInt::half(), 1}, {1, 2}});
  const LiftResult r = lift_zinv(ZInvUnitary::identity(s), {20, 0});
  EXPECT_LT(oracle::super_gap(r.channel, QuantumChannel::identity(s.dim())), 1e-12);
  EXPECT_EQ(channel_distance(QuantumChannel::identity(s.dim()), r.channel, quick(1)).value, 0.0);
}

TEST(LiftZinv, MatchesDenseJointSimulation) {
  Rng rng(3);
  const std::vector<SystemSpace> spaces{SystemSpace::irrep(HalfInt::half()), SystemSpace::irrep(1),
                                        SystemSpace({{HalfInt::half(), 1}, {3_h2, 1}}), SystemSpace({{0, 1}, {1, 2}})};
  for (const auto &s : spaces)
    for (HalfInt L : {HalfInt(4), HalfInt::from_twice(11), HalfInt(7)})
      for (int k : {0, 1, 3}) {
        if (L < s.max_l()) continue;
        const ZInvUnitary V = oracle::random_zinv(s, rng);
        const LiftResult r = lift_zinv(V, {L, k});
        EXPECT_LT(oracle::super_gap(r.channel, oracle::dense_lift(V, L, k)), 1e-11)
            << "L=" << L.to_string() << " k=" << k << " dim=" << s.dim();
      }
}

TEST(LiftZinv, KrausSupportAndTracePreservation) {
  Rng rng(4);
  const SystemSpace s({{HalfInt::half(), 1}, {3_h2, 1}});
  const HalfInt L = 30;
  for (int k : {0, 2}) {
    const LiftResult r = lift_zinv(oracle::random_zinv(s, rng), {L, k});
    EXPECT_LT(r.channel.trace_preservation_residual(), 1e-8);
    for (HalfInt n : r.frame_m) {
      EXPECT_GE(n, L - HalfInt(k) - s.max_l() - s.max_l());
      EXPECT_LE(n, L - HalfInt(k) + s.max_l() + s.max_l());
    }
    double w = 0;
    for (const auto &[n, x] : r.diag.kraus_weights) w += x;
    EXPECT_NEAR(w, 1, 1e-10);
  }
}

TEST(LiftZinv, DiagnosticsAgreeWithCg) {
  Rng rng(5);
  const SystemSpace s = SystemSpace::irrep(1);
  const HalfInt L = 40;
  const LiftResult r = lift_zinv(oracle::random_zinv(s, rng), {L, 0});
  EXPECT_NEAR(r.diag.C_sq, (1 + 1 + 0.25) / 80, 1e-15);
  double xn = 0;
  for (const auto &e : r.diag.xi) {
    EXPECT_NEAR(e.xi, cg(L, L, e.l1, e.m, L + e.m, L + e.m), 1e-14);
    EXPECT_GT(e.xi, 0);
    xn = std::max(xn, std::abs(1 - e.xi * e.xi));
  }
  EXPECT_NEAR(r.diag.X_norm, xn, 1e-15);
}

TEST(LiftZinv, ZRotationWithinBound) {
  const SystemSpace s = SystemSpace::irrep(HalfInt::half());
  cmat v = cmat::Identity(2, 2);
  v(1, 1) = std::polar(1.0, std::numbers::pi / 3);
  const ZInvUnitary V = ZInvUnitary::from_matrix(s, v);
  const auto u = QuantumChannel::unitary(v);
  const double d0 = channel_distance(u, lift_zinv(V, {50, 0}).channel, quick(2)).value;
  const double d1 = channel_distance(u, lift_zinv(V, {50, 1}).channel, quick(2)).value;
  EXPECT_GT(d0, 0);
  EXPECT_LE(d0, 0.04);
  EXPECT_LE(d1, 0.12);
}

TEST(LiftZinv, CostIndependentOfFrameSize) {
  Rng rng(6);
  const ZInvUnitary V = oracle::random_zinv(SystemSpace::irrep(1), rng);
  auto best = [&](HalfInt L) {
    double t = 1e300;
    for (int rep = 0; rep < 7; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      const LiftResult r = lift_zinv(V, {L, 0});
      t = std::min(t, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      EXPECT_LT(r.channel.trace_preservation_residual(), 1e-8);
    }
    return t;
  };
  const double small = best(1000), large = best(100000);
  EXPECT_LT(large, 2 * small + 2e-4);
}

TEST(XRF, IdentityAndDiagonalTargets) {
  const SystemSpace s = SystemSpace::irrep(HalfInt::half());
  const ZInvUnitary id = build_xrf_unitary(s, cmat::Identity(2, 2), 3);
  EXPECT_LT((id.matrix() - cmat::Identity(id.space().dim(), id.space().dim())).norm(), 1e-12);
  cmat diag = cmat::Identity(2, 2);
  diag(0, 0) = std::polar(1.0, 0.4);
  const cmat P = xrf_product_unitary(s, diag, 3);
  const Index dx = P.rows() / 2;
  // the frame never shifts: P maps |m>|n> to a multiple of itself
  for (Index c = 0; c < P.cols(); ++c)
    for (Index r = 0; r < P.rows(); ++r)
      if (r != c) EXPECT_EQ(std::abs(P(r, c)), 0.0);
  EXPECT_EQ(dx, 9);
  const XRFResult x = xrf_channel(s, diag, 3);
  EXPECT_LT(oracle::super_gap(x.channel, QuantumChannel::unitary(diag)), 1e-12);
}

TEST(XRF, PauliXIsLzInvariantAndUnitary) {
  const SystemSpace s = SystemSpace::irrep(HalfInt::half());
  const ZInvUnitary u = build_xrf_unitary(s, pauli_x(), 10);
  EXPECT_LT(unitarity_residual(u.matrix()), 1e-12);
  const auto L = angular_momentum_operators(u.space());
  EXPECT_LT(commutator(u.matrix(), L.z).norm(), 1e-12);
}

TEST(XRF, MatchesDenseJointConstruction) {
  Rng rng(7);
  for (const auto &s : {SystemSpace::irrep(HalfInt::half()), SystemSpace::irrep(1), SystemSpace::irrep(3_h2)})
    for (int N : {4, 7}) {
      if (HalfInt(N) <= s.max_l() + s.max_l()) continue;
      const cmat U = haar_unitary(s.dim(), rng);
      const cmat P = oracle::xrf_joint(s, U, N);
      EXPECT_LT((xrf_product_unitary(s, U, N) - P).norm(), 1e-12);
      const CoupledBasisMap c(s, HalfInt(N) + s.max_l() + s.max_l());
      const cmat C = c.dense().cast<cplx>();
      EXPECT_LT((build_xrf_unitary(s, U, N).matrix() - C.transpose() * P * C).norm(), 1e-12);
      EXPECT_LT(oracle::super_gap(xrf_channel(s, U, N).channel, oracle::dense_xrf(s, U, N)), 1e-12);
    }
}

TEST(XRF, FaithfulWeight) {
  const SystemSpace s = SystemSpace::irrep(HalfInt::half());
  const XRFResult x = xrf_channel(s, hadamard_like(), 10);
  EXPECT_NEAR(x.faithful_weight, 19.0 / 21.0, 1e-12);
  EXPECT_NEAR(x.bound, 2.0 / 21.0, 1e-15);
}

TEST(XRF, ResidualIsCompletelyPositive) {
  Rng rng(8);
  for (const auto &s : {SystemSpace::irrep(HalfInt::half()), SystemSpace::irrep(1)})
    for (int N : {5, 9}) {
      const cmat U = haar_unitary(s.dim(), rng);
      const XRFResult x = xrf_channel(s, U, N);
      const cmat rest = x.channel.choi() - x.faithful_weight * QuantumChannel::unitary(U).choi();
      Eigen::SelfAdjointEigenSolver<cmat> es(rest);
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-9);
      EXPECT_NEAR(rest.trace().real() / static_cast<double>(s.dim()), 1 - x.faithful_weight, 1e-10);
    }
}

TEST(XRF, HadamardWithinBound) {
  const SystemSpace s = SystemSpace::irrep(HalfInt::half());
  const XRFResult x = xrf_channel(s, hadamard_like(), 20);
  const double d = channel_distance(QuantumChannel::unitary(hadamard_like()), x.channel, quick(3)).value;
  EXPECT_LE(d, 2.0 / 41.0);
  EXPECT_GT(d, 0);
}

TEST(XRF, RejectsSmallFrame) {
  EXPECT_THROW(xrf_channel(SystemSpace::irrep(1), cmat::Identity(3, 3), 2), std::invalid_argument);
}

TEST(Scheme1, IdentityIsExact) {
  const SystemSpace s = SystemSpace::irrep(HalfInt::half());
  const Scheme1Result r = scheme1_channel(s, cmat::Identity(2, 2), 4, {100, 0});
  EXPECT_LT(oracle::super_gap(r.channel, QuantumChannel::identity(2)), 1e-10);
}

TEST(Scheme1, MatchesDenseTwoFrameSimulation) {
  Rng rng(9);
  const SystemSpace s = SystemSpace::irrep(HalfInt::half());
  for (int N : {2, 3})
    for (HalfInt L : {HalfInt(N) + 3_h2, HalfInt(N + 4)}) {
      const cmat U = haar_unitary(2, rng);
      EXPECT_LT(oracle::super_gap(scheme1_channel(s, U, N, {L, 0}).channel, oracle::dense_scheme1(s, U, N, L)), 1e-10)
          << "N=" << N << " L=" << L.to_string();
    }
}

TEST(Scheme1, PauliXWithinBound) {
  const SystemSpace s = SystemSpace::irrep(HalfInt::half());
  const Scheme1Result r = scheme1_channel(s, pauli_x(), 6, {2000, 0});
  EXPECT_NEAR(r.bound, 1.0 / 6 + 72.0 / 2000, 1e-15);
  EXPECT_NEAR(r.exact_bound, 2.0 / 13 + 4 * frame_quality(HalfInt(6) + 3_h2, 2000), 1e-15);
  EXPECT_LE(channel_distance(QuantumChannel::unitary(pauli_x()), r.channel, quick(4)).value, r.bound);
}

TEST(Scheme1, ErrorDecreasesWithFrameSize) {
  const SystemSpace s = SystemSpace::irrep(HalfInt::half());
  double prev = 1;
  for (int L : {20, 40, 80, 160}) {
    const double d = channel_distance(QuantumChannel::unitary(hadamard_like()),
                                      scheme1_channel(s, hadamard_like(), 4, {L, 0}).channel, quick(5))
                         .value;
    EXPECT_LT(d, prev + 1e-6);
    prev = d;
  }
}

TEST(Scheme1, OptimalFrameSize) {
  const auto o = scheme1_optimal(HalfInt::half(), 1000000);
  EXPECT_NEAR(o.error_bound, 0.02381, 1e-5);
  EXPECT_NEAR(o.error_bound, 3 * std::cbrt(0.5e-6), 1e-15);
  for (int L : {1000, 4000, 100000, 1000000}) {
    const auto p = scheme1_optimal(HalfInt::half(), L);
    EXPECT_LE(p.bound_at_N_opt, 1.05 * p.error_bound);
    for (int N = std::max(2, p.N_opt - 3); N <= p.N_opt + 3; ++N)
      EXPECT_GE(1.0 / N + 2.0 * N * N / L, p.bound_at_N_opt - 1e-15);
  }
  const double r = scheme1_optimal(HalfInt::half(), 2000).error_bound / scheme1_optimal(HalfInt::half(), 1000).error_bound;
  EXPECT_NEAR(r, std::pow(2.0, -1.0 / 3), 1e-14);
}

TEST(Degradation, NoUsesAndIdentity) {
  const SystemSpace s = SystemSpace::irrep(HalfInt::half());
  const auto none = simulate_degradation({}, {200, 0});
  ASSERT_EQ(none.steps.size(), 1u);
  EXPECT_EQ(none.steps[0].top_population, 1.0);
  for (bool fresh : {true, false}) {
    DegradationOptions o;
    o.fresh_systems = fresh;
    const auto rep = simulate_degradation(std::vector<ZInvUnitary>(4, ZInvUnitary::identity(s)), {200, 0}, o);
    for (const auto &st : rep.steps) EXPECT_NEAR(st.top_population, 1.0, 1e-14);
  }
}

TEST(Degradation, PopulationBoundAfterFiveUses) {
  Rng rng(10);
  const SystemSpace s = SystemSpace::irrep(HalfInt::half());
  std::vector<ZInvUnitary> seq;
  for (int i = 0; i < 5; ++i) seq.push_back(oracle::random_zinv(s, rng));
  for (bool fresh : {true, false}) {
    DegradationOptions o;
    o.fresh_systems = fresh;
    o.distance = quick(6);
    const auto rep = simulate_degradation(seq, {200, 0}, o);
    ASSERT_EQ(rep.steps.size(), 6u);
    EXPECT_NEAR(rep.steps[5].population_bound, 0.95, 1e-15);
    EXPECT_GE(rep.steps[5].top_population, 0.95);
    EXPECT_FALSE(rep.warning);
    for (const auto &st : rep.steps) EXPECT_NEAR(st.frame_populations.sum(), 1.0, 1e-10);
  }
}

TEST(Degradation, WarningForLongSequences) {
  const SystemSpace s = SystemSpace::irrep(HalfInt::half());
  const auto rep = simulate_degradation(std::vector<ZInvUnitary>(12, ZInvUnitary::identity(s)), {20, 0});
  EXPECT_TRUE(rep.warning);
}

TEST(Degradation, FirstUseMatchesLift) {
  Rng rng(11);
  const SystemSpace s = SystemSpace::irrep(1);
  const ZInvUnitary V = oracle::random_zinv(s, rng);
  DegradationOptions o;
  o.distance = quick(7);
  const auto rep = simulate_degradation({V}, {50, 0}, o);
  const double direct = channel_distance(QuantumChannel::unitary(V.matrix()), lift_zinv(V, {50, 0}).channel, quick(7)).value;
  EXPECT_NEAR(rep.steps[1].channel_error, direct, 1e-10);
}

TEST(Degradation, MixedFrameChannelIsComponentMixture) {
  Rng rng(12);
  const SystemSpace s = SystemSpace::irrep(HalfInt::half());
  const ZInvUnitary V = oracle::random_zinv(s, rng);
  const HalfInt L = 30;
  cmat F = cmat::Zero(3, 3);
  F(0, 0) = 0.7;
  F(1, 1) = 0.2;
  F(2, 2) = 0.1;
  const QuantumChannel mixed = mixed_frame_channel(V, L, F);
  const QuantumChannel want = QuantumChannel::mixture(
      {lift_zinv(V, {L, 0}).channel, lift_zinv(V, {L, 1}).channel, lift_zinv(V, {L, 2}).channel}, {0.7, 0.2, 0.1});
  EXPECT_LT(oracle::super_gap(mixed, want), 1e-12);
}

TEST(Degradation, WindowIsometryMatchesDenseJoint) {
  Rng rng(13);
  const SystemSpace s = SystemSpace::irrep(HalfInt::half());
  const ZInvUnitary V = oracle::random_zinv(s, rng);
  const HalfInt L = 6;
  const cmat W = frame_window_isometry(V, L, 2, 3);
  EXPECT_LT((W.adjoint() * W - cmat::Identity(W.cols(), W.cols())).norm(), 1e-12);
  const cmat J = oracle::lifted_joint(V, L);
  const Index df = L.twice() + 1;
  for (Index si = 0; si < 2; ++si)
    for (int k = 0; k <= 2; ++k)
      for (Index so = 0; so < 2; ++so)
        for (int kp = 0; kp <= 3; ++kp) {
          const cplx dense = J(so * df + (L.twice() - kp), si * df + (L.twice() - k));
          EXPECT_LT(std::abs(W(so * 4 + kp, si * 3 + k) - dense), 1e-12);
        }
}
