#include "rotframe/channels.hpp"
#include "rotframe/linalg.hpp"
#include "rotframe/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace rotframe;

namespace {

cmat pauli_x() {
  cmat x = cmat::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1;
  return x;
}

QuantumChannel random_channel(Index d, Index rank, Rng &rng) {
  const cmat V = haar_isometry(d * rank, d, rng);
  std::vector<cmat> ks;
  for (Index i = 0; i < rank; ++i) ks.push_back(V.block(i * d, 0, d, d));
  return QuantumChannel(ks, d, d);
}

DistanceOptions quick(std::uint64_t seed) {
  DistanceOptions o;
  o.seed = seed;
  o.grid_points = 20000;
  return o;
}

} // namespace

TEST(DensityMatrixTest, Validation) {
  EXPECT_NO_THROW(DensityMatrix::maximally_mixed(3));
  cmat bad = cmat::Identity(2, 2);
  EXPECT_THROW(DensityMatrix{bad}, std::invalid_argument);
  cmat neg = cmat::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  EXPECT_THROW(DensityMatrix{neg}, std::invalid_argument);
}

TEST(Channel, IdentityAndPauli) {
  Rng rng(1);
  const DensityMatrix rho(random_density_matrix(3, rng));
  EXPECT_LT((apply(QuantumChannel::identity(3), rho).matrix() - rho.matrix()).norm(), 1e-14);
  const DensityMatrix zero = DensityMatrix::pure(cvec::Unit(2, 0));
  EXPECT_LT((apply(QuantumChannel::unitary(pauli_x()), zero).matrix() - DensityMatrix::pure(cvec::Unit(2, 1)).matrix()).norm(),
            1e-15);
}

TEST(Channel, FullyDepolarizing) {
  cmat y = cmat::Zero(2, 2), z = cmat::Identity(2, 2);
  y(0, 1) = cplx(0, -1);
  y(1, 0) = cplx(0, 1);
  z(1, 1) = -1;
  const QuantumChannel dep({0.5 * cmat::Identity(2, 2), 0.5 * pauli_x(), 0.5 * y, 0.5 * z}, 2, 2);
  Rng rng(2);
  for (int t = 0; t < 10; ++t) {
    const auto out = apply(dep, DensityMatrix::pure(random_pure_state(2, rng)));
    EXPECT_LT((out.matrix() - 0.5 * cmat::Identity(2, 2)).norm(), 1e-14);
  }
}

TEST(Channel, RejectsNonTracePreserving) {
  EXPECT_THROW(QuantumChannel({0.5 * cmat::Identity(2, 2)}, 2, 2), numerical_error);
}

TEST(Channel, ChoiRoundTripAndCompression) {
  Rng rng(3);
  const QuantumChannel e = random_channel(3, 12, rng);
  const QuantumChannel c = e.compressed();
  EXPECT_LE(c.kraus().size(), 9u);
  EXPECT_LT((c.choi() - e.choi()).norm(), 1e-10);
  const QuantumChannel r = QuantumChannel::from_choi(e.choi(), 3, 3);
  EXPECT_LT((r.superoperator() - e.superoperator()).norm(), 1e-10);
  const DensityMatrix rho(random_density_matrix(3, rng));
  EXPECT_LT((apply(c, rho).matrix() - apply(e, rho).matrix()).norm(), 1e-10);
}

TEST(Channel, FromLinearMap) {
  Rng rng(4);
  const cmat U = haar_unitary(3, rng);
  const QuantumChannel e = QuantumChannel::from_linear_map(3, 3, [&](const cmat &x) { return cmat(U * x * U.adjoint()); });
  EXPECT_LT((e.superoperator() - QuantumChannel::unitary(U).superoperator()).norm(), 1e-12);
}

TEST(Channel, ComposeAndAdjoint) {
  Rng rng(5);
  const QuantumChannel a = random_channel(2, 3, rng), b = random_channel(2, 2, rng);
  const DensityMatrix rho(random_density_matrix(2, rng));
  EXPECT_LT((apply(compose(a, b), rho).matrix() - apply(a, apply(b, rho)).matrix()).norm(), 1e-12);
  const cmat X = ginibre(2, 2, rng);
  const cplx lhs = (X.adjoint() * a.apply(rho.matrix())).trace();
  const cplx rhs = (a.apply_adjoint(X).adjoint() * rho.matrix()).trace();
  EXPECT_LT(std::abs(lhs - rhs), 1e-12);
}

TEST(TraceDistance, Examples) {
  const auto zero = DensityMatrix::pure(cvec::Unit(2, 0)), one = DensityMatrix::pure(cvec::Unit(2, 1));
  cvec plus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  EXPECT_NEAR(trace_distance(zero, zero), 0, 1e-15);
  EXPECT_NEAR(trace_distance(zero, one), 1, 1e-15);
  EXPECT_NEAR(trace_distance(zero, DensityMatrix::pure(plus)), 1 / std::sqrt(2.0), 1e-14);
}

TEST(TraceDistance, PureStateOracle) {
  Rng rng(6);
  for (int t = 0; t < 50; ++t) {
    const cvec a = random_pure_state(4, rng), b = random_pure_state(4, rng);
    const double want = std::sqrt(1 - std::norm(a.dot(b)));
    EXPECT_NEAR(trace_distance(DensityMatrix::pure(a), DensityMatrix::pure(b)), want, 1e-12);
  }
}

TEST(OperatorNorm, Examples) {
  EXPECT_NEAR(operator_norm(cmat::Identity(4, 4)), 1, 1e-15);
  cmat d = cmat::Zero(2, 2);
  d(0, 0) = 3;
  d(1, 1) = cplx(0, -4);
  EXPECT_NEAR(operator_norm(d), 4, 1e-14);
  Rng rng(7);
  const cmat U = haar_unitary(3, rng), V = haar_unitary(3, rng);
  const cmat D = U - V;
  Eigen::SelfAdjointEigenSolver<cmat> es(D.adjoint() * D);
  EXPECT_NEAR(operator_norm(D), std::sqrt(es.eigenvalues().maxCoeff()), 1e-12);
}

TEST(ChannelDistance, Examples) {
  const auto id = QuantumChannel::identity(2);
  EXPECT_NEAR(channel_distance(id, id).value, 0, 1e-15);
  EXPECT_NEAR(channel_distance(id, QuantumChannel::unitary(pauli_x())).value, 1, 1e-12);
  for (double th : {std::numbers::pi / 2, 0.3, 2.5}) {
    cmat u = cmat::Identity(2, 2);
    u(1, 1) = std::polar(1.0, th);
    EXPECT_NEAR(channel_distance(id, QuantumChannel::unitary(u)).value, std::abs(std::sin(th / 2)), 1e-10);
  }
}

TEST(ChannelDistance, WitnessReproducesValue) {
  Rng rng(8);
  for (Index d : {2, 3, 5}) {
    const QuantumChannel a = random_channel(d, 2, rng), b = random_channel(d, 3, rng);
    const auto est = channel_distance(a, b, quick(9));
    const cmat diff = a.apply(est.witness_state) - b.apply(est.witness_state);
    EXPECT_NEAR(0.5 * hermitian_trace_norm(diff), est.value, 1e-9);
    EXPECT_NEAR((est.witness_projector * diff).trace().real(), est.value, 1e-9);
    EXPECT_TRUE(est.converged);
  }
}

TEST(ChannelDistance, DepolarizingClosedForm) {
  // rho -> (1 - p) rho + p I/2 differs from the identity by p/2 on every pure input.
  const double p = 0.3;
  cmat y = cmat::Zero(2, 2), z = cmat::Identity(2, 2);
  y(0, 1) = cplx(0, -1);
  y(1, 0) = cplx(0, 1);
  z(1, 1) = -1;
  const double a = std::sqrt(1 - 3 * p / 4), b = std::sqrt(p / 4);
  const QuantumChannel dep({a * cmat::Identity(2, 2), b * pauli_x(), b * y, b * z}, 2, 2);
  EXPECT_NEAR(channel_distance(QuantumChannel::identity(2), dep).value, p / 2, 1e-12);
}

TEST(ChannelDistance, MatchesBruteForceOnQubits) {
  Rng rng(10);
  for (int t = 0; t < 5; ++t) {
    const QuantumChannel a = random_channel(2, 2, rng), b = random_channel(2, 2, rng);
    double brute = 0;
    const int n = 200;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j < 2 * n; ++j) {
        const double th = std::numbers::pi * i / n, ph = std::numbers::pi * j / n;
        cvec psi(2);
        psi << std::cos(th / 2), std::polar(std::sin(th / 2), ph);
        const cmat r = psi * psi.adjoint();
        brute = std::max(brute, 0.5 * hermitian_trace_norm(cmat(a.apply(r) - b.apply(r))));
      }
    const double est = channel_distance(a, b, quick(t)).value;
    EXPECT_GE(est, brute - 1e-12);
    EXPECT_LT(est - brute, 1e-3);
  }
}

TEST(ChannelDistance, NonDecreasingInRestarts) {
  Rng rng(12);
  const QuantumChannel a = random_channel(6, 2, rng), b = random_channel(6, 2, rng);
  double prev = 0;
  for (int r : {1, 2, 4, 8, 16}) {
    DistanceOptions o;
    o.restarts = r;
    o.seed = 99;
    const double v = channel_distance(a, b, o).value;
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(ChannelDistance, Subadditivity) {
  Rng rng(13);
  for (int t = 0; t < 20; ++t) {
    const Index d = 2 + t % 2;
    const auto e1 = random_channel(d, 2, rng), e1p = random_channel(d, 2, rng);
    const auto e2 = random_channel(d, 2, rng), e2p = random_channel(d, 2, rng);
    const double lhs = channel_distance(compose(e1, e2), compose(e1p, e2p), quick(t)).value;
    const double rhs = channel_distance(e1, e1p, quick(t)).value + channel_distance(e2, e2p, quick(t)).value;
    EXPECT_LE(lhs, rhs + 1e-6);
  }
}

TEST(ChannelDistance, Convexity) {
  Rng rng(14);
  for (int t = 0; t < 20; ++t) {
    const auto e = random_channel(2, 2, rng);
    std::vector<QuantumChannel> parts{random_channel(2, 2, rng), random_channel(2, 2, rng), random_channel(2, 1, rng)};
    std::vector<double> w{uniform01(rng), uniform01(rng), uniform01(rng)};
    const double s = w[0] + w[1] + w[2];
    for (auto &x : w) x /= s;
    double rhs = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) rhs += w[i] * channel_distance(e, parts[i], quick(t)).value;
    EXPECT_LE(channel_distance(e, QuantumChannel::mixture(parts, w), quick(t)).value, rhs + 1e-6);
  }
}

TEST(ChannelDistance, PartialTraceMonotonicity) {
  Rng rng(15);
  for (int t = 0; t < 10; ++t) {
    const auto j1 = random_channel(4, 2, rng), j2 = random_channel(4, 2, rng);
    const cmat sigma = random_density_matrix(2, rng);
    auto reduce = [&](const QuantumChannel &j) {
      return QuantumChannel::from_linear_map(2, 2, [&](const cmat &x) {
        return cmat(partial_trace_second(cmat(j.apply(kron(x, sigma))), 2, 2));
      });
    };
    EXPECT_LE(channel_distance(reduce(j1), reduce(j2), quick(t)).value, channel_distance(j1, j2, quick(t)).value + 1e-6);
  }
}

TEST(ChannelDistance, UnitaryBound) {
  Rng rng(16);
  for (int t = 0; t < 30; ++t) {
    const Index d = 2 + t % 3;
    const cmat U = haar_unitary(d, rng);
    const cmat V = U * hermitian_exp(cmat(ginibre(d, d, rng) + ginibre(d, d, rng).adjoint()), 0.1 * uniform01(rng));
    const double n = operator_norm(U - V);
    EXPECT_LE(channel_distance(QuantumChannel::unitary(U), QuantumChannel::unitary(V), quick(t)).value, n + 0.5 * n * n + 1e-6);
  }
}

TEST(Lemma1, TrivialCases) {
  Rng rng(17);
  const DensityMatrix rho(random_density_matrix(3, rng));
  const cmat basis = haar_unitary(3, rng);
  const auto one = lemma1_check(cmat::Identity(3, 3), cmat::Identity(3, 3), rho, basis);
  EXPECT_NEAR(one.lhs, 1, 1e-12);
  EXPECT_NEAR(one.rhs, 1, 1e-12);
  const auto zero = lemma1_check(cmat::Zero(3, 3), cmat::Zero(3, 3), rho, basis);
  EXPECT_EQ(zero.lhs, 0);
  EXPECT_EQ(zero.rhs, 0);
  EXPECT_THROW(lemma1_check(cmat::Identity(3, 3), cmat::Identity(3, 3), rho, cmat::Ones(3, 3)), std::invalid_argument);
}

TEST(Lemma1, RandomContractions) {
  Rng rng(18);
  for (int t = 0; t < 200; ++t) {
    cmat o1 = ginibre(3, 3, rng), o2 = ginibre(3, 3, rng);
    o1 /= operator_norm(o1) * (1 + uniform01(rng));
    o2 /= operator_norm(o2) * (1 + uniform01(rng));
    const DensityMatrix rho(random_density_matrix(3, rng));
    Eigen::ComplexEigenSolver<cmat> es(o1 * rho.matrix() * o2);
    cmat basis = es.eigenvectors();
    Eigen::HouseholderQR<cmat> qr(basis);
    basis = qr.householderQ();
    const auto r = lemma1_check(o1, o2, rho, basis);
    EXPECT_LE(r.lhs, r.rhs + 1e-12);
  }
}
