#include "rotframe/universality.hpp"

#include "rotframe/random.hpp"
#include "rotframe/rf_schemes.hpp"
#include "rotframe/spin_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rotframe {

// ------------------------------------------------------------ eigenspaces

namespace {

std::vector<cmat> eigenspaces(const cmat &h, double tol, std::vector<double> &values) {
  Eigen::SelfAdjointEigenSolver<cmat> es(h);
  std::vector<cmat> out;
  const Index n = h.rows();
  Index start = 0;
  for (Index i = 1; i <= n; ++i) {
    if (i < n && es.eigenvalues()(i) - es.eigenvalues()(i - 1) <= tol) continue;
    out.push_back(es.eigenvectors().middleCols(start, i - start));
    values.push_back(es.eigenvalues().segment(start, i - start).mean());
    start = i;
  }
  return out;
}

} // namespace

OverlapReport eigenspace_overlap_ok(const cmat &A, const cmat &B, double tol) {
  if (A.rows() != A.cols() || A.rows() != B.rows() || B.rows() != B.cols())
    throw std::invalid_argument("eigenspace_overlap_ok: operators must be square of equal size");
  if (hermiticity_residual(A) > 1e-9 || hermiticity_residual(B) > 1e-9)
    throw std::invalid_argument("eigenspace_overlap_ok: operators must be Hermitian");
  std::vector<double> va, vb;
  const auto ea = eigenspaces(A, tol, va);
  const auto eb = eigenspaces(B, tol, vb);
  OverlapReport rep;
  rep.worst = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < ea.size(); ++a)
    for (std::size_t b = 0; b < eb.size(); ++b) {
      const double s = spectral_norm(cmat(ea[a].adjoint() * eb[b]));
      if (s < rep.worst) {
        rep.worst = s;
        rep.eigenvalue_a = va[a];
        rep.eigenvalue_b = vb[b];
      }
    }
  rep.ok = rep.worst > tol;
  return rep;
}

// ------------------------------------------------------------ Lie closure

LieClosure lie_closure_dimension(const std::vector<cmat> &generators, int max_depth) {
  if (generators.empty()) return {0, true, 0};
  const Index d = generators.front().rows();
  for (const auto &g : generators)
    if (g.rows() != d || g.cols() != d) throw std::invalid_argument("lie_closure_dimension: generators must be d x d");
  const int cap = static_cast<int>(d * d);

  std::vector<cmat> basis;
  std::vector<rvec> flat;
  auto flatten = [d](const cmat &m) {
    rvec v(2 * d * d);
    v.head(d * d) = Eigen::Map<const rvec, 0, Eigen::InnerStride<2>>(reinterpret_cast<const double *>(m.data()), d * d);
    v.tail(d * d) = Eigen::Map<const rvec, 0, Eigen::InnerStride<2>>(reinterpret_cast<const double *>(m.data()) + 1, d * d);
    return v;
  };
  auto try_add = [&](const cmat &m) {
    const double nrm = m.norm();
    if (nrm < 1e-12) return false;
    rvec v = flatten(m) / nrm;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto &b : flat) v -= b.dot(v) * b;
    const double r = v.norm();
    if (r <= 1e-8) return false;
    flat.push_back(v / r);
    basis.push_back(m / nrm);
    return true;
  };

  std::vector<cmat> frontier;
  for (const auto &g : generators)
    if (try_add(0.5 * (g + g.adjoint()))) frontier.push_back(basis.back());

  LieClosure out;
  while (!frontier.empty() && static_cast<int>(basis.size()) < cap) {
    if (out.depth >= max_depth) break;
    ++out.depth;
    std::vector<cmat> next;
    const std::vector<cmat> current = basis;
    for (const auto &a : current) {
      for (const auto &b : frontier) {
        if (try_add(cmat(cplx(0, 1) * commutator(a, b)))) next.push_back(basis.back());
        if (static_cast<int>(basis.size()) >= cap) break;
      }
      if (static_cast<int>(basis.size()) >= cap) break;
    }
    frontier = std::move(next);
  }
  out.dimension = static_cast<int>(basis.size());
  out.converged = frontier.empty() || out.dimension >= cap;
  return out;
}

// ------------------------------------------------------------ commutators

CommutatorStep commutator_step(const cmat &H1, const cmat &H2, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("commutator_step: dt must be positive");
  CommutatorStep out;
  out.product = hermitian_exp(H1, dt) * hermitian_exp(H2, dt) * hermitian_exp(H1, -dt) * hermitian_exp(H2, -dt);
  const cmat k = cplx(0, 1) * commutator(H1, H2);
  out.reference = hermitian_exp(cmat(0.5 * (k + k.adjoint())), dt * dt);
  out.defect = spectral_norm(cmat(out.product - out.reference));
  return out;
}

// ------------------------------------------------------------ Euler angles

cmat rz(double theta) {
  cmat u = cmat::Zero(2, 2);
  u(0, 0) = std::polar(1.0, theta / 2);
  u(1, 1) = std::polar(1.0, -theta / 2);
  return u;
}

cmat rx(double theta) {
  cmat u(2, 2);
  u << std::cos(theta / 2), cplx(0, -std::sin(theta / 2)), cplx(0, -std::sin(theta / 2)), std::cos(theta / 2);
  return u;
}

EulerAngles euler_decompose(const cmat &U) {
  if (U.rows() != 2 || U.cols() != 2) throw std::invalid_argument("euler_decompose: U must be 2 x 2");
  if (unitarity_residual(U) > 1e-8) throw std::invalid_argument("euler_decompose: U is not unitary");
  EulerAngles e;
  e.phase = std::arg(U.determinant()) / 2;
  const cmat v = U * std::polar(1.0, -e.phase);
  e.beta = 2 * std::atan2(std::abs(v(0, 1)), std::abs(v(0, 0)));
  const double sum = std::abs(v(0, 0)) > 1e-14 ? 2 * std::arg(v(0, 0)) : 0.0;
  const double diff = std::abs(v(0, 1)) > 1e-14 ? 2 * std::arg(cplx(0, 1) * v(0, 1)) : 0.0;
  e.alpha = 0.5 * (sum + diff);
  e.gamma = 0.5 * (sum - diff);
  const cmat w = std::polar(1.0, e.phase) * rz(e.alpha) * rx(e.beta) * rz(e.gamma);
  e.residual = spectral_norm(cmat(U - w));
  return e;
}

// ------------------------------------------------------------- synthesis

cmat AlternatingSequence::product() const {
  if (factors.empty()) return cmat::Identity(target.rows(), target.cols());
  cmat p = factors.front().unitary;
  for (std::size_t i = 1; i < factors.size(); ++i) p = p * factors[i].unitary;
  return p;
}

cmat lx_basis_rotation(Index dim) {
  return rotation_unitary(SystemSpace::irrep(HalfInt::from_twice(dim - 1)), Eigen::Vector3d::UnitY(),
                          std::numbers::pi / 2);
}

namespace {

struct Evaluation {
  double f = 0;
  rvec grad;
};

/// Limited-memory BFGS with Armijo backtracking.
rvec minimise_lbfgs(const std::function<Evaluation(const rvec &)> &fn, rvec x, int max_iterations, double &f_out) {
  constexpr int memory = 10;
  std::deque<rvec> S, Y;
  Evaluation cur = fn(x);
  for (int it = 0; it < max_iterations; ++it) {
    if (cur.grad.norm() < 1e-14 || cur.f < 1e-18) break;
    rvec q = cur.grad;
    std::vector<double> alpha(S.size());
    for (int i = static_cast<int>(S.size()) - 1; i >= 0; --i) {
      const auto ui = static_cast<std::size_t>(i);
      alpha[ui] = S[ui].dot(q) / Y[ui].dot(S[ui]);
      q -= alpha[ui] * Y[ui];
    }
    if (!S.empty()) q *= S.back().dot(Y.back()) / Y.back().squaredNorm();
    for (std::size_t i = 0; i < S.size(); ++i) {
      const double beta = Y[i].dot(q) / Y[i].dot(S[i]);
      q += (alpha[i] - beta) * S[i];
    }
    rvec dir = -q;
    double slope = cur.grad.dot(dir);
    if (slope >= 0) {
      dir = -cur.grad;
      slope = -cur.grad.squaredNorm();
      S.clear();
      Y.clear();
    }
    double step = S.empty() ? std::min(1.0, 1.0 / cur.grad.norm()) : 1.0;
    Evaluation nxt;
    rvec xn;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      xn = x + step * dir;
      nxt = fn(xn);
      if (nxt.f <= cur.f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const rvec s = xn - x, y = nxt.grad - cur.grad;
    if (s.dot(y) > 1e-20) {
      S.push_back(s);
      Y.push_back(y);
      if (static_cast<int>(S.size()) > memory) {
        S.pop_front();
        Y.pop_front();
      }
    }
    const double improvement = cur.f - nxt.f;
    x = xn;
    cur = nxt;
    if (improvement < 1e-18 && improvement >= 0 && cur.grad.norm() < 1e-10) break;
  }
  f_out = cur.f;
  return x;
}

cmat phase_layer(const rvec &theta, Index offset, Index d) {
  cmat dlay = cmat::Zero(d, d);
  for (Index j = 0; j < d; ++j) dlay(j, j) = std::polar(1.0, theta(offset + j));
  return dlay;
}

} // namespace

AlternatingSequence synthesize_alternating(const cmat &U, int layers, double tol, const SynthesisOptions &opt) {
  const Index d = U.rows();
  if (U.cols() != d || d < 1) throw std::invalid_argument("synthesize_alternating: target must be square");
  if (unitarity_residual(U) > 1e-8) throw std::invalid_argument("synthesize_alternating: target is not unitary");
  const auto lz = angular_momentum_operators(SystemSpace::irrep(HalfInt::from_twice(d - 1))).z;

  AlternatingSequence seq;
  seq.target = U;
  if (commutator(U, lz).cwiseAbs().maxCoeff() < 1e-10) {
    seq.factors.push_back({Axis::Z, U});
    seq.residual = phase_aligned_distance(U, seq.product());
    seq.converged = seq.residual <= tol;
    return seq;
  }
  if (d == 2) {
    const EulerAngles e = euler_decompose(U);
    seq.factors = {{Axis::Z, rz(e.alpha)}, {Axis::X, rx(e.beta)}, {Axis::Z, rz(e.gamma)}};
    seq.residual = phase_aligned_distance(U, seq.product());
    seq.converged = seq.residual <= tol;
    return seq;
  }
  if (layers < 3) throw std::invalid_argument("synthesize_alternating: at least 3 layers needed");

  const cmat R = lx_basis_rotation(d);
  const cmat Rh = R.adjoint();
  const cmat Uh = U.adjoint();
  const double dd = static_cast<double>(d * d);
  auto layer = [&](const rvec &th, int k) {
    const cmat p = phase_layer(th, k * d, d);
    return k % 2 == 0 ? p : cmat(R * p * Rh);
  };

  auto objective = [&](const rvec &th) {
    std::vector<cmat> D(static_cast<std::size_t>(layers));
    for (int k = 0; k < layers; ++k) D[static_cast<std::size_t>(k)] = layer(th, k);
    std::vector<cmat> prefix(static_cast<std::size_t>(layers) + 1), suffix(static_cast<std::size_t>(layers) + 1);
    prefix[0] = cmat::Identity(d, d);
    for (int k = 0; k < layers; ++k) prefix[static_cast<std::size_t>(k) + 1] = prefix[static_cast<std::size_t>(k)] * D[static_cast<std::size_t>(k)];
    suffix[static_cast<std::size_t>(layers)] = cmat::Identity(d, d);
    for (int k = layers - 1; k >= 0; --k) suffix[static_cast<std::size_t>(k)] = D[static_cast<std::size_t>(k)] * suffix[static_cast<std::size_t>(k) + 1];
    const cplx t = (Uh * prefix[static_cast<std::size_t>(layers)]).trace();
    Evaluation ev;
    ev.f = 1.0 - std::norm(t) / dd;
    ev.grad.resize(th.size());
    for (int k = 0; k < layers; ++k) {
      cmat m = suffix[static_cast<std::size_t>(k) + 1] * Uh * prefix[static_cast<std::size_t>(k)];
      if (k % 2 == 1) m = Rh * m * R;
      for (Index j = 0; j < d; ++j) {
        const cplx dt = cplx(0, 1) * std::polar(1.0, th(k * d + j)) * m(j, j);
        ev.grad(k * d + j) = -2.0 * std::real(std::conj(t) * dt) / dd;
      }
    }
    return ev;
  };

  double best_res = std::numeric_limits<double>::infinity();
  rvec best;
  for (int r = 0; r < opt.restarts; ++r) {
    Rng rng(derive_seed(opt.seed, static_cast<std::uint64_t>(r)));
    rvec th(layers * d);
    for (Index i = 0; i < th.size(); ++i) th(i) = 2 * std::numbers::pi * uniform01(rng);
    double f = 0;
    th = minimise_lbfgs(objective, th, opt.max_iterations, f);
    cmat prod = cmat::Identity(d, d);
    for (int k = 0; k < layers; ++k) prod = prod * layer(th, k);
    const double res = phase_aligned_distance(U, prod);
    if (res < best_res) {
      best_res = res;
      best = th;
    }
    if (best_res <= tol) break;
  }
  for (int k = 0; k < layers; ++k) seq.factors.push_back({k % 2 == 0 ? Axis::Z : Axis::X, layer(best, k)});
  seq.residual = phase_aligned_distance(U, seq.product());
  seq.converged = seq.residual <= tol;
  return seq;
}

// ------------------------------------------------------------ Lambert W

double lambert_w(double x) {
  if (!(x >= 0) || !std::isfinite(x)) throw std::invalid_argument("lambert_w: x must be finite and >= 0");
  if (x == 0) return 0;
  double w = x < 3 ? std::log1p(x) : std::log(x) - std::log(std::log(x));
  for (int it = 0; it < 64; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double step = f / (ew * (w + 1) - (w + 2) * f / (2 * w + 2));
    w -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(w))) break;
  }
  return w;
}

// ------------------------------------------------------------ scheme II

double scheme2_objective(double tau, double A, double C_sq) {
  const double l = std::log(1.0 / tau);
  return tau + 4.0 * A * C_sq * l * l;
}

SchemeBudget scheme2_budget_from_x(double x, double A) {
  if (!(A > 0)) throw std::invalid_argument("scheme2_budget: A must be positive");
  if (!(x > 0)) throw std::invalid_argument("scheme2_budget: x must be positive");
  SchemeBudget b;
  b.A = A;
  b.x = x;
  b.C_sq = 1.0 / (8.0 * A * x);
  b.sigma = lambert_w(x);
  b.tau = std::exp(-b.sigma);
  b.total_error_bound = b.tau + b.sigma * b.sigma / x;
  b.objective_at_optimum = scheme2_objective(b.tau, A, b.C_sq);
  b.n_frames = A * b.sigma * b.sigma;
  const double lx = std::log(x);
  b.large_x_approx = lx * lx / x;
  return b;
}

SchemeBudget scheme2_budget(HalfInt l_sys, HalfInt l_RZ, double A) {
  if (!(A > 0)) throw std::invalid_argument("scheme2_budget: A must be positive");
  const double c2 = frame_quality(l_sys, l_RZ);
  SchemeBudget b = scheme2_budget_from_x(1.0 / (8.0 * A * c2), A);
  b.C_sq = c2;
  return b;
}

Scheme2Result scheme2_simulate(const cmat &U, HalfInt l_RZ, bool fresh_frames, const DistanceOptions &distance) {
  const SystemSpace space = SystemSpace::irrep(HalfInt::half());
  const EulerAngles e = euler_decompose(U);
  const cmat R = lx_basis_rotation(2);
  const ZInvUnitary vg = ZInvUnitary::from_matrix(space, rz(e.gamma));
  const ZInvUnitary va = ZInvUnitary::from_matrix(space, rz(e.alpha));
  cmat vx = R.adjoint() * rx(e.beta) * R;
  vx = cmat(vx.diagonal().asDiagonal()); // exactly Lz-invariant
  const ZInvUnitary vxz = ZInvUnitary::from_matrix(space, vx);

  std::vector<cmat> kx;
  const LiftResult lx = lift_zinv(vxz, {l_RZ, 0});
  for (const auto &k : lx.channel.kraus()) kx.push_back(R * k * R.adjoint());
  const QuantumChannel chx(std::move(kx), 2, 2);
  const double C2 = frame_quality(HalfInt::half(), l_RZ);

  Scheme2Result out{QuantumChannel::identity(2), 0, 0, false};
  if (fresh_frames) {
    const QuantumChannel chg = lift_zinv(vg, {l_RZ, 0}).channel;
    const QuantumChannel cha = lift_zinv(va, {l_RZ, 0}).channel;
    out.channel = compose(cha, compose(chx, chg));
    out.bound = 12.0 * C2;
  } else {
    const cmat Wg = frame_window_isometry(vg, l_RZ, 0, 1);
    const cmat Wa = frame_window_isometry(va, l_RZ, 1, 2);
    std::vector<cmat> kx_joint;
    for (const auto &k : chx.kraus()) kx_joint.push_back(kron(k, cmat::Identity(2, 2)));
    out.channel = QuantumChannel::from_linear_map(2, 2, [&](const cmat &x) {
      cmat j = Wg * kron(x, cmat::Identity(1, 1)) * Wg.adjoint();
      cmat jx = cmat::Zero(j.rows(), j.cols());
      for (const auto &k : kx_joint) jx += k * j * k.adjoint();
      return partial_trace_second(cmat(Wa * jx * Wa.adjoint()), 2, 3);
    });
    out.bound = 16.0 * C2;
  }
  const auto est = channel_distance(QuantumChannel::unitary(U), out.channel, distance);
  out.measured_error = est.value;
  out.converged = est.converged;
  return out;
}

} // namespace rotframe
