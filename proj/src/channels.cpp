#include "rotframe/channels.hpp"

#include "rotframe/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rotframe {

// ------------------------------------------------------------ DensityMatrix

DensityMatrix::DensityMatrix(cmat matrix) : m_(std::move(matrix)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) throw std::invalid_argument("density matrix must be square and non-empty");
  if (hermiticity_residual(m_) > 1e-10) throw std::invalid_argument("density matrix is not Hermitian");
  if (std::abs(m_.trace() - cplx(1, 0)) > 1e-10) throw std::invalid_argument("density matrix trace differs from 1");
  m_ = 0.5 * (m_ + m_.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<cmat> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10) throw std::invalid_argument("density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::pure(const cvec &psi) {
  const cvec v = psi / psi.norm();
  return DensityMatrix(v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
  return DensityMatrix(cmat::Identity(dim, dim) / static_cast<double>(dim));
}

// ----------------------------------------------------------- QuantumChannel

QuantumChannel::QuantumChannel(std::vector<cmat> kraus, Index dim_in, Index dim_out)
    : kraus_(std::move(kraus)), dim_in_(dim_in), dim_out_(dim_out) {
  if (kraus_.empty()) throw std::invalid_argument("channel needs at least one Kraus operator");
  for (const auto &k : kraus_)
    if (k.rows() != dim_out_ || k.cols() != dim_in_) throw std::invalid_argument("Kraus operator has wrong shape");
  const double res = trace_preservation_residual();
  if (res > 1e-8)
    throw numerical_error("Kraus list is not trace preserving (residual " + std::to_string(res) + ")");
}

double QuantumChannel::trace_preservation_residual() const {
  cmat sum = cmat::Zero(dim_in_, dim_in_);
  for (const auto &k : kraus_) sum.noalias() += k.adjoint() * k;
  return (sum - cmat::Identity(dim_in_, dim_in_)).cwiseAbs().maxCoeff();
}

QuantumChannel QuantumChannel::identity(Index dim) { return QuantumChannel({cmat::Identity(dim, dim)}, dim, dim); }

QuantumChannel QuantumChannel::unitary(const cmat &u) { return QuantumChannel({u}, u.cols(), u.rows()); }

QuantumChannel QuantumChannel::from_choi(const cmat &choi, Index dim_in, Index dim_out) {
  Eigen::SelfAdjointEigenSolver<cmat> es(0.5 * (choi + choi.adjoint()));
  const double top = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
  std::vector<cmat> kraus;
  for (Index e = es.eigenvalues().size() - 1; e >= 0; --e) {
    const double lambda = es.eigenvalues()(e);
    if (lambda <= 1e-14 * top) break;
    cmat k(dim_out, dim_in);
    for (Index i = 0; i < dim_in; ++i)
      for (Index o = 0; o < dim_out; ++o) k(o, i) = std::sqrt(lambda) * es.eigenvectors()(i * dim_out + o, e);
    kraus.push_back(std::move(k));
  }
  return QuantumChannel(std::move(kraus), dim_in, dim_out);
}

QuantumChannel QuantumChannel::from_linear_map(Index dim_in, Index dim_out,
                                               const std::function<cmat(const cmat &)> &map) {
  cmat choi = cmat::Zero(dim_in * dim_out, dim_in * dim_out);
  for (Index i = 0; i < dim_in; ++i)
    for (Index j = 0; j < dim_in; ++j) {
      cmat unit = cmat::Zero(dim_in, dim_in);
      unit(i, j) = 1;
      choi.block(i * dim_out, j * dim_out, dim_out, dim_out) = map(unit);
    }
  return from_choi(choi, dim_in, dim_out);
}

QuantumChannel QuantumChannel::mixture(const std::vector<QuantumChannel> &channels,
                                       const std::vector<double> &weights) {
  if (channels.empty() || channels.size() != weights.size()) throw std::invalid_argument("mixture: size mismatch");
  std::vector<cmat> kraus;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (weights[i] < 0) throw std::invalid_argument("mixture: negative weight");
    if (channels[i].dim_in() != channels[0].dim_in() || channels[i].dim_out() != channels[0].dim_out())
      throw std::invalid_argument("mixture: dimension mismatch");
    if (weights[i] == 0) continue;
    for (const auto &k : channels[i].kraus()) kraus.push_back(std::sqrt(weights[i]) * k);
  }
  return QuantumChannel(std::move(kraus), channels[0].dim_in(), channels[0].dim_out());
}

cmat QuantumChannel::apply(const cmat &rho) const {
  if (rho.rows() != dim_in_ || rho.cols() != dim_in_) throw std::invalid_argument("channel input has wrong dimension");
  cmat out = cmat::Zero(dim_out_, dim_out_);
  for (const auto &k : kraus_) out.noalias() += k * rho * k.adjoint();
  return out;
}

cmat QuantumChannel::apply_adjoint(const cmat &x) const {
  cmat out = cmat::Zero(dim_in_, dim_in_);
  for (const auto &k : kraus_) out.noalias() += k.adjoint() * x * k;
  return out;
}

cmat QuantumChannel::superoperator() const {
  cmat s = cmat::Zero(dim_out_ * dim_out_, dim_in_ * dim_in_);
  for (const auto &k : kraus_) s.noalias() += kron(k.conjugate(), k);
  return s;
}

cmat QuantumChannel::choi() const {
  cmat c = cmat::Zero(dim_in_ * dim_out_, dim_in_ * dim_out_);
  cvec v(dim_in_ * dim_out_);
  for (const auto &k : kraus_) {
    for (Index i = 0; i < dim_in_; ++i) v.segment(i * dim_out_, dim_out_) = k.col(i);
    c.noalias() += v * v.adjoint();
  }
  return c;
}

QuantumChannel QuantumChannel::compressed() const {
  if (static_cast<Index>(kraus_.size()) <= dim_in_ * dim_out_) return *this;
  return from_choi(choi(), dim_in_, dim_out_);
}

QuantumChannel compose(const QuantumChannel &outer, const QuantumChannel &inner) {
  if (outer.dim_in() != inner.dim_out()) throw std::invalid_argument("compose: dimension mismatch");
  std::vector<cmat> kraus;
  kraus.reserve(outer.kraus().size() * inner.kraus().size());
  for (const auto &a : outer.kraus())
    for (const auto &b : inner.kraus()) kraus.push_back(a * b);
  return QuantumChannel(std::move(kraus), inner.dim_in(), outer.dim_out()).compressed();
}

DensityMatrix apply(const QuantumChannel &channel, const DensityMatrix &rho) {
  if (rho.dim() != channel.dim_in()) throw std::invalid_argument("apply: dimension mismatch");
  cmat out = channel.apply(rho.matrix());
  return DensityMatrix(0.5 * (out + out.adjoint()));
}

double trace_distance(const DensityMatrix &rho1, const DensityMatrix &rho2) {
  if (rho1.dim() != rho2.dim()) throw std::invalid_argument("trace_distance: dimension mismatch");
  return 0.5 * hermitian_trace_norm(cmat(rho1.matrix() - rho2.matrix()));
}

double operator_norm(const cmat &a) { return spectral_norm(a); }

// ---------------------------------------------------------- channel distance

namespace {

/// Difference of two channels as a superoperator, with the evaluation
/// kernels the ascent needs.
class DifferenceMap {
public:
  DifferenceMap(const QuantumChannel &a, const QuantumChannel &b)
      : din_(a.dim_in()), dout_(a.dim_out()), d_(a.superoperator() - b.superoperator()) {}

  Index dim_in() const { return din_; }

  cmat output(const cvec &psi) const {
    cvec vrho(din_ * din_);
    for (Index j = 0; j < din_; ++j) vrho.segment(j * din_, din_) = psi * std::conj(psi(j));
    const cvec vout = d_ * vrho;
    cmat m = Eigen::Map<const cmat>(vout.data(), dout_, dout_);
    return 0.5 * (m + m.adjoint());
  }

  /// Half trace norm of Delta(psi psi^dagger) for a screening pass.
  double fast_value(const cvec &psi) const {
    const cmat m = output(psi);
    if (dout_ == 2) {
      const double a = m(0, 0).real(), d = m(1, 1).real();
      const double r = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(m(0, 1)));
      const double mid = 0.5 * (a + d);
      return 0.5 * (std::abs(mid + r) + std::abs(mid - r));
    }
    if (dout_ == 3) {
      const auto e = eigenvalues3(m);
      return 0.5 * (std::abs(e[0]) + std::abs(e[1]) + std::abs(e[2]));
    }
    return 0.5 * hermitian_trace_norm(m);
  }

  cmat adjoint_apply(const cmat &s) const {
    const cvec vs = Eigen::Map<const cvec>(s.data(), s.size());
    const cvec vg = d_.adjoint() * vs;
    cmat g = Eigen::Map<const cmat>(vg.data(), din_, din_);
    return 0.5 * (g + g.adjoint());
  }

private:
  static std::array<double, 3> eigenvalues3(const cmat &a) {
    const double q = a.trace().real() / 3.0;
    cmat b = a - q * cmat::Identity(3, 3);
    const double p2 = (b * b).trace().real() / 6.0;
    if (p2 <= 1e-300) return {q, q, q};
    const double p = std::sqrt(p2);
    b /= p;
    const double r = std::clamp(0.5 * b.determinant().real(), -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double e1 = q + 2 * p * std::cos(phi);
    const double e3 = q + 2 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    return {e1, 3 * q - e1 - e3, e3};
  }

  Index din_, dout_;
  cmat d_;
};

struct AscentResult {
  double value = 0;
  cvec psi;
  bool converged = false;
};

AscentResult ascend(const DifferenceMap &delta, cvec psi, const DistanceOptions &opt) {
  AscentResult res;
  double previous = -1;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const cmat m = delta.output(psi);
    Eigen::SelfAdjointEigenSolver<cmat> es(m);
    const rvec &lam = es.eigenvalues();
    const double value = 0.5 * lam.cwiseAbs().sum();
    if (value <= previous + opt.tol) {
      // keep whichever of the last two states was better
      if (value > res.value) {
        res.value = value;
        res.psi = psi;
      }
      res.converged = true;
      return res;
    }
    res.value = value;
    res.psi = psi;
    previous = value;
    // Subgradient of the trace norm: sign(Delta); zero eigenvalues take +1.
    rvec sign(lam.size());
    for (Index k = 0; k < lam.size(); ++k) sign(k) = lam(k) >= -1e-12 ? 1.0 : -1.0;
    const cmat s = es.eigenvectors() * sign.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    const cmat g = delta.adjoint_apply(s);
    Eigen::SelfAdjointEigenSolver<cmat> gs(g);
    psi = gs.eigenvectors().col(gs.eigenvalues().size() - 1);
  }
  return res;
}

double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base), f = inv, r = 0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

cvec grid_state(Index dim, int i, int count) {
  cvec psi(dim);
  if (dim == 1) {
    psi(0) = 1;
    return psi;
  }
  if (dim == 2) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double theta = std::acos(std::clamp(z, -1.0, 1.0));
    const double phi = i * std::numbers::pi * (3.0 - std::sqrt(5.0));
    psi(0) = std::cos(theta / 2);
    psi(1) = std::polar(std::sin(theta / 2), phi);
    return psi;
  }
  static constexpr std::array<std::uint64_t, 8> primes{2, 3, 5, 7, 11, 13, 17, 19};
  const auto k = static_cast<std::uint64_t>(i) + 1;
  std::vector<double> cuts;
  for (Index c = 0; c + 1 < dim; ++c) cuts.push_back(radical_inverse(k, primes[static_cast<std::size_t>(c)]));
  std::sort(cuts.begin(), cuts.end());
  double prev = 0;
  for (Index c = 0; c < dim; ++c) {
    const double next = c + 1 < dim ? cuts[static_cast<std::size_t>(c)] : 1.0;
    const double weight = std::max(next - prev, 0.0);
    prev = next;
    const double phase =
        c == 0 ? 0.0 : 2 * std::numbers::pi * radical_inverse(k, primes[static_cast<std::size_t>(dim - 1 + c - 1)]);
    psi(c) = std::polar(std::sqrt(weight), phase);
  }
  return psi / psi.norm();
}

} // namespace

DistanceEstimate channel_distance(const QuantumChannel &eps1, const QuantumChannel &eps2,
                                  const DistanceOptions &opt) {
  if (eps1.dim_in() != eps2.dim_in() || eps1.dim_out() != eps2.dim_out())
    throw std::invalid_argument("channel_distance: dimension mismatch");
  if (opt.restarts < 1) throw std::invalid_argument("channel_distance: restarts must be >= 1");

  const DifferenceMap delta(eps1, eps2);
  const Index d = eps1.dim_in();

  AscentResult best;
  best.value = -1;
  auto consider = [&](AscentResult r) {
    if (r.value > best.value) best = std::move(r);
  };

  for (int r = 0; r < opt.restarts; ++r) {
    Rng rng(derive_seed(opt.seed, static_cast<std::uint64_t>(r)));
    consider(ascend(delta, random_pure_state(d, rng), opt));
  }

  if (d <= 4 && opt.grid_points > 0) {
    constexpr int kept = 4;
    std::vector<std::pair<double, int>> top;
    for (int i = 0; i < opt.grid_points; ++i) {
      const double v = delta.fast_value(grid_state(d, i, opt.grid_points));
      if (static_cast<int>(top.size()) < kept || v > top.back().first) {
        top.emplace_back(v, i);
        std::sort(top.begin(), top.end(), [](auto &a, auto &b) { return a.first > b.first; });
        if (static_cast<int>(top.size()) > kept) top.pop_back();
      }
    }
    for (const auto &[v, i] : top) consider(ascend(delta, grid_state(d, i, opt.grid_points), opt));
  }

  DistanceEstimate est;
  est.restarts_used = opt.restarts;
  est.converged = best.converged;
  est.witness_state = best.psi * best.psi.adjoint();
  const cmat m = delta.output(best.psi);
  Eigen::SelfAdjointEigenSolver<cmat> es(m);
  cmat proj = cmat::Zero(m.rows(), m.cols());
  for (Index k = 0; k < m.rows(); ++k)
    if (es.eigenvalues()(k) > 0) proj += es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
  est.witness_projector = proj;
  est.value = std::clamp((proj * m).trace().real(), 0.0, 1.0);
  return est;
}

DistanceEstimate channel_distance(const QuantumChannel &eps1, const QuantumChannel &eps2, int restarts, double tol) {
  DistanceOptions opt;
  opt.restarts = restarts;
  opt.tol = tol;
  return channel_distance(eps1, eps2, opt);
}

Lemma1Check lemma1_check(const cmat &o1, const cmat &o2, const DensityMatrix &rho, const cmat &basis) {
  const Index d = rho.dim();
  if (o1.rows() != d || o1.cols() != d || o2.rows() != d || o2.cols() != d || basis.rows() != d)
    throw std::invalid_argument("lemma1_check: dimension mismatch");
  if ((basis.adjoint() * basis - cmat::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("lemma1_check: basis is not orthonormal");
  const cmat x = o1 * rho.matrix() * o2;
  Lemma1Check out;
  for (Index i = 0; i < basis.cols(); ++i) out.lhs += std::abs(basis.col(i).dot(x * basis.col(i)));
  out.rhs = operator_norm(o1) * operator_norm(o2);
  return out;
}

} // namespace rotframe
