#pragma once

#include "rotframe/linalg.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace rotframe {

/// Hermitian, unit-trace, positive semidefinite (all to 1e-10).
class DensityMatrix {
public:
  explicit DensityMatrix(cmat matrix);
  static DensityMatrix pure(const cvec &psi);
  static DensityMatrix maximally_mixed(Index dim);

  const cmat &matrix() const { return m_; }
  Index dim() const { return m_.rows(); }

private:
  cmat m_;
};

/// Completely positive trace-preserving map as a Kraus list
/// (each K is dim_out x dim_in, sum K^dagger K = I to 1e-8).
class QuantumChannel {
public:
  QuantumChannel(std::vector<cmat> kraus, Index dim_in, Index dim_out);

  static QuantumChannel identity(Index dim);
  static QuantumChannel unitary(const cmat &u);
  /// Kraus form of an arbitrary linear CPTP map, via its Choi matrix.
  static QuantumChannel from_linear_map(Index dim_in, Index dim_out,
                                        const std::function<cmat(const cmat &)> &map);
  /// Kraus form from a Choi matrix C = sum_ij |i><j| (x) E(|i><j|).
  static QuantumChannel from_choi(const cmat &choi, Index dim_in, Index dim_out);
  /// Convex combination sum p_i eps_i.
  static QuantumChannel mixture(const std::vector<QuantumChannel> &channels, const std::vector<double> &weights);

  const std::vector<cmat> &kraus() const { return kraus_; }
  Index dim_in() const { return dim_in_; }
  Index dim_out() const { return dim_out_; }

  cmat apply(const cmat &rho) const;
  /// Heisenberg-picture adjoint: sum K^dagger X K.
  cmat apply_adjoint(const cmat &x) const;
  /// Column-major vec convention: vec(E(rho)) = S vec(rho).
  cmat superoperator() const;
  cmat choi() const;
  double trace_preservation_residual() const;

  /// Same channel with at most dim_in * dim_out Kraus operators.
  QuantumChannel compressed() const;

private:
  std::vector<cmat> kraus_;
  Index dim_in_ = 0;
  Index dim_out_ = 0;
};

/// outer(inner(rho)).
QuantumChannel compose(const QuantumChannel &outer, const QuantumChannel &inner);

DensityMatrix apply(const QuantumChannel &channel, const DensityMatrix &rho);

/// (1/2) sum |eig(rho1 - rho2)|.
double trace_distance(const DensityMatrix &rho1, const DensityMatrix &rho2);

/// Largest singular value.
double operator_norm(const cmat &a);

struct DistanceOptions {
  int restarts = 8;
  double tol = 1e-12;
  std::uint64_t seed = 0x5eed;
  /// Quasi-uniform pure-state screen, used when dim_in <= 4.
  int grid_points = 100000;
  int max_iterations = 500;
};

struct DistanceEstimate {
  double value = 0;
  cmat witness_state;
  cmat witness_projector;
  int restarts_used = 0;
  bool converged = false;
};

/// Lower estimate of d(eps1, eps2) = max_rho (1/2)||eps1(rho) - eps2(rho)||_1.
///
/// Only pure inputs are searched (the objective is convex in rho).  Each
/// ascent start is improved by the update psi <- top eigenvector of
/// Delta^dagger(P+ - P-), which never decreases the objective; for
/// dim_in <= 4 the best points of a deterministic quasi-uniform grid are
/// used as additional starts.  The witness reproduces the returned value.
DistanceEstimate channel_distance(const QuantumChannel &eps1, const QuantumChannel &eps2,
                                  const DistanceOptions &options = {});
DistanceEstimate channel_distance(const QuantumChannel &eps1, const QuantumChannel &eps2, int restarts, double tol);

struct Lemma1Check {
  double lhs = 0;
  double rhs = 0;
};

/// lhs = sum_i |<i|O1 rho O2|i>| over the columns of `basis`, rhs = ||O1|| ||O2||.
Lemma1Check lemma1_check(const cmat &o1, const cmat &o2, const DensityMatrix &rho, const cmat &basis);

} // namespace rotframe
