#pragma once

// Universality of alternating Lz- and Lx-invariant unitaries: eigenspace
// test, Lie closure, commutator steps, synthesis, and the error budget for
// sequences executed through finite frames.

#include "rotframe/channels.hpp"
#include "rotframe/half_int.hpp"
#include "rotframe/linalg.hpp"

#include <cstdint>
#include <vector>

namespace rotframe {

struct OverlapReport {
  bool ok = false;
  /// Smallest ||P_A P_B|| over eigenspace pairs, and the eigenvalues of that pair.
  double worst = 0;
  double eigenvalue_a = 0;
  double eigenvalue_b = 0;
};

/// True iff no eigenspace of A is orthogonal to an eigenspace of B
/// (eigenvalues within tol are grouped; "orthogonal" means ||P_A P_B|| <= tol).
OverlapReport eigenspace_overlap_ok(const cmat &A, const cmat &B, double tol = 1e-9);

struct LieClosure {
  int dimension = 0;
  bool converged = false;
  int depth = 0;
};

/// Real dimension of the Lie algebra generated by i * generators.
LieClosure lie_closure_dimension(const std::vector<cmat> &generators, int max_depth = 32);

struct CommutatorStep {
  cmat product;
  /// exp(-[H1, H2] dt^2).
  cmat reference;
  double defect = 0;
};

/// e^{i H1 dt} e^{i H2 dt} e^{-i H1 dt} e^{-i H2 dt}.
CommutatorStep commutator_step(const cmat &H1, const cmat &H2, double dt);

/// exp(-i theta Lz) and exp(-i theta Lx) on spin 1/2, ascending-m order.
cmat rz(double theta);
cmat rx(double theta);

struct EulerAngles {
  double phase = 0, alpha = 0, beta = 0, gamma = 0;
  double residual = 0;
};

/// U = e^{i phase} Rz(alpha) Rx(beta) Rz(gamma).
EulerAngles euler_decompose(const cmat &U);

enum class Axis { Z, X };

struct AlternatingFactor {
  Axis axis;
  cmat unitary;
};

struct AlternatingSequence {
  /// Product is factors[0] * factors[1] * ... .
  std::vector<AlternatingFactor> factors;
  cmat target;
  double residual = 0;
  bool converged = false;

  cmat product() const;
};

struct SynthesisOptions {
  int restarts = 32;
  int max_iterations = 3000;
  std::uint64_t seed = 0x5e9;
};

/// Alternating diagonal phase layers (Lz eigenbasis, Lx eigenbasis, ...) on
/// a single spin-l irrep.  d = 2 is solved exactly by euler_decompose and an
/// Lz-invariant target by one layer.
AlternatingSequence synthesize_alternating(const cmat &U, int layers, double tol, const SynthesisOptions &options = {});

/// Maps the Lz eigenbasis onto the Lx eigenbasis: R Lz R^dagger = Lx, with R a
/// rotation about y by pi/2 on the spin-(d-1)/2 irrep.
cmat lx_basis_rotation(Index dim);

/// Principal branch, x >= 0.
double lambert_w(double x);

struct SchemeBudget {
  double A = 1;
  double C_sq = 0;
  double x = 0;
  double sigma = 0;
  double tau = 0;
  /// e^{-W(x)} + W(x)^2 / x.
  double total_error_bound = 0;
  /// tau + 4 A C^2 ln^2(1/tau) at tau = e^{-W(x)}.
  double objective_at_optimum = 0;
  double n_frames = 0;
  /// ln^2(x) / x.
  double large_x_approx = 0;
};

SchemeBudget scheme2_budget(HalfInt l_sys, HalfInt l_RZ, double A = 1);
SchemeBudget scheme2_budget_from_x(double x, double A = 1);
/// tau + 4 A C^2 ln^2(1/tau).
double scheme2_objective(double tau, double A, double C_sq);

struct Scheme2Result {
  QuantumChannel channel;
  double measured_error = 0;
  double bound = 0;
  bool converged = false;
};

/// Euler sequence for a qubit, each factor through its own frame of spin
/// l_RZ; with reused frames the Z frame serves both Z factors.  Bound 12 C^2
/// (fresh) or 16 C^2 (reused).
Scheme2Result scheme2_simulate(const cmat &U, HalfInt l_RZ, bool fresh_frames, const DistanceOptions &distance = {});

} // namespace rotframe
