#pragma once

// Group-covariant channels and their symmetric Stinespring unitaries, for
// SU(2) and the cyclic groups Z_n.

#include "rotframe/channels.hpp"
#include "rotframe/spin_algebra.hpp"

#include <cstdint>
#include <vector>

namespace rotframe {

/// SU(2): rotation by `angle` about `axis`.  Z_n: generator to the `power`.
struct GroupElement {
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  double angle = 0;
  int power = 0;
};

class GroupRep {
public:
  enum class Kind { SU2, Cyclic };

  static GroupRep su2(SystemSpace space);
  /// T(g) = diag(omega^c), omega = exp(2 pi i / n); charges are reduced mod n.
  static GroupRep cyclic(int n, std::vector<int> charges);

  Kind kind() const { return kind_; }
  int order() const { return n_; }
  Index dim() const;
  const SystemSpace &space() const { return space_; }
  const std::vector<int> &charges() const { return charges_; }

  cmat represent(const GroupElement &g) const;
  /// u^{(j)}(g) on the irrep labelled j (charge j for Z_n, a 1x1 matrix).
  cmat irrep(HalfInt j, const GroupElement &g) const;
  Index irrep_dim(HalfInt j) const;
  /// Label of the conjugate irrep (j itself for SU(2), -j mod n for Z_n).
  HalfInt conjugate(HalfInt j) const;

  /// SU(2): Lz, Lx, Ly.  Z_n: the generator unitary.
  std::vector<cmat> generators() const;
  /// `samples` seeded random rotations for SU(2); all n elements for Z_n.
  std::vector<GroupElement> elements(int samples, std::uint64_t seed) const;

private:
  Kind kind_ = Kind::SU2;
  SystemSpace space_;
  int n_ = 0;
  std::vector<int> charges_;
};

struct CovariantKraus {
  HalfInt j;
  HalfInt m;
  int alpha = 0;
  cmat K;
};

/// Kraus operators K_{j m alpha} forming irreducible tensor operators.
struct CovariantKrausSet {
  std::vector<CovariantKraus> entries;

  Index dim() const;
  QuantumChannel channel() const;
};

struct CovarianceReport {
  /// Lz / ladder relations (SU(2)) or zero for Z_n.
  double infinitesimal_residual = 0;
  /// T K T^dagger - sum u_{m'm} K_{m'} over the checked elements.
  double group_residual = 0;
  double max_residual = 0;
  int elements_checked = 0;
};

/// Throws std::invalid_argument if some (j, alpha) family lacks a component.
CovarianceReport verify_covariant_kraus(const CovariantKrausSet &set, const GroupRep &rep, int samples,
                                        std::uint64_t seed = 0xc0de);

struct DilationResult {
  cmat unitary_S;
  GroupRep ancilla;
  Index singlet_index = 0;
  cmat P0, P1, P2;
  /// d_sys * d_anc x d_sys, psi -> sum K psi (x) |conj(j), m, alpha>.
  cmat isometry_S;
  /// Ancilla index of |conj(j), m, alpha> for each Kraus entry, in entry order.
  std::vector<Index> ancilla_index;
  /// Ancilla coefficient of that vector (the (-1)^{j-m} phase for SU(2)).
  std::vector<double> ancilla_phase;

  Index system_dim() const { return isometry_S.cols(); }
  Index ancilla_dim() const { return ancilla.dim(); }
  /// rho -> tr_anc(S (rho (x) |0><0|) S^dagger).
  QuantumChannel induced_channel() const;
};

/// Joint index convention: system major, system_index * d_anc + ancilla_index.
DilationResult build_dilation(const CovariantKrausSet &set, const GroupRep &rep);

struct InvariantComponent {
  HalfInt j;
  double p = 0;
  DensityMatrix rho;
};

/// rho = sum_j p_j (I_j / tr I_j) (x) rho^{(j)}; sectors with p_j < 1e-14 are
/// dropped.  Throws std::invalid_argument with the commutator norm if rho is
/// not invariant to 1e-8.
std::vector<InvariantComponent> decompose_invariant_state(const DensityMatrix &rho, const GroupRep &rep);
cmat reassemble_invariant_state(const std::vector<InvariantComponent> &parts, const GroupRep &rep);

struct Purification {
  cvec state;
  GroupRep ancilla;
};

/// Invariant pure state on system (x) ancilla whose system marginal is rho.
Purification invariant_purification(const DensityMatrix &rho, const GroupRep &rep);

} // namespace rotframe
