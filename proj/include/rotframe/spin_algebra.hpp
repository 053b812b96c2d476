#pragma once

// Angular-momentum arithmetic on direct sums of SU(2) irreps.
//
// Conventions used everywhere in the library:
//  * Clebsch-Gordan coefficients follow Condon-Shortley:
//    cg(l1, l1, l2, J - l1, J, J) > 0.
//  * A SystemSpace orders its basis by ascending l, then ascending
//    degeneracy index delta, then ascending m.  Every matrix built here is
//    expressed in that order.

#include "rotframe/half_int.hpp"
#include "rotframe/linalg.hpp"

#include <vector>

namespace rotframe {

struct Sector {
  HalfInt l;
  int multiplicity = 1;
};

struct BasisLabel {
  HalfInt l;
  int delta = 0;
  HalfInt m;
};

/// Direct sum of spin irreps with multiplicities: T(R) = (+)_l T_l(R) (x) I_n(l).
class SystemSpace {
public:
  SystemSpace() = default;
  /// Sectors are sorted by l; repeated l values are merged.
  explicit SystemSpace(std::vector<Sector> sectors);
  static SystemSpace irrep(HalfInt l, int multiplicity = 1);

  Index dim() const { return static_cast<Index>(labels_.size()); }
  bool empty() const { return labels_.empty(); }
  HalfInt max_l() const;
  const std::vector<Sector> &sectors() const { return sectors_; }
  const BasisLabel &label(Index i) const { return labels_[static_cast<std::size_t>(i)]; }
  const std::vector<BasisLabel> &labels() const { return labels_; }

  /// Canonical index of |l, delta, m>; throws if absent.
  Index index(HalfInt l, int delta, HalfInt m) const;
  /// First canonical index of sector l (the |l, 0, -l> state).
  Index sector_offset(HalfInt l) const;
  int multiplicity(HalfInt l) const;

  /// Canonical indices of the L_z = M eigenspace, in (l, delta) order.
  std::vector<Index> lz_eigenspace(HalfInt M) const;
  /// Distinct m values present, ascending.
  std::vector<HalfInt> lz_spectrum() const;

  friend bool operator==(const SystemSpace &a, const SystemSpace &b);

private:
  std::vector<Sector> sectors_;
  std::vector<BasisLabel> labels_;
};

/// Clebsch-Gordan coefficient <l1 m1; l2 m2 | J M>.
///
/// Evaluated from the Racah closed form with log-factorials in extended
/// precision and the alternating sum normalised to its largest term, so it
/// stays accurate for l2 ~ 1e6.  Returns exactly 0 when a selection rule
/// fails.  Throws std::invalid_argument when some l - m is not an integer or
/// an l is negative.
double cg(HalfInt l1, HalfInt m1, HalfInt l2, HalfInt m2, HalfInt J, HalfInt M);

struct AngularMomentum {
  cmat z, plus, minus, x, y;
};

/// Lz, L+, L-, Lx = (L+ + L-)/2, Ly = (L+ - L-)/(2i) in the canonical basis.
AngularMomentum angular_momentum_operators(const SystemSpace &space);

/// exp(-i angle (axis . L)).  The axis must be a unit vector to 1e-12.
cmat rotation_unitary(const SystemSpace &space, const Eigen::Vector3d &axis, double angle);

/// Isometry between the product basis  system (x) spin-l_rf  and the coupled
/// basis |j, M, lambda> with lambda = (l1, delta).
///
/// Coupled vectors use the frame-first coupling order
///   |j M lambda> = sum_m cg(l_rf, M - m, l1, m; j, M) |l1 delta m> |l_rf, M - m>,
/// which makes the overlap <j=l_rf+m, j, lambda | l1 m delta; l_rf l_rf>
/// non-negative.  Product index = system_index * (2 l_rf + 1) + (m_rf + l_rf).
/// Blocks are produced on demand; the full matrix is only built by dense().
class CoupledBasisMap {
public:
  struct Multiplet {
    HalfInt l1;
    int delta = 0;
  };
  struct Block {
    HalfInt j;
    HalfInt M;
    std::vector<Index> product_rows;
    rmat coefficients; // product_rows.size() x multiplets(j).size()
  };

  CoupledBasisMap(SystemSpace space, HalfInt l_rf);

  const SystemSpace &system() const { return space_; }
  HalfInt frame_l() const { return l_rf_; }
  Index frame_dim() const { return l_rf_.twice() + 1; }
  Index product_dim() const { return space_.dim() * frame_dim(); }
  Index product_index(Index system_index, HalfInt m_rf) const;

  /// All total j, ascending.
  std::vector<HalfInt> total_j() const;
  /// lambda labels coupling to j, in (l1, delta) order.
  std::vector<Multiplet> multiplets(HalfInt j) const;
  Block block(HalfInt j, HalfInt M) const;

  /// Coupled space: one sector per j with multiplicity |multiplets(j)|.
  SystemSpace coupled_space() const;
  /// product_dim x product_dim orthogonal matrix; columns in coupled_space()
  /// canonical order.
  rmat dense() const;

private:
  SystemSpace space_;
  HalfInt l_rf_;
};

CoupledBasisMap couple(const SystemSpace &space, HalfInt l_rf);

/// Quantities from the proof of the large-frame overlap bound.
struct Lemma2Terms {
  double A = 0, B = 0, D = 0;
  HalfInt l_tot, m_tot;
};

struct Lemma2Overlap {
  double overlap_sq = 0;
  double asymptotic_bound = 0;
  double general_bound = 0;
  Lemma2Terms terms;
};

/// |<(j = m1 + l2, m = m1 + l2 - k) | l1 m1; l2, l2 - k>|^2 with its two
/// lower bounds.
Lemma2Overlap lemma2_overlap(HalfInt l1, HalfInt m1, HalfInt l2, int k);

} // namespace rotframe
