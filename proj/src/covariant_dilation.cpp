#include "rotframe/covariant_dilation.hpp"

#include "rotframe/random.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rotframe {

namespace {

int mod(long long a, int n) { return static_cast<int>(((a % n) + n) % n); }

cplx root_of_unity(long long k, int n) {
  return std::polar(1.0, 2.0 * std::numbers::pi * mod(k, n) / n);
}

double sign_of(HalfInt j, HalfInt m) { return (j - m).as_integer() % 2 == 0 ? 1.0 : -1.0; }

double max_abs(const cmat &a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

} // namespace

// ------------------------------------------------------------------ GroupRep

GroupRep GroupRep::su2(SystemSpace space) {
  if (space.empty()) throw std::invalid_argument("SU(2) representation needs a non-empty space");
  GroupRep r;
  r.kind_ = Kind::SU2;
  r.space_ = std::move(space);
  return r;
}

GroupRep GroupRep::cyclic(int n, std::vector<int> charges) {
  if (n < 1) throw std::invalid_argument("cyclic group order must be >= 1");
  if (charges.empty()) throw std::invalid_argument("Z_n representation needs at least one charge");
  GroupRep r;
  r.kind_ = Kind::Cyclic;
  r.n_ = n;
  for (auto &c : charges) c = mod(c, n);
  r.charges_ = std::move(charges);
  return r;
}

Index GroupRep::dim() const {
  return kind_ == Kind::SU2 ? space_.dim() : static_cast<Index>(charges_.size());
}

cmat GroupRep::represent(const GroupElement &g) const {
  if (kind_ == Kind::SU2) return rotation_unitary(space_, g.axis, g.angle);
  cmat t = cmat::Zero(dim(), dim());
  for (Index i = 0; i < dim(); ++i)
    t(i, i) = root_of_unity(static_cast<long long>(charges_[static_cast<std::size_t>(i)]) * g.power, n_);
  return t;
}

cmat GroupRep::irrep(HalfInt j, const GroupElement &g) const {
  if (kind_ == Kind::SU2) return rotation_unitary(SystemSpace::irrep(j), g.axis, g.angle);
  if (!j.is_integer()) throw std::invalid_argument("Z_n irrep labels are integers");
  cmat u(1, 1);
  u(0, 0) = root_of_unity(j.as_integer() * g.power, n_);
  return u;
}

Index GroupRep::irrep_dim(HalfInt j) const { return kind_ == Kind::SU2 ? j.twice() + 1 : 1; }

HalfInt GroupRep::conjugate(HalfInt j) const {
  if (kind_ == Kind::SU2) return j;
  return HalfInt(mod(-j.as_integer(), n_));
}

std::vector<cmat> GroupRep::generators() const {
  if (kind_ == Kind::SU2) {
    const auto ops = angular_momentum_operators(space_);
    return {ops.z, ops.x, ops.y};
  }
  GroupElement g;
  g.power = 1;
  return {represent(g)};
}

std::vector<GroupElement> GroupRep::elements(int samples, std::uint64_t seed) const {
  std::vector<GroupElement> out;
  if (kind_ == Kind::Cyclic) {
    for (int p = 0; p < n_; ++p) {
      GroupElement g;
      g.power = p;
      out.push_back(g);
    }
    return out;
  }
  Rng rng(seed);
  std::normal_distribution<double> normal;
  for (int s = 0; s < samples; ++s) {
    GroupElement g;
    Eigen::Vector3d v;
    do {
      v = {normal(rng), normal(rng), normal(rng)};
    } while (v.norm() < 1e-6);
    g.axis = v.normalized();
    g.angle = 4.0 * std::numbers::pi * uniform01(rng);
    out.push_back(g);
  }
  return out;
}

// --------------------------------------------------------- CovariantKrausSet

Index CovariantKrausSet::dim() const {
  if (entries.empty()) throw std::invalid_argument("empty covariant Kraus set");
  return entries.front().K.cols();
}

QuantumChannel CovariantKrausSet::channel() const {
  std::vector<cmat> kraus;
  for (const auto &e : entries) kraus.push_back(e.K);
  return QuantumChannel(std::move(kraus), dim(), dim());
}

namespace {

using FamilyKey = std::pair<std::int64_t, int>; // (2j, alpha)

/// Entry position for every (j, alpha, m), after completeness checks.
std::map<FamilyKey, std::map<std::int64_t, std::size_t>> families(const CovariantKrausSet &set, const GroupRep &rep) {
  std::map<FamilyKey, std::map<std::int64_t, std::size_t>> fam;
  const Index d = set.dim();
  for (std::size_t i = 0; i < set.entries.size(); ++i) {
    const auto &e = set.entries[i];
    if (e.K.rows() != d || e.K.cols() != d) throw std::invalid_argument("Kraus operators must all be square of equal size");
    if (d != rep.dim()) throw std::invalid_argument("Kraus dimension does not match the representation");
    if (rep.kind() == GroupRep::Kind::Cyclic) {
      if (!e.j.is_integer() || e.j.as_integer() < 0 || e.j.as_integer() >= rep.order() || e.m != HalfInt(0))
        throw std::invalid_argument("Z_n Kraus labels must be j in [0, n) and m = 0");
    } else if (e.j.twice() < 0 || abs(e.m) > e.j || !same_parity(e.j, e.m)) {
      throw std::invalid_argument("invalid tensor label j=" + e.j.to_string() + " m=" + e.m.to_string());
    }
    auto &slot = fam[{e.j.twice(), e.alpha}];
    if (!slot.emplace(e.m.twice(), i).second)
      throw std::invalid_argument("duplicate tensor component j=" + e.j.to_string() + " m=" + e.m.to_string());
  }
  for (const auto &[key, comps] : fam) {
    const auto expected = static_cast<std::size_t>(rep.irrep_dim(HalfInt::from_twice(key.first)));
    if (comps.size() != expected)
      throw std::invalid_argument("tensor family j=" + HalfInt::from_twice(key.first).to_string() + " alpha=" +
                                  std::to_string(key.second) + " is missing components");
  }
  return fam;
}

} // namespace

CovarianceReport verify_covariant_kraus(const CovariantKrausSet &set, const GroupRep &rep, int samples,
                                        std::uint64_t seed) {
  const auto fam = families(set, rep);
  CovarianceReport report;

  if (rep.kind() == GroupRep::Kind::SU2) {
    const auto ops = angular_momentum_operators(rep.space());
    for (const auto &[key, comps] : fam) {
      const HalfInt j = HalfInt::from_twice(key.first);
      const long double jj = j.value_ld() * (j.value_ld() + 1);
      for (const auto &[m2, idx] : comps) {
        const HalfInt m = HalfInt::from_twice(m2);
        const cmat &k = set.entries[idx].K;
        report.infinitesimal_residual =
            std::max(report.infinitesimal_residual, max_abs(commutator(ops.z, k) - m.value() * k));
        for (int s : {+1, -1}) {
          const HalfInt next = m + HalfInt(s);
          const double coef = static_cast<double>(std::sqrt(std::max(0.0L, jj - m.value_ld() * next.value_ld())));
          cmat expected = cmat::Zero(k.rows(), k.cols());
          if (abs(next) <= j) expected = coef * set.entries[comps.at(next.twice())].K;
          const cmat &ladder = s > 0 ? ops.plus : ops.minus;
          report.infinitesimal_residual =
              std::max(report.infinitesimal_residual, max_abs(commutator(ladder, k) - expected));
        }
      }
    }
  }

  const auto elems = rep.elements(samples, seed);
  report.elements_checked = static_cast<int>(elems.size());
  for (const auto &g : elems) {
    const cmat t = rep.represent(g);
    for (const auto &[key, comps] : fam) {
      const HalfInt j = HalfInt::from_twice(key.first);
      const cmat u = rep.irrep(j, g);
      std::vector<std::size_t> order; // ascending m
      for (const auto &c : comps) order.push_back(c.second);
      for (std::size_t a = 0; a < order.size(); ++a) {
        cmat lhs = t * set.entries[order[a]].K * t.adjoint();
        for (std::size_t b = 0; b < order.size(); ++b)
          lhs -= u(static_cast<Index>(b), static_cast<Index>(a)) * set.entries[order[b]].K;
        report.group_residual = std::max(report.group_residual, max_abs(lhs));
      }
    }
  }
  report.max_residual = std::max(report.infinitesimal_residual, report.group_residual);
  return report;
}

// ------------------------------------------------------------------ dilation

DilationResult build_dilation(const CovariantKrausSet &set, const GroupRep &rep) {
  const auto check = verify_covariant_kraus(set, rep, 4);
  if (check.max_residual >= 1e-8)
    throw std::invalid_argument("Kraus set is not covariant (residual " + std::to_string(check.max_residual) + ")");
  set.channel(); // trace preservation

  const auto fam = families(set, rep);
  const Index d = set.dim();
  DilationResult res{cmat(), rep, 0, cmat(), cmat(), cmat(), cmat(), {}, {}};
  res.ancilla_index.resize(set.entries.size());
  res.ancilla_phase.resize(set.entries.size(), 1.0);

  if (rep.kind() == GroupRep::Kind::SU2) {
    std::map<std::int64_t, int> count;
    count[0] = 1; // the singlet |0> takes delta = 0 in the l = 0 sector
    std::map<FamilyKey, int> delta;
    for (const auto &[key, comps] : fam) delta[key] = count[key.first]++;
    std::vector<Sector> sectors;
    for (const auto &[j2, n] : count) sectors.push_back({HalfInt::from_twice(j2), n});
    const SystemSpace anc(sectors);
    res.ancilla = GroupRep::su2(anc);
    res.singlet_index = anc.index(HalfInt(0), 0, HalfInt(0));
    for (std::size_t i = 0; i < set.entries.size(); ++i) {
      const auto &e = set.entries[i];
      res.ancilla_index[i] = anc.index(e.j, delta.at({e.j.twice(), e.alpha}), -e.m);
      res.ancilla_phase[i] = sign_of(e.j, e.m);
    }
  } else {
    std::vector<int> charges{0};
    for (std::size_t i = 0; i < set.entries.size(); ++i) {
      charges.push_back(static_cast<int>(rep.conjugate(set.entries[i].j).as_integer()));
      res.ancilla_index[i] = static_cast<Index>(i) + 1;
    }
    res.ancilla = GroupRep::cyclic(rep.order(), charges);
    res.singlet_index = 0;
  }

  const Index da = res.ancilla.dim();
  const Index dj = d * da;
  res.isometry_S = cmat::Zero(dj, d);
  for (std::size_t i = 0; i < set.entries.size(); ++i)
    for (Index s = 0; s < d; ++s)
      res.isometry_S.row(s * da + res.ancilla_index[i]) += res.ancilla_phase[i] * set.entries[i].K.row(s);

  cmat e0 = cmat::Zero(dj, d);
  for (Index s = 0; s < d; ++s) e0(s * da + res.singlet_index, s) = 1;

  res.P0 = e0 * e0.adjoint();
  res.P1 = res.isometry_S * res.isometry_S.adjoint();
  res.P2 = cmat::Identity(dj, dj) - res.P0 - res.P1;
  res.unitary_S = res.isometry_S * e0.adjoint() + e0 * res.isometry_S.adjoint() + res.P2;

  const double overlap = max_abs(res.P0 * res.P1);
  if (overlap > 1e-10) throw numerical_error("P0 and P1 overlap (" + std::to_string(overlap) + ")");
  const double unit = unitarity_residual(res.unitary_S);
  if (unit > 1e-10) throw numerical_error("dilation is not unitary (residual " + std::to_string(unit) + ")");
  return res;
}

QuantumChannel DilationResult::induced_channel() const {
  const Index d = system_dim();
  const Index da = ancilla_dim();
  std::vector<cmat> kraus;
  for (Index a = 0; a < da; ++a) {
    cmat k(d, d);
    for (Index s = 0; s < d; ++s)
      for (Index t = 0; t < d; ++t) k(s, t) = unitary_S(s * da + a, t * da + singlet_index);
    if (k.cwiseAbs().maxCoeff() > 0) kraus.push_back(std::move(k));
  }
  return QuantumChannel(std::move(kraus), d, d);
}

// -------------------------------------------------------- invariant states

namespace {

double invariance_residual(const cmat &rho, const GroupRep &rep) {
  double r = 0;
  for (const auto &g : rep.generators()) r = std::max(r, spectral_norm(commutator(rho, g)));
  return r;
}

/// Index lists of the multiplicity-space basis for each irrep, one list per
/// irrep-basis vector (m for SU(2), a single list for Z_n).
struct SectorLayout {
  HalfInt j;
  std::vector<std::vector<Index>> rows; // rows[m][delta]
};

std::vector<SectorLayout> layout(const GroupRep &rep) {
  std::vector<SectorLayout> out;
  if (rep.kind() == GroupRep::Kind::SU2) {
    for (const auto &s : rep.space().sectors()) {
      SectorLayout lay{s.l, {}};
      for (HalfInt m = -s.l; m <= s.l; m += 1) {
        std::vector<Index> col;
        for (int delta = 0; delta < s.multiplicity; ++delta) col.push_back(rep.space().index(s.l, delta, m));
        lay.rows.push_back(std::move(col));
      }
      out.push_back(std::move(lay));
    }
    return out;
  }
  for (int q = 0; q < rep.order(); ++q) {
    std::vector<Index> col;
    for (Index i = 0; i < rep.dim(); ++i)
      if (rep.charges()[static_cast<std::size_t>(i)] == q) col.push_back(i);
    if (!col.empty()) out.push_back({HalfInt(q), {col}});
  }
  return out;
}

} // namespace

std::vector<InvariantComponent> decompose_invariant_state(const DensityMatrix &rho, const GroupRep &rep) {
  if (rho.dim() != rep.dim()) throw std::invalid_argument("state dimension does not match the representation");
  const double r = invariance_residual(rho.matrix(), rep);
  if (r > 1e-8) throw std::invalid_argument("state is not group invariant (commutator norm " + std::to_string(r) + ")");

  std::vector<InvariantComponent> out;
  for (const auto &lay : layout(rep)) {
    const auto n = static_cast<Index>(lay.rows.front().size());
    cmat block = cmat::Zero(n, n);
    for (const auto &col : lay.rows)
      for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < n; ++b) block(a, b) += rho.matrix()(col[static_cast<std::size_t>(a)], col[static_cast<std::size_t>(b)]);
    const double p = block.trace().real();
    if (p < 1e-12) continue;
    block /= p;
    out.push_back({lay.j, p, DensityMatrix(0.5 * (block + block.adjoint()))});
  }
  return out;
}

cmat reassemble_invariant_state(const std::vector<InvariantComponent> &parts, const GroupRep &rep) {
  cmat rho = cmat::Zero(rep.dim(), rep.dim());
  const auto lays = layout(rep);
  for (const auto &part : parts) {
    const auto it = std::find_if(lays.begin(), lays.end(), [&](const SectorLayout &l) { return l.j == part.j; });
    if (it == lays.end()) throw std::invalid_argument("component j=" + part.j.to_string() + " not in representation");
    const double w = part.p / static_cast<double>(it->rows.size());
    for (const auto &col : it->rows)
      for (std::size_t a = 0; a < col.size(); ++a)
        for (std::size_t b = 0; b < col.size(); ++b)
          rho(col[a], col[b]) += w * part.rho.matrix()(static_cast<Index>(a), static_cast<Index>(b));
  }
  return rho;
}

Purification invariant_purification(const DensityMatrix &rho, const GroupRep &rep) {
  const auto parts = decompose_invariant_state(rho, rep);
  const bool su2 = rep.kind() == GroupRep::Kind::SU2;
  std::vector<int> conj_charges;
  if (!su2)
    for (int c : rep.charges()) conj_charges.push_back(static_cast<int>(rep.conjugate(HalfInt(c)).as_integer()));
  Purification out{cvec::Zero(rep.dim() * rep.dim()), su2 ? GroupRep::su2(rep.space()) : GroupRep::cyclic(rep.order(), conj_charges)};

  const Index da = out.ancilla.dim();
  const auto lays = layout(rep);
  for (const auto &part : parts) {
    const auto &lay = *std::find_if(lays.begin(), lays.end(), [&](const SectorLayout &l) { return l.j == part.j; });
    Eigen::SelfAdjointEigenSolver<cmat> es(part.rho.matrix());
    const cmat phi = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().cast<cplx>().asDiagonal() *
                     es.eigenvectors().adjoint();
    const auto dm = static_cast<Index>(lay.rows.size());
    const double w = std::sqrt(part.p / static_cast<double>(dm));
    for (Index mi = 0; mi < dm; ++mi) {
      // partner |conj(j), m> = (-1)^{j-m} |j, -m> for SU(2); same slot for Z_n
      const Index partner = su2 ? dm - 1 - mi : mi;
      const double sign = su2 ? sign_of(part.j, -part.j + HalfInt(static_cast<int>(mi))) : 1.0;
      const auto &sys = lay.rows[static_cast<std::size_t>(mi)];
      const auto &anc = lay.rows[static_cast<std::size_t>(partner)];
      for (std::size_t a = 0; a < sys.size(); ++a)
        for (std::size_t b = 0; b < anc.size(); ++b)
          out.state(sys[a] * da + anc[b]) += w * sign * phi(static_cast<Index>(a), static_cast<Index>(b));
    }
  }
  return out;
}

} // namespace rotframe
