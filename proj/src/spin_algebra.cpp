#include "rotframe/spin_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rotframe {

// ---------------------------------------------------------------- SystemSpace

SystemSpace::SystemSpace(std::vector<Sector> sectors) {
  std::sort(sectors.begin(), sectors.end(), [](const Sector &a, const Sector &b) { return a.l < b.l; });
  for (const auto &s : sectors) {
    if (s.l.twice() < 0) throw std::invalid_argument("negative angular momentum " + s.l.to_string());
    if (s.multiplicity < 0) throw std::invalid_argument("negative multiplicity");
    if (s.multiplicity == 0) continue;
    if (!sectors_.empty() && sectors_.back().l == s.l)
      sectors_.back().multiplicity += s.multiplicity;
    else
      sectors_.push_back(s);
  }
  for (const auto &s : sectors_)
    for (int delta = 0; delta < s.multiplicity; ++delta)
      for (HalfInt m = -s.l; m <= s.l; m += 1) labels_.push_back({s.l, delta, m});
}

SystemSpace SystemSpace::irrep(HalfInt l, int multiplicity) {
  return SystemSpace({Sector{l, multiplicity}});
}

HalfInt SystemSpace::max_l() const {
  if (sectors_.empty()) throw std::invalid_argument("empty system space has no max_l");
  return sectors_.back().l;
}

Index SystemSpace::sector_offset(HalfInt l) const {
  Index offset = 0;
  for (const auto &s : sectors_) {
    if (s.l == l) return offset;
    offset += static_cast<Index>(s.l.twice() + 1) * s.multiplicity;
  }
  throw std::invalid_argument("sector l=" + l.to_string() + " not present");
}

int SystemSpace::multiplicity(HalfInt l) const {
  for (const auto &s : sectors_)
    if (s.l == l) return s.multiplicity;
  return 0;
}

Index SystemSpace::index(HalfInt l, int delta, HalfInt m) const {
  const Index offset = sector_offset(l);
  if (delta < 0 || delta >= multiplicity(l) || abs(m) > l || !same_parity(l, m))
    throw std::invalid_argument("no basis state |" + l.to_string() + "," + std::to_string(delta) + "," +
                                m.to_string() + ">");
  return offset + static_cast<Index>(delta) * (l.twice() + 1) + (m + l).as_integer();
}

std::vector<Index> SystemSpace::lz_eigenspace(HalfInt M) const {
  std::vector<Index> out;
  for (Index i = 0; i < dim(); ++i)
    if (labels_[static_cast<std::size_t>(i)].m == M) out.push_back(i);
  return out;
}

std::vector<HalfInt> SystemSpace::lz_spectrum() const {
  std::vector<HalfInt> ms;
  for (const auto &lab : labels_) ms.push_back(lab.m);
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  return ms;
}

bool operator==(const SystemSpace &a, const SystemSpace &b) {
  if (a.sectors_.size() != b.sectors_.size()) return false;
  for (std::size_t i = 0; i < a.sectors_.size(); ++i)
    if (a.sectors_[i].l != b.sectors_[i].l || a.sectors_[i].multiplicity != b.sectors_[i].multiplicity)
      return false;
  return true;
}

// ------------------------------------------------------------ Clebsch-Gordan

namespace {

long double log_factorial(std::int64_t n) { return std::lgamma(static_cast<long double>(n) + 1.0L); }

void require_pair(HalfInt l, HalfInt m, const char *name) {
  if (l.twice() < 0) throw std::invalid_argument(std::string("cg: negative ") + name);
  if (!same_parity(l, m))
    throw std::invalid_argument(std::string("cg: ") + name + "=" + l.to_string() + " and its projection " +
                                m.to_string() + " differ by a non-integer");
}

} // namespace

double cg(HalfInt l1, HalfInt m1, HalfInt l2, HalfInt m2, HalfInt J, HalfInt M) {
  require_pair(l1, m1, "l1");
  require_pair(l2, m2, "l2");
  require_pair(J, M, "J");
  if (abs(m1) > l1 || abs(m2) > l2 || abs(M) > J) return 0.0;
  if (M != m1 + m2) return 0.0;
  if (J < abs(l1 - l2) || J > l1 + l2) return 0.0;

  // With the checks above every argument below is a non-negative integer.
  const std::int64_t a = (l1 + l2 - J).as_integer();
  const std::int64_t b = (l1 - m1).as_integer();
  const std::int64_t c = (l2 + m2).as_integer();
  const std::int64_t d = (J - l2 + m1).as_integer();
  const std::int64_t e = (J - l1 - m2).as_integer();

  const long double log_prefactor =
      0.5L * (std::log(static_cast<long double>(J.twice() + 1)) + log_factorial((J + l1 - l2).as_integer()) +
              log_factorial((J - l1 + l2).as_integer()) + log_factorial(a) -
              log_factorial((l1 + l2 + J).as_integer() + 1) + log_factorial((J + M).as_integer()) +
              log_factorial((J - M).as_integer()) + log_factorial(b) + log_factorial((l1 + m1).as_integer()) +
              log_factorial((l2 - m2).as_integer()) + log_factorial(c));

  const std::int64_t kmin = std::max<std::int64_t>({0, -d, -e});
  const std::int64_t kmax = std::min({a, b, c});
  if (kmin > kmax) return 0.0;

  // log|t_k| with t_k = (-1)^k / [k! (a-k)! (b-k)! (c-k)! (d+k)! (e+k)!];
  // successive terms from the exact term ratio.
  std::vector<long double> log_terms;
  log_terms.reserve(static_cast<std::size_t>(kmax - kmin + 1));
  long double lt = -(log_factorial(kmin) + log_factorial(a - kmin) + log_factorial(b - kmin) +
                     log_factorial(c - kmin) + log_factorial(d + kmin) + log_factorial(e + kmin));
  log_terms.push_back(lt);
  for (std::int64_t k = kmin; k < kmax; ++k) {
    const long double num = std::log(static_cast<long double>(a - k)) + std::log(static_cast<long double>(b - k)) +
                            std::log(static_cast<long double>(c - k));
    const long double den = std::log(static_cast<long double>(k + 1)) +
                            std::log(static_cast<long double>(d + k + 1)) +
                            std::log(static_cast<long double>(e + k + 1));
    lt += num - den;
    log_terms.push_back(lt);
  }
  const long double top = *std::max_element(log_terms.begin(), log_terms.end());
  long double sum = 0.0L;
  for (std::size_t i = 0; i < log_terms.size(); ++i) {
    const long double sign = ((kmin + static_cast<std::int64_t>(i)) % 2 == 0) ? 1.0L : -1.0L;
    sum += sign * std::exp(log_terms[i] - top);
  }
  if (sum == 0.0L) return 0.0;
  const long double magnitude = std::exp(log_prefactor + top + std::log(std::fabs(sum)));
  return static_cast<double>(sum < 0 ? -magnitude : magnitude);
}

// -------------------------------------------------------- angular momentum

namespace {

struct SpinBlock {
  rmat z, plus;
};

SpinBlock spin_block(HalfInt l) {
  const Index n = l.twice() + 1;
  SpinBlock s{rmat::Zero(n, n), rmat::Zero(n, n)};
  const double lv = l.value();
  for (Index i = 0; i < n; ++i) {
    const double m = -lv + static_cast<double>(i);
    s.z(i, i) = m;
    if (i + 1 < n) s.plus(i + 1, i) = std::sqrt(lv * (lv + 1) - m * (m + 1));
  }
  return s;
}

} // namespace

AngularMomentum angular_momentum_operators(const SystemSpace &space) {
  if (space.empty()) throw std::invalid_argument("angular_momentum_operators: empty space");
  const Index d = space.dim();
  AngularMomentum L{cmat::Zero(d, d), cmat::Zero(d, d), cmat::Zero(d, d), cmat(), cmat()};
  Index offset = 0;
  for (const auto &sector : space.sectors()) {
    const SpinBlock b = spin_block(sector.l);
    const Index n = b.z.rows();
    for (int delta = 0; delta < sector.multiplicity; ++delta, offset += n) {
      L.z.block(offset, offset, n, n) = b.z.cast<cplx>();
      L.plus.block(offset, offset, n, n) = b.plus.cast<cplx>();
    }
  }
  L.minus = L.plus.adjoint();
  L.x = 0.5 * (L.plus + L.minus);
  L.y = (L.plus - L.minus) / cplx(0, 2);
  return L;
}

cmat rotation_unitary(const SystemSpace &space, const Eigen::Vector3d &axis, double angle) {
  if (std::abs(axis.norm() - 1.0) > 1e-12) throw std::invalid_argument("rotation_unitary: axis is not a unit vector");
  const Index d = space.dim();
  cmat u = cmat::Zero(d, d);
  Index offset = 0;
  for (const auto &sector : space.sectors()) {
    const SpinBlock b = spin_block(sector.l);
    const cmat plus = b.plus.cast<cplx>();
    const cmat minus = plus.adjoint();
    const cmat gen = axis.x() * 0.5 * (plus + minus) + axis.y() * (plus - minus) / cplx(0, 2) +
                     axis.z() * b.z.cast<cplx>();
    const cmat block = hermitian_exp(gen, -angle);
    const Index n = block.rows();
    for (int delta = 0; delta < sector.multiplicity; ++delta, offset += n) u.block(offset, offset, n, n) = block;
  }
  return u;
}

// ---------------------------------------------------------------- coupling

CoupledBasisMap::CoupledBasisMap(SystemSpace space, HalfInt l_rf) : space_(std::move(space)), l_rf_(l_rf) {
  if (space_.empty()) throw std::invalid_argument("couple: empty system space");
  if (l_rf_.twice() < 0) throw std::invalid_argument("couple: negative frame angular momentum");
}

Index CoupledBasisMap::product_index(Index system_index, HalfInt m_rf) const {
  return system_index * frame_dim() + (m_rf + l_rf_).as_integer();
}

std::vector<HalfInt> CoupledBasisMap::total_j() const {
  std::vector<HalfInt> js;
  for (const auto &s : space_.sectors())
    for (HalfInt j = abs(l_rf_ - s.l); j <= l_rf_ + s.l; j += 1) js.push_back(j);
  std::sort(js.begin(), js.end());
  js.erase(std::unique(js.begin(), js.end()), js.end());
  return js;
}

std::vector<CoupledBasisMap::Multiplet> CoupledBasisMap::multiplets(HalfInt j) const {
  std::vector<Multiplet> out;
  for (const auto &s : space_.sectors()) {
    if (j < abs(l_rf_ - s.l) || j > l_rf_ + s.l || !(j - l_rf_ - s.l).is_integer()) continue;
    for (int delta = 0; delta < s.multiplicity; ++delta) out.push_back({s.l, delta});
  }
  return out;
}

CoupledBasisMap::Block CoupledBasisMap::block(HalfInt j, HalfInt M) const {
  const auto lambdas = multiplets(j);
  if (lambdas.empty() || abs(M) > j || !same_parity(j, M))
    throw std::invalid_argument("couple: no coupled block j=" + j.to_string() + " M=" + M.to_string());
  Block blk{j, M, {}, rmat()};
  std::vector<std::pair<Index, Index>> where; // (row, column)
  std::vector<double> coeff;
  for (std::size_t c = 0; c < lambdas.size(); ++c) {
    const auto &lam = lambdas[c];
    for (HalfInt m = -lam.l1; m <= lam.l1; m += 1) {
      const HalfInt m_rf = M - m;
      if (abs(m_rf) > l_rf_) continue;
      const double v = cg(l_rf_, m_rf, lam.l1, m, j, M);
      blk.product_rows.push_back(product_index(space_.index(lam.l1, lam.delta, m), m_rf));
      where.emplace_back(static_cast<Index>(blk.product_rows.size()) - 1, static_cast<Index>(c));
      coeff.push_back(v);
    }
  }
  blk.coefficients = rmat::Zero(static_cast<Index>(blk.product_rows.size()), static_cast<Index>(lambdas.size()));
  for (std::size_t i = 0; i < where.size(); ++i) blk.coefficients(where[i].first, where[i].second) = coeff[i];
  return blk;
}

SystemSpace CoupledBasisMap::coupled_space() const {
  std::vector<Sector> sectors;
  for (HalfInt j : total_j()) sectors.push_back({j, static_cast<int>(multiplets(j).size())});
  return SystemSpace(std::move(sectors));
}

rmat CoupledBasisMap::dense() const {
  if (product_dim() > 20000) throw std::length_error("couple: product space too large to materialise");
  const SystemSpace coupled = coupled_space();
  rmat out = rmat::Zero(product_dim(), product_dim());
  for (const auto &sector : coupled.sectors()) {
    for (HalfInt M = -sector.l; M <= sector.l; M += 1) {
      const Block blk = block(sector.l, M);
      for (int delta = 0; delta < sector.multiplicity; ++delta) {
        const Index col = coupled.index(sector.l, delta, M);
        for (std::size_t r = 0; r < blk.product_rows.size(); ++r)
          out(blk.product_rows[r], col) = blk.coefficients(static_cast<Index>(r), delta);
      }
    }
  }
  return out;
}

CoupledBasisMap couple(const SystemSpace &space, HalfInt l_rf) { return CoupledBasisMap(space, l_rf); }

// ------------------------------------------------------ large-frame overlap

Lemma2Overlap lemma2_overlap(HalfInt l1, HalfInt m1, HalfInt l2, int k) {
  if (abs(m1) > l1 || !same_parity(l1, m1)) throw std::invalid_argument("lemma2_overlap: invalid (l1, m1)");
  if (k < 0 || k > l2.twice()) throw std::invalid_argument("lemma2_overlap: k must lie in [0, 2 l2]");

  Lemma2Overlap out;
  out.terms.l_tot = m1 + l2;
  out.terms.m_tot = m1 + l2 - HalfInt(k);
  const double c = cg(l1, m1, l2, l2 - HalfInt(k), out.terms.l_tot, out.terms.m_tot);
  out.overlap_sq = c * c;

  const long double L1 = l1.value_ld(), M1 = m1.value_ld(), L2 = l2.value_ld(), K = k;
  out.asymptotic_bound =
      static_cast<double>(1.0L - ((L1 * L1 + L1 - M1 * M1) * (2 * K + 1) - M1) / (2 * L2));

  const long double A = L1 * (L1 + 1) - M1 * (M1 + 1) - 2 * M1 * K;
  const long double B2 = (L1 + M1 + 1) * (L1 - M1) * (2 * L2 - K) * (1 + K);
  const long double D2 = (L1 - M1 + 1) * (L1 + M1) * K * (2 * L2 - K + 1);
  const long double lt = out.terms.l_tot.value_ld();
  out.terms.A = static_cast<double>(A);
  out.terms.B = static_cast<double>(std::sqrt(std::max(B2, 0.0L)));
  out.terms.D = static_cast<double>(std::sqrt(std::max(D2, 0.0L)));
  out.general_bound = static_cast<double>(1.0L - (A * A + B2 + D2) / (4 * lt * lt));
  return out;
}

} // namespace rotframe
