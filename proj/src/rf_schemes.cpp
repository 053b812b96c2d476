#include "rotframe/rf_schemes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rotframe {

namespace {

double max_abs(const cmat &a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

cmat submatrix(const cmat &a, const std::vector<Index> &rows, const std::vector<Index> &cols) {
  cmat out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) out(static_cast<Index>(r), static_cast<Index>(c)) = a(rows[r], cols[c]);
  return out;
}

void require_unitary(const cmat &u, Index dim, const char *what) {
  if (u.rows() != dim || u.cols() != dim) throw std::invalid_argument(std::string(what) + ": wrong dimension");
  const double r = unitarity_residual(u);
  if (r > 1e-10) throw std::invalid_argument(std::string(what) + ": not unitary (residual " + std::to_string(r) + ")");
}

/// All m values of the space share integer or half-integer type.
void require_uniform_parity(const SystemSpace &space) {
  for (const auto &s : space.sectors())
    if (!same_parity(s.l, space.sectors().front().l))
      throw std::invalid_argument("X-frame schemes need sectors of one parity (all integer or all half-integer l)");
}

} // namespace

// --------------------------------------------------------------- ZInvUnitary

ZInvUnitary::ZInvUnitary(SystemSpace space, std::map<HalfInt, cmat> blocks)
    : space_(std::move(space)), blocks_(std::move(blocks)) {
  for (const auto &[M, b] : blocks_) {
    const auto eig = space_.lz_eigenspace(M);
    if (eig.empty()) throw std::invalid_argument("Z-invariant block for absent M=" + M.to_string());
    require_unitary(b, static_cast<Index>(eig.size()), "Z-invariant block");
  }
}

ZInvUnitary ZInvUnitary::identity(SystemSpace space) { return ZInvUnitary(std::move(space), {}); }

ZInvUnitary ZInvUnitary::from_matrix(SystemSpace space, const cmat &v) {
  require_unitary(v, space.dim(), "Z-invariant unitary");
  const auto ops = angular_momentum_operators(space);
  const double r = max_abs(commutator(v, ops.z));
  if (r > 1e-10) throw std::invalid_argument("unitary does not commute with Lz (residual " + std::to_string(r) + ")");
  std::map<HalfInt, cmat> blocks;
  for (HalfInt M : space.lz_spectrum()) {
    const auto eig = space.lz_eigenspace(M);
    blocks.emplace(M, submatrix(v, eig, eig));
  }
  return ZInvUnitary(std::move(space), std::move(blocks));
}

cmat ZInvUnitary::block(HalfInt M) const {
  const auto it = blocks_.find(M);
  if (it != blocks_.end()) return it->second;
  const auto n = static_cast<Index>(space_.lz_eigenspace(M).size());
  return cmat::Identity(n, n);
}

cmat ZInvUnitary::matrix() const {
  cmat v = cmat::Identity(space_.dim(), space_.dim());
  for (const auto &[M, b] : blocks_) {
    const auto eig = space_.lz_eigenspace(M);
    for (std::size_t r = 0; r < eig.size(); ++r)
      for (std::size_t c = 0; c < eig.size(); ++c) v(eig[r], eig[c]) = b(static_cast<Index>(r), static_cast<Index>(c));
  }
  return v;
}

// --------------------------------------------------------------- RInvUnitary

RInvUnitary::RInvUnitary(SystemSpace space, std::map<HalfInt, cmat> blocks)
    : space_(std::move(space)), blocks_(std::move(blocks)) {
  for (const auto &[l, b] : blocks_) {
    const int n = space_.multiplicity(l);
    if (n == 0) throw std::invalid_argument("rotation-invariant block for absent l=" + l.to_string());
    require_unitary(b, n, "rotation-invariant block");
  }
}

cmat RInvUnitary::block(HalfInt l) const {
  const auto it = blocks_.find(l);
  if (it != blocks_.end()) return it->second;
  const int n = space_.multiplicity(l);
  return cmat::Identity(n, n);
}

cmat RInvUnitary::matrix() const {
  cmat u = cmat::Zero(space_.dim(), space_.dim());
  for (const auto &s : space_.sectors()) {
    const cmat b = block(s.l);
    const Index off = space_.sector_offset(s.l);
    const Index dl = s.l.twice() + 1;
    for (int a = 0; a < s.multiplicity; ++a)
      for (int c = 0; c < s.multiplicity; ++c)
        for (Index mi = 0; mi < dl; ++mi) u(off + a * dl + mi, off + c * dl + mi) = b(a, c);
  }
  return u;
}

// ------------------------------------------------------------------ frames

cvec XRFSpec::state() const {
  const HalfInt l = l_RX();
  cvec v = cvec::Zero(l.twice() + 1);
  const double amp = 1.0 / std::sqrt(2.0 * N + 1.0);
  for (int m = -N + shift; m <= N + shift; ++m) {
    if (abs(HalfInt(m)) > l) throw std::invalid_argument("X-frame shift leaves the frame space");
    v((HalfInt(m) + l).as_integer()) = amp;
  }
  return v;
}

double frame_quality(HalfInt l1, HalfInt l_RZ) {
  const long double l = l1.value_ld();
  return static_cast<double>((l * l + l + 0.25L) / (2.0L * l_RZ.value_ld()));
}

double zinv_error_bound(HalfInt l_sys, const ZRFSpec &frame) {
  return 4.0 * frame_quality(l_sys, frame.l_RZ) * (2.0 * frame.k + 1.0);
}

// ---------------------------------------------------------------- Z lift

LiftResult lift_zinv(const ZInvUnitary &V, const ZRFSpec &frame) {
  const SystemSpace &space = V.space();
  const HalfInt L = frame.l_RZ;
  if (L < space.max_l()) throw std::invalid_argument("lift_zinv: frame smaller than the system");
  if (frame.k < 0 || frame.k > L.twice()) throw std::invalid_argument("lift_zinv: k must lie in [0, 2 l_RZ]");

  const Index d = space.dim();
  const HalfInt m_frame = L - HalfInt(frame.k);

  struct Eig {
    std::vector<Index> idx;
    cmat block;
  };
  std::map<HalfInt, Eig> eig_cache;
  auto eigenspace = [&](HalfInt mu) -> const Eig & {
    auto it = eig_cache.find(mu);
    if (it == eig_cache.end()) it = eig_cache.emplace(mu, Eig{space.lz_eigenspace(mu), V.block(mu)}).first;
    return it->second;
  };

  std::map<HalfInt, cmat> kraus;
  for (Index col = 0; col < d; ++col) {
    const BasisLabel &in = space.label(col);
    const HalfInt M = in.m + m_frame;
    for (HalfInt j = max(abs(M), L - in.l); j <= L + in.l; j += 1) {
      const double a = cg(L, m_frame, in.l, in.m, j, M);
      if (a == 0.0) continue;
      const Eig &e = eigenspace(j - L);
      const auto pos = std::find(e.idx.begin(), e.idx.end(), space.index(in.l, in.delta, j - L)) - e.idx.begin();
      for (std::size_t r = 0; r < e.idx.size(); ++r) {
        const cplx w = e.block(static_cast<Index>(r), pos) * a;
        if (w == cplx(0, 0)) continue;
        const BasisLabel &lam = space.label(e.idx[r]);
        // |j M lambda'> expanded over |l1' delta' m'> |L, n>
        for (HalfInt mp = -lam.l; mp <= lam.l; mp += 1) {
          const HalfInt n = M - mp;
          if (abs(n) > L) continue;
          const double b = cg(L, n, lam.l, mp, j, M);
          if (b == 0.0) continue;
          auto it = kraus.find(n);
          if (it == kraus.end()) it = kraus.emplace(n, cmat::Zero(d, d)).first;
          it->second(space.index(lam.l, lam.delta, mp), col) += b * w;
        }
      }
    }
  }

  std::vector<cmat> ks;
  std::vector<HalfInt> labels;
  LiftDiagnostics diag;
  cmat tp = cmat::Zero(d, d);
  for (auto &[n, k] : kraus) {
    tp.noalias() += k.adjoint() * k;
    diag.kraus_weights[n] = (k.adjoint() * k).trace().real() / static_cast<double>(d);
    labels.push_back(n);
    ks.push_back(k);
  }
  const double residual = max_abs(tp - cmat::Identity(d, d));
  if (residual > 1e-6)
    throw numerical_error("lift_zinv: trace-preservation residual " + std::to_string(residual));

  diag.C_sq = frame_quality(space.max_l(), L);
  for (const auto &lab : space.labels()) {
    const double xi = cg(L, m_frame, lab.l, lab.m, L + lab.m, lab.m + m_frame);
    diag.xi.push_back({lab.l, lab.delta, lab.m, xi});
    diag.X_norm = std::max(diag.X_norm, std::abs(1.0 - xi * xi));
  }
  const auto top = kraus.find(m_frame);
  const cmat k_top = top == kraus.end() ? cmat::Zero(d, d) : top->second;
  diag.Vbar_norm = spectral_norm(cmat(k_top - V.matrix()));

  return {QuantumChannel(std::move(ks), d, d), std::move(diag), std::move(labels)};
}

// ------------------------------------------------------------------ X frame

namespace {

void require_xrf(const SystemSpace &space, const cmat &U, int N) {
  require_unitary(U, space.dim(), "target unitary");
  require_uniform_parity(space);
  if (!(HalfInt(N) > space.max_l() + space.max_l())) throw std::invalid_argument("X-frame needs N > 2 l_sys");
}

} // namespace

cmat xrf_product_unitary(const SystemSpace &space, const cmat &U, int N) {
  require_xrf(space, U, N);
  const HalfInt l_sys = space.max_l();
  const CoupledBasisMap cmap(space, HalfInt(N) + l_sys + l_sys);
  const HalfInt l_rx = cmap.frame_l();
  const Index d = space.dim();
  cmat out = cmat::Zero(cmap.product_dim(), cmap.product_dim());
  for (Index i = 0; i < d; ++i)
    for (HalfInt f = -l_rx; f <= l_rx; f += 1) {
      const Index col = cmap.product_index(i, f);
      const HalfInt M = space.label(i).m + f;
      if (abs(M) > HalfInt(N) + l_sys) {
        out(col, col) = 1;
        continue;
      }
      for (Index ip = 0; ip < d; ++ip) out(cmap.product_index(ip, M - space.label(ip).m), col) = U(ip, i);
    }
  return out;
}

ZInvUnitary build_xrf_unitary(const SystemSpace &space, const cmat &U, int N) {
  require_xrf(space, U, N);
  const HalfInt l_sys = space.max_l();
  const CoupledBasisMap cmap(space, HalfInt(N) + l_sys + l_sys);
  const SystemSpace coupled = cmap.coupled_space();
  const Index d = space.dim();

  std::map<HalfInt, cmat> blocks;
  for (HalfInt M : coupled.lz_spectrum()) {
    if (abs(M) > HalfInt(N) + l_sys) continue;
    // product rows |i>|M - m_i>, all present for |M| <= N + l_sys
    std::vector<Index> rows;
    for (Index i = 0; i < d; ++i) rows.push_back(cmap.product_index(i, M - space.label(i).m));
    std::map<Index, Index> local;
    for (std::size_t r = 0; r < rows.size(); ++r) local[rows[r]] = static_cast<Index>(r);

    const auto eig = coupled.lz_eigenspace(M);
    rmat C = rmat::Zero(static_cast<Index>(rows.size()), static_cast<Index>(eig.size()));
    Index col = 0;
    for (const auto &sector : coupled.sectors()) {
      if (abs(M) > sector.l) continue;
      const auto blk = cmap.block(sector.l, M);
      for (Index c = 0; c < blk.coefficients.cols(); ++c, ++col)
        for (std::size_t r = 0; r < blk.product_rows.size(); ++r)
          C(local.at(blk.product_rows[r]), col) = blk.coefficients(static_cast<Index>(r), c);
    }
    const cmat Cc = C.cast<cplx>();
    blocks.emplace(M, Cc.adjoint() * U * Cc);
  }
  return ZInvUnitary(coupled, std::move(blocks));
}

XRFResult xrf_channel(const SystemSpace &space, const cmat &U, int N) {
  require_xrf(space, U, N);
  const HalfInt l_sys = space.max_l();
  const HalfInt l_rx = HalfInt(N) + l_sys + l_sys;
  const Index d = space.dim();
  const double amp = 1.0 / std::sqrt(2.0 * N + 1.0);
  std::vector<cmat> kraus;
  for (HalfInt f = -l_rx; f <= l_rx; f += 1) {
    cmat k = cmat::Zero(d, d);
    for (Index i = 0; i < d; ++i)
      for (Index ip = 0; ip < d; ++ip)
        if (abs(f - (space.label(i).m - space.label(ip).m)) <= HalfInt(N)) k(ip, i) = amp * U(ip, i);
    if (k.cwiseAbs().maxCoeff() > 0) kraus.push_back(std::move(k));
  }
  QuantumChannel ch(std::move(kraus), d, d);
  const double twol = static_cast<double>(l_sys.twice());
  return {ch.compressed(), (2.0 * (N - twol) + 1.0) / (2.0 * N + 1.0), 2.0 * twol / (2.0 * N + 1.0)};
}

// ----------------------------------------------------------------- scheme I

Scheme1Result scheme1_channel(const SystemSpace &space, const cmat &U, int N, const ZRFSpec &frame) {
  require_xrf(space, U, N);
  const HalfInt l_sys = space.max_l();
  const HalfInt l_rx = HalfInt(N) + l_sys + l_sys;
  if (frame.l_RZ < l_rx + l_sys) throw std::invalid_argument("scheme I needs l_RZ >= N + 3 l_sys");

  const CoupledBasisMap cmap(space, l_rx);
  const ZInvUnitary joint = build_xrf_unitary(space, U, N);
  const LiftResult lift = lift_zinv(joint, frame);
  const cmat C = cmap.dense().cast<cplx>();
  const Index d = space.dim();
  const Index F = cmap.frame_dim();
  XRFSpec xs{N, l_sys, 0};
  const cvec R = xs.state();

  std::vector<cmat> kraus;
  for (const auto &kc : lift.channel.kraus()) {
    const cmat kp = C * kc * C.adjoint();
    for (Index f = 0; f < F; ++f) {
      cmat a = cmat::Zero(d, d);
      for (Index sp = 0; sp < d; ++sp)
        for (Index s = 0; s < d; ++s) a(sp, s) = kp.row(sp * F + f).segment(s * F, F) * R;
      if (a.cwiseAbs().maxCoeff() > 0) kraus.push_back(std::move(a));
    }
  }
  Scheme1Result out{QuantumChannel(std::move(kraus), d, d).compressed(), 0, 0};
  const double twol = static_cast<double>(l_sys.twice());
  const double L = frame.l_RZ.value();
  out.bound = twol / N + 2.0 * N * N / L;
  out.exact_bound = 2.0 * twol / (2.0 * N + 1.0) + 4.0 * frame_quality(l_rx + l_sys, frame.l_RZ);
  return out;
}

Scheme1Optimum scheme1_optimal(HalfInt l_sys, HalfInt l_RZ) {
  const double l = l_sys.value();
  const double L = l_RZ.value();
  if (l <= 0 || L <= 0) throw std::invalid_argument("scheme1_optimal: l_sys and l_RZ must be positive");
  auto bound = [&](int N) { return 2.0 * l / N + 2.0 * N * N / L; };
  const double n_real = std::cbrt(l * L / 2.0);
  const int lo = std::max(1, static_cast<int>(std::floor(n_real)));
  const int hi = std::max(1, static_cast<int>(std::ceil(n_real)));
  Scheme1Optimum out;
  out.N_opt = bound(lo) <= bound(hi) ? lo : hi;
  out.bound_at_N_opt = bound(out.N_opt);
  out.error_bound = 3.0 * std::cbrt(2.0 * l * l / L);
  return out;
}

// -------------------------------------------------------------- degradation

cmat frame_window_isometry(const ZInvUnitary &V, HalfInt l_RZ, int window_in, int window_out) {
  const Index d = V.space().dim();
  const Index wi = window_in + 1, wo = window_out + 1;
  cmat W = cmat::Zero(d * wo, d * wi);
  for (int k = 0; k <= window_in; ++k) {
    const LiftResult lift = lift_zinv(V, {l_RZ, k});
    for (std::size_t i = 0; i < lift.frame_m.size(); ++i) {
      const auto kp = (l_RZ - lift.frame_m[i]).as_integer();
      if (kp > window_out) throw numerical_error("frame support overflow: offset " + std::to_string(kp) + " beyond window");
      const cmat &K = lift.channel.kraus()[i];
      for (Index sp = 0; sp < d; ++sp)
        for (Index s = 0; s < d; ++s) W(sp * wo + kp, s * wi + k) = K(sp, s);
    }
  }
  return W;
}

namespace {

QuantumChannel window_channel(const cmat &W, Index d, const cmat &F) {
  const Index wi = F.rows();
  const Index wo = W.rows() / d;
  Eigen::SelfAdjointEigenSolver<cmat> es(0.5 * (F + F.adjoint()));
  std::vector<cmat> kraus;
  for (Index e = 0; e < wi; ++e) {
    const double q = es.eigenvalues()(e);
    if (q <= 1e-15) continue;
    const cvec f = es.eigenvectors().col(e);
    for (Index kp = 0; kp < wo; ++kp) {
      cmat a = cmat::Zero(d, d);
      for (Index sp = 0; sp < d; ++sp)
        for (Index s = 0; s < d; ++s)
          for (Index k = 0; k < wi; ++k) a(sp, s) += W(sp * wo + kp, s * wi + k) * f(k);
      a *= std::sqrt(q);
      if (a.cwiseAbs().maxCoeff() > 0) kraus.push_back(std::move(a));
    }
  }
  // eigenvalue truncation and rounding: renormalise through the Choi form
  cmat tp = cmat::Zero(d, d);
  for (const auto &k : kraus) tp.noalias() += k.adjoint() * k;
  if ((tp - cmat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-8) {
    Eigen::SelfAdjointEigenSolver<cmat> ts(tp);
    const cmat inv_sqrt = ts.eigenvectors() * ts.eigenvalues().cwiseSqrt().cwiseInverse().cast<cplx>().asDiagonal() *
                          ts.eigenvectors().adjoint();
    for (auto &k : kraus) k = k * inv_sqrt;
  }
  return QuantumChannel(std::move(kraus), d, d).compressed();
}

} // namespace

QuantumChannel mixed_frame_channel(const ZInvUnitary &V, HalfInt l_RZ, const cmat &frame_density) {
  const int win = static_cast<int>(frame_density.rows()) - 1;
  const int twol = static_cast<int>(V.space().max_l().twice());
  return window_channel(frame_window_isometry(V, l_RZ, win, win + twol), V.space().dim(), frame_density);
}

DegradationReport simulate_degradation(const std::vector<ZInvUnitary> &V_sequence, const ZRFSpec &frame,
                                       const DegradationOptions &opt) {
  DegradationReport report;
  if (V_sequence.empty()) {
    DegradationStep s0;
    s0.frame_populations = rvec::Zero(frame.k + 1);
    s0.frame_populations(frame.k) = 1;
    s0.top_population = 1;
    s0.population_bound = 1;
    report.steps.push_back(s0);
    return report;
  }
  const SystemSpace &space = V_sequence.front().space();
  for (const auto &v : V_sequence)
    if (!(v.space() == space)) throw std::invalid_argument("simulate_degradation: all targets must share one space");

  const HalfInt L = frame.l_RZ;
  const Index d = space.dim();
  const int twol = static_cast<int>(space.max_l().twice());
  const int uses = static_cast<int>(V_sequence.size());
  const double C2 = frame_quality(space.max_l(), L);
  const int needed = frame.k + twol * uses;
  if (needed > opt.max_window || needed > L.twice())
    throw numerical_error("frame support overflow: " + std::to_string(needed) + " offsets needed");
  report.warning = uses * C2 > 0.25;

  const cmat rho0 = cmat::Identity(d, d) / static_cast<double>(d);
  int window = frame.k;
  cmat F = cmat::Zero(window + 1, window + 1);
  F(frame.k, frame.k) = 1;
  cmat joint = kron(rho0, F);

  auto populations = [&](const cmat &f) {
    rvec p = f.diagonal().real();
    return p;
  };

  DegradationStep s0;
  s0.frame_populations = populations(F);
  s0.top_population = F(frame.k, frame.k).real();
  s0.population_bound = 1.0;
  report.steps.push_back(s0);

  for (int use = 1; use <= uses; ++use) {
    const ZInvUnitary &V = V_sequence[static_cast<std::size_t>(use - 1)];
    const cmat W = frame_window_isometry(V, L, window, window + twol);
    const double p_prev = F(frame.k, frame.k).real();

    DegradationStep st;
    st.use = use;
    const QuantumChannel eps = window_channel(W, d, F);
    st.channel_error = channel_distance(QuantumChannel::unitary(V.matrix()), eps, opt.distance).value;
    st.error_envelope = p_prev * 4.0 * C2 * (2.0 * frame.k + 1.0) + (1.0 - p_prev);

    window += twol;
    joint = W * joint * W.adjoint();
    F = partial_trace_first(joint, d, window + 1);
    F = 0.5 * (F + F.adjoint()).eval();
    if (opt.fresh_systems) joint = kron(rho0, F);

    st.frame_populations = populations(F);
    st.top_population = F(frame.k, frame.k).real();
    st.population_bound = 1.0 - 4.0 * use * C2;
    report.steps.push_back(std::move(st));
  }
  return report;
}

} // namespace rotframe
