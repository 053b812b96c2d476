#pragma once

// Reference-frame constructions: Z-invariant unitaries lifted through a
// large spin frame, the X-frame shift-compensation scheme, their
// composition, and frame degradation under repeated use.

#include "rotframe/channels.hpp"
#include "rotframe/spin_algebra.hpp"

#include <map>
#include <vector>

namespace rotframe {

/// Unitary commuting with Lz: V = (+)_M V^{(M)} on the Lz = M eigenspaces.
/// Block bases follow SystemSpace::lz_eigenspace order.
class ZInvUnitary {
public:
  ZInvUnitary(SystemSpace space, std::map<HalfInt, cmat> blocks);
  static ZInvUnitary identity(SystemSpace space);
  /// Throws std::invalid_argument if V does not commute with Lz to 1e-10.
  static ZInvUnitary from_matrix(SystemSpace space, const cmat &v);

  const SystemSpace &space() const { return space_; }
  /// V^{(M)}; identity for M without a stored block.
  cmat block(HalfInt M) const;
  const std::map<HalfInt, cmat> &blocks() const { return blocks_; }
  cmat matrix() const;

private:
  SystemSpace space_;
  std::map<HalfInt, cmat> blocks_;
};

/// Rotationally invariant unitary (+)_l I_l (x) U^{(l)}.
class RInvUnitary {
public:
  RInvUnitary(SystemSpace space, std::map<HalfInt, cmat> blocks);

  const SystemSpace &space() const { return space_; }
  cmat block(HalfInt l) const;
  cmat matrix() const;

private:
  SystemSpace space_;
  std::map<HalfInt, cmat> blocks_;
};

/// Z-frame |l_RZ, l_RZ - k>.
struct ZRFSpec {
  HalfInt l_RZ;
  int k = 0;
};

/// X-frame of spin l_RX = N + 2 l_sys prepared in |R_X, shift>.
struct XRFSpec {
  int N = 0;
  HalfInt l_sys;
  int shift = 0;

  HalfInt l_RX() const { return HalfInt(N) + l_sys + l_sys; }
  /// Uniform superposition of m in [-N + shift, N + shift], ascending m.
  cvec state() const;
};

/// (l1^2 + l1 + 1/4) / (2 l_RZ).
double frame_quality(HalfInt l1, HalfInt l_RZ);

struct XiEntry {
  HalfInt l1;
  int delta = 0;
  HalfInt m;
  double xi = 0;
};

struct LiftDiagnostics {
  double C_sq = 0;
  std::vector<XiEntry> xi;
  /// max |1 - xi^2|.
  double X_norm = 0;
  /// ||K_{l_RZ - k} - V||.
  double Vbar_norm = 0;
  /// tr(K_n^dagger K_n) / d for every realised frame label n.
  std::map<HalfInt, double> kraus_weights;
};

struct LiftResult {
  QuantumChannel channel;
  LiftDiagnostics diag;
  /// Frame projection n of each Kraus operator, in channel order.
  std::vector<HalfInt> frame_m;
};

/// Channel on the system from V = (+)_j I_j (x) V^{(j - l_RZ)} applied with
/// the frame in |l_RZ, l_RZ - k>.  Kraus elements are contracted from CG
/// coefficients; the joint space is never formed.
LiftResult lift_zinv(const ZInvUnitary &V, const ZRFSpec &frame);

/// 4 C^2 (2k + 1).
double zinv_error_bound(HalfInt l_sys, const ZRFSpec &frame);

/// The X-frame compensating unitary in the coupled basis of
/// system (x) spin-l_RX (ZInvUnitary over couple(space, l_RX).coupled_space()).
ZInvUnitary build_xrf_unitary(const SystemSpace &space, const cmat &U, int N);
/// Same operator in the product basis (system index major).
cmat xrf_product_unitary(const SystemSpace &space, const cmat &U, int N);

struct XRFResult {
  QuantumChannel channel;
  double faithful_weight = 0;
  double bound = 0;
};

/// tr_X U (rho (x) |R_X,0><R_X,0|) U^dagger, with bound 4 l_sys / (2N + 1).
XRFResult xrf_channel(const SystemSpace &space, const cmat &U, int N);

struct Scheme1Result {
  QuantumChannel channel;
  /// 2 l_sys / N + 2 N^2 / l_RZ.
  double bound = 0;
  /// 4 l_sys / (2N + 1) + 4 C^2 with l1 = N + 3 l_sys.
  double exact_bound = 0;
};

Scheme1Result scheme1_channel(const SystemSpace &space, const cmat &U, int N, const ZRFSpec &frame);

struct Scheme1Optimum {
  int N_opt = 0;
  /// 3 (2 l_sys^2 / l_RZ)^{1/3}, at the real-valued optimum.
  double error_bound = 0;
  /// 2 l_sys / N_opt + 2 N_opt^2 / l_RZ.
  double bound_at_N_opt = 0;
};

Scheme1Optimum scheme1_optimal(HalfInt l_sys, HalfInt l_RZ);

struct DegradationOptions {
  bool fresh_systems = true;
  /// Largest frame offset k = l_RZ - m tracked; exceeding it aborts.
  int max_window = 400;
  DistanceOptions distance{};
};

struct DegradationStep {
  int use = 0;
  /// Frame populations by offset k = l_RZ - m.
  rvec frame_populations;
  double top_population = 0;
  /// 1 - 4 n C^2.
  double population_bound = 0;
  /// d(V_n . V_n^dagger, channel with the frame as left by the previous uses); 0 for use 0.
  double channel_error = 0;
  /// p 4C^2(2k+1) + (1 - p) with p the measured top population before the use.
  double error_envelope = 0;
};

struct DegradationReport {
  std::vector<DegradationStep> steps;
  /// Set when n C^2 exceeds 0.25 for the sequence length.
  bool warning = false;
};

/// Repeated use of one Z-frame.  With fresh systems every use acts on a new
/// maximally mixed system; otherwise one system is carried along with the
/// frame and the joint state evolves.
DegradationReport simulate_degradation(const std::vector<ZInvUnitary> &V_sequence, const ZRFSpec &frame,
                                       const DegradationOptions &options = {});

/// Joint map |s>|l_RZ, l_RZ - k> -> sum_n K_n^{(k)}|s>|l_RZ, n> restricted to
/// frame offsets k in [0, window_in] (rows: offsets [0, window_out]),
/// system index major.
cmat frame_window_isometry(const ZInvUnitary &V, HalfInt l_RZ, int window_in, int window_out);

/// Channel on the system for a frame density F on offsets [0, F.rows()).
QuantumChannel mixed_frame_channel(const ZInvUnitary &V, HalfInt l_RZ, const cmat &frame_density);

} // namespace rotframe
