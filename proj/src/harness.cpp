#include "rotframe/harness.hpp"

#include "rotframe/covariant_dilation.hpp"
#include "rotframe/random.hpp"
#include "rotframe/rf_schemes.hpp"
#include "rotframe/spin_algebra.hpp"
#include "rotframe/universality.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace rotframe {

using nlohmann::json;

namespace {

const std::map<std::string, Experiment> &experiment_names() {
  static const std::map<std::string, Experiment> names{
      {"zinv_sweep", Experiment::zinv_sweep},       {"xrf_sweep", Experiment::xrf_sweep},
      {"scheme1_sweep", Experiment::scheme1_sweep}, {"scheme2_curve", Experiment::scheme2_curve},
      {"degradation", Experiment::degradation},     {"lemma2_grid", Experiment::lemma2_grid},
      {"lie_closure_table", Experiment::lie_closure_table}, {"synth_table", Experiment::synth_table},
  };
  return names;
}

} // namespace

std::string to_string(Experiment e) {
  for (const auto &[name, v] : experiment_names())
    if (v == e) return name;
  return "unknown";
}

Experiment parse_experiment(const std::string &name) {
  const auto it = experiment_names().find(name);
  if (it == experiment_names().end()) throw config_error("unknown experiment '" + name + "'");
  return it->second;
}

// ------------------------------------------------------------------ config

namespace {

HalfInt half_int_value(const json &v, const std::string &key) {
  try {
    if (v.is_string()) return parse_half_int(v.get<std::string>());
    if (v.is_number_integer()) return HalfInt(v.get<int>());
    if (v.is_number_float()) {
      const double twice = 2 * v.get<double>();
      if (twice != std::round(twice)) throw std::invalid_argument("not a half-integer");
      return HalfInt::from_twice(static_cast<std::int64_t>(std::llround(twice)));
    }
  } catch (const std::invalid_argument &e) {
    throw config_error("'" + key + "': " + e.what());
  }
  throw config_error("'" + key + "' must hold half-integers (number or \"p/2\" string)");
}

template <typename T> T scalar(const json &v, const std::string &key) {
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw config_error("");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw config_error("");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw config_error("");
    } else {
      if (!v.is_string()) throw config_error("");
    }
    return v.get<T>();
  } catch (const std::exception &) {
    throw config_error("'" + key + "' has the wrong type");
  }
}

template <typename T> std::vector<T> list(const json &v, const std::string &key) {
  if (!v.is_array()) throw config_error("'" + key + "' must be a list");
  std::vector<T> out;
  for (const auto &e : v) {
    if constexpr (std::is_same_v<T, HalfInt>)
      out.push_back(half_int_value(e, key));
    else
      out.push_back(scalar<T>(e, key));
  }
  return out;
}

void require(bool cond, const std::string &msg) {
  if (!cond) throw config_error(msg);
}

} // namespace

ExperimentConfig parse_config(const json &j) {
  if (!j.is_object()) throw config_error("config must be a JSON object");
  if (!j.contains("experiment")) throw config_error("config needs an 'experiment' field");
  ExperimentConfig c;
  for (const auto &[key, v] : j.items()) {
    if (key == "experiment") c.experiment = parse_experiment(scalar<std::string>(v, key));
    else if (key == "seed") c.seed = scalar<std::uint64_t>(v, key);
    else if (key == "restarts") c.restarts = scalar<int>(v, key);
    else if (key == "grid_points") c.grid_points = scalar<int>(v, key);
    else if (key == "tolerance") c.tolerance = scalar<double>(v, key);
    else if (key == "targets") c.targets = scalar<int>(v, key);
    else if (key == "l_sys") c.l_sys = list<HalfInt>(v, key);
    else if (key == "l_RZ") c.l_RZ = list<HalfInt>(v, key);
    else if (key == "N") c.N = list<int>(v, key);
    else if (key == "optimal_N") c.optimal_N = scalar<bool>(v, key);
    else if (key == "k") c.k = list<int>(v, key);
    else if (key == "x") c.x = list<double>(v, key);
    else if (key == "A") c.A = scalar<double>(v, key);
    else if (key == "uses") c.uses = list<int>(v, key);
    else if (key == "fresh") c.fresh = list<bool>(v, key);
    else if (key == "l1") c.l1 = list<HalfInt>(v, key);
    else if (key == "l2") c.l2 = list<HalfInt>(v, key);
    else if (key == "d") c.d = list<int>(v, key);
    else if (key == "layers") c.layers = scalar<int>(v, key);
    else if (key == "output") c.output = scalar<std::string>(v, key);
    else if (key == "timing") c.timing = scalar<bool>(v, key);
    else throw config_error("unknown config field '" + key + "'");
  }

  require(c.restarts >= 1, "'restarts' must be >= 1");
  require(c.grid_points >= 0, "'grid_points' must be >= 0");
  require(c.tolerance > 0, "'tolerance' must be positive");
  require(c.targets >= 0, "'targets' must be >= 0");
  require(c.A > 0, "'A' must be positive");
  require(c.layers >= 3, "'layers' must be >= 3");
  for (HalfInt l : c.l_sys) require(l.twice() > 0, "'l_sys' values must be positive");
  for (int k : c.k) require(k >= 0, "'k' values must be >= 0");
  for (double x : c.x) require(x > 0 && std::isfinite(x), "'x' values must be positive");
  for (int u : c.uses) require(u >= 0, "'uses' values must be >= 0");
  for (int d : c.d) require(d >= 2 && d <= 12, "'d' values must lie in [2, 12]");
  for (HalfInt l : c.l1) require(l.twice() >= 0, "'l1' values must be >= 0");
  for (HalfInt l : c.l2) require(l.twice() >= 0, "'l2' values must be >= 0");

  switch (c.experiment) {
  case Experiment::zinv_sweep:
    for (HalfInt L : c.l_RZ)
      for (HalfInt l : c.l_sys) require(L >= l, "'l_RZ' must be >= every l_sys");
    for (HalfInt L : c.l_RZ)
      for (int k : c.k) require(k <= L.twice(), "'k' must be <= 2 l_RZ");
    break;
  case Experiment::xrf_sweep:
    for (int N : c.N)
      for (HalfInt l : c.l_sys) require(HalfInt(N) > l + l, "'N' must exceed 2 l_sys");
    break;
  case Experiment::scheme1_sweep:
    require(c.optimal_N || !c.N.empty() || c.l_RZ.empty(), "scheme1_sweep needs 'N' or 'optimal_N'");
    for (int N : c.N)
      for (HalfInt l : c.l_sys) {
        require(HalfInt(N) > l + l, "'N' must exceed 2 l_sys");
        for (HalfInt L : c.l_RZ) require(L >= HalfInt(N) + l + l + l, "'l_RZ' must be >= N + 3 l_sys");
      }
    break;
  case Experiment::degradation:
    for (HalfInt L : c.l_RZ)
      for (HalfInt l : c.l_sys) require(L >= l, "'l_RZ' must be >= every l_sys");
    break;
  case Experiment::lemma2_grid:
    for (HalfInt l2 : c.l2)
      for (int k : c.k) require(k <= l2.twice(), "'k' must be <= 2 l2");
    break;
  default:
    break;
  }
  return c;
}

ExperimentConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error &e) {
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

// ------------------------------------------------------------------ output

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

namespace {

std::string csv_escape(const std::string &s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string cell(double v) { return format_number(v); }
std::string cell(int v) { return std::to_string(v); }
std::string cell(bool v) { return v ? "true" : "false"; }
std::string cell(HalfInt v) { return v.to_string(); }

struct Row {
  std::vector<std::string> cells; // experiment columns, excluding row/seed/error/wall_ms
  bool violation = false;
  // regression data
  std::string group;
  double param = std::numeric_limits<double>::quiet_NaN();
  double measured = std::numeric_limits<double>::quiet_NaN();
};

struct Task {
  std::function<Row(std::uint64_t seed)> fn;
  std::size_t width = 0;
};

const std::map<Experiment, std::vector<std::string>> &headers() {
  static const std::map<Experiment, std::vector<std::string>> h{
      {Experiment::zinv_sweep,
       {"l_sys", "l_RZ", "k", "target", "C_sq", "measured", "bound", "X_norm", "Vbar_norm", "converged", "within_bound"}},
      {Experiment::xrf_sweep, {"l_sys", "N", "target", "faithful_weight", "measured", "bound", "converged", "within_bound"}},
      {Experiment::scheme1_sweep,
       {"l_sys", "l_RZ", "N", "target", "measured", "bound", "exact_bound", "converged", "within_bound"}},
      {Experiment::scheme2_curve,
       {"x", "l_RZ", "fresh", "target", "sigma", "tau", "bound", "objective", "n_frames", "large_x_approx", "measured",
        "sim_bound", "converged", "within_bound"}},
      {Experiment::degradation,
       {"l_sys", "l_RZ", "fresh", "uses", "target", "top_population", "population_bound", "channel_error",
        "fresh_frame_error", "error_envelope", "within_bound"}},
      {Experiment::lemma2_grid,
       {"l1", "m1", "l2", "k", "overlap_sq", "general_bound", "asymptotic_bound", "general_ok", "asymptotic_regime",
        "asymptotic_ok"}},
      {Experiment::lie_closure_table, {"d", "dimension", "expected", "converged", "depth"}},
      {Experiment::synth_table, {"d", "target", "layers", "residual", "converged"}},
  };
  return h;
}

/// Target seed shared by every grid point with the same target index, so
/// paired comparisons see the same unitaries.
std::uint64_t target_seed(std::uint64_t master, int t) {
  return derive_seed(master ^ 0x7a26e75eedULL, static_cast<std::uint64_t>(t));
}

cmat random_diagonal_unitary(Index d, Rng &rng) {
  cmat v = cmat::Zero(d, d);
  for (Index i = 0; i < d; ++i) v(i, i) = std::polar(1.0, 2 * std::numbers::pi * uniform01(rng));
  return v;
}

DistanceOptions distance_options(const ExperimentConfig &c, std::uint64_t seed) {
  DistanceOptions o;
  o.restarts = c.restarts;
  o.tol = c.tolerance;
  o.grid_points = c.grid_points;
  o.seed = seed;
  return o;
}

double slope(const std::vector<std::pair<double, double>> &pts) {
  if (pts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto &[x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(pts.size());
  const double den = n * sxx - sx * sx;
  return den == 0 ? std::numeric_limits<double>::quiet_NaN() : (n * sxy - sx * sy) / den;
}

std::vector<Task> build_tasks(const ExperimentConfig &c) {
  std::vector<Task> tasks;
  const std::size_t width = headers().at(c.experiment).size();
  auto add = [&](std::function<Row(std::uint64_t)> fn) { tasks.push_back({std::move(fn), width}); };

  switch (c.experiment) {
  case Experiment::zinv_sweep:
    for (HalfInt l : c.l_sys)
      for (HalfInt L : c.l_RZ)
        for (int k : c.k)
          for (int t = 0; t < c.targets; ++t)
            add([=](std::uint64_t seed) {
              const SystemSpace space = SystemSpace::irrep(l);
              Rng rng(target_seed(c.seed, t));
              const ZInvUnitary V = ZInvUnitary::from_matrix(space, random_diagonal_unitary(space.dim(), rng));
              const ZRFSpec frame{L, k};
              const LiftResult lift = lift_zinv(V, frame);
              const auto est = channel_distance(QuantumChannel::unitary(V.matrix()), lift.channel, distance_options(c, seed));
              const double bound = zinv_error_bound(l, frame);
              Row r;
              r.cells = {cell(l), cell(L), cell(k), cell(t), cell(lift.diag.C_sq), cell(est.value), cell(bound),
                         cell(lift.diag.X_norm), cell(lift.diag.Vbar_norm), cell(est.converged), cell(est.value <= bound)};
              r.violation = est.value > bound;
              r.group = "l_sys=" + l.to_string() + ",k=" + std::to_string(k);
              r.param = L.value();
              r.measured = est.value;
              return r;
            });
    break;
  case Experiment::xrf_sweep:
    for (HalfInt l : c.l_sys)
      for (int N : c.N)
        for (int t = 0; t < c.targets; ++t)
          add([=](std::uint64_t seed) {
            const SystemSpace space = SystemSpace::irrep(l);
            Rng rng(target_seed(c.seed, t));
            const cmat U = haar_unitary(space.dim(), rng);
            const XRFResult x = xrf_channel(space, U, N);
            const auto est = channel_distance(QuantumChannel::unitary(U), x.channel, distance_options(c, seed));
            Row r;
            r.cells = {cell(l), cell(N), cell(t), cell(x.faithful_weight), cell(est.value), cell(x.bound),
                       cell(est.converged), cell(est.value <= x.bound)};
            r.violation = est.value > x.bound;
            r.group = "l_sys=" + l.to_string();
            r.param = N;
            r.measured = est.value;
            return r;
          });
    break;
  case Experiment::scheme1_sweep:
    for (HalfInt l : c.l_sys)
      for (HalfInt L : c.l_RZ) {
        std::vector<int> Ns = c.N;
        if (c.optimal_N) Ns = {scheme1_optimal(l, L).N_opt};
        for (int N : Ns)
          for (int t = 0; t < c.targets; ++t)
            add([=](std::uint64_t seed) {
              const SystemSpace space = SystemSpace::irrep(l);
              Rng rng(target_seed(c.seed, t));
              const cmat U = haar_unitary(space.dim(), rng);
              const Scheme1Result s = scheme1_channel(space, U, N, {L, 0});
              const auto est = channel_distance(QuantumChannel::unitary(U), s.channel, distance_options(c, seed));
              Row r;
              r.cells = {cell(l), cell(L), cell(N), cell(t), cell(est.value), cell(s.bound), cell(s.exact_bound),
                         cell(est.converged), cell(est.value <= s.bound)};
              r.violation = est.value > s.bound;
              r.group = "l_sys=" + l.to_string() + (c.optimal_N ? ",N=optimal" : ",N=" + std::to_string(N));
              r.param = L.value();
              r.measured = est.value;
              return r;
            });
      }
    break;
  case Experiment::scheme2_curve:
    for (double x : c.x)
      add([=](std::uint64_t) {
        const SchemeBudget b = scheme2_budget_from_x(x, c.A);
        Row r;
        r.cells = {cell(x), "", "", "", cell(b.sigma), cell(b.tau), cell(b.total_error_bound),
                   cell(b.objective_at_optimum), cell(b.n_frames), cell(b.large_x_approx), "", "", "", ""};
        return r;
      });
    for (HalfInt L : c.l_RZ)
      for (bool fresh : c.fresh)
        for (int t = 0; t < c.targets; ++t)
          add([=](std::uint64_t seed) {
            const SchemeBudget b = scheme2_budget(HalfInt::half(), L, c.A);
            Rng rng(target_seed(c.seed, t));
            const cmat U = haar_unitary(2, rng);
            const Scheme2Result s = scheme2_simulate(U, L, fresh, distance_options(c, seed));
            Row r;
            r.cells = {cell(b.x), cell(L), cell(fresh), cell(t), cell(b.sigma), cell(b.tau), cell(b.total_error_bound),
                       cell(b.objective_at_optimum), cell(b.n_frames), cell(b.large_x_approx), cell(s.measured_error),
                       cell(s.bound), cell(s.converged), cell(s.measured_error <= s.bound)};
            r.violation = s.measured_error > s.bound;
            r.group = fresh ? "fresh" : "reused";
            r.param = L.value();
            r.measured = s.measured_error;
            return r;
          });
    break;
  case Experiment::degradation:
    for (HalfInt l : c.l_sys)
      for (HalfInt L : c.l_RZ)
        for (bool fresh : c.fresh)
          for (int n : c.uses)
            for (int t = 0; t < c.targets; ++t)
              add([=](std::uint64_t seed) {
                const SystemSpace space = SystemSpace::irrep(l);
                Rng rng(target_seed(c.seed, t));
                std::vector<ZInvUnitary> seq;
                for (int u = 0; u < std::max(n, 1); ++u)
                  seq.push_back(ZInvUnitary::from_matrix(space, random_diagonal_unitary(space.dim(), rng)));
                Row r;
                DegradationOptions opt;
                opt.fresh_systems = fresh;
                opt.distance = distance_options(c, seed);
                if (n == 0) {
                  r.cells = {cell(l), cell(L), cell(fresh), cell(0), cell(t), cell(1.0), cell(1.0), cell(0.0), cell(0.0),
                             cell(0.0), cell(true)};
                  return r;
                }
                const DegradationReport rep = simulate_degradation(seq, {L, 0}, opt);
                const DegradationStep &last = rep.steps.back();
                const ZInvUnitary &vn = seq.back();
                const double fresh_err =
                    channel_distance(QuantumChannel::unitary(vn.matrix()), lift_zinv(vn, {L, 0}).channel, opt.distance).value;
                const bool ok = last.top_population >= last.population_bound;
                r.cells = {cell(l), cell(L), cell(fresh), cell(n), cell(t), cell(last.top_population),
                           cell(last.population_bound), cell(last.channel_error), cell(fresh_err), cell(last.error_envelope),
                           cell(ok)};
                r.violation = !ok;
                r.group = fresh ? "fresh" : "reused";
                r.param = n;
                r.measured = last.channel_error;
                return r;
              });
    break;
  case Experiment::lemma2_grid:
    for (HalfInt l1 : c.l1)
      for (HalfInt m1 = -l1; m1 <= l1; m1 += 1)
        for (HalfInt l2 : c.l2)
          for (int k : c.k)
            add([=](std::uint64_t) {
              const Lemma2Overlap o = lemma2_overlap(l1, m1, l2, k);
              const double scale = std::max({l1.value() * l1.value(), static_cast<double>(k) * k, 1.0});
              const bool regime = l2.value() >= 100.0 * scale;
              const bool gen_ok = o.overlap_sq >= o.general_bound - 1e-12;
              const bool asy_ok = o.overlap_sq >= o.asymptotic_bound - 1e-12;
              Row r;
              r.cells = {cell(l1), cell(m1), cell(l2), cell(k), cell(o.overlap_sq), cell(o.general_bound),
                         cell(o.asymptotic_bound), cell(gen_ok), cell(regime), cell(asy_ok)};
              r.violation = !gen_ok || (regime && !asy_ok);
              return r;
            });
    break;
  case Experiment::lie_closure_table:
    for (int d : c.d)
      add([=](std::uint64_t) {
        const cmat R = lx_basis_rotation(d);
        std::vector<cmat> gens;
        for (int i = 0; i < d; ++i) {
          cmat e = cmat::Zero(d, d);
          e(i, i) = 1;
          gens.push_back(e);
          gens.push_back(R * e * R.adjoint());
        }
        const LieClosure lc = lie_closure_dimension(gens);
        Row r;
        r.cells = {cell(d), cell(lc.dimension), cell(d * d), cell(lc.converged), cell(lc.depth)};
        r.violation = lc.dimension != d * d;
        return r;
      });
    break;
  case Experiment::synth_table:
    for (int d : c.d)
      for (int t = 0; t < c.targets; ++t)
        add([=](std::uint64_t seed) {
          Rng rng(target_seed(c.seed, t));
          const cmat U = haar_unitary(d, rng);
          SynthesisOptions so;
          so.seed = seed;
          const double tol = std::max(c.tolerance, 1e-9);
          const AlternatingSequence s = synthesize_alternating(U, c.layers, tol, so);
          Row r;
          r.cells = {cell(d), cell(t), cell(static_cast<int>(s.factors.size())), cell(s.residual), cell(s.converged)};
          r.violation = !s.converged;
          return r;
        });
    break;
  }
  return tasks;
}

} // namespace

std::vector<std::string> csv_header(Experiment e) {
  std::vector<std::string> h{"row"};
  for (const auto &c : headers().at(e)) h.push_back(c);
  h.push_back("error");
  return h;
}

ExperimentOutput run(const ExperimentConfig &config, int threads) {
  const std::vector<Task> tasks = build_tasks(config);
  struct Result {
    Row row;
    std::string error;
    bool numerical = false;
    double wall_ms = 0;
  };
  std::vector<Result> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const auto t0 = std::chrono::steady_clock::now();
      try {
        results[i].row = tasks[i].fn(derive_seed(config.seed, i));
      } catch (const std::exception &e) {
        results[i].error = e.what();
        results[i].row.cells.assign(tasks[i].width, "");
      }
      results[i].wall_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(std::max<std::size_t>(tasks.size(), 1))));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto &t : pool) t.join();

  std::ostringstream csv;
  auto header = csv_header(config.experiment);
  if (config.timing) header.push_back("wall_ms");
  for (std::size_t i = 0; i < header.size(); ++i) csv << (i ? "," : "") << header[i];
  csv << "\n";

  ExperimentOutput out;
  std::map<std::string, std::map<double, std::pair<double, int>>> groups;
  double min_m = std::numeric_limits<double>::infinity(), max_m = -min_m;
  int failed = 0, violations = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto &r = results[i];
    csv << i;
    for (const auto &c : r.row.cells) csv << "," << csv_escape(c);
    csv << "," << csv_escape(r.error);
    if (config.timing) csv << "," << format_number(r.wall_ms);
    csv << "\n";
    if (!r.error.empty()) ++failed;
    if (r.row.violation) ++violations;
    if (r.error.empty() && !std::isnan(r.row.measured)) {
      min_m = std::min(min_m, r.row.measured);
      max_m = std::max(max_m, r.row.measured);
      if (!r.row.group.empty() && r.row.param > 0 && r.row.measured > 0) {
        auto &acc = groups[r.row.group][r.row.param];
        acc.first += r.row.measured;
        acc.second += 1;
      }
    }
  }
  out.csv = csv.str();
  out.violations = violations + failed;

  json summary;
  summary["experiment"] = to_string(config.experiment);
  summary["seed"] = config.seed;
  summary["rows"] = results.size();
  summary["failed_rows"] = failed;
  summary["bound_violations"] = violations;
  if (min_m <= max_m) {
    summary["min_measured"] = min_m;
    summary["max_measured"] = max_m;
  }
  json slopes = json::object();
  for (const auto &[g, pts] : groups) {
    std::vector<std::pair<double, double>> lp;
    for (const auto &[p, acc] : pts) lp.emplace_back(std::log(p), std::log(acc.first / acc.second));
    const double s = slope(lp);
    if (!std::isnan(s)) slopes[g] = s;
  }
  summary["log_log_slopes"] = slopes;
  out.summary = summary;
  return out;
}

// -------------------------------------------------------------- cg command

int cg_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  const char *usage = "usage: rotframe cg <l1> <m1> <l2> <m2> <J> <M>   (values as integers, \"p/2\" or \"x.5\")\n";
  if (args.size() != 6) {
    err << "cg: expected 6 arguments\n" << usage;
    return 2;
  }
  std::vector<HalfInt> v;
  try {
    for (const auto &a : args) v.push_back(parse_half_int(a));
  } catch (const std::invalid_argument &e) {
    err << "cg: " << e.what() << "\n" << usage;
    return 2;
  }
  double c = 0;
  try {
    c = cg(v[0], v[1], v[2], v[3], v[4], v[5]);
  } catch (const std::invalid_argument &e) {
    err << "cg: " << e.what() << "\n" << usage;
    return 2;
  }
  std::string verdict = "satisfied";
  if (abs(v[1]) > v[0] || abs(v[3]) > v[2] || abs(v[5]) > v[4]) verdict = "violated (|m| > l)";
  else if (v[5] != v[1] + v[3]) verdict = "violated (M != m1 + m2)";
  else if (v[4] < abs(v[0] - v[2]) || v[4] > v[0] + v[2]) verdict = "violated (triangle rule)";
  char buf[64];
  if (c == 0.0 || std::abs(c) >= 0.1)
    std::snprintf(buf, sizeof buf, "%.15f", c);
  else
    std::snprintf(buf, sizeof buf, "%.14e", c);
  out << buf << "\n" << "selection rules: " << verdict << "\n";
  return 0;
}

// ---------------------------------------------------------- dilate command

namespace {

cmat matrix_from_json(const json &j) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) throw config_error("matrix must be a list of rows");
  const auto rows = static_cast<Index>(j.size());
  const auto cols = static_cast<Index>(j.front().size());
  cmat m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const auto &row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) throw config_error("matrix rows differ in length");
    for (Index c = 0; c < cols; ++c) {
      const auto &e = row[static_cast<std::size_t>(c)];
      if (e.is_number()) m(r, c) = e.get<double>();
      else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
        m(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
      else throw config_error("matrix entries must be numbers or [re, im] pairs");
    }
  }
  return m;
}

json matrix_to_json(const cmat &m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

} // namespace

json run_dilation(const json &spec, bool &ok) {
  if (!spec.is_object()) throw config_error("dilation spec must be a JSON object");
  static const std::set<std::string> known{"group", "space", "n", "charges", "kraus", "samples", "seed", "dump_unitary"};
  for (const auto &[key, v] : spec.items())
    if (!known.contains(key)) throw config_error("unknown dilation field '" + key + "'");
  if (!spec.contains("group") || !spec.contains("kraus")) throw config_error("dilation spec needs 'group' and 'kraus'");

  const std::string group = scalar<std::string>(spec["group"], "group");
  const int samples = spec.contains("samples") ? scalar<int>(spec["samples"], "samples") : 20;
  const std::uint64_t seed = spec.contains("seed") ? scalar<std::uint64_t>(spec["seed"], "seed") : 0xc0de;
  const bool dump = spec.contains("dump_unitary") && scalar<bool>(spec["dump_unitary"], "dump_unitary");

  GroupRep rep = GroupRep::cyclic(1, {0});
  if (group == "su2") {
    if (!spec.contains("space") || !spec["space"].is_array()) throw config_error("su2 needs a 'space' list");
    std::vector<Sector> sectors;
    for (const auto &s : spec["space"]) {
      if (!s.is_object() || !s.contains("l")) throw config_error("space entries need 'l'");
      const int mult = s.contains("multiplicity") ? scalar<int>(s["multiplicity"], "multiplicity") : 1;
      sectors.push_back({half_int_value(s["l"], "l"), mult});
    }
    rep = GroupRep::su2(SystemSpace(sectors));
  } else if (group == "cyclic") {
    if (!spec.contains("n") || !spec.contains("charges")) throw config_error("cyclic needs 'n' and 'charges'");
    rep = GroupRep::cyclic(scalar<int>(spec["n"], "n"), list<int>(spec["charges"], "charges"));
  } else {
    throw config_error("group must be 'su2' or 'cyclic'");
  }

  CovariantKrausSet set;
  if (!spec["kraus"].is_array()) throw config_error("'kraus' must be a list");
  for (const auto &e : spec["kraus"]) {
    if (!e.is_object() || !e.contains("j") || !e.contains("matrix")) throw config_error("kraus entries need 'j' and 'matrix'");
    CovariantKraus k;
    k.j = half_int_value(e["j"], "j");
    k.m = e.contains("m") ? half_int_value(e["m"], "m") : HalfInt(0);
    k.alpha = e.contains("alpha") ? scalar<int>(e["alpha"], "alpha") : 0;
    k.K = matrix_from_json(e["matrix"]);
    set.entries.push_back(std::move(k));
  }
  if (set.entries.empty()) throw config_error("'kraus' is empty");

  const CovarianceReport cov = verify_covariant_kraus(set, rep, samples, seed);
  const DilationResult dil = build_dilation(set, rep);

  double commute = 0;
  for (const auto &g : rep.elements(samples, seed ^ 0x9e37ULL)) {
    const cmat t = kron(rep.represent(g), dil.ancilla.represent(g));
    commute = std::max(commute, spectral_norm(commutator(dil.unitary_S, t)));
  }
  const double reproduction =
      (dil.induced_channel().choi() - set.channel().choi()).cwiseAbs().maxCoeff();
  const double unitarity = unitarity_residual(dil.unitary_S);

  json report;
  report["system_dim"] = dil.system_dim();
  report["kraus_count"] = set.entries.size();
  report["ancilla_dim"] = dil.ancilla_dim();
  report["singlet_index"] = dil.singlet_index;
  report["covariance_residual"] = cov.max_residual;
  report["unitarity_residual"] = unitarity;
  report["group_commutation_residual"] = commute;
  report["channel_reproduction_residual"] = reproduction;
  report["elements_checked"] = cov.elements_checked;
  ok = unitarity <= 1e-10 && commute < 1e-8 && reproduction <= 1e-9 &&
       dil.ancilla_dim() == static_cast<Index>(set.entries.size()) + 1;
  report["ok"] = ok;
  if (dump) report["unitary"] = matrix_to_json(dil.unitary_S);
  return report;
}

} // namespace rotframe
