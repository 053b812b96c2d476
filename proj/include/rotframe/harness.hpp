#pragma once

// Batch experiment driver: strict JSON configs, seeded sweeps, CSV rows.

#include "rotframe/half_int.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace rotframe {

class config_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Experiment {
  zinv_sweep,
  xrf_sweep,
  scheme1_sweep,
  scheme2_curve,
  degradation,
  lemma2_grid,
  lie_closure_table,
  synth_table,
};

std::string to_string(Experiment e);
Experiment parse_experiment(const std::string &name);

struct ExperimentConfig {
  Experiment experiment = Experiment::zinv_sweep;
  std::uint64_t seed = 1;
  int restarts = 8;
  int grid_points = 100000;
  double tolerance = 1e-12;
  int targets = 1;
  std::vector<HalfInt> l_sys{HalfInt::half()};
  std::vector<HalfInt> l_RZ;
  std::vector<int> N;
  bool optimal_N = false;
  std::vector<int> k{0};
  std::vector<double> x;
  double A = 1;
  std::vector<int> uses;
  std::vector<bool> fresh{true};
  std::vector<HalfInt> l1;
  std::vector<HalfInt> l2;
  std::vector<int> d;
  int layers = 9;
  std::string output;
  bool timing = false;
};

/// Unknown keys, wrong types and out-of-range values raise config_error.
ExperimentConfig parse_config(const nlohmann::json &j);
ExperimentConfig load_config(const std::string &path);

struct ExperimentOutput {
  std::string csv;
  nlohmann::json summary;
  /// Rows whose measured value exceeds its bound, plus rows that failed.
  int violations = 0;
};

/// Rows run on `threads` workers; output is in grid order and identical for
/// any thread count.
ExperimentOutput run(const ExperimentConfig &config, int threads = 1);

/// Column names of the CSV written for an experiment.
std::vector<std::string> csv_header(Experiment e);

/// %.15g, the number format of every CSV cell.
std::string format_number(double v);

/// `cg l1 m1 l2 m2 J M`; returns the process exit code.
int cg_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

/// Builds and checks the dilation of a covariant Kraus set given as JSON.
/// Sets `ok` false when a residual exceeds its threshold.
nlohmann::json run_dilation(const nlohmann::json &spec, bool &ok);

} // namespace rotframe
