#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "pairing/model.hpp"

namespace pairing {

struct config_error : input_error {
  using input_error::input_error;
};

inline constexpr const char* kToolVersion = "0.1.0";

struct SweepSpec {
  double start = 1.0;
  double end = 1.0;
  int points = 1;
  bool log_scale = false;
};

std::vector<double> sweep_values(const SweepSpec& spec);

// Flat key=value configuration; command-line flags override file entries.
struct RunConfig {
  // "equal:<L>" or "file:<path>"
  std::string spectrum = "equal:4";
  int pairs = -1;                 // -1: half filling rounded down
  std::vector<int> nu;            // empty: take from spectrum
  SweepSpec g{1.0, 1.0, 1, false};
  SweepSpec rho{1.0, 1.0, 1, false};
  double tol = 1e-11;
  std::string out = "out.csv";
  std::uint64_t seed = 42;
  int jobs = 1;
  bool verify = false;
  std::size_t basis_cap = 20000;
  std::vector<int> label;         // empty: ground label
  bool g_effective = false;       // interpret the g sweep as g_eff instead of g_bare
  bool dump_occupations = false;
  double check_tol = 0.0;         // verify-only: overrides every comparison tolerance
};

// Parses "key = value" lines, '#' comments. Unknown keys are rejected.
RunConfig parse_config_file(const std::string& path, RunConfig base = {});
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);
void validate(const RunConfig& config);

LevelSpectrum spectrum_from_config(const RunConfig& config);
PairSector sector_from_config(const LevelSpectrum& spectrum, const RunConfig& config);

// 17 significant digits, '.' decimal point, no locale dependence.
std::string format_double(double x);

std::string manifest_path(const std::string& out_path);
void write_manifest(const std::string& out_path, const std::string& subcommand,
                    const RunConfig& config);

// Runs fn(0..n-1) on up to `jobs` threads; callers index a pre-sized result
// buffer so output order is independent of scheduling.
void parallel_map(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace pairing
