#include "pairing/io.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace pairing {

std::vector<double> sweep_values(const SweepSpec& spec) {
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(spec.points));
  if (spec.points == 1) {
    values.push_back(spec.start);
    return values;
  }
  for (int k = 0; k < spec.points; ++k) {
    const double s = static_cast<double>(k) / (spec.points - 1);
    values.push_back(spec.log_scale ? spec.start * std::pow(spec.end / spec.start, s)
                                    : spec.start + s * (spec.end - spec.start));
  }
  return values;
}

namespace {

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw config_error("key '" + key + "': expected integer, got '" + value + "'");
  }
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw config_error("key '" + key + "': expected real number, got '" + value + "'");
  }
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_int(key, item));
  return out;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value) {
  if (key == "spectrum") {
    config.spectrum = value;
  } else if (key == "M") {
    config.pairs = parse_int(key, value);
  } else if (key == "nu") {
    config.nu = parse_int_list(key, value);
  } else if (key == "g_start") {
    config.g.start = parse_real(key, value);
  } else if (key == "g_end") {
    config.g.end = parse_real(key, value);
  } else if (key == "g_points") {
    config.g.points = parse_int(key, value);
  } else if (key == "g_scale") {
    if (value != "log" && value != "linear") {
      throw config_error("g_scale must be 'log' or 'linear'");
    }
    config.g.log_scale = value == "log";
  } else if (key == "rho_start") {
    config.rho.start = parse_real(key, value);
  } else if (key == "rho_end") {
    config.rho.end = parse_real(key, value);
  } else if (key == "rho_points") {
    config.rho.points = parse_int(key, value);
  } else if (key == "rho_scale") {
    if (value != "log" && value != "linear") {
      throw config_error("rho_scale must be 'log' or 'linear'");
    }
    config.rho.log_scale = value == "log";
  } else if (key == "tol") {
    config.tol = parse_real(key, value);
  } else if (key == "out") {
    config.out = value;
  } else if (key == "seed") {
    config.seed = static_cast<std::uint64_t>(parse_int(key, value));
  } else if (key == "jobs") {
    config.jobs = parse_int(key, value);
  } else if (key == "basis_cap") {
    config.basis_cap = static_cast<std::size_t>(parse_int(key, value));
  } else if (key == "label") {
    config.label = parse_int_list(key, value);
  } else if (key == "g_convention") {
    if (value != "bare" && value != "effective") {
      throw config_error("g_convention must be 'bare' or 'effective'");
    }
    config.g_effective = value == "effective";
  } else if (key == "dump_occupations") {
    config.dump_occupations = parse_int(key, value) != 0;
  } else if (key == "check_tol") {
    config.check_tol = parse_real(key, value);
  } else {
    throw config_error("unknown config key '" + key + "'");
  }
}

RunConfig parse_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw config_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    apply_config_entry(base, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
  }
  return base;
}

void validate(const RunConfig& config) {
  if (config.g.start <= 0.0 || config.g.end <= 0.0) {
    throw config_error("coupling sweep bounds must be positive");
  }
  if (config.g.points < 1) throw config_error("g_points must be >= 1");
  if (config.rho.start <= 0.0 || config.rho.end <= 0.0) {
    throw config_error("density sweep bounds must be positive");
  }
  if (config.rho.points < 1) throw config_error("rho_points must be >= 1");
  if (config.tol < 1e-14 || config.tol > 1e-6) {
    throw config_error("tol must lie in [1e-14, 1e-6]");
  }
  if (config.jobs < 1) throw config_error("jobs must be >= 1");
  if (config.spectrum.rfind("equal:", 0) != 0 && config.spectrum.rfind("file:", 0) != 0) {
    throw config_error("spectrum must be 'equal:<L>' or 'file:<path>'");
  }
}

LevelSpectrum spectrum_from_config(const RunConfig& config) {
  if (config.spectrum.rfind("equal:", 0) == 0) {
    return equal_spacing_spectrum(parse_int("spectrum", config.spectrum.substr(6)));
  }
  return load_spectrum_file(config.spectrum.substr(5));
}

PairSector sector_from_config(const LevelSpectrum& spectrum, const RunConfig& config) {
  const int pairs = config.pairs >= 0 ? config.pairs : spectrum.size() / 2;
  if (config.nu.empty()) return PairSector(spectrum, pairs);
  return PairSector(spectrum, pairs, config.nu);
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string manifest_path(const std::string& out_path) { return out_path + ".manifest"; }

void write_manifest(const std::string& out_path, const std::string& subcommand,
                    const RunConfig& config) {
  std::ofstream out(manifest_path(out_path));
  if (!out) throw config_error("cannot write manifest next to " + out_path);
  std::map<std::string, std::string> entries;
  entries["version"] = kToolVersion;
  entries["subcommand"] = subcommand;
  entries["spectrum"] = config.spectrum;
  entries["M"] = std::to_string(config.pairs);
  if (!config.nu.empty()) {
    std::string joined;
    for (std::size_t i = 0; i < config.nu.size(); ++i) {
      joined += (i ? "," : "") + std::to_string(config.nu[i]);
    }
    entries["nu"] = joined;
  }
  entries["g_start"] = format_double(config.g.start);
  entries["g_end"] = format_double(config.g.end);
  entries["g_points"] = std::to_string(config.g.points);
  entries["g_scale"] = config.g.log_scale ? "log" : "linear";
  entries["rho_start"] = format_double(config.rho.start);
  entries["rho_end"] = format_double(config.rho.end);
  entries["rho_points"] = std::to_string(config.rho.points);
  entries["tol"] = format_double(config.tol);
  entries["seed"] = std::to_string(config.seed);
  entries["jobs"] = std::to_string(config.jobs);
  entries["basis_cap"] = std::to_string(config.basis_cap);
  entries["g_convention"] = config.g_effective ? "effective" : "bare";
  if (!config.label.empty()) {
    std::string joined;
    for (std::size_t i = 0; i < config.label.size(); ++i) {
      joined += (i ? "," : "") + std::to_string(config.label[i]);
    }
    entries["label"] = joined;
  }
  for (const auto& [key, value] : entries) out << key << " = " << value << '\n';
}

void parallel_map(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const int workers = std::min<int>(jobs, static_cast<int>(n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace pairing
