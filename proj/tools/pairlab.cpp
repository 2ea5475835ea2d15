// pairlab: exact, thermodynamic-limit, and mean-field solvers for the
// attractive bosonic pairing model, wired into reproducible CSV runs.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pairing/continuum.hpp"
#include "pairing/fock_oracle.hpp"
#include "pairing/integrability.hpp"
#include "pairing/io.hpp"
#include "pairing/meanfield.hpp"
#include "pairing/model.hpp"
#include "pairing/richardson.hpp"

namespace {

using namespace pairing;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitVerification = 4;

std::string stem_path(const std::string& out, const std::string& suffix) {
  const auto dot = out.rfind('.');
  if (dot == std::string::npos || out.find('/', dot) != std::string::npos) return out + suffix;
  return out.substr(0, dot) + suffix + out.substr(dot);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw config_error("cannot open output file: " + path);
  return f;
}

double effective_coupling(double g, const RunConfig& cfg, const LevelSpectrum& spectrum) {
  return cfg.g_effective ? g : g / spectrum.size();
}

int cmd_oracle(const RunConfig& cfg) {
  const LevelSpectrum spectrum = spectrum_from_config(cfg);
  const PairSector sector = sector_from_config(spectrum, cfg);
  const std::vector<double> gs = sweep_values(cfg.g);

  struct Point {
    Eigen::VectorXd values;
    std::vector<double> occupations;
  };
  std::vector<Point> points(gs.size());
  // A too-large basis should fail before threads start.
  PairBasis(spectrum.size(), sector.pairs(), cfg.basis_cap);
  parallel_map(gs.size(), cfg.jobs, [&](std::size_t k) {
    const DenseHamiltonian h =
        build_hamiltonian(spectrum, sector, effective_coupling(gs[k], cfg, spectrum), cfg.basis_cap);
    const EigenSystem sys = diagonalize(h);
    points[k].values = sys.values;
    points[k].occupations = occupations_exact(sys.vectors.col(0), *h.basis, sector.nu());
  });

  auto out = open_out(cfg.out);
  out << "g,index,energy\n";
  for (std::size_t k = 0; k < gs.size(); ++k) {
    for (Eigen::Index i = 0; i < points[k].values.size(); ++i) {
      out << format_double(gs[k]) << ',' << i << ',' << format_double(points[k].values(i))
          << '\n';
    }
  }
  auto occ = open_out(stem_path(cfg.out, "_occupations"));
  occ << "g,level,mean_bosons\n";
  for (std::size_t k = 0; k < gs.size(); ++k) {
    for (std::size_t a = 0; a < points[k].occupations.size(); ++a) {
      occ << format_double(gs[k]) << ',' << a << ',' << format_double(points[k].occupations[a])
          << '\n';
    }
  }
  write_manifest(cfg.out, "oracle", cfg);
  return kExitOk;
}

int cmd_richardson(const RunConfig& cfg) {
  const LevelSpectrum spectrum = spectrum_from_config(cfg);
  const PairSector sector = sector_from_config(spectrum, cfg);
  std::vector<double> gs = sweep_values(cfg.g);
  if (!std::is_sorted(gs.begin(), gs.end())) {
    throw config_error("richardson sweep must be ascending in g");
  }
  const std::vector<int> label = cfg.label.empty() ? ground_label(spectrum, sector) : cfg.label;

  RichardsonOptions opt;
  opt.accept_tol = cfg.tol;
  opt.seed = cfg.seed;

  std::vector<double> g_eff(gs.size());
  for (std::size_t k = 0; k < gs.size(); ++k) g_eff[k] = effective_coupling(gs[k], cfg, spectrum);

  std::vector<ContinuationRecord> trajectory;
  const std::vector<RootSet> checkpoints =
      solve_at_checkpoints(spectrum, sector, label, g_eff, opt, &trajectory);

  std::vector<double> energies(gs.size());
  for (std::size_t k = 0; k < gs.size(); ++k) {
    energies[k] = energy_from_roots(checkpoints[k], spectrum, sector);
  }

  double max_diff = 0.0;
  std::vector<double> oracle_energy(gs.size(), 0.0);
  if (cfg.verify) {
    parallel_map(gs.size(), cfg.jobs, [&](std::size_t k) {
      const EigenSystem sys =
          diagonalize(build_hamiltonian(spectrum, sector, g_eff[k], cfg.basis_cap));
      double best = sys.values(0);
      for (Eigen::Index i = 0; i < sys.values.size(); ++i) {
        if (std::abs(sys.values(i) - energies[k]) < std::abs(best - energies[k])) {
          best = sys.values(i);
        }
      }
      oracle_energy[k] = best;
    });
    for (std::size_t k = 0; k < gs.size(); ++k) {
      max_diff = std::max(max_diff, std::abs(energies[k] - oracle_energy[k]));
    }
    std::cout << "verify: max |E_richardson - E_oracle| = " << format_double(max_diff) << '\n';
  }

  auto out = open_out(cfg.out);
  out << (cfg.verify ? "g,energy,oracle_energy,abs_diff\n" : "g,energy\n");
  for (std::size_t k = 0; k < gs.size(); ++k) {
    out << format_double(gs[k]) << ',' << format_double(energies[k]);
    if (cfg.verify) {
      out << ',' << format_double(oracle_energy[k]) << ','
          << format_double(std::abs(energies[k] - oracle_energy[k]));
    }
    out << '\n';
  }
  auto roots = open_out(stem_path(cfg.out, "_roots"));
  roots << "g,root_index,re_t,im_t,residual\n";
  for (const auto& rec : trajectory) {
    for (std::size_t i = 0; i < rec.roots.size(); ++i) {
      roots << format_double(rec.g_eff) << ',' << i << ',' << format_double(rec.roots[i].real())
            << ',' << format_double(rec.roots[i].imag()) << ',' << format_double(rec.residual)
            << '\n';
    }
  }
  write_manifest(cfg.out, "richardson", cfg);
  return kExitOk;
}

int cmd_continuum(const RunConfig& cfg) {
  const std::vector<double> gs = sweep_values(cfg.g);
  const std::vector<double> rhos = sweep_values(cfg.rho);
  double epsilon1 = 0.0;
  if (cfg.spectrum.rfind("equal:", 0) == 0) {
    const int L = std::stoi(cfg.spectrum.substr(6));
    if (L > 0) epsilon1 = 1.0 / L;
  }

  std::vector<ContinuumSolution> grid(gs.size() * rhos.size());
  parallel_map(grid.size(), cfg.jobs, [&](std::size_t k) {
    const double rho = rhos[k / gs.size()];
    const double g = gs[k % gs.size()];
    grid[k] = solve_continuum(g, rho, epsilon1);
  });

  auto out = open_out(cfg.out);
  out << "g_bare,rho,branch,b,mu,delta,gap,energy_per_level,depletion_fraction,"
         "condensate_fraction,g_c\n";
  for (const auto& sol : grid) {
    out << format_double(sol.g_bare) << ',' << format_double(sol.rho) << ','
        << to_string(sol.branch) << ',' << format_double(sol.b) << ',' << format_double(sol.mu)
        << ',' << format_double(sol.delta) << ',' << format_double(sol.gap) << ','
        << format_double(sol.energy_per_level) << ','
        << format_double(sol.depletion_per_level / sol.rho) << ','
        << format_double(sol.condensate_fraction) << ','
        << format_double(critical_coupling(sol.rho)) << '\n';
  }
  write_manifest(cfg.out, "continuum", cfg);
  return kExitOk;
}

int cmd_meanfield(const RunConfig& cfg) {
  const LevelSpectrum spectrum = spectrum_from_config(cfg);
  const PairSector sector = sector_from_config(spectrum, cfg);
  const double n_b = sector.bosons();
  const double rho = density(spectrum, sector);
  const std::vector<double> gs = sweep_values(cfg.g);

  struct Row {
    MeanFieldSolution naive;
    MeanFieldSolution modified;
    bool modified_valid = false;
  };
  std::vector<Row> rows(gs.size());
  parallel_map(gs.size(), cfg.jobs, [&](std::size_t k) {
    const double g_eff = effective_coupling(gs[k], cfg, spectrum);
    const double g_bare = g_eff * spectrum.size();
    rows[k].naive = solve_naive_mf(spectrum, n_b, g_eff);
    if (g_bare <= critical_coupling(rho)) {
      rows[k].modified = solve_modified_mf(spectrum, n_b, g_eff);
      rows[k].modified_valid = true;
    }
  });

  auto out = open_out(cfg.out);
  out << "g,scheme,status,mu,delta,energy,N0\n";
  const auto emit = [&](double g, const char* scheme, const MeanFieldSolution& s,
                        const char* status) {
    out << format_double(g) << ',' << scheme << ',' << status << ',' << format_double(s.mu)
        << ',' << format_double(s.delta) << ',' << format_double(s.energy) << ','
        << format_double(s.condensate) << '\n';
  };
  for (std::size_t k = 0; k < gs.size(); ++k) {
    emit(gs[k], "naive", rows[k].naive,
         rows[k].naive.status == MfStatus::Solved ? "Solved" : "NoStationaryPoint");
    if (rows[k].modified_valid) {
      emit(gs[k], "modified", rows[k].modified, "Solved");
    } else {
      out << format_double(gs[k]) << ",modified,BeyondValidity,nan,nan,nan,nan\n";
    }
  }

  if (cfg.dump_occupations) {
    auto occ = open_out(stem_path(cfg.out, "_occupations"));
    occ << "g,scheme,level,occupation,quasiparticle_energy\n";
    for (std::size_t k = 0; k < gs.size(); ++k) {
      const auto dump = [&](const char* scheme, const MeanFieldSolution& s) {
        if (s.status != MfStatus::Solved) return;
        const std::vector<double> qp = quasiparticle_energies(s.mu, s.delta, spectrum);
        for (std::size_t a = 0; a < s.occupations.size(); ++a) {
          occ << format_double(gs[k]) << ',' << scheme << ',' << a << ','
              << format_double(s.occupations[a]) << ',' << format_double(qp[a]) << '\n';
        }
      };
      dump("naive", rows[k].naive);
      if (rows[k].modified_valid) dump("modified", rows[k].modified);
    }
  }
  write_manifest(cfg.out, "meanfield", cfg);
  return kExitOk;
}

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

int cmd_verify(const RunConfig& cfg) {
  std::vector<CheckResult> checks;
  const auto tol = [&](double preset) { return cfg.check_tol > 0.0 ? cfg.check_tol : preset; };

  {  // Closed-form two-level benchmark: both solvers hit -sqrt(2).
    CheckResult c{"two-level-closed-form", false, ""};
    const LevelSpectrum sp = LevelSpectrum::from_levels({{0.0, 1, 0}, {1.0, 1, 0}});
    const PairSector sec(sp, 1);
    const double expected = -std::sqrt(2.0);
    const double e_rich =
        energy_from_roots(solve_state(sp, sec, ground_label(sp, sec), 1.0).final, sp, sec);
    const double e_oracle = diagonalize(build_hamiltonian(sp, sec, 1.0)).values(0);
    const double worst = std::max(std::abs(e_rich - expected), std::abs(e_oracle - expected));
    c.pass = worst <= tol(1e-10);
    c.detail = "max deviation from -sqrt(2): " + format_double(worst);
    checks.push_back(c);
  }
  {  // Bethe roots against brute force across a coupling sweep.
    CheckResult c{"oracle-vs-richardson", false, ""};
    const LevelSpectrum sp = equal_spacing_spectrum(4);
    const PairSector sec(sp, 2);
    std::vector<double> g_eff;
    for (int k = 1; k <= 10; ++k) g_eff.push_back(2.0 * k / 10.0 / 4.0);
    const auto roots = solve_at_checkpoints(sp, sec, ground_label(sp, sec), g_eff);
    double worst = 0.0;
    for (std::size_t k = 0; k < g_eff.size(); ++k) {
      const double e_rich = energy_from_roots(roots[k], sp, sec);
      const double e_oracle = diagonalize(build_hamiltonian(sp, sec, g_eff[k])).values(0);
      worst = std::max(worst, std::abs(e_rich - e_oracle));
    }
    c.pass = worst <= tol(1e-8);
    c.detail = "max |dE| over 10 couplings: " + format_double(worst);
    checks.push_back(c);
  }
  {  // Conserved charges commute and share the Hamiltonian eigenbasis.
    CheckResult c{"commuting-charges", false, ""};
    const LevelSpectrum sp = equal_spacing_spectrum(3);
    const PairSector sec(sp, 2);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> uni(0.1, 1.0);
    std::vector<double> xi = {uni(rng), 1.0 + uni(rng), 2.0 + uni(rng)};
    const double g = 0.7;
    std::vector<Eigen::MatrixXd> charges;
    for (int i = 0; i < sp.size(); ++i) charges.push_back(build_charge(i, sp, xi, g, sec).matrix);
    double worst_comm = 0.0;
    for (std::size_t i = 0; i < charges.size(); ++i) {
      for (std::size_t j = i + 1; j < charges.size(); ++j) {
        worst_comm = std::max(worst_comm, commutator_norm(charges[i], charges[j]) /
                                              (charges[i].norm() * charges[j].norm()));
      }
    }
    const DenseHamiltonian h = build_two_parameter_hamiltonian(sp, xi, g, sec);
    const double leakage = shared_eigenbasis_check(h.matrix, charges);
    c.pass = worst_comm <= tol(1e-10) && leakage <= tol(1e-8);
    c.detail = "commutator " + format_double(worst_comm) + ", leakage " + format_double(leakage);
    checks.push_back(c);
  }
  {  // Critical coupling values and the two strong-branch routes.
    CheckResult c{"critical-coupling", false, ""};
    const double d1 = std::abs(critical_coupling(1.0) - 1.8204784532536746);
    const double d2 = std::abs(critical_coupling(2.0) - 2.8853900817779268);
    const StrongClosedForm closed = strong_closed_form(3.0, 1.0);
    const auto [mu, delta] = solve_gap_equations(3.0, 1.0);
    const double droutes = std::max(std::abs(closed.mu - mu), std::abs(closed.delta - delta));
    c.pass = d1 <= tol(1e-6) && d2 <= tol(1e-6) && droutes <= tol(1e-8);
    c.detail = "gc deviations " + format_double(std::max(d1, d2)) + ", route gap " +
               format_double(droutes);
    checks.push_back(c);
  }
  {  // Weak-branch depletion reaches N_b exactly at g_c.
    CheckResult c{"depletion-at-gc", false, ""};
    double worst = 0.0;
    for (double rho : {0.5, 1.0, 2.0}) {
      worst = std::max(worst, consistency_depletion_at_gc(rho, 1000.0));
    }
    c.pass = worst <= tol(1e-6);
    c.detail = "max relative mismatch: " + format_double(worst);
    checks.push_back(c);
  }
  {  // Both branches meet continuously at the transition.
    CheckResult c{"branch-matching", false, ""};
    const double gc = critical_coupling(1.0);
    const double e_weak = weak_energy(gc, 1.0, solve_b(gc, 1.0));
    const auto [mu, delta] = solve_gap_equations(gc + 1e-6, 1.0);
    const double e_strong = strong_energy(mu, delta, gc + 1e-6, 1.0);
    const double mismatch = std::abs(e_weak - e_strong);
    const double gap = strong_closed_form(gc + 1e-4, 1.0).gap;
    c.pass = mismatch <= tol(1e-5) && gap > 0.0 && gap < 1e-2;
    c.detail = "energy mismatch " + format_double(mismatch) + ", gap(gc+1e-4) " +
               format_double(gap);
    checks.push_back(c);
  }

  bool all_pass = true;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "PASS  " : "FAIL  ") << c.name << " (" << c.detail << ")\n";
    if (!c.pass) {
      all_pass = false;
      std::cerr << "verification failed: " << c.name << '\n';
    }
  }
  return all_pass ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bosonic pairing model laboratory"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
  bool flag_verify = false;
  bool flag_dump = false;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value config file");
    const auto kv = [&](const std::string& flag, const std::string& key, const std::string& help) {
      sub->add_option_function<std::string>(
          flag, [&overrides, key](const std::string& v) { overrides.emplace_back(key, v); },
          help);
    };
    kv("--spectrum", "spectrum", "equal:<L> or file:<path>");
    kv("-L,--levels", "spectrum_levels", "equal-spacing level count");
    kv("-M,--pairs", "M", "number of pairs");
    kv("--nu", "nu", "comma-separated seniorities");
    kv("-g,--coupling", "g_single", "single coupling value");
    kv("--g-start", "g_start", "sweep start");
    kv("--g-end", "g_end", "sweep end");
    kv("--g-points", "g_points", "sweep points");
    kv("--g-scale", "g_scale", "log or linear");
    kv("--rho", "rho_single", "single density value");
    kv("--rho-start", "rho_start", "density sweep start");
    kv("--rho-end", "rho_end", "density sweep end");
    kv("--rho-points", "rho_points", "density sweep points");
    kv("--g-convention", "g_convention", "bare (default) or effective");
    kv("--tol", "tol", "solver acceptance tolerance");
    kv("--out,-o", "out", "output CSV path");
    kv("--seed", "seed", "jitter RNG seed");
    kv("--jobs,-j", "jobs", "worker threads for sweep grids");
    kv("--basis-cap", "basis_cap", "maximum oracle basis dimension");
    kv("--label", "label", "comma-separated pair occupancies at g=0");
    kv("--check-tol", "check_tol", "override every verification tolerance");
    sub->add_flag("--verify", flag_verify, "cross-check against the brute-force oracle");
    sub->add_flag("--dump-occupations", flag_dump, "also write per-level occupations");
  };

  CLI::App* oracle = app.add_subcommand("oracle", "dense diagonalization in the pair basis");
  CLI::App* richardson = app.add_subcommand("richardson", "Bethe-root continuation solver");
  CLI::App* continuum = app.add_subcommand("continuum", "thermodynamic-limit branches");
  CLI::App* meanfield = app.add_subcommand("meanfield", "naive and condensate-aware mean field");
  CLI::App* verify = app.add_subcommand("verify", "run the cross-check suite");
  for (CLI::App* sub : {oracle, richardson, continuum, meanfield, verify}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = parse_config_file(config_path, cfg);
    for (const auto& [key, value] : overrides) {
      if (key == "spectrum_levels") {
        apply_config_entry(cfg, "spectrum", "equal:" + value);
      } else if (key == "g_single") {
        apply_config_entry(cfg, "g_start", value);
        apply_config_entry(cfg, "g_end", value);
        apply_config_entry(cfg, "g_points", "1");
      } else if (key == "rho_single") {
        apply_config_entry(cfg, "rho_start", value);
        apply_config_entry(cfg, "rho_end", value);
        apply_config_entry(cfg, "rho_points", "1");
      } else {
        apply_config_entry(cfg, key, value);
      }
    }
    cfg.verify = cfg.verify || flag_verify;
    cfg.dump_occupations = cfg.dump_occupations || flag_dump;
    validate(cfg);

    if (oracle->parsed()) return cmd_oracle(cfg);
    if (richardson->parsed()) return cmd_richardson(cfg);
    if (continuum->parsed()) return cmd_continuum(cfg);
    if (meanfield->parsed()) return cmd_meanfield(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
    return kExitConfig;
  } catch (const input_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const error& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return kExitSolver;
  }
}
