#include "pairing/richardson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Dense>

namespace pairing {

namespace {

double configuration_scale(const LevelSpectrum& spectrum) {
  const double band = spectrum.level(spectrum.size() - 1).epsilon - spectrum.level(0).epsilon;
  return std::max(band, 1.0);
}

void check_separations(const std::vector<Complex>& roots, const LevelSpectrum& spectrum) {
  const double tiny = 1e-13 * configuration_scale(spectrum);
  const std::size_t m = roots.size();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (std::abs(roots[i] - roots[j]) < tiny) {
        throw singular_configuration_error("coincident Bethe roots");
      }
    }
    for (int a = 0; a < spectrum.size(); ++a) {
      if (std::abs(roots[i] - spectrum.level(a).epsilon) < tiny) {
        throw singular_configuration_error("Bethe root collides with a level energy");
      }
    }
  }
}

Eigen::MatrixXcd jacobian(const std::vector<Complex>& roots, const LevelSpectrum& spectrum,
                          const PairSector& sector) {
  const auto m = static_cast<Eigen::Index>(roots.size());
  Eigen::MatrixXcd jac = Eigen::MatrixXcd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    Complex diag = 0.0;
    for (int a = 0; a < spectrum.size(); ++a) {
      const Complex d = roots[static_cast<std::size_t>(i)] - spectrum.level(a).epsilon;
      diag -= static_cast<double>(sector.charge(spectrum, a)) / (d * d);
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j == i) continue;
      const Complex d = roots[static_cast<std::size_t>(i)] - roots[static_cast<std::size_t>(j)];
      diag -= 2.0 / (d * d);
      jac(i, j) = 2.0 / (d * d);
    }
    jac(i, i) = diag;
  }
  return jac;
}

// Full Newton convergence at fixed coupling; returns false when it stalls.
bool newton_solve(std::vector<Complex>& roots, const LevelSpectrum& spectrum,
                  const PairSector& sector, double g_eff, const RichardsonOptions& opt) {
  if (roots.empty()) return true;
  for (int iter = 0; iter < opt.max_newton_iters; ++iter) {
    double defect;
    try {
      defect = max_defect(richardson_residual(roots, spectrum, sector, g_eff));
    } catch (const singular_configuration_error&) {
      return false;
    }
    if (defect <= opt.accept_tol) return true;
    const NewtonStepResult step = newton_step(roots, spectrum, sector, g_eff);
    if (!step.accepted) return false;
    if (step.defect_norm <= opt.accept_tol) return true;
  }
  return max_defect(richardson_residual(roots, spectrum, sector, g_eff)) <= opt.accept_tol;
}

void jitter_roots(std::vector<Complex>& roots, const LevelSpectrum& spectrum,
                  std::mt19937_64& rng) {
  if (roots.empty()) return;
  double min_sep = configuration_scale(spectrum);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      min_sep = std::min(min_sep, std::abs(roots[i] - roots[j]));
    }
    for (int a = 0; a < spectrum.size(); ++a) {
      min_sep = std::min(min_sep, std::abs(roots[i] - spectrum.level(a).epsilon));
    }
  }
  // Complex jitter lets a merging real pair leave the axis; a purely real
  // perturbation cannot, since Newton preserves realness.
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double scale = 0.25 * min_sep;
  for (auto& t : roots) t += scale * Complex(gauss(rng), gauss(rng));
}

void update_crossing_flag(const ContinuationRecord& prev, const ContinuationRecord& cur,
                          const LevelSpectrum& spectrum, bool* ok) {
  const double im_tol = 1e-8 * configuration_scale(spectrum);
  for (std::size_t i = 0; i < cur.roots.size(); ++i) {
    if (std::abs(prev.roots[i].imag()) > im_tol || std::abs(cur.roots[i].imag()) > im_tol) continue;
    for (int a = 0; a < spectrum.size(); ++a) {
      const double eps = spectrum.level(a).epsilon;
      const bool before = prev.roots[i].real() > eps;
      const bool after = cur.roots[i].real() > eps;
      if (before != after) *ok = false;
    }
  }
}

}  // namespace

std::vector<Complex> richardson_residual(const std::vector<Complex>& roots,
                                         const LevelSpectrum& spectrum, const PairSector& sector,
                                         double g_eff) {
  check_separations(roots, spectrum);
  const std::size_t m = roots.size();
  std::vector<Complex> defects(m, Complex(2.0 / g_eff, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (int a = 0; a < spectrum.size(); ++a) {
      defects[i] += static_cast<double>(sector.charge(spectrum, a)) /
                    (roots[i] - spectrum.level(a).epsilon);
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (j != i) defects[i] += 2.0 / (roots[i] - roots[j]);
    }
  }
  return defects;
}

double max_defect(const std::vector<Complex>& defects) {
  double worst = 0.0;
  for (const auto& d : defects) worst = std::max(worst, std::abs(d));
  return worst;
}

std::vector<double> cluster_positions(int n, int C) {
  if (n < 1) return {};
  if (n == 1) return {static_cast<double>(C)};
  // The cluster equation is the stationarity condition for the roots of the
  // generalized Laguerre polynomial L_n^(C-1); the Jacobi matrix of that
  // orthogonal family has them as eigenvalues.
  const double alpha = C - 1.0;
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    jacobi(k, k) = 2.0 * k + alpha + 1.0;
    if (k > 0) {
      const double off = std::sqrt(k * (k + alpha));
      jacobi(k, k - 1) = off;
      jacobi(k - 1, k) = off;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  if (solver.info() != Eigen::Success) {
    throw initialization_failed_error("cluster position eigensolve failed for n=" +
                                      std::to_string(n));
  }
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) x[static_cast<std::size_t>(k)] = solver.eigenvalues()(k);
  return x;
}

std::vector<int> ground_label(const LevelSpectrum& spectrum, const PairSector& sector) {
  std::vector<int> label(static_cast<std::size_t>(spectrum.size()), 0);
  label[0] = sector.pairs();
  return label;
}

RootSet initial_roots(const LevelSpectrum& spectrum, const PairSector& sector,
                      const std::vector<int>& label, double g0, const RichardsonOptions& opt) {
  if (static_cast<int>(label.size()) != spectrum.size()) {
    throw invalid_sector_error("label length does not match spectrum");
  }
  if (std::any_of(label.begin(), label.end(), [](int n) { return n < 0; }) ||
      std::accumulate(label.begin(), label.end(), 0) != sector.pairs()) {
    throw invalid_sector_error("label occupancies must be >= 0 and sum to M");
  }
  if (g0 <= 0.0) throw invalid_sector_error("initialization coupling must be positive");

  RootSet rs;
  rs.g_eff = g0;
  rs.origin = label;
  for (int a = 0; a < spectrum.size(); ++a) {
    const int n = label[static_cast<std::size_t>(a)];
    if (n == 0) continue;
    for (double x : cluster_positions(n, sector.charge(spectrum, a))) {
      rs.roots.emplace_back(spectrum.level(a).epsilon - 0.5 * g0 * x, 0.0);
    }
  }
  if (rs.roots.empty()) {
    rs.residual = 0.0;
    return rs;
  }

  std::mt19937_64 rng(opt.seed);
  for (int attempt = 0; attempt <= opt.jitter_retries; ++attempt) {
    std::vector<Complex> trial = rs.roots;
    if (attempt > 0) jitter_roots(trial, spectrum, rng);
    const NewtonStepResult polish = newton_step(trial, spectrum, sector, g0);
    if (polish.accepted && polish.defect_norm <= 0.1 &&
        newton_solve(trial, spectrum, sector, g0, opt)) {
      rs.roots = std::move(trial);
      rs.residual = max_defect(richardson_residual(rs.roots, spectrum, sector, g0));
      return rs;
    }
  }
  throw initialization_failed_error("cluster initialization did not converge at g0=" +
                                    std::to_string(g0));
}

NewtonStepResult newton_step(std::vector<Complex>& roots, const LevelSpectrum& spectrum,
                             const PairSector& sector, double g_eff) {
  NewtonStepResult result;
  if (roots.empty()) {
    result.accepted = true;
    return result;
  }
  std::vector<Complex> defects;
  try {
    defects = richardson_residual(roots, spectrum, sector, g_eff);
  } catch (const singular_configuration_error&) {
    return result;
  }
  const double defect0 = max_defect(defects);
  result.defect_norm = defect0;

  const auto m = static_cast<Eigen::Index>(roots.size());
  Eigen::VectorXcd f(m);
  for (Eigen::Index i = 0; i < m; ++i) f(i) = defects[static_cast<std::size_t>(i)];
  const Eigen::MatrixXcd jac = jacobian(roots, spectrum, sector);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(jac);
  const Eigen::VectorXcd udiag = lu.matrixLU().diagonal();
  double umin = std::numeric_limits<double>::infinity();
  double umax = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    umin = std::min(umin, std::abs(udiag(i)));
    umax = std::max(umax, std::abs(udiag(i)));
  }
  if (!(umax > 0.0) || umin < 1e-14 * umax) return result;  // singular Jacobian

  const Eigen::VectorXcd delta = lu.solve(f);
  if (!delta.allFinite()) return result;

  double lambda = 1.0;
  for (int halving = 0; halving <= 30; ++halving, lambda *= 0.5) {
    std::vector<Complex> trial(roots.size());
    for (Eigen::Index i = 0; i < m; ++i) {
      trial[static_cast<std::size_t>(i)] = roots[static_cast<std::size_t>(i)] - lambda * delta(i);
    }
    double defect1;
    try {
      defect1 = max_defect(richardson_residual(trial, spectrum, sector, g_eff));
    } catch (const singular_configuration_error&) {
      continue;
    }
    if (defect1 < defect0) {
      roots = std::move(trial);
      result.accepted = true;
      result.step_norm = lambda * delta.norm();
      result.defect_norm = defect1;
      return result;
    }
  }
  // Exact fixed point: no direction improves because there is nothing left
  // to improve.
  if (defect0 <= 1e-13 * std::abs(2.0 / g_eff)) {
    result.accepted = true;
    result.step_norm = 0.0;
    return result;
  }
  return result;
}

ContinuationResult continue_in_g(const RootSet& start, double g_target,
                                 const LevelSpectrum& spectrum, const PairSector& sector,
                                 const RichardsonOptions& opt) {
  if (g_target <= 0.0) throw invalid_sector_error("target coupling must be positive");
  ContinuationResult out;
  out.final = start;
  out.trajectory.push_back({start.g_eff, start.roots, start.residual});
  if (start.roots.empty()) {
    out.final.g_eff = g_target;
    return out;
  }
  if (start.g_eff == g_target) return out;

  std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
  double g = start.g_eff;
  std::vector<Complex> roots = start.roots;
  const double total = std::log(g_target / g);
  const double direction = total > 0.0 ? 1.0 : -1.0;
  double log_step = std::min(opt.initial_log_step, std::abs(total));
  int successes = 0;

  while (g != g_target) {
    const double remaining = std::log(g_target / g);
    double step = direction * std::min(log_step, std::abs(remaining));
    const double g_next = (std::abs(step) >= std::abs(remaining)) ? g_target : g * std::exp(step);

    bool ok = false;
    std::vector<Complex> trial = roots;
    if (newton_solve(trial, spectrum, sector, g_next, opt)) {
      ok = true;
    } else {
      for (int attempt = 0; attempt < opt.jitter_retries && !ok; ++attempt) {
        trial = roots;
        jitter_roots(trial, spectrum, rng);
        ok = newton_solve(trial, spectrum, sector, g_next, opt);
      }
    }

    if (ok) {
      roots = std::move(trial);
      g = g_next;
      out.trajectory.push_back(
          {g, roots, max_defect(richardson_residual(roots, spectrum, sector, g))});
      update_crossing_flag(out.trajectory[out.trajectory.size() - 2], out.trajectory.back(),
                           spectrum, &out.no_crossing);
      if (++successes >= opt.step_double_after) {
        log_step = std::min(2.0 * log_step, opt.max_log_step);
        successes = 0;
      }
    } else {
      log_step *= 0.5;
      successes = 0;
      if (log_step < opt.min_log_step) {
        throw continuation_stuck_error("continuation step underflow; last converged g_eff=" +
                                           std::to_string(g),
                                       g);
      }
    }
  }

  out.final.roots = roots;
  out.final.g_eff = g_target;
  out.final.residual = max_defect(richardson_residual(roots, spectrum, sector, g_target));
  return out;
}

ContinuationResult solve_state(const LevelSpectrum& spectrum, const PairSector& sector,
                               const std::vector<int>& label, double g_target,
                               const RichardsonOptions& opt) {
  if (sector.pairs() == 0) {
    ContinuationResult out;
    out.final = RootSet{{}, g_target, label, 0.0};
    out.trajectory.push_back({g_target, {}, 0.0});
    return out;
  }
  const double g0 = std::min(opt.g0_factor * spectrum.min_spacing(), g_target);
  const RootSet start = initial_roots(spectrum, sector, label, g0, opt);
  return continue_in_g(start, g_target, spectrum, sector, opt);
}

std::vector<RootSet> solve_at_checkpoints(const LevelSpectrum& spectrum, const PairSector& sector,
                                          const std::vector<int>& label,
                                          const std::vector<double>& g_values,
                                          const RichardsonOptions& opt,
                                          std::vector<ContinuationRecord>* trajectory) {
  std::vector<RootSet> out;
  if (g_values.empty()) return out;
  if (!std::is_sorted(g_values.begin(), g_values.end())) {
    throw invalid_sector_error("checkpoint couplings must be ascending");
  }
  ContinuationResult cur = solve_state(spectrum, sector, label, g_values.front(), opt);
  if (trajectory) {
    trajectory->insert(trajectory->end(), cur.trajectory.begin(), cur.trajectory.end());
  }
  out.push_back(cur.final);
  for (std::size_t k = 1; k < g_values.size(); ++k) {
    cur = continue_in_g(cur.final, g_values[k], spectrum, sector, opt);
    if (trajectory) {
      trajectory->insert(trajectory->end(), cur.trajectory.begin() + 1, cur.trajectory.end());
    }
    out.push_back(cur.final);
  }
  return out;
}

double energy_from_roots(const RootSet& rs, const LevelSpectrum& spectrum,
                         const PairSector& sector) {
  double energy = 0.0;
  for (int a = 0; a < spectrum.size(); ++a) {
    energy += spectrum.level(a).epsilon * sector.nu()[static_cast<std::size_t>(a)];
  }
  double im = 0.0;
  for (const auto& t : rs.roots) {
    energy += 2.0 * t.real();
    im += t.imag();
  }
  if (std::abs(2.0 * im) > 1e-10 * std::max(1.0, std::abs(energy))) {
    throw inconsistent_rootset_error("imaginary parts of the roots do not cancel: sum Im = " +
                                     std::to_string(im));
  }
  return energy;
}

}  // namespace pairing
