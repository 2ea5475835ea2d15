#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "pairing/model.hpp"

namespace pairing {

struct singular_configuration_error : solver_error {
  using solver_error::solver_error;
};
struct initialization_failed_error : solver_error {
  using solver_error::solver_error;
};
struct continuation_stuck_error : solver_error {
  continuation_stuck_error(const std::string& what, double last_good_g)
      : solver_error(what), last_good_g(last_good_g) {}
  double last_good_g;
};
struct inconsistent_rootset_error : solver_error {
  using solver_error::solver_error;
};

using Complex = std::complex<double>;

// Converged Bethe roots at one coupling, together with the g->0 occupancy
// label they were continued from.
struct RootSet {
  std::vector<Complex> roots;
  double g_eff = 0.0;
  std::vector<int> origin;
  double residual = 0.0;
};

struct RichardsonOptions {
  double accept_tol = 1e-11;     // max |defect| at an accepted point
  double g0_factor = 1e-3;       // g0 = g0_factor * min level spacing
  int max_newton_iters = 200;
  int max_halvings = 30;
  int jitter_retries = 5;
  int step_double_after = 3;     // successes before growing the g-step
  double initial_log_step = 0.4;
  double max_log_step = 1.4;
  double min_log_step = 1e-12;
  std::uint64_t seed = 42;
};

// defect_i = sum_a C_a/(t_i - eps_a) + sum_{j != i} 2/(t_i - t_j) + 2/g_eff.
std::vector<Complex> richardson_residual(const std::vector<Complex>& roots,
                                         const LevelSpectrum& spectrum, const PairSector& sector,
                                         double g_eff);

double max_defect(const std::vector<Complex>& defects);

// x_k solving sum_{j != k} 2/(x_k - x_j) + C/x_k = 1, ascending.
std::vector<double> cluster_positions(int n, int C);

// Roots for the occupancy label at small coupling g0: each level hosting n
// pairs gets the cluster eps_a - (g0/2) x_k.
RootSet initial_roots(const LevelSpectrum& spectrum, const PairSector& sector,
                      const std::vector<int>& label, double g0,
                      const RichardsonOptions& opt = {});

struct NewtonStepResult {
  bool accepted = false;
  double step_norm = 0.0;
  double defect_norm = 0.0;  // after the step if accepted, before otherwise
};

// One damped Newton update in place; rejects instead of updating when the
// Jacobian is singular or no damping factor reduces the defect.
NewtonStepResult newton_step(std::vector<Complex>& roots, const LevelSpectrum& spectrum,
                             const PairSector& sector, double g_eff);

struct ContinuationRecord {
  double g_eff = 0.0;
  std::vector<Complex> roots;
  double residual = 0.0;
};

struct ContinuationResult {
  RootSet final;
  std::vector<ContinuationRecord> trajectory;
  // True when no real root changed sides of any level along the path.
  bool no_crossing = true;
};

ContinuationResult continue_in_g(const RootSet& start, double g_target,
                                 const LevelSpectrum& spectrum, const PairSector& sector,
                                 const RichardsonOptions& opt = {});

// Cluster initialization at small g plus continuation to g_target.
ContinuationResult solve_state(const LevelSpectrum& spectrum, const PairSector& sector,
                               const std::vector<int>& label, double g_target,
                               const RichardsonOptions& opt = {});

// Continuation through an ascending list of couplings, returning the
// converged roots at each of them.
std::vector<RootSet> solve_at_checkpoints(const LevelSpectrum& spectrum, const PairSector& sector,
                                          const std::vector<int>& label,
                                          const std::vector<double>& g_values,
                                          const RichardsonOptions& opt = {},
                                          std::vector<ContinuationRecord>* trajectory = nullptr);

std::vector<int> ground_label(const LevelSpectrum& spectrum, const PairSector& sector);

// E = sum_a eps_a nu_a + 2 sum_i Re t_i; imaginary parts must cancel.
double energy_from_roots(const RootSet& roots, const LevelSpectrum& spectrum,
                         const PairSector& sector);

}  // namespace pairing
