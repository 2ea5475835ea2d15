#pragma once

#include <functional>
#include <string>

#include "pairing/model.hpp"

namespace pairing {

struct continuum_domain_error : input_error {
  using input_error::input_error;
};
struct condensate_level_error : input_error {
  using input_error::input_error;
};
// Requested branch does not exist at these parameters.
struct no_solution_error : error {
  using error::error;
};
struct newton_divergence_error : solver_error {
  using solver_error::solver_error;
};

enum class Branch { Weak, Strong };
std::string to_string(Branch branch);

// Thermodynamic limit of the equal-spacing model with bandwidth 1; rho is
// the boson density N_b/L and g the coupling before the 1/L rescale.
struct ContinuumSolution {
  Branch branch = Branch::Weak;
  double g_bare = 0.0;
  double rho = 0.0;
  double b = 0.0;      // weak branch; root support is (-b, 0)
  double mu = 0.0;     // strong branch
  double delta = 0.0;  // strong branch
  double gap = 0.0;
  double energy_per_level = 0.0;
  double depletion_per_level = 0.0;  // N'/L
  double condensate_fraction = 0.0;  // N_0/N_b
  bool finite_size_suspect = false;  // b below ~10 level spacings of the target lattice
};

// f(b) = b ln((1+sqrt(1+b))/sqrt(b)) + 1 - sqrt(1+b); rises from 0 to 1.
double f_equal_spacing(double b);

// Quadrature route for a user-supplied level density on [0,1]:
// f(b) = 1 - int_0^1 sqrt(e/(e+b)) density(e) de.
double f_from_density(const std::function<double(double)>& density, double b,
                      double tol = 1e-12);

// Unique positive root of b = g (f(b) + rho).
double solve_b(double g_bare, double rho);
double solve_b(double g_bare, double rho, const std::function<double(double)>& f);

double phonon_energy(double epsilon, double b);          // sqrt(e(e+b))
double occupation_weak(double epsilon, double b);        // (e+b/2)/sqrt(e(e+b)) - 1
double depletion(double b, double L);                    // N' = L(sqrt(1+b)-1)
double weak_energy(double g_bare, double rho, double b);  // E/L

double critical_coupling(double rho);  // 2/ln(1+2/rho)

struct StrongClosedForm {
  double C = 0.0;
  double mu = 0.0;
  double delta = 0.0;
  double gap = 0.0;
};
StrongClosedForm strong_closed_form(double g_bare, double rho);

// Damped Newton on the gap and number equations, seeded by the closed form.
std::pair<double, double> solve_gap_equations(double g_bare, double rho);
// Residuals (gap equation, number equation) at the given point.
std::pair<double, double> gap_equation_residuals(double mu, double delta, double g_bare,
                                                 double rho);

double strong_energy(double mu, double delta, double g_bare, double rho);  // E/L

Branch classify_phase(double g_bare, double rho);

// |N'(b) - N_b| / N_b with b solved at g_c(rho); vanishes in the continuum.
double consistency_depletion_at_gc(double rho, double L);
double consistency_depletion_at_gc(double rho, double L,
                                   const std::function<double(double)>& f);

ContinuumSolution solve_continuum(double g_bare, double rho, double epsilon1 = 0.0);

}  // namespace pairing
