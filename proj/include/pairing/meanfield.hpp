#pragma once

#include <functional>
#include <vector>

#include "pairing/model.hpp"

namespace pairing {

struct mf_domain_error : input_error {
  using input_error::input_error;
};
struct beyond_validity_error : error {
  using error::error;
};

enum class MfStatus { Solved, NoStationaryPoint };

struct MeanFieldSolution {
  MfStatus status = MfStatus::NoStationaryPoint;
  double mu = 0.0;
  double delta = 0.0;
  std::vector<double> phi;           // Bogoliubov angles; -inf marks the condensate level
  std::vector<double> occupations;   // boson count per level; condensate level holds N0
  double energy = 0.0;
  double condensate = 0.0;           // N0, filled by the modified scheme
  double residual = 0.0;
};

// E_MF = sum_i Omega_i (sqrt((e_i+mu)^2 - Delta^2) - (e_i+mu)) - mu N_b + Delta^2/g.
double emf(double mu, double delta, const LevelSpectrum& spectrum, double n_b, double g_eff);

// N(mu, Delta) = sum_i Omega_i ((e_i+mu)/sqrt((e_i+mu)^2 - Delta^2) - 1).
double particle_number_mf(double mu, double delta, const LevelSpectrum& spectrum);

// Unconstrained two-parameter stationary point of E_MF. Reports
// NoStationaryPoint when a bounded search over the admissible (mu, Delta)
// wedge finds no gradient sign change.
MeanFieldSolution solve_naive_mf(const LevelSpectrum& spectrum, double n_b, double g_eff);

// Condensate-aware scheme: mu = Delta, one-dimensional stationarity in
// Delta, level 0 excluded from the depletion sum.
MeanFieldSolution solve_modified_mf(const LevelSpectrum& spectrum, double n_b, double g_eff);

struct BogoliubovLimit {
  double mu = 0.0;
  std::function<double(double)> dispersion;  // e -> sqrt(e(e + g rho))
};
BogoliubovLimit bogoliubov_limit(double g_bare, double rho);

// alpha_i = th(phi_i) with th(2 phi_i) = -Delta/(e_i + mu).
std::vector<double> variational_amplitudes(double mu, double delta,
                                           const LevelSpectrum& spectrum);

std::vector<double> quasiparticle_energies(double mu, double delta,
                                           const LevelSpectrum& spectrum);

}  // namespace pairing
