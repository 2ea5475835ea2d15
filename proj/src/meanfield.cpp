#include "pairing/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pairing/continuum.hpp"

namespace pairing {

namespace {

constexpr double kWedgeMargin = 1e-3;  // grid scan keeps Delta <= (1-margin)(e0 + mu)

double quasiparticle(double epsilon, double mu, double delta) {
  const double radicand = (epsilon + mu) * (epsilon + mu) - delta * delta;
  if (radicand < 0.0) {
    throw mf_domain_error("Delta exceeds e + mu: imaginary quasiparticle energy");
  }
  return std::sqrt(radicand);
}

// Gap-equation defect sum Omega/E - 2/g and the number defect N - N_b.
struct Gradient {
  double gap = 0.0;
  double number = 0.0;
};

Gradient gradient(double mu, double delta, const LevelSpectrum& spectrum, double n_b,
                  double g_eff) {
  Gradient out;
  out.gap = -2.0 / g_eff;
  out.number = -n_b;
  for (int a = 0; a < spectrum.size(); ++a) {
    const double e = quasiparticle(spectrum.level(a).epsilon, mu, delta);
    const double omega = spectrum.level(a).omega;
    out.gap += omega / e;
    out.number += omega * ((spectrum.level(a).epsilon + mu) / e - 1.0);
  }
  return out;
}

MeanFieldSolution fill_solution(double mu, double delta, const LevelSpectrum& spectrum,
                                double n_b, double g_eff, double residual) {
  MeanFieldSolution out;
  out.status = MfStatus::Solved;
  out.mu = mu;
  out.delta = delta;
  out.energy = emf(mu, delta, spectrum, n_b, g_eff);
  out.residual = residual;
  out.phi.resize(static_cast<std::size_t>(spectrum.size()));
  out.occupations.resize(static_cast<std::size_t>(spectrum.size()));
  for (int a = 0; a < spectrum.size(); ++a) {
    const auto ia = static_cast<std::size_t>(a);
    const double e = spectrum.level(a).epsilon;
    out.phi[ia] = 0.5 * std::atanh(-delta / (e + mu));
    out.occupations[ia] =
        spectrum.level(a).omega * ((e + mu) / quasiparticle(e, mu, delta) - 1.0);
  }
  return out;
}

// Newton on (gap defect, number defect); false when it leaves the wedge or
// stalls.
bool newton_polish(double& mu, double& delta, const LevelSpectrum& spectrum, double n_b,
                   double g_eff) {
  const double e0 = spectrum.level(0).epsilon;
  for (int iter = 0; iter < 200; ++iter) {
    Gradient g;
    try {
      g = gradient(mu, delta, spectrum, n_b, g_eff);
    } catch (const mf_domain_error&) {
      return false;
    }
    const double defect = std::max(std::abs(g.gap), std::abs(g.number));
    if (defect <= 1e-10) return true;
    double j11 = 0.0, j12 = 0.0, j21 = 0.0, j22 = 0.0;
    for (int a = 0; a < spectrum.size(); ++a) {
      const double e = spectrum.level(a).epsilon;
      const double omega = spectrum.level(a).omega;
      const double q = quasiparticle(e, mu, delta);
      const double q3 = q * q * q;
      j11 += -omega * (e + mu) / q3;          // d gap / d mu
      j12 += omega * delta / q3;              // d gap / d Delta
      j21 += -omega * delta * delta / q3;     // d number / d mu
      j22 += omega * (e + mu) * delta / q3;   // d number / d Delta
    }
    const double det = j11 * j22 - j12 * j21;
    if (det == 0.0 || !std::isfinite(det)) return false;
    const double dmu = (g.gap * j22 - g.number * j12) / det;
    const double ddelta = (j11 * g.number - j21 * g.gap) / det;
    bool moved = false;
    double lambda = 1.0;
    for (int halving = 0; halving < 60; ++halving, lambda *= 0.5) {
      const double mu_t = mu - lambda * dmu;
      const double delta_t = delta - lambda * ddelta;
      if (!(delta_t >= 0.0 && delta_t < e0 + mu_t)) continue;
      try {
        const Gradient trial = gradient(mu_t, delta_t, spectrum, n_b, g_eff);
        if (std::max(std::abs(trial.gap), std::abs(trial.number)) < defect) {
          mu = mu_t;
          delta = delta_t;
          moved = true;
          break;
        }
      } catch (const mf_domain_error&) {
        continue;
      }
    }
    if (!moved) return false;
  }
  Gradient g = gradient(mu, delta, spectrum, n_b, g_eff);
  return std::max(std::abs(g.gap), std::abs(g.number)) <= 1e-10;
}

// Solve the gap equation for Delta at fixed mu inside the capped wedge;
// returns false when no root lies there.
bool delta_at_fixed_mu(double mu, const LevelSpectrum& spectrum, double g_eff, double* delta) {
  const double e0 = spectrum.level(0).epsilon;
  const double cap = (1.0 - kWedgeMargin) * (e0 + mu);
  double lo = 0.0;
  double hi = cap;
  const auto defect = [&](double d) {
    double sum = -2.0 / g_eff;
    for (int a = 0; a < spectrum.size(); ++a) {
      sum += spectrum.level(a).omega / quasiparticle(spectrum.level(a).epsilon, mu, d);
    }
    return sum;
  };
  if (defect(lo) > 0.0) return false;   // sum already exceeds 2/g at Delta = 0
  if (defect(hi) < 0.0) return false;   // root (if any) is beyond the wedge cap
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (defect(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (hi - lo <= 1e-14 * std::max(1.0, hi)) break;
  }
  *delta = 0.5 * (lo + hi);
  return true;
}

}  // namespace

double emf(double mu, double delta, const LevelSpectrum& spectrum, double n_b, double g_eff) {
  double energy = -mu * n_b + delta * delta / g_eff;
  for (int a = 0; a < spectrum.size(); ++a) {
    const double e = spectrum.level(a).epsilon;
    energy += spectrum.level(a).omega * (quasiparticle(e, mu, delta) - (e + mu));
  }
  return energy;
}

double particle_number_mf(double mu, double delta, const LevelSpectrum& spectrum) {
  double n = 0.0;
  for (int a = 0; a < spectrum.size(); ++a) {
    const double e = spectrum.level(a).epsilon;
    n += spectrum.level(a).omega * ((e + mu) / quasiparticle(e, mu, delta) - 1.0);
  }
  return n;
}

MeanFieldSolution solve_naive_mf(const LevelSpectrum& spectrum, double n_b, double g_eff) {
  const int L = spectrum.size();
  if (g_eff == 0.0) {
    // Free gas: everything condenses at e_0 = 0 and the energy convention
    // pins E = 0.
    MeanFieldSolution out;
    out.status = MfStatus::Solved;
    out.mu = 0.0;
    out.delta = 0.0;
    out.energy = 0.0;
    out.condensate = n_b;
    out.phi.assign(static_cast<std::size_t>(L), 0.0);
    out.occupations.assign(static_cast<std::size_t>(L), 0.0);
    return out;
  }
  const double g_bare = g_eff * L;
  const double rho = n_b / L;

  // Seed from the equal-spacing thermodynamic solution when it exists.
  try {
    const StrongClosedForm seed = strong_closed_form(g_bare, rho);
    double mu = seed.mu;
    double delta = seed.delta;
    if (newton_polish(mu, delta, spectrum, n_b, g_eff)) {
      const Gradient g = gradient(mu, delta, spectrum, n_b, g_eff);
      return fill_solution(mu, delta, spectrum, n_b, g_eff,
                           std::max(std::abs(g.gap), std::abs(g.number)));
    }
  } catch (const no_solution_error&) {
    // fall through to the bounded scan
  }

  // Bounded wedge scan: mu log-spaced, Delta solved from the gap equation,
  // sign change of the number defect located by bisection.
  const double mu_hi = 1e3 * std::max(1.0, g_bare * (rho + 2.0));
  const double mu_lo = 1e-6;
  const int points = 241;
  double prev_mu = 0.0;
  double prev_defect = 0.0;
  bool have_prev = false;
  for (int k = 0; k < points; ++k) {
    const double mu = mu_lo * std::pow(mu_hi / mu_lo, static_cast<double>(k) / (points - 1));
    double delta = 0.0;
    if (!delta_at_fixed_mu(mu, spectrum, g_eff, &delta)) {
      have_prev = false;
      continue;
    }
    const double defect = particle_number_mf(mu, delta, spectrum) - n_b;
    if (have_prev && prev_defect * defect <= 0.0) {
      double lo = prev_mu, hi = mu;
      for (int iter = 0; iter < 100; ++iter) {
        const double mid = 0.5 * (lo + hi);
        double dm = 0.0;
        if (!delta_at_fixed_mu(mid, spectrum, g_eff, &dm)) break;
        const double fm = particle_number_mf(mid, dm, spectrum) - n_b;
        if (fm * prev_defect <= 0.0) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      double mu_c = 0.5 * (lo + hi);
      double delta_c = 0.0;
      if (delta_at_fixed_mu(mu_c, spectrum, g_eff, &delta_c) &&
          newton_polish(mu_c, delta_c, spectrum, n_b, g_eff)) {
        const Gradient g = gradient(mu_c, delta_c, spectrum, n_b, g_eff);
        return fill_solution(mu_c, delta_c, spectrum, n_b, g_eff,
                             std::max(std::abs(g.gap), std::abs(g.number)));
      }
    }
    prev_mu = mu;
    prev_defect = defect;
    have_prev = true;
  }

  MeanFieldSolution out;
  out.status = MfStatus::NoStationaryPoint;
  return out;
}

MeanFieldSolution solve_modified_mf(const LevelSpectrum& spectrum, double n_b, double g_eff) {
  const int L = spectrum.size();
  if (g_eff < 0.0) throw mf_domain_error("coupling must be nonnegative");
  MeanFieldSolution out;
  if (g_eff == 0.0) {
    out.status = MfStatus::Solved;
    out.condensate = n_b;
    out.phi.assign(static_cast<std::size_t>(L), 0.0);
    out.phi[0] = -std::numeric_limits<double>::infinity();
    out.occupations.assign(static_cast<std::size_t>(L), 0.0);
    out.occupations[0] = n_b;
    return out;
  }

  int total_omega = 0;
  for (int a = 0; a < L; ++a) total_omega += spectrum.level(a).omega;

  // d E_MF(Delta, Delta)/d Delta; the e_0 = 0 level contributes through the
  // -Omega_0 term only.
  const auto stationarity = [&](double d) {
    double sum = -total_omega - n_b + 2.0 * d / g_eff;
    for (int a = 0; a < L; ++a) {
      const double e = spectrum.level(a).epsilon;
      if (e > 0.0) sum += spectrum.level(a).omega * std::sqrt(e / (e + 2.0 * d));
    }
    return sum;
  };

  double lo = 0.0;
  double hi = 0.5 * g_eff * (n_b + total_omega) + 1.0;
  double delta = 0.5 * g_eff * n_b;
  for (int iter = 0; iter < 300; ++iter) {
    const double h = stationarity(delta);
    if (std::abs(h) <= 1e-12 * std::max(1.0, n_b)) break;
    if (h > 0.0) {
      hi = delta;
    } else {
      lo = delta;
    }
    double slope = 2.0 / g_eff;
    for (int a = 0; a < L; ++a) {
      const double e = spectrum.level(a).epsilon;
      if (e > 0.0) {
        slope -= spectrum.level(a).omega * std::sqrt(e) / std::pow(e + 2.0 * delta, 1.5);
      }
    }
    double next = (slope > 0.0) ? delta - h / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    delta = next;
  }
  out.residual = std::abs(stationarity(delta));
  if (out.residual > 1e-10 * std::max(1.0, n_b)) {
    throw newton_divergence_error("modified mean-field stationarity not converged");
  }

  out.status = MfStatus::Solved;
  out.mu = delta;
  out.delta = delta;
  out.energy = emf(delta, delta, spectrum, n_b, g_eff);
  out.phi.resize(static_cast<std::size_t>(L));
  out.occupations.resize(static_cast<std::size_t>(L));
  // Level 0 hosts the condensate and is excluded from the depletion sum.
  double depleted = 0.0;
  for (int a = 1; a < L; ++a) {
    const auto ia = static_cast<std::size_t>(a);
    const double e = spectrum.level(a).epsilon;
    out.phi[ia] = 0.5 * std::atanh(-delta / (e + delta));
    out.occupations[ia] =
        spectrum.level(a).omega * ((e + delta) / std::sqrt(e * e + 2.0 * e * delta) - 1.0);
    depleted += out.occupations[ia];
  }
  if (depleted >= n_b) {
    throw beyond_validity_error("depletion " + std::to_string(depleted) +
                                " reaches N_b; no condensate left at this coupling");
  }
  const double e0 = spectrum.level(0).epsilon;
  out.phi[0] = e0 > 0.0 ? 0.5 * std::atanh(-delta / (e0 + delta))
                        : -std::numeric_limits<double>::infinity();
  out.condensate = n_b - depleted;
  out.occupations[0] = out.condensate;
  return out;
}

BogoliubovLimit bogoliubov_limit(double g_bare, double rho) {
  BogoliubovLimit out;
  out.mu = 0.5 * g_bare * rho;
  const double b = g_bare * rho;
  out.dispersion = [b](double e) { return std::sqrt(e * (e + b)); };
  return out;
}

std::vector<double> variational_amplitudes(double mu, double delta,
                                           const LevelSpectrum& spectrum) {
  std::vector<double> alpha(static_cast<std::size_t>(spectrum.size()));
  for (int a = 0; a < spectrum.size(); ++a) {
    const double r = delta / (spectrum.level(a).epsilon + mu);
    if (std::abs(r) >= 1.0) {
      throw mf_domain_error("|Delta/(e+mu)| >= 1: no real Bogoliubov angle at level " +
                            std::to_string(a));
    }
    alpha[static_cast<std::size_t>(a)] = -r / (1.0 + std::sqrt(1.0 - r * r));
  }
  return alpha;
}

std::vector<double> quasiparticle_energies(double mu, double delta,
                                           const LevelSpectrum& spectrum) {
  std::vector<double> e(static_cast<std::size_t>(spectrum.size()));
  for (int a = 0; a < spectrum.size(); ++a) {
    e[static_cast<std::size_t>(a)] = quasiparticle(spectrum.level(a).epsilon, mu, delta);
  }
  return e;
}

}  // namespace pairing
