#include "pairing/continuum.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace pairing {

namespace {

using Quadrature = boost::math::quadrature::gauss_kronrod<double, 15>;

double integrate(const std::function<double(double)>& f, double lo, double hi, double tol) {
  double err = 0.0;
  const double value = Quadrature::integrate(f, lo, hi, 15, tol, &err);
  return value;
}

// int_0^1 sqrt(e(e+b)) de in closed form.
double weak_integral(double b) {
  if (b == 0.0) return 0.5;
  const double u = std::sqrt(1.0 + b);
  return 0.25 * (2.0 + b) * u - 0.25 * b * b * std::log((1.0 + u) / std::sqrt(b));
}

// int sqrt(u^2 - d^2) du evaluated at u, for u >= d >= 0.
double strong_antiderivative(double u, double d) {
  const double r = std::sqrt(std::max(u * u - d * d, 0.0));
  if (d == 0.0) return 0.5 * u * r;
  return 0.5 * (u * r - d * d * std::log(u + r));
}

}  // namespace

std::string to_string(Branch branch) { return branch == Branch::Weak ? "weak" : "strong"; }

double f_equal_spacing(double b) {
  if (b < 0.0) throw continuum_domain_error("f is defined for b >= 0");
  if (b == 0.0) return 0.0;
  const double u = std::sqrt(1.0 + b);
  return b * std::log((1.0 + u) / std::sqrt(b)) + 1.0 - u;
}

double f_from_density(const std::function<double(double)>& density, double b, double tol) {
  if (b < 0.0) throw continuum_domain_error("f is defined for b >= 0");
  if (b == 0.0) return 0.0;
  // e = u^2 removes the sqrt(e) endpoint kink.
  const double depleted = integrate(
      [&](double u) {
        const double e = u * u;
        return 2.0 * u * std::sqrt(e / (e + b)) * density(e);
      },
      0.0, 1.0, tol);
  return 1.0 - depleted;
}

double solve_b(double g_bare, double rho) {
  return solve_b(g_bare, rho, [](double b) { return f_equal_spacing(b); });
}

double solve_b(double g_bare, double rho, const std::function<double(double)>& f) {
  if (g_bare <= 0.0 || rho <= 0.0) {
    throw continuum_domain_error("solve_b needs g > 0 and rho > 0");
  }
  // f in (0,1) brackets the root inside [g rho, g (rho+1)].
  double lo = g_bare * rho;
  double hi = g_bare * (rho + 1.0);
  const auto h = [&](double b) { return b - g_bare * (f(b) + rho); };
  double b = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double hb = h(b);
    if (std::abs(hb) <= 1e-12) return b;
    if (hb > 0.0) {
      hi = b;
    } else {
      lo = b;
    }
    // Newton with a centered-difference slope, safeguarded by the bracket.
    const double db = 1e-7 * std::max(b, 1e-3);
    const double slope = (h(b + db) - h(b - db)) / (2.0 * db);
    double next = (slope != 0.0) ? b - hb / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    b = next;
  }
  return b;
}

double phonon_energy(double epsilon, double b) {
  if (epsilon < 0.0 || b < 0.0) throw continuum_domain_error("phonon energy needs e, b >= 0");
  return std::sqrt(epsilon * (epsilon + b));
}

double occupation_weak(double epsilon, double b) {
  if (epsilon == 0.0) {
    throw condensate_level_error("occupation of the condensate level follows from the depletion");
  }
  if (epsilon < 0.0 || b < 0.0) throw continuum_domain_error("occupation needs e > 0, b >= 0");
  return (epsilon + 0.5 * b) / std::sqrt(epsilon * (epsilon + b)) - 1.0;
}

double depletion(double b, double L) {
  if (b < 0.0) throw continuum_domain_error("depletion needs b >= 0");
  return L * (std::sqrt(1.0 + b) - 1.0);
}

double weak_energy(double g_bare, double rho, double b) {
  return -0.5 + weak_integral(b) - 0.5 * b * (rho + 1.0) + b * b / (4.0 * g_bare);
}

double critical_coupling(double rho) {
  if (rho <= 0.0) throw continuum_domain_error("critical coupling needs rho > 0");
  return 2.0 / std::log1p(2.0 / rho);
}

StrongClosedForm strong_closed_form(double g_bare, double rho) {
  if (g_bare <= 0.0 || rho <= 0.0) {
    throw continuum_domain_error("strong branch needs g > 0 and rho > 0");
  }
  if (g_bare <= critical_coupling(rho)) {
    throw no_solution_error("gapped branch exists only for g > g_c(rho)");
  }
  StrongClosedForm out;
  out.C = (2.0 + rho) / std::expm1(2.0 / g_bare);
  out.gap = (2.0 * out.C - rho * (rho + 2.0)) / (2.0 * (rho + 2.0));
  const double delta2 = out.C * out.C - 2.0 * out.C * out.gap;
  out.delta = std::sqrt(delta2);
  out.mu = (out.C * out.C + delta2) / (2.0 * out.C);
  return out;
}

std::pair<double, double> gap_equation_residuals(double mu, double delta, double g_bare,
                                                 double rho) {
  // max() guards against cancellation noise when delta -> mu at the
  // transition; the true radicands are nonnegative in the wedge.
  const double A = std::sqrt(std::max((1.0 + mu) * (1.0 + mu) - delta * delta, 0.0));
  const double B = std::sqrt(std::max(mu * mu - delta * delta, 0.0));
  const double r1 = std::log(1.0 + mu + A) - std::log(mu + B) - 2.0 / g_bare;
  const double r2 = A - B - (rho + 1.0);
  return {r1, r2};
}

std::pair<double, double> solve_gap_equations(double g_bare, double rho) {
  const StrongClosedForm seed = strong_closed_form(g_bare, rho);
  double mu = seed.mu;
  double delta = seed.delta;
  for (int iter = 0; iter < 100; ++iter) {
    const auto [r1, r2] = gap_equation_residuals(mu, delta, g_bare, rho);
    if (std::max(std::abs(r1), std::abs(r2)) <= 1e-12) break;
    const double A = std::sqrt(std::max((1.0 + mu) * (1.0 + mu) - delta * delta, 0.0));
    const double B = std::sqrt(std::max(mu * mu - delta * delta, 0.0));
    if (B == 0.0) break;  // pinned to the transition; the seed is as good as it gets
    const double j11 = 1.0 / A - 1.0 / B;
    const double j12 = -delta / (A * (1.0 + mu + A)) + delta / (B * (mu + B));
    const double j21 = (1.0 + mu) / A - mu / B;
    const double j22 = -delta / A + delta / B;
    const double det = j11 * j22 - j12 * j21;
    if (det == 0.0 || !std::isfinite(det)) {
      throw newton_divergence_error("singular Jacobian in the gap-equation solve");
    }
    double dmu = (r1 * j22 - r2 * j12) / det;
    double ddelta = (j11 * r2 - j21 * r1) / det;
    double lambda = 1.0;
    // Damp to stay in the wedge mu > delta >= 0.
    for (int halving = 0; halving < 60; ++halving, lambda *= 0.5) {
      const double mu_t = mu - lambda * dmu;
      const double delta_t = delta - lambda * ddelta;
      if (delta_t >= 0.0 && mu_t > delta_t) {
        const auto [t1, t2] = gap_equation_residuals(mu_t, delta_t, g_bare, rho);
        if (std::max(std::abs(t1), std::abs(t2)) <
            std::max(std::abs(r1), std::abs(r2)) * (1.0 - 1e-4 * lambda) + 1e-15) {
          mu = mu_t;
          delta = delta_t;
          break;
        }
      }
      if (halving == 59) {
        throw newton_divergence_error("gap-equation Newton stalled at g=" +
                                      std::to_string(g_bare));
      }
    }
  }
  const auto [r1, r2] = gap_equation_residuals(mu, delta, g_bare, rho);
  if (std::max(std::abs(r1), std::abs(r2)) > 1e-10) {
    throw newton_divergence_error("gap equations not converged to tolerance");
  }
  return {mu, delta};
}

double strong_energy(double mu, double delta, double g_bare, double rho) {
  const double integral =
      strong_antiderivative(1.0 + mu, delta) - strong_antiderivative(mu, delta);
  return -0.5 + integral - (rho + 1.0) * mu + delta * delta / g_bare;
}

Branch classify_phase(double g_bare, double rho) {
  if (g_bare <= 0.0 || rho <= 0.0) {
    throw continuum_domain_error("phase classification needs g > 0 and rho > 0");
  }
  return g_bare > critical_coupling(rho) ? Branch::Strong : Branch::Weak;
}

double consistency_depletion_at_gc(double rho, double L) {
  return consistency_depletion_at_gc(rho, L, [](double b) { return f_equal_spacing(b); });
}

double consistency_depletion_at_gc(double rho, double L,
                                   const std::function<double(double)>& f) {
  const double b = solve_b(critical_coupling(rho), rho, f);
  const double n_prime = depletion(b, L);
  const double n_b = rho * L;
  return std::abs(n_prime - n_b) / n_b;
}

ContinuumSolution solve_continuum(double g_bare, double rho, double epsilon1) {
  ContinuumSolution out;
  out.g_bare = g_bare;
  out.rho = rho;
  out.branch = classify_phase(g_bare, rho);
  if (out.branch == Branch::Weak) {
    out.b = solve_b(g_bare, rho);
    out.gap = 0.0;
    out.energy_per_level = weak_energy(g_bare, rho, out.b);
    out.depletion_per_level = std::sqrt(1.0 + out.b) - 1.0;
    out.condensate_fraction = std::clamp(1.0 - out.depletion_per_level / rho, 0.0, 1.0);
    out.finite_size_suspect = epsilon1 > 0.0 && out.b < 10.0 * epsilon1;
  } else {
    const auto [mu, delta] = solve_gap_equations(g_bare, rho);
    out.mu = mu;
    out.delta = delta;
    out.gap = std::sqrt(std::max(mu * mu - delta * delta, 0.0));
    out.energy_per_level = strong_energy(mu, delta, g_bare, rho);
    out.depletion_per_level = rho;  // no condensate on the gapped branch
    out.condensate_fraction = 0.0;
  }
  return out;
}

}  // namespace pairing
