#include "rdcontrol/analytic.hpp"

#include "rdcontrol/errors.hpp"

#include <cmath>

namespace rdc::analytic {

double coth(double x) {
  if (x == 0.0) throw ValidationError("coth evaluated at zero");
  if (std::abs(x) < 0.1) return (1.0 + xcothx_m1(x)) / x;
  // 1 + 2 / (e^{2x} - 1); expm1 keeps x ~ 1 accurate and overflow at large
  // positive x collapses gracefully to 1.
  return 1.0 + 2.0 / std::expm1(2.0 * x);
}

double xcothx_m1(double x) {
  double x2 = x * x;
  if (std::abs(x) < 0.1) {
    // Laurent tail of x coth x: the direct form loses the leading digits of
    // the small difference to rounding in cosh/sinh.
    return x2 * (1.0 / 3.0 + x2 * (-1.0 / 45.0 + x2 * (2.0 / 945.0 - x2 / 4725.0)));
  }
  return x * coth(x) - 1.0;
}

// ---------------------------------------------------------------------------
// Slab

SlabSolution slab_solution(const SlabParams& p) {
  if (p.D <= 0 || p.k_k <= 0 || p.k_p <= 0 || p.L <= 0 || p.M <= 0 ||
      p.kappa_k < 0 || p.kappa_p < 0)
    throw ValidationError("slab parameters must be positive (ratios may be zero)");
  SlabSolution s;
  s.p = p;
  s.beta_k = p.k_k * (1.0 + p.kappa_k);
  s.beta_p = p.k_p * (1.0 + p.kappa_p);
  double denom = p.D * (s.beta_k + s.beta_p) + p.L * s.beta_k * s.beta_p;
  s.delta = p.M * (s.beta_p * p.k_k * p.kappa_k - s.beta_k * p.k_p * p.kappa_p) / denom;
  s.J = -p.D * s.delta;
  return s;
}

double SlabSolution::yp(double xi) const {
  // membrane exchange at xi = 0 fixes the offset of the linear profile
  double yp0 = (p.D * delta / p.k_p + p.kappa_p * p.M) / (1.0 + p.kappa_p);
  return yp0 + delta * xi;
}

double SlabSolution::y(double xi) const { return p.M - yp(xi); }

Controls slab_flux_controls(const SlabParams& p) {
  SlabSolution s = slab_solution(p);
  double denom = p.D * (s.beta_k + s.beta_p) + p.L * s.beta_k * s.beta_p;
  Controls c;
  c.kinase = p.D * s.beta_p / denom;
  c.phosphatase = p.D * s.beta_k / denom;
  c.diffusion = p.L * s.beta_k * s.beta_p / denom;
  c.size = -p.L * s.beta_k * s.beta_p / denom;
  return c;
}

Controls slab_conc_controls(const SlabParams& p) {
  SlabSolution s = slab_solution(p);
  double denom = p.D * (s.beta_k + s.beta_p) + p.L * s.beta_k * s.beta_p;
  Controls c;
  c.kinase = p.D * s.beta_p / denom;
  c.phosphatase = p.D * s.beta_k / denom;
  c.diffusion = -p.D * (s.beta_k + s.beta_p) / denom;
  c.size = p.D * (s.beta_k + s.beta_p) / denom;
  return c;
}

// ---------------------------------------------------------------------------
// Sphere

SphereSolution sphere_solution(const SphereParams& p) {
  if (p.D <= 0 || p.k_k <= 0 || p.k_p <= 0 || p.L <= 0 || p.M <= 0 ||
      p.kappa_k < 0 || p.kappa_p < 0)
    throw ValidationError("sphere parameters must be positive (ratios may be zero)");
  SphereSolution s;
  s.p = p;
  s.gamma = std::sqrt(p.k_p * (1.0 + p.kappa_p) / p.D);
  double x = s.gamma * p.L;
  s.beta = p.k_k * (1.0 + p.kappa_k) * p.L / (p.D * xcothx_m1(x));
  s.nu = p.k_k * p.M * (p.kappa_p - p.kappa_k) / (1.0 + p.kappa_p);
  s.J = s.nu / (1.0 + s.beta);
  return s;
}

double SphereSolution::u(double xi) const {
  if (xi < 0.0 || xi > p.L) throw ValidationError("radius outside the domain");
  double x = gamma * p.L;
  double pref = -J * (1.0 + p.kappa_p) * p.L * p.L / p.D;
  double gxi = gamma * xi;
  if (x < 0.5) {
    // x cosh x - sinh x by series; sinh(g xi)/xi -> gamma at the center
    double x2 = x * x;
    double den = x * x2 * (1.0 / 3.0 + x2 * (1.0 / 30.0 + x2 * (1.0 / 840.0 + x2 / 45360.0)));
    double sr = gxi < 1e-4 ? gamma * (1.0 + gxi * gxi / 6.0) : std::sinh(gxi) / xi;
    return pref * sr / den;
  }
  // both sinh(g xi) and (x cosh x - sinh x) scaled by 2 e^{-x} so that large
  // x never overflows and the ratio stays fully accurate
  double E = std::exp(-2.0 * x);
  double den = x * (1.0 + E) - (1.0 - E);
  double num = gxi < 1e-8 ? 2.0 * gamma * std::exp(gxi - x)
                          : std::exp(gxi - x) * (-std::expm1(-2.0 * gxi)) / xi;
  return pref * num / den;
}

double SphereSolution::yp(double xi) const {
  return (p.kappa_p * p.M + u(xi)) / (1.0 + p.kappa_p);
}

double SphereSolution::y(double xi) const {
  return (p.M - u(xi)) / (1.0 + p.kappa_p);
}

double SphereSolution::mu() const {
  double um = u(p.L / 2.0);
  double denom = p.kappa_p * p.M + um;
  if (denom == 0.0) throw ValidationError("mid-radius concentration vanishes");
  return um / denom;
}

double SphereSolution::phi() const {
  double x = gamma * p.L;
  return x * x / xcothx_m1(x) - 1.0 - xcothx_m1(x / 2.0);
}

Controls sphere_flux_controls(const SphereParams& p) {
  SphereSolution s = sphere_solution(p);
  double x = s.gamma * p.L;
  double x2 = x * x;
  double P = xcothx_m1(x);
  double B = s.beta / (1.0 + s.beta);
  Controls c;
  c.kinase = 1.0 / (1.0 + s.beta);
  // grouped so the three rate terms add to exactly 2P / 2P and the size sum
  // telescopes the same way (the identities then hold to rounding)
  c.diffusion = B * (3.0 * P + P * P - x2) / (2.0 * P);
  c.phosphatase = B * (x2 - P - P * P) / (2.0 * P);
  c.size = B * (x2 - 2.0 * P - P * P) / P;
  return c;
}

Controls sphere_conc_controls(const SphereParams& p) {
  SphereSolution s = sphere_solution(p);
  Controls j = sphere_flux_controls(p);
  double m = s.mu();
  double f = s.phi();
  Controls c;
  c.kinase = m * j.kinase;
  c.diffusion = m * (j.diffusion + f / 2.0 - 1.0);
  c.phosphatase = m * (j.phosphatase - f / 2.0);
  c.size = m * (j.size - f + 1.0);
  return c;
}

} // namespace rdc::analytic
