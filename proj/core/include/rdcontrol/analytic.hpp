#ifndef RDCONTROL_ANALYTIC_HPP
#define RDCONTROL_ANALYTIC_HPP

namespace rdc::analytic {

/// coth(x), stable for small and large arguments.
double coth(double x);

/// x coth(x) - 1 without cancellation: series below |x| = 0.1, direct above.
/// This is the building block of the spherical closed forms; everything else
/// derives from it via  x^2 csch^2(x) = (1 + P)^2 - x^2  with P = x coth x - 1.
double xcothx_m1(double x);

/// Flux (or concentration) control coefficients of one closed-form family:
/// the two membrane/bulk conversion steps, the joint diffusion modulation,
/// and the system-size modulation.
struct Controls {
  double kinase = 0.0;
  double phosphatase = 0.0;
  double diffusion = 0.0;
  double size = 0.0;

  /// sum over rate-like modulations (diffusion + conversions)
  double reaction_sum() const { return kinase + phosphatase + diffusion; }
  /// size-scaling sum: twice diffusion + boundary transports + size
  double size_sum(bool phosphatase_is_transport) const {
    return 2.0 * diffusion + kinase + (phosphatase_is_transport ? phosphatase : 0.0) + size;
  }
};

// ---------------------------------------------------------------------------
// Slab: opposing membranes at xi = 0 (phosphatase) and xi = L (kinase), no
// bulk reactions. Y + YP is uniform (= M); YP has the constant gradient
// delta and the through-flux J = -D delta.

struct SlabParams {
  double D = 1.0;        // diffusion coefficient of both forms
  double k_k = 1.0;      // kinase membrane rate constant (velocity units)
  double k_p = 1.0;      // phosphatase membrane rate constant
  double kappa_k = 10.0; // kinase equilibrium ratio
  double kappa_p = 0.1;  // phosphatase equilibrium ratio
  double M = 1.0;        // uniform total concentration
  double L = 1.0;        // slab thickness
};

struct SlabSolution {
  SlabParams p;
  double beta_k = 0.0, beta_p = 0.0;  // k (1 + kappa) per membrane
  double delta = 0.0;                 // d YP / d xi
  double J = 0.0;                     // = -D delta

  double yp(double xi) const;
  double y(double xi) const;
};

SlabSolution slab_solution(const SlabParams& p);
/// Coefficients of ln|J|.
Controls slab_flux_controls(const SlabParams& p);
/// Coefficients of ln|YP(L) - YP(0)|.
Controls slab_conc_controls(const SlabParams& p);

// ---------------------------------------------------------------------------
// Sphere: kinase on the surface r = L, first-order phosphatase conversion in
// the bulk (rate constant k_p per time). u = YP - kappa_p Y decays from the
// surface with rate gamma = sqrt(k_p (1 + kappa_p) / D).

struct SphereParams {
  double D = 1.0;
  double k_k = 1.0;      // surface kinase rate (velocity units)
  double k_p = 1.0;      // bulk phosphatase rate (1 / time)
  double kappa_k = 10.0;
  double kappa_p = 0.1;
  double M = 1.0;
  double L = 1.0;        // radius
};

struct SphereSolution {
  SphereParams p;
  double gamma = 0.0;
  double beta = 0.0;  // dimensionless surface/bulk competition parameter
  double nu = 0.0;    // flux scale: J = nu / (1 + beta)
  double J = 0.0;

  double u(double xi) const;   // YP - kappa_p Y
  double yp(double xi) const;
  double y(double xi) const;
  double mu() const;   // d ln YP(L/2) / d ln u(L/2)
  double phi() const;  // profile-shape factor entering the C^c forms
};

SphereSolution sphere_solution(const SphereParams& p);
/// Coefficients of ln|J|.
Controls sphere_flux_controls(const SphereParams& p);
/// Coefficients of ln YP(L/2).
Controls sphere_conc_controls(const SphereParams& p);

} // namespace rdc::analytic

#endif
