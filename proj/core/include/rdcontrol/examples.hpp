#ifndef RDCONTROL_EXAMPLES_HPP
#define RDCONTROL_EXAMPLES_HPP

#include "rdcontrol/analytic.hpp"
#include "rdcontrol/network.hpp"

#include <memory>

namespace rdc::examples {

/// Kinase/phosphatase push-pull cycle between two parallel membranes:
/// the kinase sits on the upper face (xi = L), the phosphatase on the lower
/// face (xi = 0), and both protein forms diffuse in between. The reported
/// flux is the oriented through-flux of YP (upper face positive outward,
/// lower face negated), which equals -D * d YP/d xi at steady state.
std::shared_ptr<const NetworkSpec> slab_cycle(const analytic::SlabParams& p);

/// The same cycle in a sphere of radius L: kinase on the surface,
/// phosphatase distributed through the bulk (first-order conversion).
/// The flux is the surface export of YP.
std::shared_ptr<const NetworkSpec> sphere_cycle(const analytic::SphereParams& p);

/// Membrane kinase at xi = 0 with bulk phosphatase on a half-line, realized
/// on a truncated domain. `truncation` is the domain length; 0 picks
/// 40 decay lengths sqrt(D / (k_p (1 + kappa_p))), deep enough that the
/// closed far end is invisible. p.L is ignored.
std::shared_ptr<const NetworkSpec> half_line_cycle(const analytic::SphereParams& p,
                                                   double truncation = 0.0);

} // namespace rdc::examples

#endif
