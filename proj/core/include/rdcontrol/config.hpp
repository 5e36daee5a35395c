#ifndef RDCONTROL_CONFIG_HPP
#define RDCONTROL_CONFIG_HPP

#include "rdcontrol/analytic.hpp"
#include "rdcontrol/control.hpp"
#include "rdcontrol/network.hpp"
#include "rdcontrol/solver.hpp"

#include <memory>
#include <string>

namespace rdc {

/// A fully validated run description: the network plus solver, control,
/// transient, and audit settings.
struct RunConfig {
  std::shared_ptr<const NetworkSpec> network;

  int cells = 256;
  SolveSettings settings;

  double fd_step = 1e-3;
  TargetSelector target; ///< defaults to the steady flux

  double tau_end = 1.0;
  int steps = 400;

  /// Optional closed-form reference for audits and sweeps.
  enum class Family { None, Slab, Sphere };
  Family family = Family::None;
  analytic::SlabParams slab;
  analytic::SphereParams sphere;

  double verify_tol = 1e-6;

  ControlContext control_context() const {
    ControlContext ctx;
    ctx.spec = network;
    ctx.n_cells = cells;
    ctx.settings = settings;
    ctx.fd_step = fd_step;
    ctx.transient_steps = steps;
    return ctx;
  }
};

/// Parses and validates a JSON run description. Throws ConfigError with the
/// dotted path of the offending field; rate-language errors pass through
/// with their positions. The declared moiety totals are checked against the
/// initial profiles on the configured mesh.
RunConfig load_config(const std::string& path);

/// Same, from an in-memory JSON document.
RunConfig parse_config_text(const std::string& text);

} // namespace rdc

#endif
