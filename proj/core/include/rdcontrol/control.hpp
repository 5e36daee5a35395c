#ifndef RDCONTROL_CONTROL_HPP
#define RDCONTROL_CONTROL_HPP

#include "rdcontrol/mesh.hpp"
#include "rdcontrol/network.hpp"
#include "rdcontrol/solver.hpp"

#include <Eigen/Dense>

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace rdc {

/// What scalar observable the coefficients differentiate.
struct TargetSelector {
  enum class Kind {
    Flux,               ///< steady boundary export flux J
    Concentration,      ///< steady c_s(xi)
    FaceDifference,     ///< steady c_s(L) - c_s(0)
    TimedFlux,          ///< J at reference time tau
    TimedConcentration, ///< c_s(xi) at reference time tau
  };
  Kind kind = Kind::Flux;
  std::string species; ///< observed species (concentration targets)
  double xi = 0.0;     ///< sample position (concentration targets)
  double tau = 0.0;    ///< horizon (timed targets)

  bool timed() const { return kind == Kind::TimedFlux || kind == Kind::TimedConcentration; }
  bool flux_like() const { return kind == Kind::Flux || kind == Kind::TimedFlux; }
};

/// One knob of the modulated system. Multi-member modulators scale all their
/// members together (a transport group is always probed as a whole, since its
/// laws must stay paired to conserve mass).
struct Modulator {
  enum class Kind { Diffusion, Reaction, Transport, Size, Time };
  Kind kind = Kind::Diffusion;
  std::vector<std::string> members; ///< species / reaction / group names
  std::string label;                ///< stable identifier, e.g. "D:Y", "v:phos", "f:kinase"
};

/// Scaled control coefficient of one modulator, estimated by central
/// log-differences with one Richardson refinement.
struct Coefficient {
  Modulator modulator;
  double value = 0.0;      ///< d ln|g| / d ln alpha (or d g / d ln alpha, see below)
  double trunc_err = 0.0;  ///< |C(h/2) - C(h)| / 3, the discarded correction
  bool zero_target = false; ///< target ~ 0: value is the absolute derivative
};

/// Everything needed to evaluate targets under modulation.
struct ControlContext {
  std::shared_ptr<const NetworkSpec> spec;
  int n_cells = 256;
  SolveSettings settings;
  double fd_step = 1e-3;    ///< outer step of the Richardson pair
  int transient_steps = 400; ///< fixed step count for timed targets
};

/// Full control analysis of one target: every rate-like coefficient, the size
/// coefficient, and the two summation diagnostics.
struct ControlReport {
  TargetSelector target;
  double reference_value = 0.0;
  bool zero_target = false;
  double fd_step = 0.0;

  std::vector<Coefficient> coefficients; ///< D per species, v per reaction, f per group, t last if timed
  Coefficient size;                      ///< the domain-size coefficient C_L

  /// sum of all rate coefficients (minus the time coefficient when timed);
  /// equals 1 for flux targets and 0 for concentration targets
  double reaction_sum = 0.0;
  double reaction_expected = 0.0;
  double reaction_residual = 0.0;

  /// 2 sum(C_D) + sum(C_f) + C_L; bulk reactions and time stay out.
  /// Equals 1 for flux targets and 0 for concentration targets.
  double size_sum = 0.0;
  double size_expected = 0.0;
  double size_residual = 0.0;

  /// size_sum without C_L; for half-line systems C_L vanishes with the
  /// truncation radius and this open-boundary form satisfies the theorem alone
  double open_size_sum = 0.0;
};

/// Evaluates targets and control coefficients for one network. Probe solves
/// warm-start from the reference solution, so a report is a sequence of
/// one-iteration Newton refinements.
class ControlEngine {
public:
  explicit ControlEngine(ControlContext ctx);

  const ControlContext& context() const { return ctx_; }
  const Mesh& mesh() const { return mesh_; }

  /// Target under an explicit modulation (steady solve or fixed-step
  /// transient). Uses and refreshes the warm-start cache.
  double target_value(const TargetSelector& target, const ModulationVector& mv);

  /// Reference target and its cancellation scale (used for the zero test).
  double reference_value(const TargetSelector& target);

  Coefficient coefficient(const TargetSelector& target, const Modulator& mod);
  Coefficient size_coefficient(const TargetSelector& target);
  Coefficient time_coefficient(const TargetSelector& target);

  /// Everything at once, plus the summation diagnostics.
  ControlReport report(const TargetSelector& target);

  /// All rate-like modulators of the network, in report order.
  std::vector<Modulator> rate_modulators() const;

  /// Largest relative deviation of g(scaled) from lambda^gamma g(reference)
  /// across the given scale factors, for one exponent family.
  double homogeneity_deviation(const TargetSelector& target, const ScalingExponents& family,
                               double gamma, std::span<const double> lambdas);

private:
  struct Probe {
    double value = 0.0; ///< target
    double scale = 0.0; ///< magnitude against which the target may cancel
  };
  Probe solve_probe(const TargetSelector& target, const ModulationVector& mv,
                    const std::string& probe_label);
  Coefficient estimate(const TargetSelector& target, const Modulator& mod);
  ModulationVector modulated(const Modulator& mod, double factor) const;

  ControlContext ctx_;
  Mesh mesh_;
  Eigen::VectorXd warm_;   ///< last reference steady solution
  bool have_warm_ = false;
};

} // namespace rdc

#endif
