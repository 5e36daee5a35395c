#ifndef RDCONTROL_SOLVER_HPP
#define RDCONTROL_SOLVER_HPP

#include <span>
#include <vector>

#include "rdcontrol/system.hpp"

namespace rdc {

struct SolveSettings {
  /// Convergence threshold on the scaled residual max_i |F_i| / scale_i,
  /// where scale_i sums the magnitudes of the terms feeding row i.
  double newton_tol = 1e-10;
  int max_iterations = 60;
  /// Line-search floor: the damping factor halves down to this before the
  /// solve counts as diverged.
  double min_step = 1e-6;
  /// Converged states with entries below -1e-9 * max|c| abort with
  /// NegativeConcentration instead of clamping.
  bool check_nonnegative = true;
};

/// A concentration field tied to the modulation it was computed under.
/// Steady solves fill `values` only; transient integrations also record the
/// full trajectory in `times`/`frames` (frames.front() is the initial state,
/// frames.back() == values).
struct ConcentrationField {
  std::vector<double> values;
  ModulationVector modulation;
  int n_cells = 0;
  int n_species = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> frames;
};

/// Damped Newton iteration for F(c) = 0. Conserved totals (detected from
/// the discrete system itself) make the plain Jacobian singular; the solve
/// pins them to their values in `guess` through bordering constraints, which
/// is exactly the reference-state convention: the guess carries the moiety
/// totals. Throws NewtonDiverged, NegativeConcentration.
ConcentrationField solve_steady(const DiscreteSystem& system,
                                std::span<const double> guess,
                                const SolveSettings& settings = {});

/// Implicit (backward) Euler over [0, tau_end] in n_steps uniform steps of
/// the reference clock; the modulation's alpha_t multiplies F. Each step
/// solves its nonlinear system to newton_tol, reusing the factored Jacobian
/// across steps until convergence degrades. Throws StepSolveFailed (wrapping
/// the inner failure) or NegativeConcentration.
ConcentrationField integrate_transient(const DiscreteSystem& system,
                                       std::span<const double> initial,
                                       double tau_end, int n_steps,
                                       const SolveSettings& settings = {});

/// Volume integral of sum_i weights_i c_i, one value per stored frame (a
/// single value for steady fields). Weights are per species; an all-zero
/// weight vector gives 0.
std::vector<double> moiety_totals(const ConcentrationField& field, const Mesh& mesh,
                                  std::span<const double> weights);

} // namespace rdc

#endif
