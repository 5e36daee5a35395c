#include "rdcontrol/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <cmath>
#include <limits>

namespace rdc {

namespace {

// A residual is judged two ways: relative to the largest row's activity
// scale (a per-row relative criterion cannot be met where the field decays
// to ~1e-18, so rows are compared system-wide), and against the floating-
// point floor of its own evaluation, kAtFloor times machine epsilon of the
// accumulated operand magnitudes, below which iterating cannot improve it.
constexpr double kAtFloor = 16.0 * std::numeric_limits<double>::epsilon();

struct Status {
  double nr, floor_gap;
  bool converged(double tol) const { return nr <= tol || floor_gap <= 1.0; }
};

Status assess(std::span<const double> r, std::span<const double> s,
              std::span<const double> f) {
  double smax = 0.0, fmax = 0.0, rmax = 0.0;
  for (size_t i = 0; i < r.size(); ++i) {
    if (s[i] > smax) smax = s[i];
    if (f[i] > fmax) fmax = f[i];
    double v = std::fabs(r[i]);
    if (!(v <= rmax)) rmax = v;  // also catches NaN into rmax=NaN
  }
  return {rmax / (smax + 1e-300), rmax / (kAtFloor * fmax + 1e-300)};
}

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

void check_nonnegative(const DiscreteSystem& system, std::span<const double> c) {
  double cmax = 0.0;
  for (double v : c) cmax = std::max(cmax, std::fabs(v));
  double band = -1e-9 * cmax;
  for (int k = 0; k < system.n_cells(); ++k)
    for (int i = 0; i < system.n_species(); ++i) {
      double v = c[system.index(k, i)];
      if (v < band) throw NegativeConcentration(k, i, v);
    }
}

} // namespace

// ---------------------------------------------------------------------------
// steady state

ConcentrationField solve_steady(const DiscreteSystem& system,
                                std::span<const double> guess,
                                const SolveSettings& settings) {
  const int N = system.size();
  if (static_cast<int>(guess.size()) != N)
    throw ValidationError("guess has wrong size");

  // Conserved totals leave the Jacobian singular along their weight
  // directions; bordering rows pin them to the guess's values.
  auto weights = system.conserved_weights();
  const int nb = static_cast<int>(weights.size());
  const Mesh& mesh = system.mesh();
  Eigen::MatrixXd U(nb, N);
  for (int b = 0; b < nb; ++b) {
    for (int k = 0; k < system.n_cells(); ++k)
      for (int i = 0; i < system.n_species(); ++i)
        U(b, system.index(k, i)) = weights[b][i] * mesh.volumes[k] / mesh.total_volume;
    U.row(b) /= U.row(b).norm();
  }
  Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(guess.data(), N);
  Eigen::VectorXd target = U * c;

  std::vector<double> res(N), scale(N), fl(N), trial_res(N), trial_scale(N),
      trial_fl(N);
  Eigen::VectorXd trial(N);
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::SparseMatrix<double> M(N + nb, N + nb);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  Eigen::VectorXd rhs(N + nb), delta(N + nb);

  system.residual({c.data(), static_cast<size_t>(N)}, res);
  system.residual_scale({c.data(), static_cast<size_t>(N)}, scale);
  system.residual_floor({c.data(), static_cast<size_t>(N)}, fl);
  Status st = assess(res, scale, fl);

  int iter = 0;
  for (; iter < settings.max_iterations; ++iter) {
    if (st.converged(settings.newton_tol)) break;
    if (!std::isfinite(st.nr)) throw NewtonDiverged(iter, st.nr);

    trips.clear();
    system.jacobian_triplets({c.data(), static_cast<size_t>(N)}, trips);
    double border = 1.0;
    for (const auto& t : trips) border = std::max(border, std::fabs(t.value()));
    for (int b = 0; b < nb; ++b)
      for (int j = 0; j < N; ++j)
        if (U(b, j) != 0.0) {
          trips.emplace_back(j, N + b, border * U(b, j));
          trips.emplace_back(N + b, j, border * U(b, j));
        }
    M.setFromTriplets(trips.begin(), trips.end());
    lu.compute(M);
    if (lu.info() != Eigen::Success) throw NewtonDiverged(iter, st.nr);
    rhs.head(N) = -Eigen::Map<const Eigen::VectorXd>(res.data(), N);
    rhs.tail(nb) = border * (target - U * c);

    delta = lu.solve(rhs);
    if (!delta.allFinite()) throw NewtonDiverged(iter, st.nr);

    // Backtracking on the scaled residual; a trial that is converged (or at
    // its evaluation floor) is accepted regardless of the decrease test.
    double theta = 1.0;
    bool accepted = false;
    while (theta >= settings.min_step) {
      trial = c + theta * delta.head(N);
      bool ok = true;
      try {
        system.residual({trial.data(), static_cast<size_t>(N)}, trial_res);
        system.residual_scale({trial.data(), static_cast<size_t>(N)}, trial_scale);
        system.residual_floor({trial.data(), static_cast<size_t>(N)}, trial_fl);
      } catch (const Error&) {
        ok = false;
      }
      if (ok && all_finite(trial_res)) {
        Status ts = assess(trial_res, trial_scale, trial_fl);
        if (ts.nr <= (1.0 - 1e-4 * theta) * st.nr ||
            ts.converged(settings.newton_tol)) {
          c = trial;
          res = trial_res;
          scale = trial_scale;
          fl = trial_fl;
          st = ts;
          accepted = true;
          break;
        }
      }
      theta *= 0.5;
    }
    if (!accepted) throw NewtonDiverged(iter + 1, st.nr);
  }
  if (!st.converged(settings.newton_tol)) throw NewtonDiverged(iter, st.nr);

  ConcentrationField out;
  out.values.assign(c.data(), c.data() + N);
  out.modulation = system.modulated().modulation();
  out.n_cells = system.n_cells();
  out.n_species = system.n_species();
  if (settings.check_nonnegative) check_nonnegative(system, out.values);
  return out;
}

// ---------------------------------------------------------------------------
// transient

ConcentrationField integrate_transient(const DiscreteSystem& system,
                                       std::span<const double> initial,
                                       double tau_end, int n_steps,
                                       const SolveSettings& settings) {
  const int N = system.size();
  if (static_cast<int>(initial.size()) != N)
    throw ValidationError("initial field has wrong size");
  if (!(tau_end > 0) || n_steps < 1)
    throw ValidationError("transient needs tau_end > 0 and n_steps >= 1");

  const double at = system.modulated().alpha_time();
  const double dt = tau_end / n_steps;
  const double rate = 1.0 / (dt * at);  // weight of the time-derivative term

  ConcentrationField out;
  out.modulation = system.modulated().modulation();
  out.n_cells = system.n_cells();
  out.n_species = system.n_species();
  out.times.reserve(n_steps + 1);
  out.frames.reserve(n_steps + 1);
  out.times.push_back(0.0);
  out.frames.emplace_back(initial.begin(), initial.end());

  Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(initial.data(), N);
  Eigen::VectorXd c_prev(N), g(N);
  std::vector<double> res(N), scale(N), fl(N), srow(N), frow(N);
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::SparseMatrix<double> M(N, N);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool have_lu = false;

  auto step_residual = [&](const Eigen::VectorXd& x) -> Status {
    // G(x) = (x - c_prev) * rate - F(x); the activity scale and roundoff
    // floor follow the same terms, judged as in solve_steady.
    system.residual({x.data(), static_cast<size_t>(N)}, res);
    system.residual_scale({x.data(), static_cast<size_t>(N)}, scale);
    system.residual_floor({x.data(), static_cast<size_t>(N)}, fl);
    for (int i = 0; i < N; ++i) {
      g(i) = (x(i) - c_prev(i)) * rate - res[i];
      srow[i] = scale[i] + std::fabs(x(i) - c_prev(i)) * rate;
      frow[i] = fl[i] + (std::fabs(x(i)) + std::fabs(c_prev(i))) * rate;
    }
    return assess({g.data(), static_cast<size_t>(N)}, srow, frow);
  };

  auto refactor = [&](const Eigen::VectorXd& x) {
    // M = rate*I - J
    trips.clear();
    system.jacobian_triplets({x.data(), static_cast<size_t>(N)}, trips);
    for (auto& t : trips)
      t = Eigen::Triplet<double>(t.row(), t.col(), -t.value());
    for (int i = 0; i < N; ++i) trips.emplace_back(i, i, rate);
    M.setFromTriplets(trips.begin(), trips.end());
    lu.compute(M);
    have_lu = lu.info() == Eigen::Success;
  };

  for (int step = 0; step < n_steps; ++step) {
    c_prev = c;
    bool refactored_this_step = false;
    Status st;
    try {
      st = step_residual(c);
    } catch (const Error& e) {
      throw StepSolveFailed(step, e.what());
    }
    int iter = 0;
    for (; iter < settings.max_iterations; ++iter) {
      if (st.converged(settings.newton_tol)) break;
      // A stale factorization is fine while quadratic-ish convergence lasts;
      // refresh it once per step if the iteration drags.
      if (!have_lu || (iter >= 3 && !refactored_this_step)) {
        refactor(c);
        refactored_this_step = true;
        if (!have_lu) throw StepSolveFailed(step, "factorization failed");
      }
      Eigen::VectorXd delta = lu.solve(-g);
      if (!delta.allFinite()) {
        if (!refactored_this_step) {
          refactor(c);
          refactored_this_step = true;
          continue;
        }
        throw StepSolveFailed(step, "linear solve produced non-finite step");
      }
      c += delta;
      try {
        st = step_residual(c);
      } catch (const Error& e) {
        throw StepSolveFailed(step, e.what());
      }
      if (!std::isfinite(st.nr)) throw StepSolveFailed(step, "residual not finite");
    }
    if (!st.converged(settings.newton_tol))
      throw StepSolveFailed(step, "Newton stalled at scaled residual " +
                                      std::to_string(st.nr));
    if (settings.check_nonnegative)
      check_nonnegative(system, {c.data(), static_cast<size_t>(N)});
    out.times.push_back((step + 1) * dt);
    out.frames.emplace_back(c.data(), c.data() + N);
  }

  out.values = out.frames.back();
  return out;
}

// ---------------------------------------------------------------------------
// moiety bookkeeping

std::vector<double> moiety_totals(const ConcentrationField& field, const Mesh& mesh,
                                  std::span<const double> weights) {
  if (static_cast<int>(weights.size()) != field.n_species)
    throw ValidationError("weight vector length must match species count");
  auto total = [&](const std::vector<double>& c) {
    double acc = 0.0;
    for (int k = 0; k < field.n_cells; ++k) {
      double w = 0.0;
      for (int i = 0; i < field.n_species; ++i)
        w += weights[i] * c[k * field.n_species + i];
      acc += mesh.volumes[k] * w;
    }
    return acc;
  };
  std::vector<double> out;
  if (field.frames.empty()) {
    out.push_back(total(field.values));
  } else {
    out.reserve(field.frames.size());
    for (const auto& frame : field.frames) out.push_back(total(frame));
  }
  return out;
}

} // namespace rdc
