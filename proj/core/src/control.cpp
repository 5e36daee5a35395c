#include "rdcontrol/control.hpp"

#include "rdcontrol/errors.hpp"

#include <algorithm>
#include <cmath>

namespace rdc {

namespace {

// A target counts as zero when it is this far below its cancellation scale;
// coefficients then switch to absolute derivatives, which stay finite.
constexpr double kZeroRel = 1e-12;

const NetworkSpec& require_spec(const std::shared_ptr<const NetworkSpec>& s) {
  if (!s) throw ValidationError("control context has no network");
  return *s;
}

} // namespace

ControlEngine::ControlEngine(ControlContext ctx)
  : ctx_(std::move(ctx)),
    mesh_(build_mesh(require_spec(ctx_.spec).geometry(), ctx_.n_cells)) {
  if (!(ctx_.fd_step > 0.0) || ctx_.fd_step > 0.1)
    throw ValidationError("finite-difference step must lie in (0, 0.1]");
  if (ctx_.transient_steps < 1)
    throw ValidationError("timed targets need at least one integration step");
}

// ---------------------------------------------------------------------------
// probing

ControlEngine::Probe ControlEngine::solve_probe(const TargetSelector& target,
                                                const ModulationVector& mv,
                                                const std::string& probe_label) {
  ModulatedSpec ms = apply_modulation(ctx_.spec, mv);
  DiscreteSystem sys(ms, mesh_);

  std::vector<double> state;
  if (target.timed()) {
    if (!(target.tau > 0.0))
      throw ValidationError("timed target needs a positive horizon");
    try {
      auto field = integrate_transient(sys, sys.initial_field(), target.tau,
                                       ctx_.transient_steps, ctx_.settings);
      state = std::move(field.values);
    } catch (const Error& e) {
      throw ProbeSolveFailed(probe_label, e.what());
    }
  } else {
    std::vector<double> guess;
    if (have_warm_)
      guess.assign(warm_.data(), warm_.data() + warm_.size());
    else
      guess = sys.initial_field();
    try {
      ConcentrationField field;
      try {
        field = solve_steady(sys, guess, ctx_.settings);
      } catch (const NewtonDiverged&) {
        if (!have_warm_) throw;
        // a strongly scaled probe may sit outside the warm basin; the
        // declared initial state carries the same conserved totals
        field = solve_steady(sys, sys.initial_field(), ctx_.settings);
      }
      state = std::move(field.values);
    } catch (const Error& e) {
      throw ProbeSolveFailed(probe_label, e.what());
    }
    warm_ = Eigen::Map<const Eigen::VectorXd>(state.data(),
                                              static_cast<long>(state.size()));
    have_warm_ = true;
  }

  Probe p;
  switch (target.kind) {
    case TargetSelector::Kind::Flux:
    case TargetSelector::Kind::TimedFlux:
      p.value = sys.flux(state);
      p.scale = sys.flux_scale(state);
      break;
    case TargetSelector::Kind::Concentration:
    case TargetSelector::Kind::TimedConcentration: {
      int s = ctx_.spec->species_index(target.species);
      p.value = sys.interpolate(state, s, target.xi);
      p.scale = 0.0;
      for (int k = 0; k < sys.n_cells(); ++k)
        p.scale = std::max(p.scale, std::fabs(state[sys.index(k, s)]));
      break;
    }
    case TargetSelector::Kind::FaceDifference: {
      int s = ctx_.spec->species_index(target.species);
      double lo = sys.face_value(state, s, Face::Lower);
      double hi = sys.face_value(state, s, Face::Upper);
      p.value = hi - lo;
      p.scale = std::max(std::fabs(lo), std::fabs(hi));
      break;
    }
  }
  return p;
}

double ControlEngine::target_value(const TargetSelector& target,
                                   const ModulationVector& mv) {
  return solve_probe(target, mv, "explicit modulation").value;
}

double ControlEngine::reference_value(const TargetSelector& target) {
  return solve_probe(target, ModulationVector::reference(*ctx_.spec), "reference").value;
}

// ---------------------------------------------------------------------------
// modulators

ModulationVector ControlEngine::modulated(const Modulator& mod, double factor) const {
  const NetworkSpec& spec = *ctx_.spec;
  ModulationVector mv = ModulationVector::reference(spec);
  switch (mod.kind) {
    case Modulator::Kind::Diffusion:
      for (const auto& name : mod.members) {
        spec.species_index(name); // validates
        mv.diffusion[name] = factor;
      }
      break;
    case Modulator::Kind::Reaction:
      for (const auto& name : mod.members) {
        spec.reaction_index(name);
        mv.reaction[name] = factor;
      }
      break;
    case Modulator::Kind::Transport:
      for (const auto& name : mod.members) {
        int g = -1;
        for (int i = 0; i < spec.n_transport_groups(); ++i)
          if (spec.group_name(i) == name) g = i;
        if (g < 0) throw ValidationError("unknown transport group '" + name + "'");
        for (int t : spec.group_members(g)) {
          const auto& law = spec.transport(t);
          mv.transport[{spec.species_name(law.species), law.face}] = factor;
        }
      }
      break;
    case Modulator::Kind::Size:
      mv.size = factor;
      break;
    case Modulator::Kind::Time:
      mv.time = factor;
      break;
  }
  if (mod.kind != Modulator::Kind::Size && mod.kind != Modulator::Kind::Time &&
      mod.members.empty())
    throw ValidationError("modulator '" + mod.label + "' has no members");
  return mv;
}

std::vector<Modulator> ControlEngine::rate_modulators() const {
  const NetworkSpec& spec = *ctx_.spec;
  std::vector<Modulator> mods;
  for (int i = 0; i < spec.n_species(); ++i) {
    if (spec.diffusion(i) == 0.0) continue; // no handle: coefficient is identically 0
    mods.push_back({Modulator::Kind::Diffusion,
                    {spec.species_name(i)},
                    "D:" + spec.species_name(i)});
  }
  for (int j = 0; j < spec.n_reactions(); ++j)
    mods.push_back({Modulator::Kind::Reaction,
                    {spec.reaction(j).name},
                    "v:" + spec.reaction(j).name});
  for (int g = 0; g < spec.n_transport_groups(); ++g)
    mods.push_back({Modulator::Kind::Transport,
                    {spec.group_name(g)},
                    "f:" + spec.group_name(g)});
  return mods;
}

// ---------------------------------------------------------------------------
// coefficient estimation

Coefficient ControlEngine::estimate(const TargetSelector& target, const Modulator& mod) {
  double h = ctx_.fd_step;
  Probe ref = solve_probe(target, ModulationVector::reference(*ctx_.spec), "reference");

  double gp = solve_probe(target, modulated(mod, std::exp(h)), mod.label).value;
  double gm = solve_probe(target, modulated(mod, std::exp(-h)), mod.label).value;
  double gp2 = solve_probe(target, modulated(mod, std::exp(h / 2)), mod.label).value;
  double gm2 = solve_probe(target, modulated(mod, std::exp(-h / 2)), mod.label).value;

  Coefficient c;
  c.modulator = mod;
  bool zero = std::fabs(ref.value) < kZeroRel * std::max(ref.scale, 1e-300);
  // a sign change across the window means ln|g| has no derivative there;
  // report the absolute sensitivity in that case too
  if (!zero && (gp * gm <= 0.0 || gp2 * gm2 <= 0.0)) zero = true;

  if (zero) {
    double d1 = (gp - gm) / (2.0 * h);
    double d2 = (gp2 - gm2) / h;
    c.value = (4.0 * d2 - d1) / 3.0;
    c.trunc_err = std::fabs(d2 - d1) / 3.0;
    c.zero_target = true;
  } else {
    double c1 = std::log(std::fabs(gp / gm)) / (2.0 * h);
    double c2 = std::log(std::fabs(gp2 / gm2)) / h;
    c.value = (4.0 * c2 - c1) / 3.0;
    c.trunc_err = std::fabs(c2 - c1) / 3.0;
  }
  return c;
}

Coefficient ControlEngine::coefficient(const TargetSelector& target, const Modulator& mod) {
  return estimate(target, mod);
}

Coefficient ControlEngine::size_coefficient(const TargetSelector& target) {
  return estimate(target, {Modulator::Kind::Size, {}, "L"});
}

Coefficient ControlEngine::time_coefficient(const TargetSelector& target) {
  if (!target.timed())
    throw ValidationError("the clock coefficient is defined for timed targets only");
  return estimate(target, {Modulator::Kind::Time, {}, "t"});
}

// ---------------------------------------------------------------------------
// reports

ControlReport ControlEngine::report(const TargetSelector& target) {
  ControlReport rep;
  rep.target = target;
  rep.fd_step = ctx_.fd_step;

  Probe ref = solve_probe(target, ModulationVector::reference(*ctx_.spec), "reference");
  rep.reference_value = ref.value;
  rep.zero_target = std::fabs(ref.value) < kZeroRel * std::max(ref.scale, 1e-300);

  for (const Modulator& m : rate_modulators())
    rep.coefficients.push_back(estimate(target, m));
  if (target.timed()) rep.coefficients.push_back(time_coefficient(target));
  rep.size = size_coefficient(target);

  double gamma = target.flux_like() ? 1.0 : 0.0;
  // with a vanished target the sums are of absolute derivatives and the
  // homogeneity degree multiplies the (zero) target value itself
  double expected = rep.zero_target ? gamma * rep.reference_value : gamma;

  double rate_sum = 0.0;
  double size_sum = rep.size.value;
  double open_sum = 0.0;
  for (const Coefficient& c : rep.coefficients) {
    switch (c.modulator.kind) {
      case Modulator::Kind::Time:
        rate_sum -= c.value;
        break;
      case Modulator::Kind::Diffusion:
        rate_sum += c.value;
        size_sum += 2.0 * c.value;
        open_sum += 2.0 * c.value;
        break;
      case Modulator::Kind::Transport:
        rate_sum += c.value;
        size_sum += c.value;
        open_sum += c.value;
        break;
      default:
        rate_sum += c.value;
        break;
    }
  }
  rep.reaction_sum = rate_sum;
  rep.reaction_expected = expected;
  rep.reaction_residual = rate_sum - expected;
  rep.size_sum = size_sum;
  rep.size_expected = expected;
  rep.size_residual = size_sum - expected;
  rep.open_size_sum = open_sum;
  return rep;
}

// ---------------------------------------------------------------------------
// homogeneity

double ControlEngine::homogeneity_deviation(const TargetSelector& target,
                                            const ScalingExponents& family,
                                            double gamma,
                                            std::span<const double> lambdas) {
  ModulationVector ref_mv = ModulationVector::reference(*ctx_.spec);
  double g0 = solve_probe(target, ref_mv, "reference").value;
  double worst = 0.0;
  for (double lam : lambdas) {
    if (!(lam > 0.0)) throw ValidationError("scale factors must be positive");
    ModulationVector mv = scale_modulation(ref_mv, lam, family);
    double g = solve_probe(target, mv, "scaled family").value;
    double want = std::pow(lam, gamma) * g0;
    double denom = std::max(std::fabs(want), 1e-300);
    worst = std::max(worst, std::fabs(g - want) / denom);
  }
  return worst;
}

} // namespace rdc
