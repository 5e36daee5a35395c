#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "rdcontrol/control.hpp"
#include "rdcontrol/examples.hpp"

using namespace rdc;
namespace ref = oracles::sphere_ref;

namespace {

ControlContext slab_context(const analytic::SlabParams& p, int cells = 256) {
  ControlContext ctx;
  ctx.spec = examples::slab_cycle(p);
  ctx.n_cells = cells;
  return ctx;
}

ControlContext sphere_context(const analytic::SphereParams& p, int cells = 256) {
  ControlContext ctx;
  ctx.spec = examples::sphere_cycle(p);
  ctx.n_cells = cells;
  return ctx;
}

TargetSelector flux_target() {
  TargetSelector t;
  t.kind = TargetSelector::Kind::Flux;
  return t;
}

}  // namespace

TEST_CASE("slab flux coefficients match the closed forms") {
  analytic::SlabParams p;
  analytic::Controls want = analytic::slab_flux_controls(p);
  ControlEngine eng(slab_context(p));
  ControlReport rep = eng.report(flux_target());

  CHECK_FALSE(rep.zero_target);
  CHECK(rep.reference_value == doctest::Approx(-9.9 / 24.2).epsilon(1e-9));
  CHECK(oracles::coefficient(rep, "f:kinase").value ==
        doctest::Approx(want.kinase).epsilon(1e-6));
  CHECK(oracles::coefficient(rep, "f:phosphatase").value ==
        doctest::Approx(want.phosphatase).epsilon(1e-6));
  CHECK(oracles::diffusion_sum(rep) == doctest::Approx(want.diffusion).epsilon(1e-6));
  CHECK(rep.size.value == doctest::Approx(want.size).epsilon(1e-6));

  // theorem residuals are exact properties of the discretized system, far
  // below the coefficient discretization error
  CHECK(rep.reaction_expected == 1.0);
  CHECK(std::fabs(rep.reaction_residual) <= 1e-10);
  CHECK(rep.size_expected == 1.0);
  CHECK(std::fabs(rep.size_residual) <= 1e-10);

  for (const Coefficient& c : rep.coefficients) CHECK(c.trunc_err >= 0.0);
}

TEST_CASE("slab face-difference coefficients match the closed forms") {
  analytic::SlabParams p;
  analytic::Controls want = analytic::slab_conc_controls(p);
  ControlEngine eng(slab_context(p));
  TargetSelector t;
  t.kind = TargetSelector::Kind::FaceDifference;
  t.species = "YP";
  ControlReport rep = eng.report(t);

  CHECK(rep.reference_value == doctest::Approx(9.9 / 24.2).epsilon(1e-9));
  CHECK(oracles::coefficient(rep, "f:kinase").value ==
        doctest::Approx(want.kinase).epsilon(1e-6));
  CHECK(oracles::coefficient(rep, "f:phosphatase").value ==
        doctest::Approx(want.phosphatase).epsilon(1e-6));
  CHECK(oracles::diffusion_sum(rep) == doctest::Approx(want.diffusion).epsilon(1e-6));
  CHECK(rep.size.value == doctest::Approx(want.size).epsilon(1e-6));
  CHECK(rep.reaction_expected == 0.0);
  CHECK(std::fabs(rep.reaction_residual) <= 1e-10);
  CHECK(std::fabs(rep.size_residual) <= 1e-10);
}

TEST_CASE("sphere coefficients match the frozen reference values") {
  analytic::SphereParams p;
  ControlEngine eng(sphere_context(p));

  ControlReport rj = eng.report(flux_target());
  CHECK(rj.reference_value == doctest::Approx(ref::J).epsilon(1e-5));
  CHECK(oracles::coefficient(rj, "f:kinase").value == doctest::Approx(ref::CJ_k).epsilon(1e-4));
  CHECK(oracles::coefficient(rj, "v:phosphatase").value ==
        doctest::Approx(ref::CJ_p).epsilon(1e-4));
  CHECK(oracles::diffusion_sum(rj) == doctest::Approx(ref::CJ_D).epsilon(1e-4));
  CHECK(rj.size.value == doctest::Approx(ref::CJ_L).epsilon(1e-4));

  TargetSelector tc;
  tc.kind = TargetSelector::Kind::Concentration;
  tc.species = "YP";
  tc.xi = 0.5;
  ControlReport rc = eng.report(tc);
  CHECK(rc.reference_value == doctest::Approx(ref::yp_half).epsilon(1e-5));
  CHECK(oracles::coefficient(rc, "f:kinase").value == doctest::Approx(ref::Cc_k).epsilon(1e-4));
  CHECK(oracles::coefficient(rc, "v:phosphatase").value ==
        doctest::Approx(ref::Cc_p).epsilon(1e-4));
  CHECK(oracles::diffusion_sum(rc) == doctest::Approx(ref::Cc_D).epsilon(1e-4));
  CHECK(rc.size.value == doctest::Approx(ref::Cc_L).epsilon(1e-4));
  CHECK(std::fabs(rc.reaction_residual) <= 1e-10);
  CHECK(std::fabs(rc.size_residual) <= 1e-10);
}

TEST_CASE("a vanishing target switches to absolute sensitivities") {
  // equal rate constants and equal equilibrium ratios: both membranes pull
  // toward the same state, so the face difference is identically zero
  analytic::SlabParams p;
  p.kappa_k = p.kappa_p = 0.5;
  ControlEngine eng(slab_context(p, 64));
  TargetSelector t;
  t.kind = TargetSelector::Kind::FaceDifference;
  t.species = "YP";
  ControlReport rep = eng.report(t);

  CHECK(rep.zero_target);
  CHECK(std::fabs(rep.reference_value) <= 1e-12);
  CHECK(rep.reaction_expected == 0.0);
  for (const Coefficient& c : rep.coefficients) {
    CHECK(c.zero_target);
    CHECK(std::fabs(c.value) <= 1e-9);  // the difference stays zero under modulation
  }
  CHECK(std::fabs(rep.reaction_residual) <= 1e-9);
  CHECK(std::fabs(rep.size_residual) <= 1e-9);
}

TEST_CASE("the clock coefficient exists for timed targets only") {
  analytic::SlabParams p;
  ControlEngine eng(slab_context(p, 64));
  CHECK_THROWS_AS(eng.time_coefficient(flux_target()), ValidationError);

  TargetSelector t;
  t.kind = TargetSelector::Kind::TimedFlux;
  t.tau = 0.5;
  ControlContext ctx = slab_context(p, 64);
  ctx.transient_steps = 200;
  ControlEngine timed(ctx);
  ControlReport rep = timed.report(t);

  // the clock enters the reaction-sum theorem with a minus sign; the combined
  // modulation (all rates up, clock down) maps the trajectory onto itself, so
  // the identity holds to solver precision even far from the steady state
  const Coefficient& ct = oracles::coefficient(rep, "t");
  CHECK(ct.value < 0.0);  // faster clock means closer to the relaxed flux
  CHECK(rep.reaction_expected == 1.0);
  CHECK(std::fabs(rep.reaction_residual) <= 1e-9);
}

TEST_CASE("relaxed timed targets forget the clock") {
  analytic::SlabParams p;
  ControlContext ctx = slab_context(p, 64);
  ctx.transient_steps = 200;
  ControlEngine eng(ctx);

  TargetSelector early;
  early.kind = TargetSelector::Kind::TimedFlux;
  early.tau = 0.3;
  TargetSelector late;
  late.kind = TargetSelector::Kind::TimedFlux;
  late.tau = 10.0;

  double c_early = std::fabs(eng.time_coefficient(early).value);
  double c_late = std::fabs(eng.time_coefficient(late).value);
  CHECK(c_late < c_early);
  CHECK(c_late <= 1e-3);
}

TEST_CASE("scaling families leave their homogeneity degree, not more") {
  analytic::SlabParams p;
  ControlContext ctx = slab_context(p, 128);
  ControlEngine eng(ctx);
  const double lambdas[] = {0.5, 2.0, 4.0};

  ScalingExponents rates{1.0, 1.0, 1.0, 0.0, 0.0};
  CHECK(eng.homogeneity_deviation(flux_target(), rates, 1.0, lambdas) <= 1e-8);

  ScalingExponents size{0.0, 1.0, 2.0, 1.0, 0.0};
  CHECK(eng.homogeneity_deviation(flux_target(), size, 1.0, lambdas) <= 1e-8);

  // the wrong degree must be visibly wrong
  CHECK(eng.homogeneity_deviation(flux_target(), size, 0.0, lambdas) > 0.1);

  const double bad[] = {-1.0};
  CHECK_THROWS_AS(eng.homogeneity_deviation(flux_target(), rates, 1.0, bad),
                  ValidationError);
}

TEST_CASE("halving the step shrinks the truncation estimate fourfold") {
  analytic::SlabParams p;
  ControlContext coarse = slab_context(p, 64);
  coarse.fd_step = 0.02;
  ControlContext fine = slab_context(p, 64);
  fine.fd_step = 0.01;

  ControlReport rc = ControlEngine(coarse).report(flux_target());
  ControlReport rf = ControlEngine(fine).report(flux_target());

  for (const Coefficient& c : rc.coefficients) {
    const Coefficient& f = oracles::coefficient(rf, c.modulator.label);
    // the Richardson values themselves move by no more than the estimates
    CHECK(std::fabs(c.value - f.value) <= 5.0 * (c.trunc_err + f.trunc_err) + 1e-8);
    // and the estimate scales like h^2 wherever it is above solver noise
    if (f.trunc_err > 1e-9) {
      CHECK(c.trunc_err / f.trunc_err >= 2.5);
      CHECK(c.trunc_err / f.trunc_err <= 6.0);
    }
  }
}
