#include <cmath>
#include <map>
#include <memory>

#include "doctest.h"
#include "oracles.hpp"
#include "rdcontrol/errors.hpp"
#include "rdcontrol/examples.hpp"
#include "rdcontrol/network.hpp"

using namespace rdc;

namespace {

std::vector<SpeciesDecl> cycle_species() {
  return {{"Y", 1.0, "0.5"}, {"YP", 1.0, "0.5"}};
}

std::vector<TransportDecl> kinase_only() {
  return {{"YP", Face::Upper, "YP - 10*Y", "kinase"},
          {"Y", Face::Upper, "10*Y - YP", "kinase"}};
}

}  // namespace

TEST_CASE("geometries know which faces are physical boundaries") {
  CHECK(Geometry::slab(1.0).has_boundary(Face::Lower));
  CHECK(Geometry::slab(1.0).has_boundary(Face::Upper));
  CHECK_FALSE(Geometry::sphere(1.0).has_boundary(Face::Lower));  // the center
  CHECK(Geometry::sphere(1.0).has_boundary(Face::Upper));
  CHECK(Geometry::half_line(20.0, 1.0).has_boundary(Face::Lower));
  CHECK_FALSE(Geometry::half_line(20.0, 1.0).has_boundary(Face::Upper));

  CHECK_THROWS_AS(Geometry::slab(0.0), ValidationError);
  CHECK_THROWS_AS(Geometry::sphere(-1.0), ValidationError);
  // a truncated half-line must reach far enough to stand in for infinity
  CHECK_THROWS_AS(Geometry::half_line(5.0, 1.0), ValidationError);
}

TEST_CASE("the example networks carry the expected structure") {
  auto slab = examples::slab_cycle(analytic::SlabParams{});
  CHECK(slab->n_species() == 2);
  CHECK(slab->species_index("YP") == slab->flux_species());
  CHECK(slab->n_reactions() == 0);
  CHECK(slab->n_transports() == 4);
  CHECK(slab->n_transport_groups() == 2);
  CHECK(slab->group_name(0) == "kinase");
  CHECK(slab->group_name(1) == "phosphatase");
  CHECK(slab->group_members(0).size() == 2);
  CHECK(slab->geometry().kind == Geometry::Kind::Slab);
  int kk = slab->rate_symbols()->find_constant("kappa_k");
  REQUIRE(kk >= 0);
  CHECK(slab->constant_values()[static_cast<size_t>(kk)] == 10.0);
  CHECK_THROWS_AS(slab->species_index("Z"), UnknownSpecies);

  auto sphere = examples::sphere_cycle(analytic::SphereParams{});
  CHECK(sphere->n_reactions() == 1);
  CHECK(sphere->reaction(0).name == "phosphatase");
  std::map<int, int> stoich(sphere->reaction(0).stoich.begin(),
                            sphere->reaction(0).stoich.end());
  CHECK(stoich.at(sphere->species_index("YP")) == -1);
  CHECK(stoich.at(sphere->species_index("Y")) == 1);
  CHECK(sphere->n_transport_groups() == 1);
  CHECK(sphere->geometry().kind == Geometry::Kind::Sphere);

  auto half = examples::half_line_cycle(analytic::SphereParams{});
  CHECK(half->geometry().kind == Geometry::Kind::HalfLine);
  CHECK(half->transport(0).face == Face::Lower);  // membrane at xi = 0
  // default truncation: 40 decay lengths of the conversion profile
  CHECK(half->geometry().extent ==
        doctest::Approx(40.0 * half->geometry().decay_scale).epsilon(1e-12));
}

TEST_CASE("build_network validates declarations") {
  Geometry g = Geometry::slab(1.0);

  // flux species must have a transport law somewhere
  CHECK_THROWS_AS(build_network(cycle_species(), {}, {}, g, "YP", {}), NoFluxTransport);

  // reactions may only reference declared species
  std::vector<ReactionDecl> bad_stoich{{"r", {{"Z", 1}}, "Y"}};
  CHECK_THROWS_AS(build_network(cycle_species(), bad_stoich, kinase_only(), g, "YP", {}),
                  UnknownSpecies);

  // duplicate species names collide
  std::vector<SpeciesDecl> dup{{"Y", 1.0, "1"}, {"Y", 1.0, "1"}};
  CHECK_THROWS_AS(build_network(dup, {}, kinase_only(), g, "Y", {}), DuplicateName);

  // two transport laws for the same species on the same face collide
  auto laws = kinase_only();
  laws.push_back({"YP", Face::Upper, "YP", "extra"});
  CHECK_THROWS_AS(build_network(cycle_species(), {}, laws, g, "YP", {}), DuplicateName);

  // transports must sit on faces the geometry actually has
  std::vector<TransportDecl> at_center{{"YP", Face::Lower, "YP", "x"}};
  CHECK_THROWS_AS(
      build_network(cycle_species(), {}, at_center, Geometry::sphere(1.0), "YP", {}),
      ValidationError);

  // rate expressions are parsed against declared names
  std::vector<TransportDecl> bad_rate{{"YP", Face::Upper, "k_missing*YP", "kinase"}};
  CHECK_THROWS_AS(build_network(cycle_species(), {}, bad_rate, g, "YP", {}),
                  UnknownIdentifier);
}

TEST_CASE("transport groups default to species@face") {
  std::vector<TransportDecl> anon{{"YP", Face::Upper, "YP - Y", ""}};
  NetworkSpec spec = build_network(cycle_species(), {}, anon, Geometry::slab(1.0), "YP", {});
  CHECK(spec.n_transport_groups() == 1);
  CHECK(spec.group_name(0) == "YP@upper");
}

TEST_CASE("modulation vectors cover every handle and scale by family exponents") {
  auto spec = examples::sphere_cycle(analytic::SphereParams{});
  ModulationVector mv = ModulationVector::reference(*spec);
  CHECK(mv.diffusion.size() == 2);
  CHECK(mv.reaction.size() == 1);
  CHECK(mv.transport.size() == 2);  // one entry per (species, face) law
  CHECK(mv.size == 1.0);
  CHECK(mv.time == 1.0);

  ScalingExponents size_family{0.0, 1.0, 2.0, 1.0, 0.0};
  ModulationVector scaled = scale_modulation(mv, 2.0, size_family);
  CHECK(scaled.diffusion.at("Y") == 4.0);
  CHECK(scaled.transport.begin()->second == 2.0);
  CHECK(scaled.reaction.at("phosphatase") == 1.0);
  CHECK(scaled.size == 2.0);
  CHECK(scaled.time == 1.0);

  // scaling composes multiplicatively
  ModulationVector twice = scale_modulation(scale_modulation(mv, 2.0, size_family), 3.0,
                                            size_family);
  ModulationVector once = scale_modulation(mv, 6.0, size_family);
  CHECK(twice.diffusion.at("YP") == doctest::Approx(once.diffusion.at("YP")).epsilon(1e-15));
  CHECK(twice.size == doctest::Approx(once.size).epsilon(1e-15));
}

TEST_CASE("applying a modulation rescales the governing coefficients") {
  auto spec = examples::sphere_cycle(analytic::SphereParams{});
  ModulationVector mv = ModulationVector::reference(*spec);
  mv.size = 2.0;
  mv.diffusion["Y"] = 3.0;

  ModulatedSpec mod = apply_modulation(spec, mv);
  CHECK(mod.alpha_size() == 2.0);
  CHECK(mod.physical_extent() == doctest::Approx(2.0).epsilon(1e-15));
  // bulk diffusion maps onto the reference domain with two powers of size
  CHECK(mod.bulk_diffusion(spec->species_index("Y")) ==
        doctest::Approx(3.0 * 1.0 / 4.0).epsilon(1e-15));
  CHECK(mod.bulk_diffusion(spec->species_index("YP")) ==
        doctest::Approx(1.0 / 4.0).epsilon(1e-15));

  ModulationVector bad = ModulationVector::reference(*spec);
  bad.reaction["nope"] = 2.0;
  CHECK_THROWS_AS(apply_modulation(spec, bad), UnknownReaction);

  ModulationVector neg = ModulationVector::reference(*spec);
  neg.diffusion["Y"] = -1.0;
  CHECK_THROWS_AS(apply_modulation(spec, neg), NonPositiveModulator);

  ModulationVector zero_size = ModulationVector::reference(*spec);
  zero_size.size = 0.0;
  CHECK_THROWS_AS(apply_modulation(spec, zero_size), NonPositiveModulator);
}

TEST_CASE("initial profiles may use xi and the declared constants") {
  std::vector<SpeciesDecl> sp{{"Y", 1.0, "0.2 + 0.1*xi"}, {"YP", 1.0, "M - 0.2 - 0.1*xi"}};
  BuildOptions opts;
  opts.constants = {{"M", 1.0}};
  NetworkSpec spec = build_network(sp, {}, {{"YP", Face::Upper, "YP - Y", "x"}},
                                   Geometry::slab(2.0), "YP", opts);
  CHECK(spec.initial_profile(0).eval(std::vector<double>{1.5}, std::vector<double>{1.0}) ==
        doctest::Approx(0.35).epsilon(1e-15));
}
