#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "oracles.hpp"
#include "rdcontrol/examples.hpp"
#include "rdcontrol/mesh.hpp"
#include "rdcontrol/system.hpp"

using namespace rdc;

namespace {

DiscreteSystem reference_system(const std::shared_ptr<const NetworkSpec>& spec,
                                const Mesh& mesh) {
  return DiscreteSystem(apply_modulation(spec, ModulationVector::reference(*spec)), mesh);
}

std::vector<double> random_field(const DiscreteSystem& sys, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::vector<double> c(static_cast<size_t>(sys.size()));
  for (double& v : c) v = u(rng);
  return c;
}

}  // namespace

TEST_CASE("slab meshes carry uniform cells") {
  Mesh m = build_mesh(Geometry::slab(2.0), 8);
  CHECK(m.n_cells == 8);
  CHECK(m.dx == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(m.centers.front() == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(m.centers.back() == doctest::Approx(1.875).epsilon(1e-15));
  for (double a : m.areas) CHECK(a == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.total_volume == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(m.boundary_cell(Face::Lower) == 0);
  CHECK(m.boundary_cell(Face::Upper) == 7);
  CHECK_THROWS_AS(build_mesh(Geometry::slab(1.0), 2), TooFewCells);
}

TEST_CASE("sphere meshes use shell areas and volumes") {
  double L = 1.5;
  Mesh m = build_mesh(Geometry::sphere(L), 64);
  CHECK(m.areas.front() == 0.0);  // the center is not a boundary
  CHECK(m.areas.back() ==
        doctest::Approx(4.0 * std::numbers::pi * L * L).epsilon(1e-13));
  CHECK(m.total_volume ==
        doctest::Approx(4.0 / 3.0 * std::numbers::pi * L * L * L).epsilon(1e-12));
  double vol = 0.0;
  for (double v : m.volumes) vol += v;
  CHECK(vol == doctest::Approx(m.total_volume).epsilon(1e-12));
  CHECK(m.boundary_area(Face::Upper) == m.areas.back());
}

TEST_CASE("meshes and systems must agree on the geometry") {
  auto spec = examples::slab_cycle(analytic::SlabParams{});
  Mesh wrong = build_mesh(Geometry::sphere(1.0), 16);
  ModulatedSpec mod = apply_modulation(spec, ModulationVector::reference(*spec));
  CHECK_THROWS_AS(DiscreteSystem(mod, wrong), GeometryMismatch);
}

TEST_CASE("uniform equilibrated fields have zero residual") {
  auto spec = examples::slab_cycle(analytic::SlabParams{});
  Mesh mesh = build_mesh(spec->geometry(), 16);
  DiscreteSystem sys = reference_system(spec, mesh);

  // Y and YP at the kinase equilibrium ratio kill the kinase laws but not the
  // phosphatase ones; at the shared value kappa_k Y = YP both laws fire.
  std::vector<double> c(static_cast<size_t>(sys.size()));
  for (int k = 0; k < sys.n_cells(); ++k) {
    c[static_cast<size_t>(sys.index(k, 0))] = 1.0 / 11.0;   // Y
    c[static_cast<size_t>(sys.index(k, 1))] = 10.0 / 11.0;  // YP
  }
  std::vector<double> r(c.size());
  sys.residual(c, r);
  // kinase rows vanish; the phosphatase face still converts
  int b = sys.mesh().boundary_cell(Face::Lower);
  CHECK(std::fabs(r[static_cast<size_t>(sys.index(sys.n_cells() - 1, 1))]) <= 1e-14);
  CHECK(r[static_cast<size_t>(sys.index(b, 1))] != 0.0);
}

TEST_CASE("the residual conserves moiety totals for arbitrary fields") {
  std::mt19937_64 rng(5);
  for (auto spec : {examples::slab_cycle(analytic::SlabParams{}),
                    examples::sphere_cycle(analytic::SphereParams{})}) {
    Mesh mesh = build_mesh(spec->geometry(), 24);
    DiscreteSystem sys = reference_system(spec, mesh);
    auto weights = sys.conserved_weights();
    REQUIRE(weights.size() == 1);  // Y + YP

    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> c = random_field(sys, rng);
      std::vector<double> r(c.size());
      sys.residual(c, r);
      std::vector<double> s(c.size());
      sys.residual_scale(c, s);

      double drift = 0.0, scale = 0.0;
      for (int k = 0; k < sys.n_cells(); ++k)
        for (int i = 0; i < sys.n_species(); ++i) {
          size_t id = static_cast<size_t>(sys.index(k, i));
          drift += mesh.volumes[static_cast<size_t>(k)] * weights[0][static_cast<size_t>(i)] *
                   r[id];
          scale += mesh.volumes[static_cast<size_t>(k)] * std::fabs(weights[0][static_cast<size_t>(i)]) *
                   s[id];
        }
      CHECK(std::fabs(drift) <= 1e-14 * std::max(scale, 1.0));
    }
  }
}

TEST_CASE("face values extrapolate linear profiles exactly") {
  auto spec = examples::slab_cycle(analytic::SlabParams{});
  Mesh mesh = build_mesh(spec->geometry(), 16);
  DiscreteSystem sys = reference_system(spec, mesh);

  std::vector<double> c(static_cast<size_t>(sys.size()));
  for (int k = 0; k < sys.n_cells(); ++k) {
    double xi = mesh.centers[static_cast<size_t>(k)];
    c[static_cast<size_t>(sys.index(k, 0))] = 0.7 - 0.4 * xi;
    c[static_cast<size_t>(sys.index(k, 1))] = 0.3 + 0.4 * xi;
  }
  CHECK(sys.face_value(c, 0, Face::Lower) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(sys.face_value(c, 0, Face::Upper) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(sys.face_value(c, 1, Face::Upper) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(sys.interpolate(c, 1, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(sys.interpolate(c, 0, mesh.centers[3]) ==
        doctest::Approx(c[static_cast<size_t>(sys.index(3, 0))]).epsilon(1e-14));
}

TEST_CASE("the flux functional matches the closed-form slab flux") {
  analytic::SlabParams p;
  analytic::SlabSolution sol = analytic::slab_solution(p);
  auto spec = examples::slab_cycle(p);
  Mesh mesh = build_mesh(spec->geometry(), 64);
  DiscreteSystem sys = reference_system(spec, mesh);

  std::vector<double> c(static_cast<size_t>(sys.size()));
  for (int k = 0; k < sys.n_cells(); ++k) {
    double xi = mesh.centers[static_cast<size_t>(k)];
    c[static_cast<size_t>(sys.index(k, 0))] = sol.y(xi);
    c[static_cast<size_t>(sys.index(k, 1))] = sol.yp(xi);
  }
  CHECK(sys.flux(c) == doctest::Approx(sol.J).epsilon(1e-12));
  CHECK(sys.flux_scale(c) >= std::fabs(sys.flux(c)));

  // the residual of the exact profile vanishes: the slab discretization is
  // exact for linear fields
  std::vector<double> r(c.size());
  sys.residual(c, r);
  std::vector<double> s(c.size());
  sys.residual_scale(c, s);
  double worst = 0.0;
  for (size_t i = 0; i < r.size(); ++i)
    worst = std::max(worst, std::fabs(r[i]) / std::max(s[i], 1.0));
  CHECK(worst <= 1e-13);
}

TEST_CASE("doubling a diffusion modulator doubles only the diffusive terms") {
  auto spec = examples::slab_cycle(analytic::SlabParams{});
  Mesh mesh = build_mesh(spec->geometry(), 12);
  std::mt19937_64 rng(11);

  DiscreteSystem base = reference_system(spec, mesh);
  ModulationVector mv = ModulationVector::reference(*spec);
  mv.diffusion["Y"] = 2.0;
  mv.diffusion["YP"] = 2.0;
  DiscreteSystem doubled(apply_modulation(spec, mv), mesh);

  analytic::SlabParams p2;
  p2.D = 2.0;
  DiscreteSystem rebuilt = reference_system(examples::slab_cycle(p2), mesh);

  std::vector<double> c = random_field(base, rng);
  std::vector<double> ra(c.size()), rb(c.size());
  doubled.residual(c, ra);
  rebuilt.residual(c, rb);
  for (size_t i = 0; i < ra.size(); ++i)
    CHECK(ra[i] == doctest::Approx(rb[i]).epsilon(1e-14));
}

TEST_CASE("the Jacobian matches finite differences of the residual") {
  std::mt19937_64 rng(17);
  for (auto spec : {examples::slab_cycle(analytic::SlabParams{}),
                    examples::sphere_cycle(analytic::SphereParams{})}) {
    Mesh mesh = build_mesh(spec->geometry(), 8);
    DiscreteSystem sys = reference_system(spec, mesh);
    std::vector<double> c = random_field(sys, rng);

    Eigen::MatrixXd J;
    sys.jacobian(c, J);
    REQUIRE(J.rows() == sys.size());

    double h = 1e-6;
    std::vector<double> rp(c.size()), rm(c.size());
    for (int j = 0; j < sys.size(); ++j) {
      std::vector<double> cp = c, cm = c;
      cp[static_cast<size_t>(j)] += h;
      cm[static_cast<size_t>(j)] -= h;
      sys.residual(cp, rp);
      sys.residual(cm, rm);
      for (int i = 0; i < sys.size(); ++i) {
        double fd = (rp[static_cast<size_t>(i)] - rm[static_cast<size_t>(i)]) / (2.0 * h);
        CHECK(J(i, j) == doctest::Approx(fd).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("negative initial profiles are rejected with the offending cell") {
  std::vector<SpeciesDecl> sp{{"Y", 1.0, "0.1 - xi"}, {"YP", 1.0, "1"}};
  NetworkSpec spec = build_network(sp, {}, {{"YP", Face::Upper, "YP - Y", "x"}},
                                   Geometry::slab(1.0), "YP", {});
  auto shared = std::make_shared<const NetworkSpec>(std::move(spec));
  Mesh mesh = build_mesh(shared->geometry(), 16);
  DiscreteSystem sys = reference_system(shared, mesh);
  CHECK_THROWS_AS(sys.initial_field(), NegativeConcentration);
}
