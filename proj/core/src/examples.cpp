#include "rdcontrol/examples.hpp"

#include <cmath>

namespace rdc::examples {

namespace {

BuildOptions cycle_options(double M) {
  BuildOptions opts;
  opts.moieties.push_back({"total", {{"Y", 1.0}, {"YP", 1.0}}, M});
  return opts;
}

std::map<std::string, double> cycle_constants(double k_k, double k_p, double kappa_k,
                                              double kappa_p, double M) {
  return {{"k_k", k_k}, {"k_p", k_p}, {"kappa_k", kappa_k}, {"kappa_p", kappa_p}, {"M", M}};
}

std::vector<SpeciesDecl> cycle_species(double D) {
  // uniform initial split carries the declared total M
  return {{"Y", D, "M/2"}, {"YP", D, "M/2"}};
}

} // namespace

std::shared_ptr<const NetworkSpec> slab_cycle(const analytic::SlabParams& p) {
  BuildOptions opts = cycle_options(p.M);
  opts.constants = cycle_constants(p.k_k, p.k_p, p.kappa_k, p.kappa_p, p.M);
  opts.flux_faces = {{Face::Upper, 1.0}, {Face::Lower, -1.0}};
  std::vector<TransportDecl> transports = {
      {"YP", Face::Upper, "k_k*(YP - kappa_k*Y)", "kinase"},
      {"Y", Face::Upper, "k_k*(kappa_k*Y - YP)", "kinase"},
      {"YP", Face::Lower, "k_p*(YP - kappa_p*Y)", "phosphatase"},
      {"Y", Face::Lower, "k_p*(kappa_p*Y - YP)", "phosphatase"},
  };
  return std::make_shared<NetworkSpec>(build_network(
      cycle_species(p.D), {}, transports, Geometry::slab(p.L), "YP", opts));
}

std::shared_ptr<const NetworkSpec> sphere_cycle(const analytic::SphereParams& p) {
  BuildOptions opts = cycle_options(p.M);
  opts.constants = cycle_constants(p.k_k, p.k_p, p.kappa_k, p.kappa_p, p.M);
  std::vector<ReactionDecl> reactions = {
      {"phosphatase", {{"YP", -1}, {"Y", 1}}, "k_p*(YP - kappa_p*Y)"},
  };
  std::vector<TransportDecl> transports = {
      {"YP", Face::Upper, "k_k*(YP - kappa_k*Y)", "kinase"},
      {"Y", Face::Upper, "k_k*(kappa_k*Y - YP)", "kinase"},
  };
  return std::make_shared<NetworkSpec>(build_network(
      cycle_species(p.D), reactions, transports, Geometry::sphere(p.L), "YP", opts));
}

std::shared_ptr<const NetworkSpec> half_line_cycle(const analytic::SphereParams& p,
                                                   double truncation) {
  double decay = std::sqrt(p.D / (p.k_p * (1.0 + p.kappa_p)));
  if (truncation <= 0.0) truncation = 40.0 * decay;
  BuildOptions opts = cycle_options(p.M);
  opts.constants = cycle_constants(p.k_k, p.k_p, p.kappa_k, p.kappa_p, p.M);
  std::vector<ReactionDecl> reactions = {
      {"phosphatase", {{"YP", -1}, {"Y", 1}}, "k_p*(YP - kappa_p*Y)"},
  };
  std::vector<TransportDecl> transports = {
      {"YP", Face::Lower, "k_k*(YP - kappa_k*Y)", "kinase"},
      {"Y", Face::Lower, "k_k*(kappa_k*Y - YP)", "kinase"},
  };
  return std::make_shared<NetworkSpec>(build_network(
      cycle_species(p.D), reactions, transports,
      Geometry::half_line(truncation, decay), "YP", opts));
}

} // namespace rdc::examples
