#ifndef RDCONTROL_NETWORK_HPP
#define RDCONTROL_NETWORK_HPP

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "rdcontrol/errors.hpp"
#include "rdcontrol/ratelang.hpp"

namespace rdc {

/// Boundary of the reference domain [0, extent]. Slab: Lower is xi = 0 and
/// Upper is xi = L. Half-line: Lower is the membrane at xi = 0 (the far end
/// of the truncated domain is closed). Sphere: Upper is the surface r = L;
/// r = 0 is an interior point, not a boundary.
enum class Face { Lower, Upper };

const char* face_name(Face f);

struct Geometry {
  enum class Kind { Slab, HalfLine, Sphere };

  Kind kind = Kind::Slab;
  /// Reference length: slab thickness, sphere radius, or the truncation
  /// length of the half-line realization.
  double extent = 1.0;
  /// Half-line only: the largest reaction-diffusion decay length of the
  /// problem, supplied by the caller. The truncation must cover at least
  /// ten of these for the closed far end to stand in for infinity.
  double decay_scale = 0.0;

  static Geometry slab(double length);
  static Geometry half_line(double truncation, double decay_scale);
  static Geometry sphere(double radius);

  bool has_boundary(Face f) const;
};

/// One chemical species: name, diffusion coefficient, and an initial
/// concentration profile written in the rate language over `xi`.
struct SpeciesDecl {
  std::string name;
  double diffusion = 0.0;
  std::string initial = "0";
};

/// One bulk reaction: net stoichiometric coefficients per species plus a
/// rate law over the concentrations and the declared constants.
struct ReactionDecl {
  std::string name;
  std::map<std::string, int> stoich;
  std::string rate;
};

/// One boundary transport law: the outward (export-positive) flux of one
/// species through one face. Laws that realize a single membrane-bound
/// reaction (e.g. a kinase consuming one species and releasing another)
/// share a `group` label and are modulated together.
struct TransportDecl {
  std::string species;
  Face face = Face::Upper;
  std::string rate;
  std::string group;  // defaults to "<species>@<face>"
};

/// A conserved linear combination of species: sum_i weights_i * c_i whose
/// volume average is `mean_total` in the initial (and hence every) state.
struct MoietyDecl {
  std::string name;
  std::map<std::string, double> weights;
  double mean_total = 0.0;
};

struct BuildOptions {
  std::map<std::string, double> constants;
  std::vector<MoietyDecl> moieties;
  /// Faces whose transport of the flux species defines J, with orientation
  /// (+1 counts outward transport as positive). Empty means: every face
  /// that carries a transport law for the flux species, orientation +1.
  std::vector<std::pair<Face, double>> flux_faces;
};

/// A validated, immutable reaction-transport network on one geometry.
/// Rate laws are compiled against a shared symbol table whose variables are
/// the species (in declaration order) and whose constants come from
/// BuildOptions. Safe to share across threads once built.
class NetworkSpec {
public:
  struct Reaction {
    std::string name;
    std::vector<std::pair<int, int>> stoich;  // (species index, coefficient)
    ratelang::Expr rate;
  };
  struct Transport {
    int species = -1;
    Face face = Face::Upper;
    ratelang::Expr rate;
    int group = -1;
  };
  struct Moiety {
    std::string name;
    std::vector<double> weights;  // per species index
    double mean_total = 0.0;
  };

  int n_species() const { return static_cast<int>(species_names_.size()); }
  const std::string& species_name(int i) const { return species_names_[i]; }
  /// Index of a declared species; throws UnknownSpecies otherwise.
  int species_index(const std::string& name) const;
  double diffusion(int i) const { return diffusion_[i]; }
  /// Initial profile over the single variable `xi`.
  const ratelang::Expr& initial_profile(int i) const { return initial_[i]; }

  int n_reactions() const { return static_cast<int>(reactions_.size()); }
  const Reaction& reaction(int j) const { return reactions_[j]; }
  int reaction_index(const std::string& name) const;  // UnknownReaction

  int n_transports() const { return static_cast<int>(transports_.size()); }
  const Transport& transport(int t) const { return transports_[t]; }
  int n_transport_groups() const { return static_cast<int>(group_names_.size()); }
  const std::string& group_name(int g) const { return group_names_[g]; }
  /// Transport-law indices belonging to one modulation group.
  const std::vector<int>& group_members(int g) const { return group_members_[g]; }

  const Geometry& geometry() const { return geometry_; }
  int flux_species() const { return flux_species_; }
  /// (face, orientation) pairs that define the reported flux J.
  const std::vector<std::pair<Face, double>>& flux_faces() const { return flux_faces_; }

  const std::vector<Moiety>& moieties() const { return moieties_; }

  const std::shared_ptr<const ratelang::SymbolTable>& rate_symbols() const {
    return rate_symbols_;
  }
  /// Constant values in symbol-table order, ready for Expr::eval.
  const std::vector<double>& constant_values() const { return constant_values_; }

private:
  friend NetworkSpec build_network(const std::vector<SpeciesDecl>&,
                                   const std::vector<ReactionDecl>&,
                                   const std::vector<TransportDecl>&,
                                   const Geometry&, const std::string&,
                                   const BuildOptions&);

  std::vector<std::string> species_names_;
  std::vector<double> diffusion_;
  std::vector<ratelang::Expr> initial_;
  std::vector<Reaction> reactions_;
  std::vector<Transport> transports_;
  std::vector<std::string> group_names_;
  std::vector<std::vector<int>> group_members_;
  Geometry geometry_;
  int flux_species_ = -1;
  std::vector<std::pair<Face, double>> flux_faces_;
  std::vector<Moiety> moieties_;
  std::shared_ptr<const ratelang::SymbolTable> rate_symbols_;
  std::shared_ptr<const ratelang::SymbolTable> profile_symbols_;  // variable: xi
  std::vector<double> constant_values_;
};

/// Validates and compiles a network. Throws UnknownSpecies, DuplicateName,
/// NoFluxTransport, ValidationError, or a rate-language error.
NetworkSpec build_network(const std::vector<SpeciesDecl>& species,
                          const std::vector<ReactionDecl>& reactions,
                          const std::vector<TransportDecl>& transports,
                          const Geometry& geometry,
                          const std::string& flux_species,
                          const BuildOptions& options = {});

/// One multiplicative modulation per mechanism. Entries absent from the maps
/// are 1 (unmodulated). `size` scales the domain (alpha_L); `time` scales
/// the clock (alpha_t).
struct ModulationVector {
  std::map<std::string, double> reaction;                    // by reaction name
  std::map<std::pair<std::string, Face>, double> transport;  // by (species, face)
  std::map<std::string, double> diffusion;                   // by species name
  double size = 1.0;
  double time = 1.0;

  /// Explicit all-ones vector with every key of `spec` present.
  static ModulationVector reference(const NetworkSpec& spec);
};

/// Exponents of a one-parameter scaling family: each class of modulators is
/// multiplied by lambda^exponent. Classes left at 0 are untouched.
struct ScalingExponents {
  double reaction = 0.0;
  double transport = 0.0;
  double diffusion = 0.0;
  double size = 0.0;
  double time = 0.0;
};

/// Applies one scaling step: every entry present in `mv` (plus size/time)
/// is multiplied by lambda^(its class exponent). Keys absent from the maps
/// stay absent, so pass a reference-complete vector (ModulationVector::
/// reference) when the family must scale every mechanism.
ModulationVector scale_modulation(const ModulationVector& mv, double lambda,
                                  const ScalingExponents& exponents);

/// A network together with one modulation vector, i.e. the coefficients of
/// the governing equations in reference coordinates: the bulk operator
/// carries alpha_D D / alpha_L^2 per species, boundary transport carries
/// alpha_f f with the matching alpha_D D / alpha_L diffusive closure, bulk
/// rates carry alpha_v, and the clock carries 1/alpha_t.
class ModulatedSpec {
public:
  ModulatedSpec(std::shared_ptr<const NetworkSpec> spec, const ModulationVector& mv);

  const NetworkSpec& spec() const { return *spec_; }
  const std::shared_ptr<const NetworkSpec>& spec_ptr() const { return spec_; }
  const ModulationVector& modulation() const { return mv_; }

  double alpha_reaction(int j) const { return alpha_reaction_[j]; }
  double alpha_transport(int law) const { return alpha_transport_[law]; }
  double alpha_diffusion(int i) const { return alpha_diffusion_[i]; }
  double alpha_size() const { return alpha_size_; }
  double alpha_time() const { return alpha_time_; }

  /// alpha_D_i D_i / alpha_L^2: the interior diffusion coefficient in
  /// reference coordinates.
  double bulk_diffusion(int i) const;
  /// alpha_L * extent: the physical domain size being modeled.
  double physical_extent() const;

private:
  std::shared_ptr<const NetworkSpec> spec_;
  ModulationVector mv_;
  std::vector<double> alpha_reaction_;
  std::vector<double> alpha_transport_;
  std::vector<double> alpha_diffusion_;
  double alpha_size_ = 1.0;
  double alpha_time_ = 1.0;
};

/// Validates keys and positivity, then binds the modulation to the network.
/// Throws UnknownSpecies, UnknownReaction, ValidationError (unknown
/// transport key), or NonPositiveModulator.
ModulatedSpec apply_modulation(std::shared_ptr<const NetworkSpec> spec,
                               const ModulationVector& mv);

} // namespace rdc

#endif
