#include "rdcontrol/network.hpp"

#include <cmath>
#include <set>

namespace rdc {

const char* face_name(Face f) { return f == Face::Lower ? "lower" : "upper"; }

// ---------------------------------------------------------------------------
// Geometry

Geometry Geometry::slab(double length) {
  if (!(length > 0) || !std::isfinite(length))
    throw ValidationError("slab length must be positive");
  return {Kind::Slab, length, 0.0};
}

Geometry Geometry::sphere(double radius) {
  if (!(radius > 0) || !std::isfinite(radius))
    throw ValidationError("sphere radius must be positive");
  return {Kind::Sphere, radius, 0.0};
}

Geometry Geometry::half_line(double truncation, double decay_scale) {
  if (!(truncation > 0) || !std::isfinite(truncation))
    throw ValidationError("half-line truncation must be positive");
  if (!(decay_scale > 0) || !std::isfinite(decay_scale))
    throw ValidationError("half-line decay scale must be positive");
  if (truncation < 10.0 * decay_scale)
    throw ValidationError("half-line truncation must cover at least 10 decay lengths");
  return {Kind::HalfLine, truncation, decay_scale};
}

bool Geometry::has_boundary(Face f) const {
  switch (kind) {
    case Kind::Slab: return true;
    case Kind::HalfLine: return f == Face::Lower;  // far end is closed
    case Kind::Sphere: return f == Face::Upper;
  }
  return false;
}

// ---------------------------------------------------------------------------
// build_network

int NetworkSpec::species_index(const std::string& name) const {
  for (int i = 0; i < n_species(); ++i)
    if (species_names_[i] == name) return i;
  throw UnknownSpecies(name);
}

int NetworkSpec::reaction_index(const std::string& name) const {
  for (int j = 0; j < n_reactions(); ++j)
    if (reactions_[j].name == name) return j;
  throw UnknownReaction(name);
}

NetworkSpec build_network(const std::vector<SpeciesDecl>& species,
                          const std::vector<ReactionDecl>& reactions,
                          const std::vector<TransportDecl>& transports,
                          const Geometry& geometry,
                          const std::string& flux_species,
                          const BuildOptions& options) {
  if (species.empty()) throw ValidationError("at least one species is required");

  NetworkSpec spec;
  spec.geometry_ = geometry;

  // One symbol table for rate laws (variables = species) and one for initial
  // profiles (single variable xi); both share the constants.
  auto rate_syms = std::make_shared<ratelang::SymbolTable>();
  auto profile_syms = std::make_shared<ratelang::SymbolTable>();
  for (const auto& [name, value] : options.constants) {
    rate_syms->add_constant(name);
    profile_syms->add_constant(name);
    spec.constant_values_.push_back(value);
  }
  profile_syms->add_variable("xi");

  for (const auto& s : species) {
    if (s.name.empty()) throw ValidationError("species name must not be empty");
    if (!(s.diffusion >= 0) || !std::isfinite(s.diffusion))
      throw ValidationError("species '" + s.name + "': diffusion must be >= 0");
    rate_syms->add_variable(s.name);  // DuplicateName on a repeated species
    spec.species_names_.push_back(s.name);
    spec.diffusion_.push_back(s.diffusion);
  }

  spec.rate_symbols_ = rate_syms;
  spec.profile_symbols_ = profile_syms;

  for (const auto& s : species)
    spec.initial_.push_back(ratelang::parse(s.initial, profile_syms));

  std::set<std::string> reaction_names;
  for (const auto& r : reactions) {
    if (r.name.empty()) throw ValidationError("reaction name must not be empty");
    if (!reaction_names.insert(r.name).second) throw DuplicateName(r.name);
    NetworkSpec::Reaction cr;
    cr.name = r.name;
    for (const auto& [sp, coeff] : r.stoich)
      cr.stoich.emplace_back(spec.species_index(sp), coeff);
    cr.rate = ratelang::parse(r.rate, rate_syms);
    spec.reactions_.push_back(std::move(cr));
  }

  std::set<std::pair<int, int>> law_keys;
  for (const auto& t : transports) {
    NetworkSpec::Transport ct;
    ct.species = spec.species_index(t.species);
    ct.face = t.face;
    if (!geometry.has_boundary(t.face))
      throw ValidationError("geometry has no transport boundary at the " +
                            std::string(face_name(t.face)) + " face");
    if (!law_keys.insert({ct.species, t.face == Face::Upper}).second)
      throw DuplicateName(t.species + "@" + face_name(t.face));
    ct.rate = ratelang::parse(t.rate, rate_syms);
    std::string group = t.group.empty() ? t.species + "@" + face_name(t.face) : t.group;
    for (int g = 0; g < spec.n_transport_groups(); ++g)
      if (spec.group_names_[g] == group) ct.group = g;
    if (ct.group < 0) {
      spec.group_names_.push_back(group);
      spec.group_members_.emplace_back();
      ct.group = spec.n_transport_groups() - 1;
    }
    spec.group_members_[ct.group].push_back(spec.n_transports());
    spec.transports_.push_back(std::move(ct));
  }

  spec.flux_species_ = spec.species_index(flux_species);

  // Flux faces: explicit list, or every face transporting the flux species.
  if (!options.flux_faces.empty()) {
    for (auto [face, orient] : options.flux_faces) {
      if (!geometry.has_boundary(face))
        throw ValidationError("flux face " + std::string(face_name(face)) +
                              " is not a boundary of this geometry");
      if (orient == 0.0) throw ValidationError("flux face orientation must be nonzero");
      spec.flux_faces_.emplace_back(face, orient);
    }
  } else {
    for (Face f : {Face::Lower, Face::Upper}) {
      for (const auto& t : spec.transports_)
        if (t.species == spec.flux_species_ && t.face == f) {
          spec.flux_faces_.emplace_back(f, 1.0);
          break;
        }
    }
  }

  bool has_flux_law = false;
  for (const auto& t : spec.transports_)
    for (auto [face, orient] : spec.flux_faces_)
      if (t.species == spec.flux_species_ && t.face == face) has_flux_law = true;
  if (!has_flux_law) throw NoFluxTransport(flux_species);

  std::set<std::string> moiety_names;
  for (const auto& m : options.moieties) {
    NetworkSpec::Moiety cm;
    cm.name = m.name.empty() ? "moiety" + std::to_string(spec.moieties_.size()) : m.name;
    if (!moiety_names.insert(cm.name).second) throw DuplicateName(cm.name);
    cm.weights.assign(spec.n_species(), 0.0);
    for (const auto& [sp, w] : m.weights) cm.weights[spec.species_index(sp)] = w;
    cm.mean_total = m.mean_total;
    spec.moieties_.push_back(std::move(cm));
  }

  return spec;
}

// ---------------------------------------------------------------------------
// modulation

ModulationVector ModulationVector::reference(const NetworkSpec& spec) {
  ModulationVector mv;
  for (int j = 0; j < spec.n_reactions(); ++j)
    mv.reaction[spec.reaction(j).name] = 1.0;
  for (int i = 0; i < spec.n_species(); ++i)
    mv.diffusion[spec.species_name(i)] = 1.0;
  for (int t = 0; t < spec.n_transports(); ++t) {
    const auto& law = spec.transport(t);
    mv.transport[{spec.species_name(law.species), law.face}] = 1.0;
  }
  return mv;
}

ModulationVector scale_modulation(const ModulationVector& mv, double lambda,
                                  const ScalingExponents& exponents) {
  if (!(lambda > 0) || !std::isfinite(lambda))
    throw ValidationError("scaling parameter lambda must be positive");
  ModulationVector out = mv;
  for (auto& [k, v] : out.reaction) v *= std::pow(lambda, exponents.reaction);
  for (auto& [k, v] : out.transport) v *= std::pow(lambda, exponents.transport);
  for (auto& [k, v] : out.diffusion) v *= std::pow(lambda, exponents.diffusion);
  out.size *= std::pow(lambda, exponents.size);
  out.time *= std::pow(lambda, exponents.time);
  return out;
}

static void check_positive(const std::string& key, double v) {
  if (!(v > 0) || !std::isfinite(v)) throw NonPositiveModulator(key, v);
}

ModulatedSpec::ModulatedSpec(std::shared_ptr<const NetworkSpec> spec,
                             const ModulationVector& mv)
  : spec_(std::move(spec)), mv_(mv) {
  const NetworkSpec& s = *spec_;
  alpha_reaction_.assign(s.n_reactions(), 1.0);
  alpha_transport_.assign(s.n_transports(), 1.0);
  alpha_diffusion_.assign(s.n_species(), 1.0);

  for (const auto& [name, v] : mv.reaction) {
    check_positive("v:" + name, v);
    alpha_reaction_[s.reaction_index(name)] = v;
  }
  for (const auto& [name, v] : mv.diffusion) {
    check_positive("D:" + name, v);
    alpha_diffusion_[s.species_index(name)] = v;
  }
  for (const auto& [key, v] : mv.transport) {
    check_positive("f:" + key.first + "@" + face_name(key.second), v);
    int species = s.species_index(key.first);
    bool found = false;
    for (int t = 0; t < s.n_transports(); ++t) {
      const auto& law = s.transport(t);
      if (law.species == species && law.face == key.second) {
        alpha_transport_[t] = v;
        found = true;
      }
    }
    if (!found)
      throw ValidationError("no transport law for species '" + key.first +
                            "' on the " + face_name(key.second) + " face");
  }
  check_positive("L", mv.size);
  check_positive("t", mv.time);
  alpha_size_ = mv.size;
  alpha_time_ = mv.time;
}

double ModulatedSpec::bulk_diffusion(int i) const {
  return alpha_diffusion_[i] * spec_->diffusion(i) / (alpha_size_ * alpha_size_);
}

double ModulatedSpec::physical_extent() const {
  return alpha_size_ * spec_->geometry().extent;
}

ModulatedSpec apply_modulation(std::shared_ptr<const NetworkSpec> spec,
                               const ModulationVector& mv) {
  return ModulatedSpec(std::move(spec), mv);
}

} // namespace rdc
