#include "rdcontrol/config.hpp"

#include "rdcontrol/errors.hpp"
#include "rdcontrol/mesh.hpp"
#include "rdcontrol/system.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace rdc {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw ConfigError(field, msg);
}

const json& member(const json& j, const std::string& path, const std::string& key) {
  auto it = j.find(key);
  if (it == j.end()) fail(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

double number_or(const json& j, const std::string& path, const std::string& key,
                 double fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : as_number(*it, join(path, key));
}

Face parse_face(const json& j, const std::string& path) {
  std::string s = as_string(j, path);
  for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (s == "lower" || s == "left" || s == "xi0" || s == "membrane") return Face::Lower;
  if (s == "upper" || s == "right" || s == "xil" || s == "surface") return Face::Upper;
  fail(path, "unknown face '" + s + "' (use lower/upper)");
}

Geometry parse_geometry(const json& j, const std::string& path) {
  std::string kind = as_string(member(j, path, "kind"), join(path, "kind"));
  if (kind == "slab")
    return Geometry::slab(as_number(member(j, path, "length"), join(path, "length")));
  if (kind == "sphere")
    return Geometry::sphere(as_number(member(j, path, "radius"), join(path, "radius")));
  if (kind == "half_line" || kind == "halfline")
    return Geometry::half_line(
        as_number(member(j, path, "truncation"), join(path, "truncation")),
        as_number(member(j, path, "decay_scale"), join(path, "decay_scale")));
  fail(join(path, "kind"), "unknown geometry '" + kind + "'");
}

TargetSelector parse_target(const json& j, const std::string& path) {
  TargetSelector t;
  std::string kind = as_string(member(j, path, "kind"), join(path, "kind"));
  if (kind == "flux") t.kind = TargetSelector::Kind::Flux;
  else if (kind == "concentration") t.kind = TargetSelector::Kind::Concentration;
  else if (kind == "face_difference") t.kind = TargetSelector::Kind::FaceDifference;
  else if (kind == "timed_flux") t.kind = TargetSelector::Kind::TimedFlux;
  else if (kind == "timed_concentration") t.kind = TargetSelector::Kind::TimedConcentration;
  else fail(join(path, "kind"), "unknown target kind '" + kind + "'");

  bool wants_species = t.kind == TargetSelector::Kind::Concentration ||
                       t.kind == TargetSelector::Kind::FaceDifference ||
                       t.kind == TargetSelector::Kind::TimedConcentration;
  if (wants_species)
    t.species = as_string(member(j, path, "species"), join(path, "species"));
  if (t.kind == TargetSelector::Kind::Concentration ||
      t.kind == TargetSelector::Kind::TimedConcentration)
    t.xi = as_number(member(j, path, "xi"), join(path, "xi"));
  if (t.timed()) t.tau = as_number(member(j, path, "tau"), join(path, "tau"));
  return t;
}

void parse_analytic(const json& j, const std::string& path, RunConfig& cfg) {
  std::string family = as_string(member(j, path, "family"), join(path, "family"));
  const json& p = member(j, path, "params");
  std::string pp = join(path, "params");
  auto read = [&](const char* key) {
    return as_number(member(p, pp, key), join(pp, key));
  };
  if (family == "slab") {
    cfg.family = RunConfig::Family::Slab;
    cfg.slab = {read("D"), read("k_k"), read("k_p"), read("kappa_k"),
                read("kappa_p"), read("M"), read("L")};
  } else if (family == "sphere") {
    cfg.family = RunConfig::Family::Sphere;
    cfg.sphere = {read("D"), read("k_k"), read("k_p"), read("kappa_k"),
                  read("kappa_p"), read("M"), read("L")};
  } else {
    fail(join(path, "family"), "unknown closed-form family '" + family + "'");
  }
}

RunConfig parse_config(const json& root) {
  if (!root.is_object()) fail("", "top level must be an object");
  RunConfig cfg;

  BuildOptions opts;
  if (auto it = root.find("constants"); it != root.end()) {
    if (!it->is_object()) fail("constants", "expected an object");
    for (auto& [k, v] : it->items()) opts.constants[k] = as_number(v, "constants." + k);
  }

  std::vector<SpeciesDecl> species;
  {
    const json& arr = member(root, "", "species");
    if (!arr.is_array() || arr.empty()) fail("species", "expected a non-empty array");
    for (size_t i = 0; i < arr.size(); ++i) {
      std::string path = "species[" + std::to_string(i) + "]";
      const json& s = arr[i];
      SpeciesDecl d;
      d.name = as_string(member(s, path, "name"), join(path, "name"));
      d.diffusion = as_number(member(s, path, "diffusion"), join(path, "diffusion"));
      if (auto it = s.find("initial"); it != s.end())
        d.initial = as_string(*it, join(path, "initial"));
      species.push_back(std::move(d));
    }
  }

  std::vector<ReactionDecl> reactions;
  if (auto it = root.find("reactions"); it != root.end()) {
    if (!it->is_array()) fail("reactions", "expected an array");
    for (size_t i = 0; i < it->size(); ++i) {
      std::string path = "reactions[" + std::to_string(i) + "]";
      const json& r = (*it)[i];
      ReactionDecl d;
      d.name = as_string(member(r, path, "name"), join(path, "name"));
      const json& st = member(r, path, "stoich");
      if (!st.is_object()) fail(join(path, "stoich"), "expected an object");
      for (auto& [k, v] : st.items())
        d.stoich[k] = as_int(v, join(path, "stoich." + k));
      d.rate = as_string(member(r, path, "rate"), join(path, "rate"));
      reactions.push_back(std::move(d));
    }
  }

  std::vector<TransportDecl> transports;
  if (auto it = root.find("transports"); it != root.end()) {
    if (!it->is_array()) fail("transports", "expected an array");
    for (size_t i = 0; i < it->size(); ++i) {
      std::string path = "transports[" + std::to_string(i) + "]";
      const json& t = (*it)[i];
      TransportDecl d;
      d.species = as_string(member(t, path, "species"), join(path, "species"));
      d.face = parse_face(member(t, path, "face"), join(path, "face"));
      d.rate = as_string(member(t, path, "rate"), join(path, "rate"));
      if (auto g = t.find("group"); g != t.end())
        d.group = as_string(*g, join(path, "group"));
      transports.push_back(std::move(d));
    }
  }

  Geometry geometry = parse_geometry(member(root, "", "geometry"), "geometry");
  std::string flux_species =
      as_string(member(root, "", "flux_species"), "flux_species");

  if (auto it = root.find("flux_faces"); it != root.end()) {
    if (!it->is_array()) fail("flux_faces", "expected an array");
    for (size_t i = 0; i < it->size(); ++i) {
      std::string path = "flux_faces[" + std::to_string(i) + "]";
      const json& f = (*it)[i];
      Face face = parse_face(member(f, path, "face"), join(path, "face"));
      double orient = number_or(f, path, "orientation", 1.0);
      opts.flux_faces.emplace_back(face, orient);
    }
  }

  if (auto it = root.find("moieties"); it != root.end()) {
    if (!it->is_array()) fail("moieties", "expected an array");
    for (size_t i = 0; i < it->size(); ++i) {
      std::string path = "moieties[" + std::to_string(i) + "]";
      const json& m = (*it)[i];
      MoietyDecl d;
      d.name = as_string(member(m, path, "name"), join(path, "name"));
      const json& w = member(m, path, "weights");
      if (!w.is_object()) fail(join(path, "weights"), "expected an object");
      for (auto& [k, v] : w.items())
        d.weights[k] = as_number(v, join(path, "weights." + k));
      d.mean_total = as_number(member(m, path, "mean_total"), join(path, "mean_total"));
      opts.moieties.push_back(std::move(d));
    }
  }

  cfg.network = std::make_shared<NetworkSpec>(
      build_network(species, reactions, transports, geometry, flux_species, opts));

  if (auto it = root.find("solver"); it != root.end()) {
    if (!it->is_object()) fail("solver", "expected an object");
    if (auto c = it->find("cells"); c != it->end())
      cfg.cells = as_int(*c, "solver.cells");
    cfg.settings.newton_tol = number_or(*it, "solver", "newton_tol", cfg.settings.newton_tol);
    if (auto c = it->find("max_iterations"); c != it->end())
      cfg.settings.max_iterations = as_int(*c, "solver.max_iterations");
  }
  if (cfg.cells < 3) fail("solver.cells", "need at least 3 cells");

  if (auto it = root.find("control"); it != root.end()) {
    if (!it->is_object()) fail("control", "expected an object");
    cfg.fd_step = number_or(*it, "control", "fd_step", cfg.fd_step);
    if (!(cfg.fd_step > 0.0) || cfg.fd_step > 0.1)
      fail("control.fd_step", "must lie in (0, 0.1]");
    if (auto t = it->find("target"); t != it->end())
      cfg.target = parse_target(*t, "control.target");
  }

  if (auto it = root.find("transient"); it != root.end()) {
    if (!it->is_object()) fail("transient", "expected an object");
    cfg.tau_end = number_or(*it, "transient", "tau_end", cfg.tau_end);
    if (!(cfg.tau_end > 0.0)) fail("transient.tau_end", "must be positive");
    if (auto s = it->find("steps"); s != it->end()) cfg.steps = as_int(*s, "transient.steps");
    if (cfg.steps < 1) fail("transient.steps", "must be at least 1");
  }

  if (auto it = root.find("analytic_reference"); it != root.end())
    parse_analytic(*it, "analytic_reference", cfg);

  cfg.verify_tol = number_or(root, "", "verify_tol", cfg.verify_tol);
  if (!(cfg.verify_tol > 0.0)) fail("verify_tol", "must be positive");

  // The declared moiety totals must agree with the initial profiles: the
  // steady solver pins totals to the initial state, so a mismatch here means
  // the config is internally inconsistent.
  if (!cfg.network->moieties().empty()) {
    Mesh mesh = build_mesh(cfg.network->geometry(), cfg.cells);
    DiscreteSystem sys(apply_modulation(cfg.network,
                                        ModulationVector::reference(*cfg.network)),
                       mesh);
    std::vector<double> c0 = sys.initial_field();
    const auto& moieties = cfg.network->moieties();
    for (size_t m = 0; m < moieties.size(); ++m) {
      double mean = sys.moiety_mean(c0, moieties[m].weights);
      double ref = moieties[m].mean_total;
      if (std::fabs(mean - ref) > 1e-8 * std::max(1.0, std::fabs(ref)))
        fail("moieties[" + std::to_string(m) + "].mean_total",
             "initial profiles average to " + std::to_string(mean) +
                 ", declared " + std::to_string(ref));
    }
  }

  return cfg;
}

} // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("", "cannot open '" + path + "'");
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    fail("", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(root);
}

RunConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail("", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(root);
}

} // namespace rdc
