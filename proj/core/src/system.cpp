#include "rdcontrol/system.hpp"

#include <cmath>
#include <random>

namespace rdc {

DiscreteSystem::DiscreteSystem(const ModulatedSpec& modulated, const Mesh& mesh,
                               const DiscretizeOptions& options)
  : modulated_(modulated), spec_(&modulated_.spec()), mesh_(mesh), options_(options) {
  const Geometry& g = spec_->geometry();
  const Geometry& mg = mesh.geometry;
  if (mg.kind != g.kind || std::fabs(mg.extent - g.extent) > 1e-12 * g.extent)
    throw GeometryMismatch("mesh geometry does not match the network's");

  for (int i = 0; i < spec_->n_species(); ++i)
    bulk_diff_.push_back(modulated_.bulk_diffusion(i));

  face_coeff_.resize(spec_->n_transports());
  for (int t = 0; t < spec_->n_transports(); ++t) {
    const auto& law = spec_->transport(t);
    face_coeff_[t] = modulated_.alpha_transport(t) * mesh.boundary_area(law.face) /
                     modulated_.alpha_size();
    (law.face == Face::Lower ? laws_lower_ : laws_upper_).push_back(t);
  }

  int ns = spec_->n_species();
  reaction_derivs_.resize(spec_->n_reactions());
  for (int j = 0; j < spec_->n_reactions(); ++j)
    for (int s = 0; s < ns; ++s)
      if (spec_->reaction(j).rate.depends_on(s))
        reaction_derivs_[j].emplace_back(s, spec_->reaction(j).rate.derivative(s));
  transport_derivs_.resize(spec_->n_transports());
  for (int t = 0; t < spec_->n_transports(); ++t)
    for (int s = 0; s < ns; ++s)
      if (spec_->transport(t).rate.depends_on(s))
        transport_derivs_[t].emplace_back(s, spec_->transport(t).rate.derivative(s));
}

DiscreteSystem assemble(const ModulatedSpec& modulated, const Mesh& mesh,
                        const DiscretizeOptions& options) {
  return DiscreteSystem(modulated, mesh, options);
}

double compute_flux(const DiscreteSystem& system, std::span<const double> field) {
  return system.flux(field);
}

// ---------------------------------------------------------------------------
// face values

double DiscreteSystem::face_value_raw(std::span<const double> c, int species,
                                      Face f) const {
  int n = n_cells();
  int b0 = f == Face::Lower ? 0 : n - 1;
  int b1 = f == Face::Lower ? 1 : n - 2;
  if (!options_.second_order_faces) return c[index(b0, species)];
  return 1.5 * c[index(b0, species)] - 0.5 * c[index(b1, species)];
}

double DiscreteSystem::face_value(std::span<const double> c, int species,
                                  Face f) const {
  return face_value_raw(c, species, f);
}

double DiscreteSystem::interpolate(std::span<const double> c, int species,
                                   double xi) const {
  double extent = mesh_.geometry.extent;
  if (!(xi >= 0.0) || xi > extent * (1.0 + 1e-12))
    throw ValidationError("position " + std::to_string(xi) +
                          " lies outside the reference domain");
  const auto& centers = mesh_.centers;
  int n = n_cells();
  if (xi <= centers.front()) {
    double t = (xi - centers.front()) / mesh_.dx;  // t in [-1/2, 0]
    return c[index(0, species)] + t * (c[index(1, species)] - c[index(0, species)]);
  }
  if (xi >= centers.back()) {
    double t = (xi - centers.back()) / mesh_.dx;
    return c[index(n - 1, species)] +
           t * (c[index(n - 1, species)] - c[index(n - 2, species)]);
  }
  int k = static_cast<int>((xi - centers.front()) / mesh_.dx);
  if (k > n - 2) k = n - 2;
  double t = (xi - centers[k]) / mesh_.dx;
  return c[index(k, species)] + t * (c[index(k + 1, species)] - c[index(k, species)]);
}

// ---------------------------------------------------------------------------
// residual and scale

namespace {
// Shared traversal for residual(), residual_scale() and residual_floor():
// the Mode decides whether contributions add signed or in magnitude, and
// whether the diffusive exchange counts as the actual difference (activity
// scale) or as the magnitudes of its operands (the roundoff level below
// which the difference carries no information).
struct Signed {
  static double diff(double a, double b) { return b - a; }
  static void acc(double& slot, double v) { slot += v; }
};
struct Magnitude {
  static double diff(double a, double b) { return b - a; }
  static void acc(double& slot, double v) { slot += std::fabs(v); }
};
struct OperandMagnitude {
  static double diff(double a, double b) { return std::fabs(a) + std::fabs(b); }
  static void acc(double& slot, double v) { slot += std::fabs(v); }
};
} // namespace

template <typename Mode, typename Sys>
static void accumulate_residual(const Sys& sys, const NetworkSpec& spec,
                                const Mesh& mesh, const ModulatedSpec& mod,
                                const std::vector<double>& bulk_diff,
                                const std::vector<double>& face_coeff,
                                const std::vector<int>& laws_lower,
                                const std::vector<int>& laws_upper,
                                std::span<const double> c, std::span<double> out) {
  int n = mesh.n_cells;
  int ns = spec.n_species();
  std::fill(out.begin(), out.end(), 0.0);
  std::span<const double> consts(spec.constant_values());

  // interior diffusive exchange
  for (int i = 0; i < ns; ++i) {
    double coeff = bulk_diff[i];
    if (coeff == 0.0) continue;
    for (int k = 1; k < n; ++k) {
      double fluxA = coeff * mesh.areas[k] *
                     Mode::diff(c[(k - 1) * ns + i], c[k * ns + i]) / mesh.dx;
      Mode::acc(out[(k - 1) * ns + i], fluxA / mesh.volumes[k - 1]);
      Mode::acc(out[k * ns + i], -fluxA / mesh.volumes[k]);
    }
  }

  // bulk reactions
  for (int k = 0; k < n; ++k) {
    std::span<const double> local = c.subspan(k * ns, ns);
    for (int j = 0; j < spec.n_reactions(); ++j) {
      const auto& rx = spec.reaction(j);
      double rate = mod.alpha_reaction(j) * rx.rate.eval(local, consts);
      for (auto [sp, coeff] : rx.stoich)
        Mode::acc(out[k * ns + sp], coeff * rate);
    }
  }

  // boundary transport
  std::vector<double> cface(ns);
  for (Face f : {Face::Lower, Face::Upper}) {
    const auto& laws = f == Face::Lower ? laws_lower : laws_upper;
    if (laws.empty()) continue;
    for (int i = 0; i < ns; ++i) cface[i] = sys.face_value(c, i, f);
    int b = mesh.boundary_cell(f);
    for (int t : laws) {
      const auto& law = spec.transport(t);
      double fval = law.rate.eval(cface, consts);
      Mode::acc(out[b * ns + law.species], -face_coeff[t] * fval / mesh.volumes[b]);
    }
  }
}

void DiscreteSystem::residual(std::span<const double> c, std::span<double> out) const {
  accumulate_residual<Signed>(*this, *spec_, mesh_, modulated_, bulk_diff_,
                              face_coeff_, laws_lower_, laws_upper_, c, out);
}

void DiscreteSystem::residual_scale(std::span<const double> c,
                                    std::span<double> out) const {
  accumulate_residual<Magnitude>(*this, *spec_, mesh_, modulated_, bulk_diff_,
                                 face_coeff_, laws_lower_, laws_upper_, c, out);
}

void DiscreteSystem::residual_floor(std::span<const double> c,
                                    std::span<double> out) const {
  accumulate_residual<OperandMagnitude>(*this, *spec_, mesh_, modulated_,
                                        bulk_diff_, face_coeff_, laws_lower_,
                                        laws_upper_, c, out);
}

// ---------------------------------------------------------------------------
// Jacobian

void DiscreteSystem::jacobian_triplets(std::span<const double> c,
                                       std::vector<Eigen::Triplet<double>>& out) const {
  int n = n_cells();
  int ns = n_species();
  std::span<const double> consts(spec_->constant_values());

  for (int i = 0; i < ns; ++i) {
    double coeff = bulk_diff_[i];
    if (coeff == 0.0) continue;
    for (int k = 1; k < n; ++k) {
      double a = coeff * mesh_.areas[k] / mesh_.dx;
      int lo = index(k - 1, i), hi = index(k, i);
      out.emplace_back(lo, hi, a / mesh_.volumes[k - 1]);
      out.emplace_back(lo, lo, -a / mesh_.volumes[k - 1]);
      out.emplace_back(hi, lo, a / mesh_.volumes[k]);
      out.emplace_back(hi, hi, -a / mesh_.volumes[k]);
    }
  }

  for (int k = 0; k < n; ++k) {
    std::span<const double> local = c.subspan(static_cast<size_t>(k) * ns, ns);
    for (int j = 0; j < spec_->n_reactions(); ++j) {
      const auto& rx = spec_->reaction(j);
      double av = modulated_.alpha_reaction(j);
      for (const auto& [s, deriv] : reaction_derivs_[j]) {
        double d = av * deriv.eval(local, consts);
        for (auto [sp, coeff] : rx.stoich)
          out.emplace_back(index(k, sp), index(k, s), coeff * d);
      }
    }
  }

  std::vector<double> cface(ns);
  for (Face f : {Face::Lower, Face::Upper}) {
    const auto& laws = f == Face::Lower ? laws_lower_ : laws_upper_;
    if (laws.empty()) continue;
    for (int i = 0; i < ns; ++i) cface[i] = face_value_raw(c, i, f);
    int b = mesh_.boundary_cell(f);
    int b0 = f == Face::Lower ? 0 : n - 1;
    int b1 = f == Face::Lower ? 1 : n - 2;
    double w0 = options_.second_order_faces ? 1.5 : 1.0;
    double w1 = options_.second_order_faces ? -0.5 : 0.0;
    for (int t : laws) {
      const auto& law = spec_->transport(t);
      double scale = -face_coeff_[t] / mesh_.volumes[b];
      for (const auto& [s, deriv] : transport_derivs_[t]) {
        double d = deriv.eval(cface, consts);
        out.emplace_back(index(b, law.species), index(b0, s), scale * d * w0);
        if (w1 != 0.0)
          out.emplace_back(index(b, law.species), index(b1, s), scale * d * w1);
      }
    }
  }
}

void DiscreteSystem::jacobian(std::span<const double> c, Eigen::MatrixXd& J) const {
  int N = size();
  J.setZero(N, N);
  std::vector<Eigen::Triplet<double>> trips;
  jacobian_triplets(c, trips);
  for (const auto& t : trips) J(t.row(), t.col()) += t.value();
}

// ---------------------------------------------------------------------------
// flux

double DiscreteSystem::flux(std::span<const double> c) const {
  std::vector<double> cface(n_species());
  std::span<const double> consts(spec_->constant_values());
  double sum = 0.0, area = 0.0;
  for (auto [face, orient] : spec_->flux_faces()) {
    area += mesh_.boundary_area(face);
    for (int i = 0; i < n_species(); ++i) cface[i] = face_value_raw(c, i, face);
    const auto& laws = face == Face::Lower ? laws_lower_ : laws_upper_;
    for (int t : laws) {
      const auto& law = spec_->transport(t);
      if (law.species != spec_->flux_species()) continue;
      // Physical flux density: the size factor rescales the governing
      // equations on the reference mesh but not the boundary rate itself.
      double w = modulated_.alpha_transport(t) * mesh_.boundary_area(face);
      sum += orient * w * law.rate.eval(cface, consts);
    }
  }
  return area > 0 ? sum / area : 0.0;
}

double DiscreteSystem::flux_scale(std::span<const double> c) const {
  std::vector<double> cface(n_species());
  std::span<const double> consts(spec_->constant_values());
  double sum = 0.0, area = 0.0;
  for (auto [face, orient] : spec_->flux_faces()) {
    area += mesh_.boundary_area(face);
    for (int i = 0; i < n_species(); ++i) cface[i] = face_value_raw(c, i, face);
    const auto& laws = face == Face::Lower ? laws_lower_ : laws_upper_;
    for (int t : laws) {
      const auto& law = spec_->transport(t);
      if (law.species != spec_->flux_species()) continue;
      double w = modulated_.alpha_transport(t) * mesh_.boundary_area(face);
      sum += std::fabs(orient * w * law.rate.eval(cface, consts));
    }
  }
  return area > 0 ? sum / area : 0.0;
}

// ---------------------------------------------------------------------------
// initial data and moieties

std::vector<double> DiscreteSystem::initial_field() const {
  std::vector<double> c(size());
  std::span<const double> consts(spec_->constant_values());
  for (int k = 0; k < n_cells(); ++k) {
    double xi[1] = {mesh_.centers[k]};
    for (int i = 0; i < n_species(); ++i) {
      double v = spec_->initial_profile(i).eval(xi, consts);
      if (v < 0.0) throw NegativeConcentration(k, i, v);
      c[index(k, i)] = v;
    }
  }
  return c;
}

double DiscreteSystem::moiety_mean(std::span<const double> c,
                                   std::span<const double> weights) const {
  double acc = 0.0;
  for (int k = 0; k < n_cells(); ++k) {
    double w = 0.0;
    for (int i = 0; i < n_species(); ++i) w += weights[i] * c[index(k, i)];
    acc += mesh_.volumes[k] * w;
  }
  return acc / mesh_.total_volume;
}

// ---------------------------------------------------------------------------
// conserved weights

std::vector<std::vector<double>> DiscreteSystem::conserved_weights() const {
  int ns = n_species();
  std::span<const double> consts(spec_->constant_values());
  std::mt19937 rng(7u);
  std::uniform_real_distribution<double> dist(0.5, 2.0);

  // Linear constraints a conserved weight vector must satisfy: orthogonality
  // to every reaction's stoichiometry, and cancellation of each transport
  // group's law rates at sampled states (face-wise).
  std::vector<Eigen::RowVectorXd> rows;
  for (int j = 0; j < spec_->n_reactions(); ++j) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(ns);
    for (auto [sp, coeff] : spec_->reaction(j).stoich) row(sp) += coeff;
    rows.push_back(row);
  }
  for (Face f : {Face::Lower, Face::Upper}) {
    for (int g = 0; g < spec_->n_transport_groups(); ++g) {
      std::vector<int> members;
      for (int t : spec_->group_members(g))
        if (spec_->transport(t).face == f) members.push_back(t);
      if (members.empty()) continue;
      for (int sample = 0; sample < 6; ++sample) {
        std::vector<double> cs(ns);
        for (double& v : cs) v = dist(rng);
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(ns);
        bool ok = true;
        for (int t : members) {
          const auto& law = spec_->transport(t);
          try {
            row(law.species) += modulated_.alpha_transport(t) * law.rate.eval(cs, consts);
          } catch (const Error&) {
            ok = false;
            break;
          }
        }
        if (ok) rows.push_back(row);
      }
    }
  }

  Eigen::MatrixXd kernel;
  if (rows.empty()) {
    kernel = Eigen::MatrixXd::Identity(ns, ns);
  } else {
    Eigen::MatrixXd C(static_cast<int>(rows.size()), ns);
    for (size_t r = 0; r < rows.size(); ++r) C.row(static_cast<int>(r)) = rows[r];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(C);
    lu.setThreshold(1e-9);
    kernel = lu.kernel();
    if (lu.dimensionOfKernel() == 0) return {};
  }

  // Verify each candidate against the discrete residual itself: the volume-
  // weighted component of F along w must vanish at arbitrary states.
  std::vector<double> field(size()), res(size()), scale(size());
  std::vector<std::vector<double>> verified;
  for (int col = 0; col < kernel.cols(); ++col) {
    Eigen::VectorXd w = kernel.col(col);
    w.normalize();
    bool good = true;
    for (int trial = 0; trial < 3 && good; ++trial) {
      bool evaluated = false;
      for (int attempt = 0; attempt < 5 && !evaluated; ++attempt) {
        for (double& v : field) v = dist(rng);
        try {
          residual(field, res);
          residual_scale(field, scale);
          evaluated = true;
        } catch (const Error&) {
        }
      }
      if (!evaluated) {
        good = false;
        break;
      }
      double num = 0.0, den = 1e-300;
      for (int k = 0; k < n_cells(); ++k)
        for (int i = 0; i < ns; ++i) {
          num += mesh_.volumes[k] * w(i) * res[index(k, i)];
          den += mesh_.volumes[k] * std::fabs(w(i)) * scale[index(k, i)];
        }
      if (std::fabs(num) > 1e-10 * den) good = false;
    }
    if (good) verified.push_back(std::vector<double>(w.data(), w.data() + ns));
  }

  // Orthonormalize (modified Gram-Schmidt) so callers get a clean basis.
  std::vector<std::vector<double>> basis;
  for (auto& wv : verified) {
    Eigen::Map<Eigen::VectorXd> w(wv.data(), ns);
    Eigen::VectorXd v = w;
    for (const auto& bv : basis) {
      Eigen::Map<const Eigen::VectorXd> b(bv.data(), ns);
      v -= b.dot(v) * b;
    }
    if (v.norm() > 1e-10) {
      v.normalize();
      basis.push_back(std::vector<double>(v.data(), v.data() + ns));
    }
  }
  return basis;
}

} // namespace rdc
