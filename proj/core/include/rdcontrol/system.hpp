#ifndef RDCONTROL_SYSTEM_HPP
#define RDCONTROL_SYSTEM_HPP

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <span>
#include <vector>

#include "rdcontrol/mesh.hpp"
#include "rdcontrol/network.hpp"

namespace rdc {

struct DiscretizeOptions {
  /// Boundary face values come from a two-cell linear extrapolation
  /// (second order). Off falls back to the adjacent cell value.
  bool second_order_faces = true;
};

/// The spatially discretized right-hand side: F(c) such that the governing
/// equations read  dc/dtau = alpha_t * F(c)  and steady states solve
/// F(c) = 0. Unknowns are cell-major: index = cell * n_species + species.
/// F is in per-volume units, so conserved moieties satisfy
/// sum_cells V_k sum_i w_i F_{k,i} = 0 identically.
class DiscreteSystem {
public:
  /// Throws GeometryMismatch if the mesh was built for another geometry.
  DiscreteSystem(const ModulatedSpec& modulated, const Mesh& mesh,
                 const DiscretizeOptions& options = {});

  int n_cells() const { return mesh_.n_cells; }
  int n_species() const { return spec_->n_species(); }
  int size() const { return n_cells() * n_species(); }
  int index(int cell, int species) const { return cell * n_species() + species; }

  const Mesh& mesh() const { return mesh_; }
  const ModulatedSpec& modulated() const { return modulated_; }

  /// Evaluates F into `out` (size() entries).
  void residual(std::span<const double> c, std::span<double> out) const;
  /// Accumulates the absolute magnitudes of the same terms: the natural
  /// row-wise scale against which a residual counts as converged.
  void residual_scale(std::span<const double> c, std::span<double> out) const;
  /// Like residual_scale(), but diffusive differences count at the magnitude
  /// of their operands: the level below which a row's residual is pure
  /// floating-point noise and cannot be reduced further.
  void residual_floor(std::span<const double> c, std::span<double> out) const;
  /// Jacobian dF/dc as (row, col, value) triplets appended to `out`;
  /// duplicate slots are meant to be summed. The operator is block
  /// tridiagonal apart from the boundary-face rows.
  void jacobian_triplets(std::span<const double> c,
                         std::vector<Eigen::Triplet<double>>& out) const;
  /// Dense Jacobian dF/dc (resized to size() x size(), zero-filled first).
  void jacobian(std::span<const double> c, Eigen::MatrixXd& J) const;

  /// The flux functional J: the area-weighted average of oriented transport
  /// of the flux species over the configured flux faces.
  double flux(std::span<const double> c) const;
  /// Magnitude companion of flux(): the same contributions summed in absolute
  /// value. J only counts as zero relative to this cancellation scale.
  double flux_scale(std::span<const double> c) const;

  /// Boundary-face value of one species (extrapolated per options).
  double face_value(std::span<const double> c, int species, Face f) const;
  /// Piecewise-linear interpolation at reference position xi in [0, extent].
  double interpolate(std::span<const double> c, int species, double xi) const;

  /// Initial field from the declared profiles; throws NegativeConcentration
  /// if a profile dips below zero on this mesh.
  std::vector<double> initial_field() const;

  /// Volume-averaged value of sum_i w_i c_i (weights per species).
  double moiety_mean(std::span<const double> c, std::span<const double> weights) const;

  /// Linearly independent species-weight vectors w whose totals the residual
  /// conserves identically (verified against F, not assumed): declared
  /// moieties, per-species candidates, and kernels of the reaction and
  /// grouped-transport structure. Used to regularize steady-state solves.
  std::vector<std::vector<double>> conserved_weights() const;

private:
  void transport_terms(std::span<const double> c, int law, double& value,
                       std::vector<double>& dface) const;
  double face_value_raw(std::span<const double> c, int species, Face f) const;

  ModulatedSpec modulated_;
  const NetworkSpec* spec_;  // into modulated_.spec, which keeps it alive
  Mesh mesh_;
  DiscretizeOptions options_;
  std::vector<double> bulk_diff_;       // per species: alpha_D D / alpha_L^2
  std::vector<double> face_coeff_;      // per transport law: alpha_f A_face / alpha_L
  std::vector<int> laws_lower_, laws_upper_;
  // rate-law partials, derived once at construction
  std::vector<std::vector<std::pair<int, ratelang::Expr>>> reaction_derivs_;
  std::vector<std::vector<std::pair<int, ratelang::Expr>>> transport_derivs_;
};

/// Spec-level convenience wrappers.
DiscreteSystem assemble(const ModulatedSpec& modulated, const Mesh& mesh,
                        const DiscretizeOptions& options = {});
double compute_flux(const DiscreteSystem& system, std::span<const double> field);

} // namespace rdc

#endif
