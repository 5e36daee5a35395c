#ifndef RDCONTROL_MESH_HPP
#define RDCONTROL_MESH_HPP

#include <vector>

#include "rdcontrol/network.hpp"

namespace rdc {

/// A uniform finite-volume mesh of the reference domain [0, extent].
/// `volumes` and `areas` carry the geometric measure: unit cross-section for
/// the slab and half-line, spherical shells (4/3 pi r^3 differences) and
/// 4 pi r^2 faces for the sphere, so the r = 0 face has area 0 and the
/// regularity condition at the center is built into the scheme.
struct Mesh {
  Geometry geometry;
  int n_cells = 0;
  double dx = 0.0;
  std::vector<double> centers;  // n_cells
  std::vector<double> volumes;  // n_cells
  std::vector<double> areas;    // n_cells + 1 faces, areas[k] at xi = k dx
  double total_volume = 0.0;

  bool has_boundary(Face f) const { return geometry.has_boundary(f); }
  int boundary_cell(Face f) const { return f == Face::Lower ? 0 : n_cells - 1; }
  double boundary_area(Face f) const {
    return f == Face::Lower ? areas.front() : areas.back();
  }
};

/// Builds the mesh; throws TooFewCells for n_cells < 3 (the boundary-face
/// extrapolation needs two cells per face).
Mesh build_mesh(const Geometry& geometry, int n_cells);

} // namespace rdc

#endif
