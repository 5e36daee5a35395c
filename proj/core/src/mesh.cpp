#include "rdcontrol/mesh.hpp"

#include <cmath>

namespace rdc {

Mesh build_mesh(const Geometry& geometry, int n_cells) {
  if (n_cells < 3) throw TooFewCells(n_cells);

  Mesh m;
  m.geometry = geometry;
  m.n_cells = n_cells;
  m.dx = geometry.extent / n_cells;
  m.centers.resize(n_cells);
  m.volumes.resize(n_cells);
  m.areas.resize(n_cells + 1);

  for (int k = 0; k < n_cells; ++k) m.centers[k] = (k + 0.5) * m.dx;

  constexpr double four_pi = 4.0 * M_PI;
  if (geometry.kind == Geometry::Kind::Sphere) {
    for (int k = 0; k <= n_cells; ++k) {
      double r = k * m.dx;
      m.areas[k] = four_pi * r * r;
    }
    for (int k = 0; k < n_cells; ++k) {
      double r0 = k * m.dx, r1 = (k + 1) * m.dx;
      m.volumes[k] = four_pi / 3.0 * (r1 * r1 * r1 - r0 * r0 * r0);
    }
  } else {
    for (int k = 0; k <= n_cells; ++k) m.areas[k] = 1.0;
    for (int k = 0; k < n_cells; ++k) m.volumes[k] = m.dx;
  }

  m.total_volume = 0.0;
  for (double v : m.volumes) m.total_volume += v;
  return m;
}

} // namespace rdc
