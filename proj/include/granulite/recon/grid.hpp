#pragma once

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include "granulite/geometry/types.hpp"

namespace granulite::recon {

inline constexpr int kMinResolution = 8;
inline constexpr int kMaxResolution = 256;

// Regular lattice of nx*ny*nz cells, i.e. (nx+1)(ny+1)(nz+1) nodes, spacing h.
struct GridLattice {
  int nx = 2, ny = 2, nz = 2;
  Vec3 origin = Vec3::Zero();
  double h = 1.0;

  std::size_t sx() const { return static_cast<std::size_t>(nx) + 1; }
  std::size_t sy() const { return static_cast<std::size_t>(ny) + 1; }
  std::size_t sz() const { return static_cast<std::size_t>(nz) + 1; }
  std::size_t node_count() const { return sx() * sy() * sz(); }

  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return i + sx() * (j + sy() * k); }
  Vec3 node_position(std::size_t i, std::size_t j, std::size_t k) const {
    return origin + h * Vec3(static_cast<double>(i), static_cast<double>(j), static_cast<double>(k));
  }
  bool is_boundary(std::size_t i, std::size_t j, std::size_t k) const {
    return i == 0 || j == 0 || k == 0 || i == sx() - 1 || j == sy() - 1 || k == sz() - 1;
  }

  void check() const {
    if (nx < 2 || ny < 2 || nz < 2) throw Error("grid needs at least 2 cells per axis");
    if (!(h > 0.0) || !std::isfinite(h)) throw Error("grid spacing must be positive");
  }

  friend bool operator==(const GridLattice&, const GridLattice&) = default;
};

struct ScalarGrid {
  GridLattice lattice;
  std::vector<double> values;

  ScalarGrid() = default;
  explicit ScalarGrid(const GridLattice& l, double fill = 0.0) : lattice(l), values(l.node_count(), fill) { l.check(); }

  double& at(std::size_t i, std::size_t j, std::size_t k) { return values[lattice.index(i, j, k)]; }
  double at(std::size_t i, std::size_t j, std::size_t k) const { return values[lattice.index(i, j, k)]; }

  // Trilinear interpolation; points outside the lattice are clamped to it.
  double sample(const Vec3& p) const {
    const Vec3 g = (p - lattice.origin) / lattice.h;
    std::size_t base[3];
    double frac[3];
    const int cells[3] = {lattice.nx, lattice.ny, lattice.nz};
    for (int a = 0; a < 3; ++a) {
      double c = std::clamp(g[a], 0.0, static_cast<double>(cells[a]));
      double fl = std::min(std::floor(c), static_cast<double>(cells[a] - 1));
      base[a] = static_cast<std::size_t>(fl);
      frac[a] = c - fl;
    }
    double v = 0.0;
    for (int corner = 0; corner < 8; ++corner) {
      const int dx = corner & 1, dy = (corner >> 1) & 1, dz = (corner >> 2) & 1;
      const double w = (dx ? frac[0] : 1 - frac[0]) * (dy ? frac[1] : 1 - frac[1]) * (dz ? frac[2] : 1 - frac[2]);
      v += w * at(base[0] + dx, base[1] + dy, base[2] + dz);
    }
    return v;
  }
};

struct VectorGrid {
  GridLattice lattice;
  std::vector<Vec3> values;

  VectorGrid() = default;
  explicit VectorGrid(const GridLattice& l) : lattice(l), values(l.node_count(), Vec3::Zero()) { l.check(); }

  Vec3& at(std::size_t i, std::size_t j, std::size_t k) { return values[lattice.index(i, j, k)]; }
  const Vec3& at(std::size_t i, std::size_t j, std::size_t k) const { return values[lattice.index(i, j, k)]; }
};

// Lattice covering [lo, hi] with `resolution` cells along the longest axis, of which
// `padding` cells lie outside the box on each side.
inline GridLattice lattice_for_bounds(const Vec3& lo, const Vec3& hi, int resolution, int padding) {
  if (resolution < kMinResolution || resolution > kMaxResolution)
    throw Error("grid resolution must lie in [" + std::to_string(kMinResolution) + ", " +
                std::to_string(kMaxResolution) + "], got " + std::to_string(resolution));
  if (padding < 0 || resolution - 2 * padding < 2)
    throw Error("padding " + std::to_string(padding) + " leaves too few interior cells");
  const Vec3 extent = hi - lo;
  const double longest = extent.maxCoeff();
  const double h = longest > 0.0 ? longest / (resolution - 2 * padding) : 1.0;
  GridLattice l;
  l.h = h;
  l.origin = lo - Vec3::Constant(padding * h);
  int* cells[3] = {&l.nx, &l.ny, &l.nz};
  for (int a = 0; a < 3; ++a) {
    const int inner = static_cast<int>(std::ceil(extent[a] / h - 1e-9));
    *cells[a] = std::max(2, std::max(inner, 0) + 2 * padding);
  }
  return l;
}

inline GridLattice lattice_for_cloud(const PointCloud& cloud, int resolution, int padding) {
  if (cloud.size() == 0) throw Error("empty point cloud");
  Vec3 lo = cloud.positions[0], hi = cloud.positions[0];
  for (const Vec3& p : cloud.positions) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return lattice_for_bounds(lo, hi, resolution, padding);
}

// Distributes every normal to the 8 nodes of its cell with trilinear weights.
inline VectorGrid splat_vector_field(const PointCloud& cloud, const GridLattice& lattice) {
  if (cloud.size() == 0) throw Error("cannot splat an empty point cloud");
  if (!cloud.has_normals()) throw Error("splatting requires normals");
  VectorGrid field(lattice);
  const int cells[3] = {lattice.nx, lattice.ny, lattice.nz};
  for (std::size_t p = 0; p < cloud.size(); ++p) {
    const Vec3 g = (cloud.positions[p] - lattice.origin) / lattice.h;
    std::size_t base[3];
    double frac[3];
    for (int a = 0; a < 3; ++a) {
      if (g[a] < 0.0 || g[a] > cells[a]) throw Error("point " + std::to_string(p) + " lies outside the grid");
      const double fl = std::min(std::floor(g[a]), static_cast<double>(cells[a] - 1));
      base[a] = static_cast<std::size_t>(fl);
      frac[a] = g[a] - fl;
    }
    for (int corner = 0; corner < 8; ++corner) {
      const int dx = corner & 1, dy = (corner >> 1) & 1, dz = (corner >> 2) & 1;
      const double w = (dx ? frac[0] : 1 - frac[0]) * (dy ? frac[1] : 1 - frac[1]) * (dz ? frac[2] : 1 - frac[2]);
      if (w != 0.0) field.at(base[0] + dx, base[1] + dy, base[2] + dz) += w * cloud.normals[p];
    }
  }
  return field;
}

inline VectorGrid splat_vector_field(const PointCloud& cloud, int resolution, int padding) {
  return splat_vector_field(cloud, lattice_for_cloud(cloud, resolution, padding));
}

// Debug dump: text header lines then raw little-endian float64 values, x fastest.
//   GRID nx ny nz
//   ORIGIN x y z
//   SPACING h
//   DATA <count>
inline void write_grid_dump(const std::filesystem::path& path, const ScalarGrid& grid) {
  static_assert(std::numeric_limits<double>::is_iec559);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  const auto& l = grid.lattice;
  char header[512];
  std::snprintf(header, sizeof header, "GRID %d %d %d\nORIGIN %.17g %.17g %.17g\nSPACING %.17g\nDATA %zu\n", l.nx, l.ny,
                l.nz, l.origin.x(), l.origin.y(), l.origin.z(), l.h, grid.values.size());
  os << header;
  for (double v : grid.values) {
    unsigned char bytes[8];
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
    os.write(reinterpret_cast<const char*>(bytes), 8);
  }
  if (!os) throw IoError("failed writing " + path.string());
}

}  // namespace granulite::recon
