#pragma once

#include "granulite/recon/marching_cubes.hpp"
#include "granulite/recon/normals.hpp"
#include "granulite/recon/poisson.hpp"

namespace granulite::recon {

struct ReconstructionParams {
  int resolution = 64;  // cells along the longest axis, padding included
  int padding = 4;
  double cg_tolerance = 1e-8;
  std::size_t cg_max_iterations = 0;
  std::size_t normal_neighbors = 10;
  unsigned threads = 1;
};

struct Reconstruction {
  TriMesh mesh;
  GridLattice lattice;
  double iso_level = 0.0;  // mean of the raw solution at the samples
  std::size_t cg_iterations = 0;
  double cg_relative_residual = 0.0;
  bool cg_converged = false;
  bool normals_estimated = false;
};

// Oriented points -> indicator field -> outward-facing triangle mesh.
//
// With outward normals splatted, the solution of lap(chi) = div(V) increases from
// inside to outside. The field handed to marching cubes is (iso - chi), which is
// positive inside and zero at the mean sample value, so the mesh faces outward.
inline Reconstruction reconstruct_surface_detailed(const PointCloud& input, const ReconstructionParams& params) {
  if (input.size() < 50) throw Error("surface reconstruction needs at least 50 points, got " + std::to_string(input.size()));
  input.check();
  Reconstruction out;
  const PointCloud* cloud = &input;
  PointCloud with_normals;
  if (!input.has_normals()) {
    with_normals = estimate_normals(input, params.normal_neighbors);
    cloud = &with_normals;
    out.normals_estimated = true;
  }
  out.lattice = lattice_for_cloud(*cloud, params.resolution, params.padding);
  const VectorGrid field = splat_vector_field(*cloud, out.lattice);
  PoissonOptions popts;
  popts.tolerance = params.cg_tolerance;
  popts.max_iterations = params.cg_max_iterations;
  popts.threads = params.threads;
  PoissonResult solved = solve_poisson(field, popts);
  out.cg_iterations = solved.iterations;
  out.cg_relative_residual = solved.relative_residual;
  out.cg_converged = solved.converged;

  double sum = 0.0;
  for (const Vec3& p : cloud->positions) sum += solved.chi.sample(p);
  out.iso_level = sum / static_cast<double>(cloud->size());

  ScalarGrid indicator = std::move(solved.chi);
  for (double& v : indicator.values) v = out.iso_level - v;
  out.mesh = extract_isosurface(indicator, 0.0);
  return out;
}

inline TriMesh reconstruct_surface(const PointCloud& cloud, const ReconstructionParams& params = {}) {
  return reconstruct_surface_detailed(cloud, params).mesh;
}

}  // namespace granulite::recon
