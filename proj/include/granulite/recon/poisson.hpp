#pragma once

#include "granulite/parallel.hpp"
#include "granulite/recon/grid.hpp"

namespace granulite::recon {

struct PoissonOptions {
  double tolerance = 1e-8;       // relative residual ||b - A x|| / ||b||
  std::size_t max_iterations = 0;  // 0 -> 10 * unknowns
  unsigned threads = 1;
};

struct PoissonResult {
  ScalarGrid chi;
  std::size_t iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

// Central-difference divergence at interior nodes; boundary nodes are zero.
inline ScalarGrid divergence(const VectorGrid& field) {
  const auto& l = field.lattice;
  ScalarGrid div(l);
  const double inv2h = 1.0 / (2.0 * l.h);
  for (std::size_t k = 1; k + 1 < l.sz(); ++k)
    for (std::size_t j = 1; j + 1 < l.sy(); ++j)
      for (std::size_t i = 1; i + 1 < l.sx(); ++i)
        div.at(i, j, k) = inv2h * ((field.at(i + 1, j, k).x() - field.at(i - 1, j, k).x()) +
                                   (field.at(i, j + 1, k).y() - field.at(i, j - 1, k).y()) +
                                   (field.at(i, j, k + 1).z() - field.at(i, j, k - 1).z()));
  return div;
}

// 7-point Laplacian at interior nodes, zero on the boundary.
inline ScalarGrid laplacian(const ScalarGrid& u, unsigned threads = 1) {
  const auto& l = u.lattice;
  ScalarGrid out(l);
  const double invh2 = 1.0 / (l.h * l.h);
  const std::size_t sx = l.sx(), sxy = l.sx() * l.sy();
  parallel_for(1, l.sz() - 1, threads, [&](std::size_t k0, std::size_t k1) {
    for (std::size_t k = k0; k < k1; ++k)
      for (std::size_t j = 1; j + 1 < l.sy(); ++j)
        for (std::size_t i = 1; i + 1 < l.sx(); ++i) {
          const std::size_t c = l.index(i, j, k);
          const double* v = u.values.data();
          out.values[c] =
              invh2 * (v[c - 1] + v[c + 1] + v[c - sx] + v[c + sx] + v[c - sxy] + v[c + sxy] - 6.0 * v[c]);
        }
  });
  return out;
}

// Solves lap(chi) = rhs on the interior nodes with chi = 0 on the boundary, by
// conjugate gradient on the SPD system -lap(chi) = -rhs.
inline PoissonResult solve_poisson_rhs(const ScalarGrid& rhs, const PoissonOptions& opts = {}) {
  const auto& l = rhs.lattice;
  l.check();
  const std::size_t n = l.node_count();
  std::vector<std::uint8_t> interior(n, 0);
  std::size_t unknowns = 0;
  for (std::size_t k = 0; k < l.sz(); ++k)
    for (std::size_t j = 0; j < l.sy(); ++j)
      for (std::size_t i = 0; i < l.sx(); ++i)
        if (!l.is_boundary(i, j, k)) {
          interior[l.index(i, j, k)] = 1;
          ++unknowns;
        }

  const unsigned th = opts.threads;
  auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
    return blocked_sum(n, th, [&](std::size_t i) { return a[i] * b[i]; });
  };
  // y = -lap(x) restricted to interior nodes
  auto apply = [&](const ScalarGrid& x, ScalarGrid& y) {
    y = laplacian(x, th);
    for (double& v : y.values) v = -v;
  };

  PoissonResult res;
  res.chi = ScalarGrid(l);
  std::vector<double> b(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (interior[i]) b[i] = -rhs.values[i];
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }
  const std::size_t max_iter = opts.max_iterations ? opts.max_iterations : 10 * unknowns;
  const double target = opts.tolerance * bnorm;

  ScalarGrid& x = res.chi;
  ScalarGrid p(l), ap(l);
  std::vector<double> r = b;
  p.values = r;
  double rr = dot(r, r);
  std::vector<double> best = x.values;
  double best_res = bnorm;

  auto true_residual = [&]() {
    apply(x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap.values[i];
    return std::sqrt(dot(r, r));
  };

  std::size_t it = 0;
  while (it < max_iter) {
    apply(p, ap);
    const double pap = dot(p.values, ap.values);
    if (!(pap > 0.0)) break;
    const double alpha = rr / pap;
    for (std::size_t i = 0; i < n; ++i) {
      x.values[i] += alpha * p.values[i];
      r[i] -= alpha * ap.values[i];
    }
    ++it;
    const double rr_new = dot(r, r);
    if (std::sqrt(rr_new) <= target) {
      // The recursive residual drifts; confirm against the explicit one and restart if needed.
      const double actual = true_residual();
      if (actual < best_res) {
        best_res = actual;
        best = x.values;
      }
      if (actual <= target) {
        res.converged = true;
        break;
      }
      rr = dot(r, r);
      p.values = r;
      continue;
    }
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) p.values[i] = r[i] + beta * p.values[i];
  }
  res.iterations = it;
  if (res.converged) {
    res.relative_residual = best_res / bnorm;
  } else {
    const double actual = true_residual();
    if (actual < best_res) {
      best_res = actual;
      best = x.values;
    }
    x.values = best;
    res.relative_residual = best_res / bnorm;
  }
  return res;
}

// Indicator-function solve lap(chi) = div(V).
inline PoissonResult solve_poisson(const VectorGrid& field, const PoissonOptions& opts = {}) {
  return solve_poisson_rhs(divergence(field), opts);
}

}  // namespace granulite::recon
