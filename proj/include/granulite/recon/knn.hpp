#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "granulite/geometry/types.hpp"

namespace granulite::recon {

struct Neighbor {
  std::size_t index;
  double dist2;
  bool operator<(const Neighbor& o) const { return dist2 < o.dist2 || (dist2 == o.dist2 && index < o.index); }
};

// Uniform hash grid over a fixed point set. Queries are exact k-NN with ties
// broken by point index.
class SpatialHash {
 public:
  explicit SpatialHash(std::span<const Vec3> points) : points_(points) {
    if (points.empty()) throw Error("spatial hash over an empty point set");
    lo_ = hi_ = points[0];
    for (const Vec3& p : points) {
      lo_ = lo_.cwiseMin(p);
      hi_ = hi_.cwiseMax(p);
    }
    const double longest = (hi_ - lo_).maxCoeff();
    // about one point per cell for volumetric sets, a few for surface samples
    const double per_axis = std::max(1.0, std::ceil(std::cbrt(static_cast<double>(points.size()))));
    cell_ = longest > 0.0 ? longest / per_axis : 1.0;
    for (int a = 0; a < 3; ++a) dims_[a] = static_cast<std::size_t>(std::floor((hi_[a] - lo_[a]) / cell_)) + 1;

    const std::size_t ncell = dims_[0] * dims_[1] * dims_[2];
    start_.assign(ncell + 1, 0);
    std::vector<std::size_t> cell_of(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      cell_of[i] = linear(coords(points[i]));
      ++start_[cell_of[i] + 1];
    }
    for (std::size_t c = 0; c < ncell; ++c) start_[c + 1] += start_[c];
    order_.resize(points.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < points.size(); ++i) order_[fill[cell_of[i]]++] = i;
  }

  double cell_size() const { return cell_; }

  // k nearest points to points[query], excluding the query itself, nearest first.
  std::vector<Neighbor> nearest(std::size_t query, std::size_t k) const {
    return nearest_to(points_[query], k, query);
  }

  std::vector<Neighbor> nearest_to(const Vec3& q, std::size_t k, std::size_t exclude = SIZE_MAX) const {
    std::vector<Neighbor> best;
    if (k == 0) return best;
    const auto c = coords(q);
    const std::size_t max_ring = std::max({dims_[0], dims_[1], dims_[2]});
    for (std::size_t r = 0; r <= max_ring; ++r) {
      visit_ring(c, r, [&](std::size_t cell) {
        for (std::size_t s = start_[cell]; s < start_[cell + 1]; ++s) {
          const std::size_t idx = order_[s];
          if (idx == exclude) continue;
          Neighbor n{idx, (points_[idx] - q).squaredNorm()};
          if (best.size() < k) {
            best.push_back(n);
            std::push_heap(best.begin(), best.end());
          } else if (n < best.front()) {
            std::pop_heap(best.begin(), best.end());
            best.back() = n;
            std::push_heap(best.begin(), best.end());
          }
        }
      });
      // cells beyond ring r are at least r * cell away from q
      const double reach = static_cast<double>(r) * cell_;
      if (best.size() == k && best.front().dist2 < reach * reach) break;
    }
    std::sort_heap(best.begin(), best.end());
    return best;
  }

 private:
  std::array<long, 3> coords(const Vec3& p) const {
    std::array<long, 3> c{};
    for (int a = 0; a < 3; ++a) {
      long v = static_cast<long>(std::floor((p[a] - lo_[a]) / cell_));
      c[a] = std::clamp<long>(v, 0, static_cast<long>(dims_[a]) - 1);
    }
    return c;
  }
  std::size_t linear(const std::array<long, 3>& c) const {
    return static_cast<std::size_t>(c[0]) + dims_[0] * (static_cast<std::size_t>(c[1]) + dims_[1] * static_cast<std::size_t>(c[2]));
  }

  template <typename Fn>
  void visit_ring(const std::array<long, 3>& c, std::size_t ring, Fn&& fn) const {
    const long r = static_cast<long>(ring);
    for (long dz = -r; dz <= r; ++dz)
      for (long dy = -r; dy <= r; ++dy)
        for (long dx = -r; dx <= r; ++dx) {
          if (std::max({std::labs(dx), std::labs(dy), std::labs(dz)}) != r) continue;
          const std::array<long, 3> n = {c[0] + dx, c[1] + dy, c[2] + dz};
          bool ok = true;
          for (int a = 0; a < 3; ++a) ok = ok && n[a] >= 0 && n[a] < static_cast<long>(dims_[a]);
          if (ok) fn(linear(n));
        }
  }

  std::span<const Vec3> points_;
  Vec3 lo_, hi_;
  double cell_ = 1.0;
  std::array<std::size_t, 3> dims_{};
  std::vector<std::size_t> start_;
  std::vector<std::size_t> order_;
};

}  // namespace granulite::recon
