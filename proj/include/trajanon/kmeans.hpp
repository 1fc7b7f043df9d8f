//
// Copyright 2026 The Trajanon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Lloyd's k-means over 3-D feature vectors with deterministic seeding.

#ifndef TRAJANON_KMEANS_HPP_
#define TRAJANON_KMEANS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "trajanon/error.hpp"
#include "trajanon/parallel.hpp"
#include "trajanon/random.hpp"

namespace trajanon {

using Vec3 = std::array<double, 3>;

inline double SquaredDistance(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}

struct KMeansOptions {
  std::size_t num_clusters = 1;
  std::uint64_t seed = 0;
  int max_iters = 100;
  double tol = 1e-9;
  std::size_t threads = 0;  // 0: TRAJANON_THREADS / hardware
};

struct KMeansResult {
  std::vector<std::size_t> assignment;  // cluster index per input point
  std::vector<Vec3> centroids;
  int iterations = 0;
  bool converged = false;
  // Sum of squared distances after each assignment step.
  std::vector<double> cost_history;
};

namespace kmeans_internal {

// Initial centroids: a seeded sample of distinct data values when there are
// enough of them, otherwise of distinct data indices.
inline std::vector<Vec3> InitialCentroids(std::span<const Vec3> points, std::size_t k,
                                          Rng& rng) {
  std::vector<std::size_t> unique;
  {
    std::map<Vec3, std::size_t> first;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (first.try_emplace(points[i], i).second) unique.push_back(i);
    }
  }
  std::vector<std::size_t> pool = unique;
  if (pool.size() < k) {
    pool.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) pool[i] = i;
  }
  // Partial Fisher-Yates: the first k slots become the sample.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.Index(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  std::vector<Vec3> centroids(k);
  for (std::size_t i = 0; i < k; ++i) centroids[i] = points[pool[i]];
  return centroids;
}

}  // namespace kmeans_internal

inline KMeansResult KMeans(std::span<const Vec3> points, const KMeansOptions& options) {
  const std::size_t n = points.size();
  const std::size_t k = options.num_clusters;
  if (k < 1 || k > n) {
    throw Error(ErrorCode::kInvalidArgument,
                "num_clusters " + std::to_string(k) + " outside [1, " +
                    std::to_string(n) + "]");
  }
  Rng rng(options.seed);
  KMeansResult out;
  out.centroids = kmeans_internal::InitialCentroids(points, k, rng);
  out.assignment.assign(n, 0);
  std::vector<double> dist(n, 0.0);

  for (int iter = 0; iter < options.max_iters; ++iter) {
    ++out.iterations;
    ParallelFor(
        n,
        [&](std::size_t i) {
          // Exact ties (co-located centroids) are split by point index so
          // duplicate points spread over every centroid sharing their value.
          double best_d = std::numeric_limits<double>::infinity();
          std::size_t ties = 0;
          for (std::size_t c = 0; c < k; ++c) {
            const double d = SquaredDistance(points[i], out.centroids[c]);
            if (d < best_d) {
              best_d = d;
              ties = 1;
            } else if (d == best_d) {
              ++ties;
            }
          }
          std::size_t pick = i % ties;
          for (std::size_t c = 0; c < k; ++c) {
            if (SquaredDistance(points[i], out.centroids[c]) == best_d && pick-- == 0) {
              out.assignment[i] = c;
              break;
            }
          }
          dist[i] = best_d;
        },
        options.threads);

    // Empty clusters take the point farthest from its centroid, as long as
    // that point is not alone in its cluster and not already on it.
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t c : out.assignment) ++counts[c];
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = n;
      double far_d = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[out.assignment[i]] > 1 && dist[i] > far_d) {
          far_d = dist[i];
          far = i;
        }
      }
      if (far == n) continue;
      --counts[out.assignment[far]];
      out.assignment[far] = c;
      ++counts[c];
      out.centroids[c] = points[far];
      dist[far] = 0.0;
    }

    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) cost += dist[i];
    out.cost_history.push_back(cost);

    std::vector<Vec3> sums(k, Vec3{0, 0, 0});
    for (std::size_t i = 0; i < n; ++i) {
      for (int d = 0; d < 3; ++d) sums[out.assignment[i]][d] += points[i][d];
    }
    double movement = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      Vec3 next;
      for (int d = 0; d < 3; ++d) next[d] = sums[c][d] / static_cast<double>(counts[c]);
      movement = std::max(movement, std::sqrt(SquaredDistance(next, out.centroids[c])));
      out.centroids[c] = next;
    }
    if (movement <= options.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace trajanon

#endif  // TRAJANON_KMEANS_HPP_
