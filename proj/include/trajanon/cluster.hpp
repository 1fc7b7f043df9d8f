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

// Clustering strategies and anonymized-dataset generation.
//
// Every strategy returns a partition of dataset indices. Members of each
// cluster are sorted ascending; clusters are listed in creation order.

#ifndef TRAJANON_CLUSTER_HPP_
#define TRAJANON_CLUSTER_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "trajanon/align.hpp"
#include "trajanon/dgh.hpp"
#include "trajanon/error.hpp"
#include "trajanon/kmeans.hpp"
#include "trajanon/model.hpp"
#include "trajanon/parallel.hpp"
#include "trajanon/random.hpp"

namespace trajanon {

using Cluster = std::vector<std::size_t>;

struct ClusterAssignment {
  std::vector<Cluster> clusters;
  // Released sequence per cluster; filled by GenerateAnonymizedDataset.
  std::vector<std::vector<Point>> heads;

  std::size_t MinClusterSize() const {
    std::size_t m = std::numeric_limits<std::size_t>::max();
    for (const auto& c : clusters) m = std::min(m, c.size());
    return clusters.empty() ? 0 : m;
  }
};

// Throws unless `a` partitions [0, n) into non-empty clusters.
inline void ValidatePartition(const ClusterAssignment& a, std::size_t n) {
  std::vector<int> seen(n, 0);
  for (const auto& c : a.clusters) {
    if (c.empty()) throw Error(ErrorCode::kInternal, "empty cluster");
    for (std::size_t i : c) {
      if (i >= n || seen[i]++ != 0) {
        throw Error(ErrorCode::kInternal, "assignment is not a partition");
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i] == 0) throw Error(ErrorCode::kInternal, "assignment misses a trajectory");
  }
}

struct FeatureVector {
  Bits dx = 0;
  Bits dy = 0;
  Bits dt = 0;

  Vec3 AsVec3() const {
    return {static_cast<double>(dx), static_cast<double>(dy), static_cast<double>(dt)};
  }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// Per-attribute suppression loss summed over the trajectory's points.
inline FeatureVector FeatureVectorOf(const Hierarchies& h, std::span<const Point> points) {
  FeatureVector f;
  for (const auto& p : points) {
    f.dx += h.x.SuppressionLoss(p.x);
    f.dy += h.y.SuppressionLoss(p.y);
    f.dt += h.t.SuppressionLoss(p.t);
  }
  return f;
}

namespace cluster_internal {

inline void RequireFeasible(const Dataset& ds, std::size_t k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  if (ds.size() < k) {
    throw Error(ErrorCode::kInfeasibleK, "dataset has " + std::to_string(ds.size()) +
                                             " trajectories, fewer than k = " +
                                             std::to_string(k));
  }
}

inline std::vector<Vec3> Features(const Dataset& ds, std::span<const std::size_t> idx) {
  const Hierarchies h = ds.grid.MakeHierarchies();
  std::vector<Vec3> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(FeatureVectorOf(h, ds.trajectories[i].points).AsVec3());
  return out;
}

// Non-empty k-means groups over the given subset, each sorted ascending.
inline std::vector<Cluster> KMeansGroups(const Dataset& ds, std::span<const std::size_t> idx,
                                         std::size_t num_clusters, std::uint64_t seed) {
  const std::vector<Vec3> features = Features(ds, idx);
  KMeansOptions opts;
  opts.num_clusters = num_clusters;
  opts.seed = seed;
  const KMeansResult r = KMeans(features, opts);
  std::vector<Cluster> groups(num_clusters);
  for (std::size_t i = 0; i < idx.size(); ++i) groups[r.assignment[i]].push_back(idx[i]);
  std::vector<Cluster> out;
  for (auto& g : groups) {
    if (!g.empty()) {
      std::sort(g.begin(), g.end());
      out.push_back(std::move(g));
    }
  }
  return out;
}

}  // namespace cluster_internal

// k-means with floor(n / k) clusters. Clusters may end up smaller than k.
inline ClusterAssignment KMeansClustering(const Dataset& ds, std::size_t k,
                                          std::uint64_t seed) {
  cluster_internal::RequireFeasible(ds, k);
  std::vector<std::size_t> all(ds.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  ClusterAssignment a;
  a.clusters = cluster_internal::KMeansGroups(ds, all, ds.size() / k, seed);
  return a;
}

// Repeats k-means on the pool of trajectories whose cluster came out smaller
// than k, finalizing every cluster of size >= k. Once fewer than 2k remain
// they form one final cluster; a remainder smaller than k joins the
// finalized clusters with the nearest mean feature vector instead.
inline ClusterAssignment IterativeKMeansClustering(const Dataset& ds, std::size_t k,
                                                   std::uint64_t seed) {
  cluster_internal::RequireFeasible(ds, k);
  std::vector<std::size_t> pool(ds.size());
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  ClusterAssignment a;
  std::size_t num_clusters = pool.size() / k;
  for (std::uint64_t round = 0; !pool.empty(); ++round) {
    if (pool.size() < 2 * k) {
      if (pool.size() >= k || a.clusters.empty()) {
        a.clusters.push_back(pool);
        break;
      }
      std::vector<Vec3> means;
      for (const auto& c : a.clusters) {
        Vec3 m{0, 0, 0};
        for (const Vec3& f : cluster_internal::Features(ds, c)) {
          for (int d = 0; d < 3; ++d) m[d] += f[d];
        }
        for (int d = 0; d < 3; ++d) m[d] /= static_cast<double>(c.size());
        means.push_back(m);
      }
      const std::vector<Vec3> left = cluster_internal::Features(ds, pool);
      for (std::size_t i = 0; i < pool.size(); ++i) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < means.size(); ++c) {
          if (SquaredDistance(left[i], means[c]) < SquaredDistance(left[i], means[best])) {
            best = c;
          }
        }
        a.clusters[best].push_back(pool[i]);
      }
      for (auto& c : a.clusters) std::sort(c.begin(), c.end());
      break;
    }
    std::vector<std::size_t> next;
    bool finalized = false;
    for (auto& g : cluster_internal::KMeansGroups(ds, pool, num_clusters,
                                                  MixSeed(seed, round))) {
      if (g.size() >= k) {
        a.clusters.push_back(std::move(g));
        finalized = true;
      } else {
        next.insert(next.end(), g.begin(), g.end());
      }
    }
    std::sort(next.begin(), next.end());
    pool = std::move(next);
    // A round that finalizes nothing retries with half as many clusters.
    num_clusters = finalized ? pool.size() / k : std::max<std::size_t>(1, num_clusters / 2);
  }
  return a;
}

enum class HeuristicEval {
  // Candidate loss = pairwise alignment against the running cluster sequence.
  kRunningHead,
  // Candidate loss = full progressive alignment of the tentative cluster.
  kFullProgressive,
};

struct HeuristicOptions {
  HeuristicEval eval = HeuristicEval::kRunningHead;
  PairwiseAligner aligner = PairwiseAligner::kDynamic;
  std::size_t threads = 0;
};

// Greedy clustering: ceil(n / k) clusters, each started from a seeded random
// trajectory and grown by k - 1 least-loss additions (ties: smallest id). A
// final cluster smaller than k is folded into the one before it.
inline ClusterAssignment HeuristicClustering(const Dataset& ds, std::size_t k,
                                             std::uint64_t seed,
                                             const HeuristicOptions& options = {}) {
  cluster_internal::RequireFeasible(ds, k);
  const Hierarchies h = ds.grid.MakeHierarchies();
  const auto& trs = ds.trajectories;
  std::vector<std::size_t> pool(ds.size());
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  const std::size_t num_clusters = (ds.size() + k - 1) / k;
  Rng rng(seed);
  ProgressiveOptions prog;
  prog.aligner = options.aligner;

  ClusterAssignment a;
  for (std::size_t c = 0; c < num_clusters && !pool.empty(); ++c) {
    const std::size_t pick = static_cast<std::size_t>(rng.Index(pool.size()));
    Cluster cluster{pool[pick]};
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    std::vector<Point> running = trs[cluster.front()].points;

    for (std::size_t added = 1; added < k && !pool.empty(); ++added) {
      std::vector<Bits> losses(pool.size());
      ParallelFor(
          pool.size(),
          [&](std::size_t j) {
            const auto& cand = trs[pool[j]].points;
            if (options.eval == HeuristicEval::kRunningHead) {
              losses[j] = options.aligner == PairwiseAligner::kDynamic
                              ? DynamicSaLoss(h, running, cand)
                              : StaticAlignLoss(h, running, cand);
            } else {
              std::vector<const Trajectory*> members;
              for (std::size_t m : cluster) members.push_back(&trs[m]);
              members.push_back(&trs[pool[j]]);
              losses[j] = ProgressiveSa(h, members, prog).total_loss;
            }
          },
          options.threads);
      std::size_t best = 0;
      for (std::size_t j = 1; j < pool.size(); ++j) {
        if (losses[j] < losses[best] ||
            (losses[j] == losses[best] && trs[pool[j]].id < trs[pool[best]].id)) {
          best = j;
        }
      }
      const std::size_t chosen = pool[best];
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
      if (options.eval == HeuristicEval::kRunningHead) {
        running = options.aligner == PairwiseAligner::kDynamic
                      ? DynamicSa(h, running, trs[chosen].points).gen
                      : StaticAlign(h, running, trs[chosen].points).gen;
      }
      cluster.push_back(chosen);
    }
    a.clusters.push_back(std::move(cluster));
  }
  if (a.clusters.size() >= 2 && a.clusters.back().size() < k) {
    Cluster tail = std::move(a.clusters.back());
    a.clusters.pop_back();
    a.clusters.back().insert(a.clusters.back().end(), tail.begin(), tail.end());
  }
  for (auto& c : a.clusters) std::sort(c.begin(), c.end());
  return a;
}

// Seeded shuffle cut into consecutive chunks of k; the remainder joins the
// last chunk.
inline ClusterAssignment RandomClustering(const Dataset& ds, std::size_t k,
                                          std::uint64_t seed) {
  cluster_internal::RequireFeasible(ds, k);
  std::vector<std::size_t> order(ds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.Shuffle(std::span<std::size_t>(order));
  ClusterAssignment a;
  const std::size_t chunks = ds.size() / k;
  for (std::size_t c = 0; c < chunks; ++c) {
    const auto begin = order.begin() + static_cast<std::ptrdiff_t>(c * k);
    const auto end = c + 1 == chunks ? order.end() : begin + static_cast<std::ptrdiff_t>(k);
    Cluster cluster(begin, end);
    std::sort(cluster.begin(), cluster.end());
    a.clusters.push_back(std::move(cluster));
  }
  return a;
}

struct ReleasedTrajectory {
  std::string id;
  std::size_t cluster = 0;
  // Released position -> original point index (or kGap).
  Structure structure;
};

struct AnonymizedDataset {
  // One entry per original trajectory, in dataset order.
  std::vector<ReleasedTrajectory> trajectories;
  // Released sequence per cluster; every member of a cluster releases it.
  std::vector<std::vector<Point>> heads;
  Bits total_loss = 0;
  Bits accumulated_loss = 0;

  const std::vector<Point>& Released(std::size_t i) const {
    return heads[trajectories[i].cluster];
  }
};

// Aligns every cluster progressively and releases its sequence on behalf of
// all members. Also stores the heads into `assignment`.
inline AnonymizedDataset GenerateAnonymizedDataset(const Dataset& ds,
                                                   ClusterAssignment& assignment,
                                                   const ProgressiveOptions& options = {},
                                                   std::size_t threads = 0) {
  ValidatePartition(assignment, ds.size());
  const Hierarchies h = ds.grid.MakeHierarchies();
  const std::size_t nc = assignment.clusters.size();
  std::vector<AlignmentResult> results(nc);
  ParallelFor(
      nc,
      [&](std::size_t c) {
        std::vector<const Trajectory*> members;
        for (std::size_t i : assignment.clusters[c]) members.push_back(&ds.trajectories[i]);
        ProgressiveOptions o = options;
        o.seed = MixSeed(options.seed, c);
        results[c] = ProgressiveSa(h, members, o);
      },
      threads);

  AnonymizedDataset out;
  out.trajectories.resize(ds.size());
  out.heads.resize(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    const auto& members = assignment.clusters[c];
    for (std::size_t m = 0; m < members.size(); ++m) {
      ReleasedTrajectory& r = out.trajectories[members[m]];
      r.id = ds.trajectories[members[m]].id;
      r.cluster = c;
      r.structure = std::move(results[c].structures[m]);
    }
    out.total_loss += results[c].total_loss;
    out.accumulated_loss += results[c].accumulated_loss;
    out.heads[c] = std::move(results[c].gen);
  }
  assignment.heads = out.heads;
  return out;
}

}  // namespace trajanon

#endif  // TRAJANON_CLUSTER_HPP_
