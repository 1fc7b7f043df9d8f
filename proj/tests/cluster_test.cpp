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

#include "trajanon/cluster.hpp"

#include <limits>
#include <set>
#include <vector>

#include "gtest/gtest.h"
#include "test_support.hpp"
#include "trajanon/error.hpp"
#include "trajanon/kmeans.hpp"
#include "trajanon/synth.hpp"

namespace trajanon {
namespace {

using testing::Gen;
using testing::IdenticalGroups;

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

Dataset Synthetic(std::size_t n, std::uint64_t seed) {
  SynthConfig cfg;
  cfg.num_trajectories = n;
  cfg.seed = seed;
  return GenerateRandomWalks(cfg);
}

std::set<std::set<std::size_t>> AsSets(const ClusterAssignment& a) {
  std::set<std::set<std::size_t>> out;
  for (const auto& c : a.clusters) out.insert({c.begin(), c.end()});
  return out;
}

TEST(FeatureVectorTest, SumsSuppressionLoss) {
  const Hierarchies h(3, 3, 5);
  const Point p = LeafPoint(h, 1, 2, 3);
  EXPECT_EQ(FeatureVectorOf(h, std::vector<Point>{p}), (FeatureVector{3, 3, 5}));
  EXPECT_EQ(FeatureVectorOf(h, std::vector<Point>{p, p}), (FeatureVector{6, 6, 10}));
  EXPECT_EQ(FeatureVectorOf(h, std::vector<Point>{RootPoint(h), RootPoint(h)}),
            (FeatureVector{0, 0, 0}));
}

TEST(KMeansTest, RejectsClusterCountOutOfRange) {
  const std::vector<Vec3> pts{{0, 0, 0}, {1, 1, 1}};
  EXPECT_EQ(CodeOf([&] { KMeans(pts, {.num_clusters = 0}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([&] { KMeans(pts, {.num_clusters = 3}); }), ErrorCode::kInvalidArgument);
}

TEST(KMeansTest, IdenticalPointsSingleCluster) {
  const std::vector<Vec3> pts(10, Vec3{4, 4, 4});
  const KMeansResult r = KMeans(pts, {.num_clusters = 1, .seed = 3});
  for (std::size_t c : r.assignment) EXPECT_EQ(c, 0u);
  EXPECT_TRUE(r.converged);
}

TEST(KMeansTest, SeparatesBlobsOptimally) {
  Gen gen(8);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec3> pts;
    for (int i = 0; i < 12; ++i) {
      const double base = i % 2 == 0 ? 0.0 : 100.0;
      pts.push_back({base + gen.Below(1000) / 1000.0, base + gen.Below(1000) / 1000.0,
                     base + gen.Below(1000) / 1000.0});
    }
    // Exhaustive oracle over every 2-partition.
    double best = std::numeric_limits<double>::infinity();
    unsigned best_mask = 0;
    for (unsigned mask = 1; mask + 1 < (1u << 12); ++mask) {
      double cost = 0;
      for (int side = 0; side < 2; ++side) {
        Vec3 m{0, 0, 0};
        int count = 0;
        for (int i = 0; i < 12; ++i) {
          if (((mask >> i) & 1u) == static_cast<unsigned>(side)) {
            for (int d = 0; d < 3; ++d) m[d] += pts[i][d];
            ++count;
          }
        }
        for (int d = 0; d < 3; ++d) m[d] /= count;
        for (int i = 0; i < 12; ++i) {
          if (((mask >> i) & 1u) == static_cast<unsigned>(side)) cost += SquaredDistance(pts[i], m);
        }
      }
      if (cost < best) {
        best = cost;
        best_mask = mask;
      }
    }
    const KMeansResult r = KMeans(pts, {.num_clusters = 2, .seed = static_cast<std::uint64_t>(trial)});
    for (int i = 0; i < 12; ++i) {
      for (int j = 0; j < 12; ++j) {
        const bool same_oracle = ((best_mask >> i) & 1u) == ((best_mask >> j) & 1u);
        ASSERT_EQ(r.assignment[i] == r.assignment[j], same_oracle);
        ASSERT_EQ(same_oracle, i % 2 == j % 2);
      }
    }
  }
}

TEST(KMeansTest, CostNeverIncreases) {
  Gen gen(13);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Vec3> pts(200);
    for (auto& p : pts) p = {double(gen.Below(50)), double(gen.Below(50)), double(gen.Below(50))};
    const KMeansResult r =
        KMeans(pts, {.num_clusters = 1 + gen.Below(30), .seed = static_cast<std::uint64_t>(trial)});
    for (std::size_t i = 1; i < r.cost_history.size(); ++i) {
      ASSERT_LE(r.cost_history[i], r.cost_history[i - 1] + 1e-9);
    }
  }
}

TEST(KMeansTest, DeterministicAcrossThreadCounts) {
  Gen gen(21);
  std::vector<Vec3> pts(500);
  for (auto& p : pts) p = {double(gen.Below(9)), double(gen.Below(9)), double(gen.Below(9))};
  const KMeansResult a = KMeans(pts, {.num_clusters = 40, .seed = 5, .threads = 1});
  const KMeansResult b = KMeans(pts, {.num_clusters = 40, .seed = 5, .threads = 8});
  const KMeansResult c = KMeans(pts, {.num_clusters = 40, .seed = 5, .threads = 3});
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_EQ(a.assignment, c.assignment);
  EXPECT_EQ(a.centroids, b.centroids);
}

TEST(KMeansTest, DuplicatesSpreadOverCoLocatedCentroids) {
  const std::vector<Vec3> pts(12, Vec3{1, 2, 3});
  const KMeansResult r = KMeans(pts, {.num_clusters = 4, .seed = 1});
  std::vector<int> counts(4, 0);
  for (std::size_t c : r.assignment) ++counts[c];
  EXPECT_EQ(counts, (std::vector<int>{3, 3, 3, 3}));
}

TEST(KMeansClusteringTest, Examples) {
  const GridSpec g = testing::SmallGrid();
  const Dataset k_only = IdenticalGroups(g, 1, 4, 1);
  EXPECT_EQ(KMeansClustering(k_only, 4, 1).clusters.size(), 1u);
  const Dataset three = IdenticalGroups(g, 3, 4, 2);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ClusterAssignment a = KMeansClustering(three, 4, seed);
    EXPECT_EQ(AsSets(a), (std::set<std::set<std::size_t>>{
                             {0, 1, 2, 3}, {4, 5, 6, 7}, {8, 9, 10, 11}}));
  }
  EXPECT_EQ(CodeOf([&] { KMeansClustering(three, 13, 0); }), ErrorCode::kInfeasibleK);
}

TEST(IterativeKMeansTest, Examples) {
  const GridSpec g = testing::SmallGrid();
  const Dataset small = IdenticalGroups(g, 1, 5, 1);
  EXPECT_EQ(IterativeKMeansClustering(small, 3, 0).clusters.size(), 1u);
  const Dataset three = IdenticalGroups(g, 3, 4, 2);
  EXPECT_EQ(AsSets(IterativeKMeansClustering(three, 4, 9)),
            (std::set<std::set<std::size_t>>{{0, 1, 2, 3}, {4, 5, 6, 7}, {8, 9, 10, 11}}));
}

TEST(IterativeKMeansTest, EveryClusterReachesK) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dataset ds = Synthetic(300, seed);
    for (std::size_t k : {2, 3, 5, 10, 15, 40}) {
      const ClusterAssignment a = IterativeKMeansClustering(ds, k, seed);
      ValidatePartition(a, ds.size());
      ASSERT_GE(a.MinClusterSize(), k);
    }
  }
}

TEST(IterativeKMeansTest, TerminatesOnSpreadOutFeatures) {
  // Distinct lengths give every trajectory its own feature value.
  const GridSpec g = testing::SmallGrid(3, 3, 3);
  const Hierarchies h = g.MakeHierarchies();
  std::vector<std::vector<Point>> seqs;
  for (std::size_t len = 1; len <= 30; ++len) seqs.emplace_back(len, LeafPoint(h, 0, 0, 0));
  const Dataset ds = testing::MakeDataset(g, seqs);
  const ClusterAssignment a = IterativeKMeansClustering(ds, 4, 1);
  ValidatePartition(a, ds.size());
  EXPECT_GE(a.MinClusterSize(), 4u);
}

TEST(HeuristicTest, Examples) {
  const GridSpec g = testing::SmallGrid();
  const Hierarchies h = g.MakeHierarchies();
  const Dataset all_same = IdenticalGroups(g, 1, 3, 4);
  ClusterAssignment one = HeuristicClustering(all_same, 3, 0);
  EXPECT_EQ(one.clusters.size(), 1u);
  EXPECT_EQ(GenerateAnonymizedDataset(all_same, one).total_loss, 0);

  const Point p = LeafPoint(h, 0, 0, 0), q = LeafPoint(h, 7, 7, 7);
  const Dataset pairs = testing::MakeDataset(g, {{p}, {q}, {p}, {q}});
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    EXPECT_EQ(AsSets(HeuristicClustering(pairs, 2, seed)),
              (std::set<std::set<std::size_t>>{{0, 2}, {1, 3}}));
  }
}

TEST(HeuristicTest, RemainderIsFolded) {
  const Dataset ds = Synthetic(23, 3);
  for (auto eval : {HeuristicEval::kRunningHead, HeuristicEval::kFullProgressive}) {
    const ClusterAssignment a = HeuristicClustering(ds, 5, 1, {.eval = eval});
    ValidatePartition(a, ds.size());
    EXPECT_EQ(a.clusters.size(), 4u);
    EXPECT_GE(a.MinClusterSize(), 5u);
  }
}

TEST(HeuristicTest, DeterministicAcrossThreadCounts) {
  const Dataset ds = Synthetic(60, 2);
  const auto a = HeuristicClustering(ds, 4, 7, {.threads = 1});
  const auto b = HeuristicClustering(ds, 4, 7, {.threads = 8});
  EXPECT_EQ(a.clusters, b.clusters);
}

TEST(RandomClusteringTest, Chunks) {
  const Dataset ds = Synthetic(11, 1);
  const ClusterAssignment a = RandomClustering(ds, 5, 3);
  ValidatePartition(a, ds.size());
  ASSERT_EQ(a.clusters.size(), 2u);
  std::multiset<std::size_t> sizes{a.clusters[0].size(), a.clusters[1].size()};
  EXPECT_EQ(sizes, (std::multiset<std::size_t>{5, 6}));
  EXPECT_EQ(RandomClustering(ds, 5, 3).clusters, a.clusters);
  const Dataset even = Synthetic(10, 1);
  for (const auto& c : RandomClustering(even, 5, 0).clusters) EXPECT_EQ(c.size(), 5u);
}

TEST(PartitionTest, AllStrategiesPartition) {
  const Dataset ds = Synthetic(97, 6);
  for (std::size_t k : {1, 2, 7, 97}) {
    ValidatePartition(KMeansClustering(ds, k, 1), ds.size());
    ValidatePartition(IterativeKMeansClustering(ds, k, 1), ds.size());
    ValidatePartition(HeuristicClustering(ds, k, 1), ds.size());
    ValidatePartition(RandomClustering(ds, k, 1), ds.size());
  }
  for (std::size_t k : {2, 7, 97}) {
    EXPECT_GE(HeuristicClustering(ds, k, 1).MinClusterSize(), k);
    EXPECT_GE(RandomClustering(ds, k, 1).MinClusterSize(), k);
  }
}

TEST(PartitionTest, ValidateRejectsBadAssignments) {
  ClusterAssignment a;
  a.clusters = {{0, 1}, {1}};
  EXPECT_EQ(CodeOf([&] { ValidatePartition(a, 2); }), ErrorCode::kInternal);
  a.clusters = {{0}};
  EXPECT_EQ(CodeOf([&] { ValidatePartition(a, 2); }), ErrorCode::kInternal);
  a.clusters = {{0, 1}, {}};
  EXPECT_EQ(CodeOf([&] { ValidatePartition(a, 2); }), ErrorCode::kInternal);
}

TEST(GenerateTest, ReleasesOneSequencePerCluster) {
  const Dataset ds = Synthetic(80, 4);
  ClusterAssignment a = RandomClustering(ds, 4, 2);
  const AnonymizedDataset anon = GenerateAnonymizedDataset(ds, a);
  EXPECT_EQ(anon.heads.size(), a.clusters.size());
  EXPECT_EQ(a.heads, anon.heads);
  for (std::size_t c = 0; c < a.clusters.size(); ++c) {
    for (std::size_t m : a.clusters[c]) {
      EXPECT_EQ(anon.trajectories[m].cluster, c);
      EXPECT_EQ(anon.trajectories[m].id, ds.trajectories[m].id);
    }
  }
  EXPECT_EQ(testing::NaiveDatasetLoss(ds, anon), anon.total_loss);
  ClusterAssignment b = RandomClustering(ds, 4, 2);
  EXPECT_EQ(GenerateAnonymizedDataset(ds, b, {}, 8).heads, anon.heads);
}

TEST(GenerateTest, IdenticalClustersReleaseOriginal) {
  const GridSpec g = testing::SmallGrid();
  const Dataset ds = IdenticalGroups(g, 3, 3, 5);
  ClusterAssignment a = KMeansClustering(ds, 3, 0);
  const AnonymizedDataset anon = GenerateAnonymizedDataset(ds, a);
  EXPECT_EQ(anon.total_loss, 0);
  for (std::size_t i = 0; i < ds.size(); ++i) EXPECT_EQ(anon.Released(i), ds.trajectories[i].points);
}

}  // namespace
}  // namespace trajanon
