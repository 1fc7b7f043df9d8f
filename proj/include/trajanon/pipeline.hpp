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

// End-to-end anonymization run and its report.
//
// Report columns, in this order, are the stable CSV/JSON schema:
//   algorithm, alignment, k, seed, status, n_trajectories, n_points,
//   n_clusters, min_cluster_size, total_loss_bits, loss_x_bits, loss_y_bits,
//   loss_t_bits, accumulated_loss_bits, full_suppression_bits,
//   avg_loss_per_cluster, avg_released_area_m2, avg_length_increase,
//   pct_under_k, avg_achieved_k, min_group_size, k_anonymous, part_a_bits,
//   part_b_bits, wall_cluster_s, wall_align_s, wall_metrics_s, wall_total_s,
//   error

#ifndef TRAJANON_PIPELINE_HPP_
#define TRAJANON_PIPELINE_HPP_

#include <charconv>
#include <chrono>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "trajanon/align.hpp"
#include "trajanon/cluster.hpp"
#include "trajanon/error.hpp"
#include "trajanon/ingest.hpp"
#include "trajanon/metrics.hpp"
#include "trajanon/model.hpp"

namespace trajanon {

enum class Algorithm { kHeuristic, kKMeans, kIterativeKMeans, kRandom };

inline std::string_view AlgorithmName(Algorithm a) {
  switch (a) {
    case Algorithm::kHeuristic: return "heuristic";
    case Algorithm::kKMeans: return "kmeans";
    case Algorithm::kIterativeKMeans: return "iterative-kmeans";
    case Algorithm::kRandom: return "random";
  }
  return "?";
}

inline std::optional<Algorithm> ParseAlgorithm(std::string_view s) {
  for (Algorithm a : {Algorithm::kHeuristic, Algorithm::kKMeans, Algorithm::kIterativeKMeans,
                      Algorithm::kRandom}) {
    if (s == AlgorithmName(a)) return a;
  }
  return std::nullopt;
}

inline std::string_view AlignerName(PairwiseAligner a) {
  return a == PairwiseAligner::kDynamic ? "progressive" : "static";
}

inline std::optional<PairwiseAligner> ParseAligner(std::string_view s) {
  if (s == "progressive") return PairwiseAligner::kDynamic;
  if (s == "static") return PairwiseAligner::kStatic;
  return std::nullopt;
}

struct PipelineConfig {
  Algorithm algorithm = Algorithm::kKMeans;
  PairwiseAligner aligner = PairwiseAligner::kDynamic;
  MemberOrder order = MemberOrder::kGreedy;
  HeuristicEval heuristic_eval = HeuristicEval::kRunningHead;
  std::size_t k = 2;
  std::uint64_t seed = 1;
};

struct AnonymizationReport {
  std::string algorithm;
  std::string alignment;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::string status = "ok";
  std::size_t n_trajectories = 0;
  std::size_t n_points = 0;
  std::size_t n_clusters = 0;
  std::size_t min_cluster_size = 0;
  LossBreakdown loss;
  Bits accumulated_loss_bits = 0;
  Bits full_suppression_bits = 0;
  double avg_loss_per_cluster = 0;
  double avg_released_area_m2 = 0;
  double avg_length_increase = 0;
  double pct_under_k = 0;
  double avg_achieved_k = 0;
  std::size_t min_group_size = 0;
  bool k_anonymous = false;
  Bits part_a_bits = 0;
  Bits part_b_bits = 0;
  double wall_cluster_s = 0;
  double wall_align_s = 0;
  double wall_metrics_s = 0;
  double wall_total_s = 0;
  std::string error;

  Bits total_loss_bits() const { return loss.Total(); }
};

struct PipelineResult {
  ClusterAssignment assignment;
  AnonymizedDataset anonymized;
  AnonymizationReport report;
};

inline ClusterAssignment RunClustering(const Dataset& ds, const PipelineConfig& cfg) {
  switch (cfg.algorithm) {
    case Algorithm::kHeuristic: {
      HeuristicOptions o;
      o.eval = cfg.heuristic_eval;
      o.aligner = cfg.aligner;
      return HeuristicClustering(ds, cfg.k, cfg.seed, o);
    }
    case Algorithm::kKMeans: return KMeansClustering(ds, cfg.k, cfg.seed);
    case Algorithm::kIterativeKMeans: return IterativeKMeansClustering(ds, cfg.k, cfg.seed);
    case Algorithm::kRandom: return RandomClustering(ds, cfg.k, cfg.seed);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown algorithm");
}

// Clusters, aligns, measures, and cross-checks the run's internal
// invariants; a failed check throws ErrorCode::kInternal.
inline PipelineResult RunPipeline(const Dataset& ds, const PipelineConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  auto seconds = [](Clock::duration d) { return std::chrono::duration<double>(d).count(); };
  ds.Validate();
  const auto t0 = Clock::now();
  PipelineResult r;
  r.assignment = RunClustering(ds, cfg);
  const auto t1 = Clock::now();
  ProgressiveOptions prog;
  prog.aligner = cfg.aligner;
  prog.order = cfg.order;
  prog.seed = MixSeed(cfg.seed, 0xA11);
  r.anonymized = GenerateAnonymizedDataset(ds, r.assignment, prog);
  const auto t2 = Clock::now();

  AnonymizationReport& rep = r.report;
  rep.algorithm = std::string(AlgorithmName(cfg.algorithm));
  rep.alignment = std::string(AlignerName(cfg.aligner));
  rep.k = cfg.k;
  rep.seed = cfg.seed;
  rep.n_trajectories = ds.size();
  rep.n_points = ds.PointCount();
  rep.n_clusters = r.assignment.clusters.size();
  rep.min_cluster_size = r.assignment.MinClusterSize();
  rep.loss = DatasetLoss(ds, r.anonymized);
  rep.accumulated_loss_bits = r.anonymized.accumulated_loss;
  rep.full_suppression_bits = FullSuppressionBits(ds);
  rep.avg_loss_per_cluster =
      static_cast<double>(rep.loss.Total()) / static_cast<double>(rep.n_clusters);
  rep.avg_released_area_m2 = AvgAreaPerLocation(ds, r.anonymized);
  rep.avg_length_increase = AvgLengthIncrease(ds, r.anonymized);
  const auto released = ReleasedSequences(r.anonymized);
  const AchievedKStats ks = ComputeAchievedK(released, cfg.k);
  rep.pct_under_k = ks.pct_under_k;
  rep.avg_achieved_k = ks.avg_achieved_k;
  rep.min_group_size = ks.min_group_size;
  rep.k_anonymous = VerifyKAnonymity(released, cfg.k).holds;
  const LossDecomposition dec = DecomposeLoss(ds, r.anonymized);
  rep.part_a_bits = dec.part_a;
  rep.part_b_bits = dec.part_b;
  const auto t3 = Clock::now();
  rep.wall_cluster_s = seconds(t1 - t0);
  rep.wall_align_s = seconds(t2 - t1);
  rep.wall_metrics_s = seconds(t3 - t2);
  rep.wall_total_s = seconds(t3 - t0);

  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::kInternal, what);
  };
  require(rep.loss.Total() == r.anonymized.total_loss,
          "per-attribute loss does not sum to the alignment loss");
  require(rep.loss.Total() <= rep.full_suppression_bits,
          "loss exceeds the full-suppression bound");
  require(dec.violations == 0 && dec.part_a - dec.part_b == rep.loss.Total(),
          "loss decomposition does not reproduce the dataset loss");
  if (cfg.algorithm == Algorithm::kIterativeKMeans) {
    require(rep.k_anonymous, "iterative k-means release is not k-anonymous");
  }
  return r;
}

namespace report_internal {

inline std::string FormatDouble(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

inline std::string CsvField(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace report_internal

// With include_timings == false the output depends only on inputs, config,
// and seed.
inline nlohmann::ordered_json ReportToJson(const AnonymizationReport& r,
                                           bool include_timings = true) {
  nlohmann::ordered_json j;
  j["algorithm"] = r.algorithm;
  j["alignment"] = r.alignment;
  j["k"] = r.k;
  j["seed"] = r.seed;
  j["status"] = r.status;
  j["n_trajectories"] = r.n_trajectories;
  j["n_points"] = r.n_points;
  j["n_clusters"] = r.n_clusters;
  j["min_cluster_size"] = r.min_cluster_size;
  j["total_loss_bits"] = r.total_loss_bits();
  j["loss_x_bits"] = r.loss.x;
  j["loss_y_bits"] = r.loss.y;
  j["loss_t_bits"] = r.loss.t;
  j["accumulated_loss_bits"] = r.accumulated_loss_bits;
  j["full_suppression_bits"] = r.full_suppression_bits;
  j["avg_loss_per_cluster"] = r.avg_loss_per_cluster;
  j["avg_released_area_m2"] = r.avg_released_area_m2;
  j["avg_length_increase"] = r.avg_length_increase;
  j["pct_under_k"] = r.pct_under_k;
  j["avg_achieved_k"] = r.avg_achieved_k;
  j["min_group_size"] = r.min_group_size;
  j["k_anonymous"] = r.k_anonymous;
  j["part_a_bits"] = r.part_a_bits;
  j["part_b_bits"] = r.part_b_bits;
  if (include_timings) {
    j["wall_cluster_s"] = r.wall_cluster_s;
    j["wall_align_s"] = r.wall_align_s;
    j["wall_metrics_s"] = r.wall_metrics_s;
    j["wall_total_s"] = r.wall_total_s;
  }
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

inline std::string ReportCsvHeader() {
  return "algorithm,alignment,k,seed,status,n_trajectories,n_points,n_clusters,"
         "min_cluster_size,total_loss_bits,loss_x_bits,loss_y_bits,loss_t_bits,"
         "accumulated_loss_bits,full_suppression_bits,avg_loss_per_cluster,"
         "avg_released_area_m2,avg_length_increase,pct_under_k,avg_achieved_k,"
         "min_group_size,k_anonymous,part_a_bits,part_b_bits,wall_cluster_s,"
         "wall_align_s,wall_metrics_s,wall_total_s,error";
}

inline std::string ReportCsvRow(const AnonymizationReport& r) {
  using report_internal::CsvField;
  using report_internal::FormatDouble;
  std::string s;
  auto add = [&s](const std::string& v) {
    if (!s.empty()) s += ',';
    s += v;
  };
  add(CsvField(r.algorithm));
  add(CsvField(r.alignment));
  add(std::to_string(r.k));
  add(std::to_string(r.seed));
  add(CsvField(r.status));
  add(std::to_string(r.n_trajectories));
  add(std::to_string(r.n_points));
  add(std::to_string(r.n_clusters));
  add(std::to_string(r.min_cluster_size));
  add(std::to_string(r.total_loss_bits()));
  add(std::to_string(r.loss.x));
  add(std::to_string(r.loss.y));
  add(std::to_string(r.loss.t));
  add(std::to_string(r.accumulated_loss_bits));
  add(std::to_string(r.full_suppression_bits));
  add(FormatDouble(r.avg_loss_per_cluster));
  add(FormatDouble(r.avg_released_area_m2));
  add(FormatDouble(r.avg_length_increase));
  add(FormatDouble(r.pct_under_k));
  add(FormatDouble(r.avg_achieved_k));
  add(std::to_string(r.min_group_size));
  add(r.k_anonymous ? "true" : "false");
  add(std::to_string(r.part_a_bits));
  add(std::to_string(r.part_b_bits));
  add(FormatDouble(r.wall_cluster_s));
  add(FormatDouble(r.wall_align_s));
  add(FormatDouble(r.wall_metrics_s));
  add(FormatDouble(r.wall_total_s));
  s += ',';
  s += CsvField(r.error);
  return s;
}

// Anonymized CSV: one row per released position of every member.
inline void WriteAnonymizedCsv(std::ostream& out, const Dataset& ds,
                               const AnonymizedDataset& anon) {
  const Hierarchies h = ds.grid.MakeHierarchies();
  out << kAnonymizedHeader << '\n';
  for (std::size_t i = 0; i < anon.trajectories.size(); ++i) {
    const ReleasedTrajectory& r = anon.trajectories[i];
    CheckCsvId(r.id);
    for (const Point& p : anon.Released(i)) {
      out << r.id << ',' << r.cluster << ',' << CsvLabel(h.x, p.x) << ','
          << CsvLabel(h.y, p.y) << ',' << CsvLabel(h.t, p.t) << '\n';
    }
  }
}

}  // namespace trajanon

#endif  // TRAJANON_PIPELINE_HPP_
