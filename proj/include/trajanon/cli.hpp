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

// Batch command-line interface: ingest, synth, anonymize, verify, bench.
//
// Exit codes: 0 success, 2 usage or parse error, 3 infeasible k, 4 internal
// invariant breach, 5 k-anonymity verification failure.
//
// `--config FILE` reads flat `key = value` lines (keys are long option
// names without dashes, `#` starts a comment). Flags given on the command
// line take precedence over the file.

#ifndef TRAJANON_CLI_HPP_
#define TRAJANON_CLI_HPP_

#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "trajanon/error.hpp"
#include "trajanon/ingest.hpp"
#include "trajanon/metrics.hpp"
#include "trajanon/model.hpp"
#include "trajanon/pipeline.hpp"
#include "trajanon/synth.hpp"

namespace trajanon {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitInternal = 4;
inline constexpr int kExitNotAnonymous = 5;

inline int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInfeasibleK: return kExitInfeasible;
    case ErrorCode::kInternal:
    case ErrorCode::kInconsistentStructure:
    case ErrorCode::kNotAncestor:
    case ErrorCode::kTreeMismatch: return kExitInternal;
    default: return kExitUsage;
  }
}

namespace cli_internal {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Splices `--key value` pairs from a flat config file into argv, skipping
// keys already present on the command line.
inline std::vector<std::string> ApplyConfigFile(std::vector<std::string> args) {
  std::string path;
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      kept.push_back(args[i]);
    }
  }
  if (path.empty()) return kept;
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::set<std::string> given;
  for (const auto& a : kept) {
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') - 2));
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string_view body = ingest_internal::Trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(ingest_internal::Trim(body.substr(0, eq)));
    const std::string value(ingest_internal::Trim(body.substr(eq + 1)));
    if (given.count(key)) continue;
    if (value == "true") {
      kept.push_back("--" + key);
    } else if (value != "false") {
      kept.push_back("--" + key);
      kept.push_back(value);
    }
  }
  return kept;
}

inline std::vector<double> ParseDoubles(const std::string& s, std::size_t expected,
                                        const std::string& flag) {
  std::vector<double> out;
  for (const auto f : ingest_internal::SplitCsv(s)) {
    const auto v = ingest_internal::ParseDouble(f);
    if (!v) throw UsageError(flag + ": '" + s + "' is not a list of numbers");
    out.push_back(*v);
  }
  if (out.size() != expected) {
    throw UsageError(flag + " expects " + std::to_string(expected) + " comma-separated values");
  }
  return out;
}

template <typename T>
std::vector<T> ParseList(const std::string& s, const std::string& flag) {
  std::vector<T> out;
  if (ingest_internal::Trim(s).empty()) return out;
  for (const auto f : ingest_internal::SplitCsv(s)) {
    const std::string_view v = ingest_internal::Trim(f);
    T value{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
      throw UsageError(flag + ": bad list element '" + std::string(v) + "'");
    }
    out.push_back(value);
  }
  return out;
}

inline std::vector<std::string> ParseNames(const std::string& s) {
  std::vector<std::string> out;
  if (ingest_internal::Trim(s).empty()) return out;
  for (const auto f : ingest_internal::SplitCsv(s)) out.emplace_back(ingest_internal::Trim(f));
  return out;
}

struct GridFlags {
  std::string origin;
  double epsilon = 10.0;
  double epsilon_t = 3600.0;
  int bits_x = 7;
  int bits_y = 7;
  int bits_t = 5;

  void Register(CLI::App* app) {
    app->add_option("--origin", origin, "grid south-west corner as lat,lon");
    app->add_option("--epsilon", epsilon, "cell edge in meters")->capture_default_str();
    app->add_option("--epsilon-t", epsilon_t, "time-bin width in seconds")
        ->capture_default_str();
    app->add_option("--grid-bits-x", bits_x, "x DGH depth")->capture_default_str();
    app->add_option("--grid-bits-y", bits_y, "y DGH depth")->capture_default_str();
    app->add_option("--grid-bits-t", bits_t, "t DGH depth")->capture_default_str();
  }

  GridSpec Make() const {
    GridSpec g;
    g.epsilon = epsilon;
    g.epsilon_t = epsilon_t;
    g.bits_x = bits_x;
    g.bits_y = bits_y;
    g.bits_t = bits_t;
    if (!origin.empty()) {
      const auto v = ParseDoubles(origin, 2, "--origin");
      g.origin_lat = v[0];
      g.origin_lon = v[1];
    }
    return g;
  }
};

inline void WriteFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIngest, "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error(ErrorCode::kIngest, "write to '" + path + "' failed");
}

inline Dataset LoadCanonical(const std::string& path, const GridSpec& grid) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIngest, "cannot read '" + path + "'");
  return ReadCanonicalCsv(in, grid);
}

inline std::string DatasetCsv(const Dataset& ds) {
  std::ostringstream os;
  WriteCanonicalCsv(os, ds);
  return os.str();
}

inline PipelineConfig MakePipelineConfig(std::size_t k, const std::string& algo,
                                         const std::string& align, const std::string& order,
                                         const std::string& eval, std::uint64_t seed) {
  PipelineConfig cfg;
  cfg.k = k;
  cfg.seed = seed;
  const auto a = ParseAlgorithm(algo);
  if (!a) throw UsageError("unknown --algo '" + algo + "'");
  cfg.algorithm = *a;
  const auto al = ParseAligner(align);
  if (!al) throw UsageError("unknown --align '" + align + "'");
  cfg.aligner = *al;
  if (order == "greedy") {
    cfg.order = MemberOrder::kGreedy;
  } else if (order == "random") {
    cfg.order = MemberOrder::kRandom;
  } else {
    throw UsageError("unknown --order '" + order + "'");
  }
  if (eval == "running-head") {
    cfg.heuristic_eval = HeuristicEval::kRunningHead;
  } else if (eval == "full-progressive") {
    cfg.heuristic_eval = HeuristicEval::kFullProgressive;
  } else {
    throw UsageError("unknown --heuristic-eval '" + eval + "'");
  }
  return cfg;
}

}  // namespace cli_internal

// Entry point shared by the trajanon binary and the tests.
inline int RunCli(const std::vector<std::string>& raw_args, std::ostream& out,
                  std::ostream& err) {
  using namespace cli_internal;
  std::vector<std::string> args;
  try {
    args = ApplyConfigFile(
        std::vector<std::string>(raw_args.begin() + (raw_args.empty() ? 0 : 1),
                                 raw_args.end()));
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  CLI::App app{"k-anonymization of spatiotemporal trajectory datasets", "trajanon"};
  app.require_subcommand(1);
  std::string config_doc;
  app.add_option("--config", config_doc,
                 "flat key = value file of long options; command-line flags win");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "convert raw logs into a canonical CSV");
  std::string in_path, format = "canonical", crop, out_path, stats_path;
  GridFlags ingest_grid;
  ingest->add_option("--input", in_path, "input file or directory")->required();
  ingest->add_option("--format", format, "geolife | tdrive | canonical")
      ->capture_default_str();
  ingest->add_option("--crop", crop, "keep a box: center_lat,center_lon,width_m,height_m");
  ingest->add_option("--out", out_path, "canonical CSV output")->required();
  ingest->add_option("--stats", stats_path, "stats JSON (default: <out>.stats.json)");
  ingest_grid.Register(ingest);

  // synth
  auto* synth = app.add_subcommand("synth", "generate seeded random-walk trajectories");
  std::size_t synth_n = 500;
  std::uint64_t synth_seed = 1;
  std::size_t synth_max_len = 16;
  double synth_mean_len = 4.0;
  std::string synth_out;
  GridFlags synth_grid;
  synth->add_option("--n", synth_n, "number of trajectories")->capture_default_str();
  synth->add_option("--seed", synth_seed)->capture_default_str();
  synth->add_option("--mean-length", synth_mean_len)->capture_default_str();
  synth->add_option("--max-length", synth_max_len)->capture_default_str();
  synth->add_option("--out", synth_out, "canonical CSV output")->required();
  synth_grid.Register(synth);

  // anonymize
  auto* anon = app.add_subcommand("anonymize", "cluster, align and release a dataset");
  std::string an_in, an_out, an_report, an_algo = "iterative-kmeans", an_align = "progressive",
                                        an_order = "greedy", an_eval = "running-head";
  std::size_t an_k = 2;
  std::uint64_t an_seed = 1;
  bool an_timings = false;
  GridFlags an_grid;
  anon->add_option("--input", an_in, "canonical CSV")->required();
  anon->add_option("--k", an_k, "anonymity requirement (>= 2)")->capture_default_str();
  anon->add_option("--algo", an_algo, "heuristic | kmeans | iterative-kmeans | random")
      ->capture_default_str();
  anon->add_option("--align", an_align, "progressive | static")->capture_default_str();
  anon->add_option("--order", an_order, "greedy | random member order")->capture_default_str();
  anon->add_option("--heuristic-eval", an_eval, "running-head | full-progressive")
      ->capture_default_str();
  anon->add_option("--seed", an_seed)->capture_default_str();
  anon->add_option("--out", an_out, "anonymized CSV output")->required();
  anon->add_option("--report", an_report, "JSON report output");
  anon->add_flag("--timings", an_timings, "include wall-clock timings in the report");
  an_grid.Register(anon);

  // verify
  auto* verify = app.add_subcommand("verify", "check k-anonymity of an anonymized CSV");
  std::string ver_in;
  std::size_t ver_k = 2;
  verify->add_option("--input", ver_in, "anonymized CSV")->required();
  verify->add_option("--k", ver_k)->required();

  // bench
  auto* bench = app.add_subcommand("bench", "sweep algorithm x k x seed into a CSV");
  std::string b_in, b_out, b_algos = "heuristic,kmeans,iterative-kmeans",
                           b_aligns = "progressive", b_ks = "2,5,10,15", b_seeds = "1";
  std::size_t b_synth_n = 500;
  GridFlags b_grid;
  bench->add_option("--input", b_in, "canonical CSV (default: synthetic dataset)");
  bench->add_option("--synthetic-n", b_synth_n, "synthetic dataset size")
      ->capture_default_str();
  bench->add_option("--algos", b_algos)->capture_default_str();
  bench->add_option("--aligns", b_aligns)->capture_default_str();
  bench->add_option("--k-list", b_ks)->capture_default_str();
  bench->add_option("--seeds", b_seeds)->capture_default_str();
  bench->add_option("--out", b_out, "results CSV")->required();
  b_grid.Register(bench);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    if (*ingest) {
      GridSpec grid = ingest_grid.Make();
      Dataset ds;
      nlohmann::ordered_json stats;
      if (format == "canonical") {
        ds = LoadCanonical(in_path, grid);
      } else if (format == "geolife" || format == "tdrive") {
        IngestResult raw = format == "geolife" ? IngestGeolife(in_path) : IngestTdrive(in_path);
        for (const auto& w : raw.warnings) err << "warning: " << w << '\n';
        std::size_t cropped_out = 0;
        if (!crop.empty()) {
          const auto box = ParseDoubles(crop, 4, "--crop");
          const std::size_t before = raw.records.size();
          raw.records = Crop(raw.records, box[0], box[1], box[2], box[3]);
          cropped_out = before - raw.records.size();
          if (ingest_grid.origin.empty()) {
            const auto sw = Unproject(LocalOffset{-box[2] / 2, -box[3] / 2}, box[0], box[1]);
            grid.origin_lat = sw.first;
            grid.origin_lon = sw.second;
          }
        }
        DiscretizeStats ds_stats;
        ds = Discretize(raw.records, grid, &ds_stats);
        stats["files"] = raw.files;
        stats["malformed_lines"] = raw.malformed_lines;
        stats["dropped_outside_crop"] = cropped_out;
        stats["dropped_outside_grid"] = ds_stats.dropped_outside;
      } else {
        throw UsageError("unknown --format '" + format + "'");
      }
      WriteFile(out_path, DatasetCsv(ds));
      nlohmann::ordered_json s;
      s["samples"] = ds.PointCount();
      s["trajectories"] = ds.size();
      s["avg_samples_per_trajectory"] =
          static_cast<double>(ds.PointCount()) / static_cast<double>(ds.size());
      if (!stats.is_null()) s.update(stats);
      WriteFile(stats_path.empty() ? out_path + ".stats.json" : stats_path, s.dump(2) + "\n");
      out << "wrote " << ds.size() << " trajectories (" << ds.PointCount() << " samples) to "
          << out_path << '\n';
      return kExitOk;
    }

    if (*synth) {
      SynthConfig cfg;
      cfg.num_trajectories = synth_n;
      cfg.seed = synth_seed;
      cfg.grid = synth_grid.Make();
      cfg.mean_length = synth_mean_len;
      cfg.max_length = synth_max_len;
      const Dataset ds = GenerateRandomWalks(cfg);
      WriteFile(synth_out, DatasetCsv(ds));
      out << "wrote " << ds.size() << " synthetic trajectories to " << synth_out << '\n';
      return kExitOk;
    }

    if (*anon) {
      if (an_k < 2) throw UsageError("--k must be at least 2");
      const PipelineConfig cfg =
          MakePipelineConfig(an_k, an_algo, an_align, an_order, an_eval, an_seed);
      const Dataset ds = LoadCanonical(an_in, an_grid.Make());
      const PipelineResult r = RunPipeline(ds, cfg);
      std::ostringstream csv;
      WriteAnonymizedCsv(csv, ds, r.anonymized);
      WriteFile(an_out, csv.str());
      const std::string report = ReportToJson(r.report, an_timings).dump(2) + "\n";
      if (!an_report.empty()) WriteFile(an_report, report);
      out << report;
      return kExitOk;
    }

    if (*verify) {
      std::ifstream in(ver_in);
      if (!in) throw Error(ErrorCode::kParse, "cannot read '" + ver_in + "'");
      const auto records = ReadAnonymizedCsv(in);
      std::vector<std::vector<std::array<std::string, 3>>> released;
      released.reserve(records.size());
      for (const auto& r : records) released.push_back(r.points);
      const KAnonymityCheck check = VerifyKAnonymity(released, ver_k);
      if (check.holds) {
        out << "k-anonymity holds for k = " << ver_k << " (" << records.size()
            << " trajectories)\n";
        return kExitOk;
      }
      out << "k-anonymity violated for k = " << ver_k << "; groups smaller than k:";
      for (std::size_t s : check.offending_group_sizes) out << ' ' << s;
      out << '\n';
      return kExitNotAnonymous;
    }

    if (*bench) {
      const auto ks = ParseList<std::size_t>(b_ks, "--k-list");
      const auto seeds = ParseList<std::uint64_t>(b_seeds, "--seeds");
      const auto algos = ParseNames(b_algos);
      const auto aligns = ParseNames(b_aligns);
      if (ks.empty()) throw UsageError("--k-list is empty");
      if (seeds.empty()) throw UsageError("--seeds is empty");
      if (algos.empty() || aligns.empty()) throw UsageError("--algos/--aligns is empty");
      for (const auto& a : algos) {
        if (!ParseAlgorithm(a)) throw UsageError("unknown algorithm '" + a + "'");
      }
      for (const auto& a : aligns) {
        if (!ParseAligner(a)) throw UsageError("unknown alignment '" + a + "'");
      }
      Dataset ds;
      if (b_in.empty()) {
        SynthConfig sc;
        sc.num_trajectories = b_synth_n;
        sc.grid = b_grid.Make();
        ds = GenerateRandomWalks(sc);
      } else {
        ds = LoadCanonical(b_in, b_grid.Make());
      }
      std::string csv = ReportCsvHeader() + "\n";
      std::size_t rows = 0;
      for (const auto& algo : algos) {
        for (const auto& align : aligns) {
          for (std::size_t k : ks) {
            for (std::uint64_t seed : seeds) {
              AnonymizationReport rep;
              try {
                rep = RunPipeline(ds, MakePipelineConfig(k, algo, align, "greedy",
                                                         "running-head", seed))
                          .report;
              } catch (const Error& e) {
                rep = AnonymizationReport{};
                rep.algorithm = algo;
                rep.alignment = align;
                rep.k = k;
                rep.seed = seed;
                rep.status = "failed";
                rep.error = e.what();
              }
              csv += ReportCsvRow(rep) + "\n";
              ++rows;
            }
          }
        }
      }
      WriteFile(b_out, csv);
      out << "wrote " << rows << " rows to " << b_out << '\n';
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace trajanon

#endif  // TRAJANON_CLI_HPP_
