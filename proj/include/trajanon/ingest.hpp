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

// Readers for Geolife .plt and T-Drive .txt logs, and the canonical point CSV.
//
// Geolife: <root>/<user>/Trajectory/<stamp>.plt, six header lines, then
//   lat,lon,0,altitude_ft,serial_days,YYYY-MM-DD,HH:MM:SS
// T-Drive: <root>/<taxi>.txt, one sample per line
//   taxi_id,YYYY-MM-DD HH:MM:SS,lon,lat
// Canonical: traj_id,x_label,y_label,t_label with one row per point.

#ifndef TRAJANON_INGEST_HPP_
#define TRAJANON_INGEST_HPP_

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "trajanon/error.hpp"
#include "trajanon/model.hpp"

namespace trajanon {

struct IngestResult {
  std::vector<RawRecord> records;
  std::size_t files = 0;
  std::size_t malformed_lines = 0;
  std::vector<std::string> warnings;
};

namespace ingest_internal {

inline std::vector<std::string_view> SplitCsv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::optional<double> ParseDouble(std::string_view s) {
  s = Trim(s);
  if (s.empty()) return std::nullopt;
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

inline std::optional<int> ParseInt(std::string_view s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// "YYYY-MM-DD" and "HH:MM:SS" to UTC seconds; nullopt when out of range.
inline std::optional<std::int64_t> ParseUtc(std::string_view date, std::string_view time) {
  date = Trim(date);
  time = Trim(time);
  if (date.size() != 10 || date[4] != '-' || date[7] != '-') return std::nullopt;
  if (time.size() != 8 || time[2] != ':' || time[5] != ':') return std::nullopt;
  const auto y = ParseInt(date.substr(0, 4));
  const auto mo = ParseInt(date.substr(5, 2));
  const auto d = ParseInt(date.substr(8, 2));
  const auto hh = ParseInt(time.substr(0, 2));
  const auto mm = ParseInt(time.substr(3, 2));
  const auto ss = ParseInt(time.substr(6, 2));
  if (!y || !mo || !d || !hh || !mm || !ss) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year(*y),
                                        std::chrono::month(static_cast<unsigned>(*mo)),
                                        std::chrono::day(static_cast<unsigned>(*d))};
  if (!ymd.ok() || *hh < 0 || *hh > 23 || *mm < 0 || *mm > 59 || *ss < 0 || *ss > 59) {
    return std::nullopt;
  }
  const auto days = std::chrono::sys_days(ymd).time_since_epoch().count();
  return static_cast<std::int64_t>(days) * 86400 + *hh * 3600 + *mm * 60 + *ss;
}

inline bool ValidLatLon(double lat, double lon) {
  return lat >= -90 && lat <= 90 && lon >= -180 && lon <= 180;
}

inline std::vector<std::filesystem::path> ListFiles(const std::filesystem::path& root,
                                                    std::string_view extension) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::exists(root, ec)) {
    throw Error(ErrorCode::kIngest, "input path '" + root.string() + "' does not exist");
  }
  std::vector<fs::path> files;
  if (fs::is_regular_file(root, ec)) {
    files.push_back(root);
    return files;
  }
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().extension() == extension) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

inline void Warn(IngestResult& out, const std::string& where, const std::string& what) {
  out.warnings.push_back(where + ": " + what);
}

}  // namespace ingest_internal

// Parses one Geolife .plt stream. `id` is assigned to every record.
inline void ParseGeolifePlt(std::istream& in, const std::string& id,
                            const std::string& source, IngestResult& out) {
  using namespace ingest_internal;
  std::string line;
  std::size_t line_no = 0;
  std::size_t emitted = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no <= 6) continue;
    const std::string_view body = Trim(line);
    if (body.empty()) continue;
    const auto f = SplitCsv(body);
    const std::string where = source + ":" + std::to_string(line_no);
    if (f.size() != 7) {
      ++out.malformed_lines;
      Warn(out, where, "expected 7 fields, got " + std::to_string(f.size()));
      continue;
    }
    const auto lat = ParseDouble(f[0]);
    const auto lon = ParseDouble(f[1]);
    const auto ts = ParseUtc(f[5], f[6]);
    if (!lat || !lon || !ts || !ValidLatLon(*lat, *lon)) {
      ++out.malformed_lines;
      Warn(out, where, "unparseable or out-of-range sample");
      continue;
    }
    out.records.push_back(RawRecord{id, *lat, *lon, *ts});
    ++emitted;
  }
  if (emitted == 0) Warn(out, source, "no samples after header");
}

// Parses one T-Drive stream; the record id comes from the first field.
inline void ParseTdriveTxt(std::istream& in, const std::string& source,
                           IngestResult& out) {
  using namespace ingest_internal;
  std::string line;
  std::size_t line_no = 0;
  std::size_t emitted = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = Trim(line);
    if (body.empty()) continue;
    const auto f = SplitCsv(body);
    const std::string where = source + ":" + std::to_string(line_no);
    if (f.size() != 4) {
      ++out.malformed_lines;
      Warn(out, where, "expected 4 fields, got " + std::to_string(f.size()));
      continue;
    }
    const std::string_view stamp = Trim(f[1]);
    const std::size_t space = stamp.find(' ');
    const auto ts = space == std::string_view::npos
                        ? std::nullopt
                        : ParseUtc(stamp.substr(0, space), stamp.substr(space + 1));
    const auto lon = ParseDouble(f[2]);
    const auto lat = ParseDouble(f[3]);
    const std::string_view id = Trim(f[0]);
    if (id.empty() || !lat || !lon || !ts || !ValidLatLon(*lat, *lon)) {
      ++out.malformed_lines;
      Warn(out, where, "unparseable or out-of-range sample");
      continue;
    }
    out.records.push_back(RawRecord{std::string(id), *lat, *lon, *ts});
    ++emitted;
  }
  if (emitted == 0) Warn(out, source, "no samples");
}

// Each .plt file is one trip; its record id is "<user>/<file stem>", where
// user is the directory above "Trajectory" (or the parent directory).
inline IngestResult IngestGeolife(const std::filesystem::path& root) {
  IngestResult out;
  for (const auto& file : ingest_internal::ListFiles(root, ".plt")) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorCode::kIngest, "cannot read '" + file.string() + "'");
    auto dir = file.parent_path();
    if (dir.filename() == "Trajectory") dir = dir.parent_path();
    const std::string user = dir.filename().string();
    ParseGeolifePlt(in, user + "/" + file.stem().string(), file.string(), out);
    if (in.bad()) throw Error(ErrorCode::kIngest, "read error in '" + file.string() + "'");
    ++out.files;
  }
  return out;
}

inline IngestResult IngestTdrive(const std::filesystem::path& root) {
  IngestResult out;
  for (const auto& file : ingest_internal::ListFiles(root, ".txt")) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorCode::kIngest, "cannot read '" + file.string() + "'");
    ParseTdriveTxt(in, file.string(), out);
    if (in.bad()) throw Error(ErrorCode::kIngest, "read error in '" + file.string() + "'");
    ++out.files;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Canonical CSV

inline constexpr std::string_view kCanonicalHeader = "traj_id,x_label,y_label,t_label";
inline constexpr std::string_view kAnonymizedHeader =
    "traj_id,cluster_id,x_label,y_label,t_label";

// Root is written as "*" so that no field is empty.
inline std::string CsvLabel(const DghTree& tree, const Node& n) {
  return n.level == 0 ? std::string("*") : tree.Label(n);
}

inline void CheckCsvId(const std::string& id) {
  if (id.empty() || id.find_first_of(",\r\n") != std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument,
                "trajectory id '" + id + "' cannot be written to CSV");
  }
}

inline void WriteCanonicalCsv(std::ostream& out, const Dataset& ds) {
  const Hierarchies h = ds.grid.MakeHierarchies();
  out << kCanonicalHeader << '\n';
  for (const auto& tr : ds.trajectories) {
    CheckCsvId(tr.id);
    for (const auto& p : tr.points) {
      out << tr.id << ',' << CsvLabel(h.x, p.x) << ',' << CsvLabel(h.y, p.y) << ','
          << CsvLabel(h.t, p.t) << '\n';
    }
  }
}

// Tree depths are taken from the label lengths (input points are leaves);
// the remaining grid parameters come from `grid`. Rows of one trajectory
// must be contiguous.
inline Dataset ReadCanonicalCsv(std::istream& in, GridSpec grid) {
  using namespace ingest_internal;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || Trim(line) != kCanonicalHeader) {
    throw Error(ErrorCode::kParse, "missing canonical CSV header");
  }
  ++line_no;
  struct Row {
    std::string id;
    std::string labels[3];
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = Trim(line);
    if (body.empty()) continue;
    const auto f = SplitCsv(body);
    if (f.size() != 4 || f[0].empty()) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) +
                                         ": expected traj_id,x_label,y_label,t_label");
    }
    rows.push_back(Row{std::string(f[0]), {std::string(f[1]), std::string(f[2]),
                                           std::string(f[3])}});
  }
  if (rows.empty()) throw Error(ErrorCode::kEmptyDataset, "canonical CSV has no rows");
  grid.bits_x = static_cast<int>(rows.front().labels[0].size());
  grid.bits_y = static_cast<int>(rows.front().labels[1].size());
  grid.bits_t = static_cast<int>(rows.front().labels[2].size());
  try {
    grid.Validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
  const Hierarchies h = grid.MakeHierarchies();
  Dataset ds;
  ds.grid = grid;
  std::map<std::string, bool> seen;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    if (ds.trajectories.empty() || ds.trajectories.back().id != r.id) {
      if (seen.count(r.id)) {
        throw Error(ErrorCode::kParse, "rows of trajectory '" + r.id + "' are not contiguous");
      }
      seen[r.id] = true;
      ds.trajectories.push_back(Trajectory{r.id, {}});
    }
    Point p;
    try {
      p = Point{h.x.Parse(r.labels[0]), h.y.Parse(r.labels[1]), h.t.Parse(r.labels[2])};
    } catch (const Error& e) {
      throw Error(ErrorCode::kParse, "row " + std::to_string(i + 2) + ": " + e.what());
    }
    if (!IsLeafPoint(h, p)) {
      throw Error(ErrorCode::kParse,
                  "row " + std::to_string(i + 2) + ": labels must all be full-depth leaves");
    }
    ds.trajectories.back().points.push_back(p);
  }
  return ds;
}

// A released trajectory as read back from an anonymized CSV: label strings
// only, since generalized labels do not reveal the tree depth.
struct ReleasedRecord {
  std::string id;
  std::string cluster_id;
  std::vector<std::array<std::string, 3>> points;
};

inline std::vector<ReleasedRecord> ReadAnonymizedCsv(std::istream& in) {
  using namespace ingest_internal;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || Trim(line) != kAnonymizedHeader) {
    throw Error(ErrorCode::kParse, "missing anonymized CSV header");
  }
  ++line_no;
  std::vector<ReleasedRecord> out;
  std::map<std::string, std::size_t> index;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = Trim(line);
    if (body.empty()) continue;
    const auto f = SplitCsv(body);
    if (f.size() != 5 || f[0].empty()) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) +
                                         ": expected traj_id,cluster_id,x,y,t");
    }
    for (std::size_t c = 2; c < 5; ++c) {
      for (char ch : f[c]) {
        if (ch != '0' && ch != '1' && ch != '*') {
          throw Error(ErrorCode::kParse,
                      "line " + std::to_string(line_no) + ": bad label '" +
                          std::string(f[c]) + "'");
        }
      }
    }
    const std::string id(f[0]);
    auto [it, inserted] = index.try_emplace(id, out.size());
    if (inserted) out.push_back(ReleasedRecord{id, std::string(f[1]), {}});
    out[it->second].points.push_back(
        {std::string(f[2]), std::string(f[3]), std::string(f[4])});
  }
  return out;
}

}  // namespace trajanon

#endif  // TRAJANON_INGEST_HPP_
