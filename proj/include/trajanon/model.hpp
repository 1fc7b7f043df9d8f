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

// Grid/time discretization and the trajectory data model.

#ifndef TRAJANON_MODEL_HPP_
#define TRAJANON_MODEL_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <unordered_set>
#include <vector>

#include "trajanon/dgh.hpp"
#include "trajanon/error.hpp"

namespace trajanon {

struct GridSpec {
  double origin_lat = 39.9042;  // south-west corner of the extent
  double origin_lon = 116.4074;
  double epsilon = 10.0;        // cell edge, meters
  double epsilon_t = 3600.0;    // time-bin width, seconds
  double period_s = 86400.0;    // time-of-day folding period
  int bits_x = 7;
  int bits_y = 7;
  int bits_t = 5;

  void Validate() const {
    if (!(epsilon > 0) || !std::isfinite(epsilon)) {
      throw Error(ErrorCode::kInvalidGrid, "epsilon must be positive");
    }
    if (!(epsilon_t > 0) || !std::isfinite(epsilon_t)) {
      throw Error(ErrorCode::kInvalidGrid, "epsilon_t must be positive");
    }
    if (!(period_s > 0) || !std::isfinite(period_s)) {
      throw Error(ErrorCode::kInvalidGrid, "period must be positive");
    }
    for (int b : {bits_x, bits_y, bits_t}) {
      if (b < 1 || b > kMaxDghDepth) {
        throw Error(ErrorCode::kInvalidGrid,
                    "grid bits must be in [1, 32], got " + std::to_string(b));
      }
    }
    const double bins = std::ceil(period_s / epsilon_t);
    if (bins > std::ldexp(1.0, bits_t)) {
      throw Error(ErrorCode::kInvalidGrid,
                  std::to_string(static_cast<long long>(bins)) +
                      " time bins do not fit in " + std::to_string(bits_t) +
                      " bits");
    }
  }

  Hierarchies MakeHierarchies() const { return Hierarchies(bits_x, bits_y, bits_t); }

  double WidthMeters() const { return std::ldexp(epsilon, bits_x); }
  double HeightMeters() const { return std::ldexp(epsilon, bits_y); }
};

// A <x, y, t> triplet of DGH nodes. Input points are leaves; released points
// may be internal nodes or roots.
struct Point {
  Node x;
  Node y;
  Node t;

  const Node& operator[](Attribute a) const {
    switch (a) {
      case Attribute::kX: return x;
      case Attribute::kY: return y;
      case Attribute::kT: return t;
    }
    return x;
  }

  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;
};

inline Point RootPoint(const Hierarchies& h) {
  return Point{h.x.Root(), h.y.Root(), h.t.Root()};
}

inline Point LeafPoint(const Hierarchies& h, std::uint64_t x, std::uint64_t y,
                       std::uint64_t t) {
  return Point{h.x.Leaf(x), h.y.Leaf(y), h.t.Leaf(t)};
}

inline bool IsRoot(const Point& p) {
  return p.x.level == 0 && p.y.level == 0 && p.t.level == 0;
}

inline bool IsLeafPoint(const Hierarchies& h, const Point& p) {
  return h.x.IsLeaf(p.x) && h.y.IsLeaf(p.y) && h.t.IsLeaf(p.t);
}

struct Trajectory {
  std::string id;
  std::vector<Point> points;

  std::size_t size() const { return points.size(); }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct Dataset {
  std::vector<Trajectory> trajectories;
  GridSpec grid;

  std::size_t size() const { return trajectories.size(); }

  std::size_t PointCount() const {
    std::size_t n = 0;
    for (const auto& tr : trajectories) n += tr.size();
    return n;
  }

  // Unique IDs, non-empty, every trajectory non-empty with leaf points.
  void Validate() const {
    grid.Validate();
    if (trajectories.empty()) {
      throw Error(ErrorCode::kEmptyDataset, "dataset has no trajectories");
    }
    const Hierarchies h = grid.MakeHierarchies();
    std::unordered_set<std::string> ids;
    for (const auto& tr : trajectories) {
      if (!ids.insert(tr.id).second) {
        throw Error(ErrorCode::kInvalidArgument, "duplicate trajectory id '" + tr.id + "'");
      }
      if (tr.points.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "trajectory '" + tr.id + "' is empty");
      }
      for (const auto& p : tr.points) {
        if (!IsLeafPoint(h, p)) {
          throw Error(ErrorCode::kInvalidArgument,
                      "trajectory '" + tr.id + "' has a non-leaf point");
        }
      }
    }
  }
};

struct RawRecord {
  std::string id;  // user or taxi identifier
  double latitude = 0;
  double longitude = 0;
  std::int64_t timestamp = 0;  // UTC seconds since the epoch

  friend bool operator==(const RawRecord&, const RawRecord&) = default;
};

inline constexpr double kEarthRadiusMeters = 6371008.8;

// Local equirectangular projection: meters east and north of the reference.
struct LocalOffset {
  double east = 0;
  double north = 0;
};

inline LocalOffset Project(double lat, double lon, double ref_lat, double ref_lon) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  return LocalOffset{
      (lon - ref_lon) * kDeg * std::cos(ref_lat * kDeg) * kEarthRadiusMeters,
      (lat - ref_lat) * kDeg * kEarthRadiusMeters};
}

// Inverse of Project.
inline std::pair<double, double> Unproject(const LocalOffset& off, double ref_lat,
                                           double ref_lon) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  const double lat = ref_lat + off.north / (kDeg * kEarthRadiusMeters);
  const double lon =
      ref_lon + off.east / (kDeg * std::cos(ref_lat * kDeg) * kEarthRadiusMeters);
  return {lat, lon};
}

// Keeps records whose projected position lies in the box of the given size
// centred on (center_lat, center_lon). Box edges are inclusive.
inline std::vector<RawRecord> Crop(const std::vector<RawRecord>& records,
                                   double center_lat, double center_lon,
                                   double width_m, double height_m) {
  if (!(width_m > 0) || !(height_m > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "crop width and height must be positive");
  }
  std::vector<RawRecord> kept;
  for (const auto& r : records) {
    const LocalOffset o = Project(r.latitude, r.longitude, center_lat, center_lon);
    if (std::abs(o.east) <= width_m / 2 && std::abs(o.north) <= height_m / 2) {
      kept.push_back(r);
    }
  }
  return kept;
}

struct DiscretizeStats {
  std::size_t input_records = 0;
  std::size_t kept_records = 0;
  std::size_t dropped_outside = 0;
};

inline std::int64_t TimeBin(std::int64_t timestamp, const GridSpec& grid) {
  double tod = std::fmod(static_cast<double>(timestamp), grid.period_s);
  if (tod < 0) tod += grid.period_s;
  return static_cast<std::int64_t>(std::floor(tod / grid.epsilon_t));
}

// Maps records to leaf triplets; one trajectory per record id, ordered by
// timestamp with ties kept in input order. Trajectories appear in order of
// first occurrence of their id.
inline Dataset Discretize(const std::vector<RawRecord>& records, const GridSpec& grid,
                          DiscretizeStats* stats = nullptr) {
  grid.Validate();
  const Hierarchies h = grid.MakeHierarchies();
  struct Pending {
    std::int64_t timestamp;
    Point point;
  };
  std::map<std::string, std::size_t> slot;
  std::vector<std::string> order;
  std::vector<std::vector<Pending>> grouped;
  DiscretizeStats local;
  local.input_records = records.size();
  for (const auto& r : records) {
    const LocalOffset o = Project(r.latitude, r.longitude, grid.origin_lat, grid.origin_lon);
    const double cx = std::floor(o.east / grid.epsilon);
    const double cy = std::floor(o.north / grid.epsilon);
    if (cx < 0 || cy < 0 || cx >= std::ldexp(1.0, grid.bits_x) ||
        cy >= std::ldexp(1.0, grid.bits_y)) {
      ++local.dropped_outside;
      continue;
    }
    const std::int64_t tb = TimeBin(r.timestamp, grid);
    if (tb < 0 || static_cast<std::uint64_t>(tb) >= h.t.LeafCount()) {
      ++local.dropped_outside;
      continue;
    }
    auto [it, inserted] = slot.try_emplace(r.id, grouped.size());
    if (inserted) {
      order.push_back(r.id);
      grouped.emplace_back();
    }
    grouped[it->second].push_back(
        {r.timestamp, LeafPoint(h, static_cast<std::uint64_t>(cx),
                                static_cast<std::uint64_t>(cy),
                                static_cast<std::uint64_t>(tb))});
    ++local.kept_records;
  }
  if (stats != nullptr) *stats = local;
  if (grouped.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "no records inside the grid extent");
  }
  Dataset ds;
  ds.grid = grid;
  ds.trajectories.reserve(grouped.size());
  for (std::size_t i = 0; i < grouped.size(); ++i) {
    auto& recs = grouped[i];
    std::stable_sort(recs.begin(), recs.end(), [](const Pending& a, const Pending& b) {
      return a.timestamp < b.timestamp;
    });
    Trajectory tr;
    tr.id = order[i];
    tr.points.reserve(recs.size());
    for (const auto& p : recs) tr.points.push_back(p.point);
    ds.trajectories.push_back(std::move(tr));
  }
  return ds;
}

// Geographic centre of a leaf cell, for round-tripping binned data.
inline std::pair<double, double> CellCenter(const GridSpec& grid, std::uint64_t cx,
                                            std::uint64_t cy) {
  return Unproject(LocalOffset{(static_cast<double>(cx) + 0.5) * grid.epsilon,
                               (static_cast<double>(cy) + 0.5) * grid.epsilon},
                   grid.origin_lat, grid.origin_lon);
}

}  // namespace trajanon

#endif  // TRAJANON_MODEL_HPP_
