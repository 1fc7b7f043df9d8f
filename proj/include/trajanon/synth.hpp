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

// Seeded random-walk trajectories on the grid, for tests and benchmarks.

#ifndef TRAJANON_SYNTH_HPP_
#define TRAJANON_SYNTH_HPP_

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "trajanon/error.hpp"
#include "trajanon/model.hpp"
#include "trajanon/random.hpp"

namespace trajanon {

struct SynthConfig {
  std::size_t num_trajectories = 500;
  std::uint64_t seed = 1;
  GridSpec grid;
  // Lengths are geometric with this mean, clipped to [1, max_length].
  double mean_length = 4.0;
  std::size_t max_length = 16;
  // Walks start near one of this many hotspots, at one of two rush hours.
  std::size_t hotspots = 6;
  std::int64_t hotspot_spread = 6;  // cells
  double move_probability = 0.7;
  double hour_advance_probability = 0.25;
};

inline Dataset GenerateRandomWalks(const SynthConfig& cfg) {
  cfg.grid.Validate();
  if (cfg.num_trajectories == 0 || cfg.max_length == 0 || cfg.hotspots == 0 ||
      !(cfg.mean_length >= 1)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid synthetic dataset configuration");
  }
  const Hierarchies h = cfg.grid.MakeHierarchies();
  const auto wx = static_cast<std::int64_t>(h.x.LeafCount());
  const auto wy = static_cast<std::int64_t>(h.y.LeafCount());
  const auto bins = std::min<std::int64_t>(
      static_cast<std::int64_t>(h.t.LeafCount()),
      static_cast<std::int64_t>(cfg.grid.period_s / cfg.grid.epsilon_t));
  Rng rng(cfg.seed);

  struct Spot {
    std::int64_t x, y;
  };
  std::vector<Spot> spots(cfg.hotspots);
  for (auto& s : spots) s = {rng.Between(0, wx - 1), rng.Between(0, wy - 1)};
  const std::int64_t rush[2] = {std::min<std::int64_t>(8, bins - 1),
                                std::min<std::int64_t>(18, bins - 1)};
  const double stop = 1.0 / cfg.mean_length;

  Dataset ds;
  ds.grid = cfg.grid;
  ds.trajectories.reserve(cfg.num_trajectories);
  for (std::size_t i = 0; i < cfg.num_trajectories; ++i) {
    std::size_t len = 1;
    while (len < cfg.max_length && !rng.Bernoulli(stop)) ++len;
    const Spot& s = spots[rng.Index(spots.size())];
    std::int64_t x = std::clamp<std::int64_t>(
        s.x + rng.Between(-cfg.hotspot_spread, cfg.hotspot_spread), 0, wx - 1);
    std::int64_t y = std::clamp<std::int64_t>(
        s.y + rng.Between(-cfg.hotspot_spread, cfg.hotspot_spread), 0, wy - 1);
    std::int64_t t = std::clamp<std::int64_t>(rush[rng.Index(2)] + rng.Between(-1, 1), 0,
                                              bins - 1);
    char id[32];
    std::snprintf(id, sizeof id, "s%06zu", i);
    Trajectory tr;
    tr.id = id;
    for (std::size_t p = 0; p < len; ++p) {
      tr.points.push_back(LeafPoint(h, static_cast<std::uint64_t>(x),
                                    static_cast<std::uint64_t>(y),
                                    static_cast<std::uint64_t>(t)));
      if (rng.Bernoulli(cfg.move_probability)) {
        x = std::clamp<std::int64_t>(x + rng.Between(-1, 1), 0, wx - 1);
        y = std::clamp<std::int64_t>(y + rng.Between(-1, 1), 0, wy - 1);
      }
      if (rng.Bernoulli(cfg.hour_advance_probability)) t = std::min(t + 1, bins - 1);
    }
    ds.trajectories.push_back(std::move(tr));
  }
  return ds;
}

}  // namespace trajanon

#endif  // TRAJANON_SYNTH_HPP_
