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

// Utility and privacy measurements of an anonymized dataset.

#ifndef TRAJANON_METRICS_HPP_
#define TRAJANON_METRICS_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "trajanon/align.hpp"
#include "trajanon/cluster.hpp"
#include "trajanon/dgh.hpp"
#include "trajanon/error.hpp"
#include "trajanon/model.hpp"

namespace trajanon {

struct LossBreakdown {
  Bits x = 0;
  Bits y = 0;
  Bits t = 0;

  Bits Total() const { return x + y + t; }

  Bits& operator[](Attribute a) {
    switch (a) {
      case Attribute::kX: return x;
      case Attribute::kY: return y;
      case Attribute::kT: return t;
    }
    return x;
  }

  friend bool operator==(const LossBreakdown&, const LossBreakdown&) = default;
};

// Loss on one attribute of generalizing `original` into `released` along
// `structure`. Gap positions contribute nothing for this member.
inline Bits TrajectoryLoss(const Hierarchies& h, std::span<const Point> original,
                           std::span<const Point> released, const Structure& structure,
                           Attribute attribute) {
  ValidateStructure(structure, original.size(), released.size());
  const DghTree& tree = h[attribute];
  Bits loss = 0;
  for (std::size_t pos = 0; pos < structure.size(); ++pos) {
    if (structure[pos] == kGap) continue;
    const Node& from = original[static_cast<std::size_t>(structure[pos])][attribute];
    const Node& to = released[pos][attribute];
    if (!tree.IsAncestorOrSelf(to, from)) {
      throw Error(ErrorCode::kInconsistentStructure,
                  "released position " + std::to_string(pos) +
                      " does not generalize the mapped point");
    }
    loss += tree.Ls(from, to);
  }
  return loss;
}

inline LossBreakdown DatasetLoss(const Dataset& ds, const AnonymizedDataset& anon) {
  if (anon.trajectories.size() != ds.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "released dataset has " + std::to_string(anon.trajectories.size()) +
                    " trajectories, original has " + std::to_string(ds.size()));
  }
  const Hierarchies h = ds.grid.MakeHierarchies();
  LossBreakdown out;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (Attribute a : kAttributes) {
      out[a] += TrajectoryLoss(h, ds.trajectories[i].points, anon.Released(i),
                               anon.trajectories[i].structure, a);
    }
  }
  return out;
}

// Loss of suppressing every original point: an upper bound for any release.
inline Bits FullSuppressionBits(const Dataset& ds) {
  const Hierarchies h = ds.grid.MakeHierarchies();
  Bits total = 0;
  for (const auto& tr : ds.trajectories) total += SuppressCost(h, tr.points);
  return total;
}

struct LossDecomposition {
  Bits part_a = 0;  // distance of originals from the roots
  Bits part_b = 0;  // distance of the released heads from the roots
  // Mapped positions where the head does not generalize the member point.
  std::size_t violations = 0;
};

// part_a - part_b reproduces the dataset loss whenever violations == 0.
inline LossDecomposition DecomposeLoss(const Dataset& ds, const AnonymizedDataset& anon) {
  const Hierarchies h = ds.grid.MakeHierarchies();
  LossDecomposition out;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& orig = ds.trajectories[i].points;
    const auto& head = anon.Released(i);
    const Structure& s = anon.trajectories[i].structure;
    out.part_a += SuppressCost(h, orig);
    for (std::size_t pos = 0; pos < s.size(); ++pos) {
      out.part_b += SuppressCost(h, head[pos]);
      if (s[pos] == kGap) continue;
      const Point& p = orig[static_cast<std::size_t>(s[pos])];
      for (Attribute a : kAttributes) {
        if (!h[a].IsAncestorOrSelf(head[pos][a], p[a])) ++out.violations;
      }
    }
  }
  return out;
}

// Spatial extent of a released point, m^2. Time does not contribute.
inline double ReleasedArea(const Hierarchies& h, const Point& gp, const GridSpec& grid) {
  return static_cast<double>(h.x.Lf(gp.x)) * grid.epsilon *
         (static_cast<double>(h.y.Lf(gp.y)) * grid.epsilon);
}

// Mean released area over every original location, i.e. every non-gap
// position of every member. Summed in exact integer cell counts.
inline double AvgAreaPerLocation(const Dataset& ds, const AnonymizedDataset& anon) {
  const Hierarchies h = ds.grid.MakeHierarchies();
  unsigned __int128 cells = 0;
  std::uint64_t locations = 0;
  for (std::size_t i = 0; i < anon.trajectories.size(); ++i) {
    const auto& head = anon.Released(i);
    const Structure& s = anon.trajectories[i].structure;
    for (std::size_t pos = 0; pos < s.size(); ++pos) {
      if (s[pos] == kGap) continue;
      cells += static_cast<unsigned __int128>(h.x.Lf(head[pos].x)) * h.y.Lf(head[pos].y);
      ++locations;
    }
  }
  if (locations == 0) {
    throw Error(ErrorCode::kEmptyDataset, "no released locations");
  }
  const long double mean_cells =
      static_cast<long double>(cells) / static_cast<long double>(locations);
  const long double eps = ds.grid.epsilon;
  return static_cast<double>(mean_cells * eps * eps);
}

struct KAnonymityCheck {
  bool holds = true;
  // Sizes of the equality groups smaller than k, ascending.
  std::vector<std::size_t> offending_group_sizes;
};

// Size of each trajectory's exact-equality group. `Seq` is any ordered
// sequence (points, or label strings read back from a file).
template <typename Seq>
std::vector<std::size_t> EqualityGroupSizes(const std::vector<Seq>& released) {
  std::map<Seq, std::size_t> counts;
  for (const auto& r : released) ++counts[r];
  std::vector<std::size_t> out;
  out.reserve(released.size());
  for (const auto& r : released) out.push_back(counts[r]);
  return out;
}

template <typename Seq>
KAnonymityCheck VerifyKAnonymity(const std::vector<Seq>& released, std::size_t k) {
  std::map<Seq, std::size_t> counts;
  for (const auto& r : released) ++counts[r];
  KAnonymityCheck out;
  for (const auto& [seq, n] : counts) {
    if (n < k) out.offending_group_sizes.push_back(n);
  }
  std::sort(out.offending_group_sizes.begin(), out.offending_group_sizes.end());
  out.holds = out.offending_group_sizes.empty();
  return out;
}

struct AchievedKStats {
  double avg_achieved_k = 0;
  double pct_under_k = 0;
  std::size_t min_group_size = 0;
};

template <typename Seq>
AchievedKStats ComputeAchievedK(const std::vector<Seq>& released, std::size_t k) {
  AchievedKStats out;
  if (released.empty()) return out;
  const auto sizes = EqualityGroupSizes(released);
  std::uint64_t sum = 0;
  std::size_t under = 0;
  out.min_group_size = sizes.front();
  for (std::size_t s : sizes) {
    sum += s;
    if (s < k) ++under;
    out.min_group_size = std::min(out.min_group_size, s);
  }
  out.avg_achieved_k = static_cast<double>(sum) / static_cast<double>(sizes.size());
  out.pct_under_k = 100.0 * static_cast<double>(under) / static_cast<double>(sizes.size());
  return out;
}

// Released point sequence per original trajectory, in dataset order.
inline std::vector<std::vector<Point>> ReleasedSequences(const AnonymizedDataset& anon) {
  std::vector<std::vector<Point>> out;
  out.reserve(anon.trajectories.size());
  for (std::size_t i = 0; i < anon.trajectories.size(); ++i) out.push_back(anon.Released(i));
  return out;
}

// Mean of |released| - |original| over members; root positions count.
inline double AvgLengthIncrease(const Dataset& ds, const AnonymizedDataset& anon) {
  if (anon.trajectories.size() != ds.size()) {
    throw Error(ErrorCode::kInvalidArgument, "released/original cardinality mismatch");
  }
  if (ds.size() == 0) return 0;
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    sum += static_cast<std::int64_t>(anon.Released(i).size()) -
           static_cast<std::int64_t>(ds.trajectories[i].size());
  }
  return static_cast<double>(sum) / static_cast<double>(ds.size());
}

}  // namespace trajanon

#endif  // TRAJANON_METRICS_HPP_
