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

// Trajectory alignment under the bit-loss cost model.
//
// Merging two points costs the per-attribute LCA loss; aligning a point with
// a gap costs its suppression loss and releases a root point at that output
// position. Every member of an aligned group therefore maps onto the same
// released sequence.

#ifndef TRAJANON_ALIGN_HPP_
#define TRAJANON_ALIGN_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "trajanon/dgh.hpp"
#include "trajanon/error.hpp"
#include "trajanon/model.hpp"
#include "trajanon/random.hpp"

namespace trajanon {

inline constexpr std::int32_t kGap = -1;

// For one input sequence: released position -> input point index, or kGap.
using Structure = std::vector<std::int32_t>;

struct AlignmentResult {
  std::vector<Point> gen;
  // One entry per input, in input order.
  std::vector<Structure> structures;
  // Loss of the released sequence recomputed per member from gen+structures.
  Bits total_loss = 0;
  // Sum of the per-step DP table values. Equals total_loss for a pairwise
  // alignment; may differ for progressive alignment.
  Bits accumulated_loss = 0;
};

struct MergeCost {
  Point merged;
  Bits loss = 0;
};

inline MergeCost PointPairCost(const Hierarchies& h, const Point& p, const Point& q) {
  MergeCost c;
  c.merged = Point{h.x.Lca(p.x, q.x), h.y.Lca(p.y, q.y), h.t.Lca(p.t, q.t)};
  c.loss = h.x.PairLoss(p.x, q.x) + h.y.PairLoss(p.y, q.y) + h.t.PairLoss(p.t, q.t);
  return c;
}

inline Bits SuppressCost(const Hierarchies& h, const Point& p) {
  return h.x.SuppressionLoss(p.x) + h.y.SuppressionLoss(p.y) + h.t.SuppressionLoss(p.t);
}

inline Bits SuppressCost(const Hierarchies& h, std::span<const Point> points) {
  Bits total = 0;
  for (const auto& p : points) total += SuppressCost(h, p);
  return total;
}

// Checks that `s` maps `input_size` points monotonically onto `gen_size`
// released positions, each input point exactly once.
inline void ValidateStructure(const Structure& s, std::size_t input_size,
                              std::size_t gen_size) {
  if (s.size() != gen_size) {
    throw Error(ErrorCode::kInconsistentStructure,
                "structure length " + std::to_string(s.size()) +
                    " != released length " + std::to_string(gen_size));
  }
  std::int64_t next = 0;
  for (const std::int32_t idx : s) {
    if (idx == kGap) continue;
    if (idx != next) {
      throw Error(ErrorCode::kInconsistentStructure,
                  "structure is not a monotone cover of the input");
    }
    ++next;
  }
  if (static_cast<std::size_t>(next) != input_size) {
    throw Error(ErrorCode::kInconsistentStructure,
                "structure covers " + std::to_string(next) + " of " +
                    std::to_string(input_size) + " input points");
  }
}

// Generalization loss of one member against the released sequence, summed
// over all three attributes.
inline Bits StructureLoss(const Hierarchies& h, std::span<const Point> member,
                          std::span<const Point> gen, const Structure& s) {
  ValidateStructure(s, member.size(), gen.size());
  Bits loss = 0;
  for (std::size_t pos = 0; pos < s.size(); ++pos) {
    if (s[pos] == kGap) continue;
    const Point& p = member[static_cast<std::size_t>(s[pos])];
    const Point& g = gen[pos];
    try {
      loss += h.x.Ls(p.x, g.x) + h.y.Ls(p.y, g.y) + h.t.Ls(p.t, g.t);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNotAncestor) throw;
      throw Error(ErrorCode::kInconsistentStructure,
                  "released position " + std::to_string(pos) +
                      " does not generalize its member point");
    }
  }
  return loss;
}

namespace align_internal {

enum Move : std::uint8_t { kMerge = 0, kSkipSecond = 1, kSkipFirst = 2 };

}  // namespace align_internal

// Pairwise DP alignment. Cell (i, j) holds the least loss of aligning the
// first i points of `a` with the first j points of `b`. Ties prefer merge,
// then suppressing b's point, then suppressing a's point.
inline AlignmentResult DynamicSa(const Hierarchies& h, std::span<const Point> a,
                                 std::span<const Point> b) {
  using namespace align_internal;
  const std::size_t m = a.size();
  const std::size_t n = b.size();
  const std::size_t w = n + 1;
  std::vector<Bits> table((m + 1) * w, 0);
  std::vector<std::uint8_t> code((m + 1) * w, kMerge);
  std::vector<Bits> sup_a(m), sup_b(n);
  for (std::size_t i = 0; i < m; ++i) sup_a[i] = SuppressCost(h, a[i]);
  for (std::size_t j = 0; j < n; ++j) sup_b[j] = SuppressCost(h, b[j]);
  for (std::size_t i = 0; i < m; ++i) {
    table[(i + 1) * w] = table[i * w] + sup_a[i];
    code[(i + 1) * w] = kSkipFirst;
  }
  for (std::size_t j = 0; j < n; ++j) {
    table[j + 1] = table[j] + sup_b[j];
    code[j + 1] = kSkipSecond;
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Bits merge = table[i * w + j] + PointPairCost(h, a[i], b[j]).loss;
      const Bits skip_b = table[(i + 1) * w + j] + sup_b[j];
      const Bits skip_a = table[i * w + j + 1] + sup_a[i];
      Bits best = merge;
      std::uint8_t move = kMerge;
      if (skip_b < best) {
        best = skip_b;
        move = kSkipSecond;
      }
      if (skip_a < best) {
        best = skip_a;
        move = kSkipFirst;
      }
      table[(i + 1) * w + j + 1] = best;
      code[(i + 1) * w + j + 1] = move;
    }
  }

  AlignmentResult out;
  out.structures.assign(2, Structure{});
  Structure& sa = out.structures[0];
  Structure& sb = out.structures[1];
  const Point root = RootPoint(h);
  std::size_t i = m, j = n;
  while (i > 0 || j > 0) {
    const std::uint8_t move = code[i * w + j];
    if (move == kMerge && i > 0 && j > 0) {
      out.gen.push_back(PointPairCost(h, a[i - 1], b[j - 1]).merged);
      sa.push_back(static_cast<std::int32_t>(i - 1));
      sb.push_back(static_cast<std::int32_t>(j - 1));
      --i;
      --j;
    } else if (move == kSkipSecond && j > 0) {
      out.gen.push_back(root);
      sa.push_back(kGap);
      sb.push_back(static_cast<std::int32_t>(j - 1));
      --j;
    } else {
      out.gen.push_back(root);
      sa.push_back(static_cast<std::int32_t>(i - 1));
      sb.push_back(kGap);
      --i;
    }
  }
  std::reverse(out.gen.begin(), out.gen.end());
  std::reverse(sa.begin(), sa.end());
  std::reverse(sb.begin(), sb.end());
  out.total_loss = table[m * w + n];
  out.accumulated_loss = out.total_loss;
  return out;
}

// Loss-only DP in O(n) memory; same value as DynamicSa(...).total_loss.
inline Bits DynamicSaLoss(const Hierarchies& h, std::span<const Point> a,
                          std::span<const Point> b) {
  const std::size_t n = b.size();
  std::vector<Bits> prev(n + 1, 0), cur(n + 1, 0), sup_b(n);
  for (std::size_t j = 0; j < n; ++j) {
    sup_b[j] = SuppressCost(h, b[j]);
    prev[j + 1] = prev[j] + sup_b[j];
  }
  for (const Point& p : a) {
    const Bits sup_p = SuppressCost(h, p);
    cur[0] = prev[0] + sup_p;
    for (std::size_t j = 0; j < n; ++j) {
      const Bits merge = prev[j] + PointPairCost(h, p, b[j]).loss;
      cur[j + 1] = std::min({merge, cur[j] + sup_b[j], prev[j + 1] + sup_p});
    }
    std::swap(prev, cur);
  }
  return prev[n];
}

// Index-wise alignment: position i of one sequence is merged with position i
// of the other; the tail of the longer sequence is suppressed.
inline AlignmentResult StaticAlign(const Hierarchies& h, std::span<const Point> a,
                                   std::span<const Point> b) {
  const std::size_t common = std::min(a.size(), b.size());
  const std::size_t len = std::max(a.size(), b.size());
  AlignmentResult out;
  out.structures.assign(2, Structure(len, kGap));
  out.gen.reserve(len);
  const Point root = RootPoint(h);
  for (std::size_t i = 0; i < len; ++i) {
    if (i < common) {
      const MergeCost c = PointPairCost(h, a[i], b[i]);
      out.gen.push_back(c.merged);
      out.total_loss += c.loss;
    } else {
      out.gen.push_back(root);
      out.total_loss += SuppressCost(h, i < a.size() ? a[i] : b[i]);
    }
    if (i < a.size()) out.structures[0][i] = static_cast<std::int32_t>(i);
    if (i < b.size()) out.structures[1][i] = static_cast<std::int32_t>(i);
  }
  out.accumulated_loss = out.total_loss;
  return out;
}

inline Bits StaticAlignLoss(const Hierarchies& h, std::span<const Point> a,
                            std::span<const Point> b) {
  const std::size_t common = std::min(a.size(), b.size());
  Bits loss = 0;
  for (std::size_t i = 0; i < common; ++i) loss += PointPairCost(h, a[i], b[i]).loss;
  loss += SuppressCost(h, a.subspan(common));
  loss += SuppressCost(h, b.subspan(common));
  return loss;
}

enum class PairwiseAligner { kDynamic, kStatic };
enum class MemberOrder { kGreedy, kRandom };

struct ProgressiveOptions {
  PairwiseAligner aligner = PairwiseAligner::kDynamic;
  MemberOrder order = MemberOrder::kGreedy;
  std::uint64_t seed = 0;
};

// Folds the members one at a time into a running released sequence. The
// longest member (ties: smallest id) is the base; each following member is
// either the one with the least step loss against the running sequence
// (ties: smallest id) or a seeded uniform choice. Structures are returned in
// member order.
inline AlignmentResult ProgressiveSa(const Hierarchies& h,
                                     std::span<const Trajectory* const> members,
                                     const ProgressiveOptions& options = {}) {
  if (members.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot align an empty cluster");
  }
  auto align = [&](std::span<const Point> a, std::span<const Point> b) {
    return options.aligner == PairwiseAligner::kDynamic ? DynamicSa(h, a, b)
                                                        : StaticAlign(h, a, b);
  };
  auto step_loss = [&](std::span<const Point> a, std::span<const Point> b) {
    return options.aligner == PairwiseAligner::kDynamic ? DynamicSaLoss(h, a, b)
                                                        : StaticAlignLoss(h, a, b);
  };
  auto id_before = [&](std::size_t x, std::size_t y) {
    return members[x]->id < members[y]->id;
  };

  std::size_t base = 0;
  for (std::size_t i = 1; i < members.size(); ++i) {
    const std::size_t li = members[i]->size(), lb = members[base]->size();
    if (li > lb || (li == lb && id_before(i, base))) base = i;
  }

  AlignmentResult out;
  out.gen = members[base]->points;
  out.structures.assign(members.size(), Structure{});
  std::vector<bool> placed(members.size(), false);
  placed[base] = true;
  {
    Structure& s = out.structures[base];
    s.resize(out.gen.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<std::int32_t>(i);
  }
  std::vector<std::size_t> order{base};
  Rng rng(options.seed);

  for (std::size_t step = 1; step < members.size(); ++step) {
    std::size_t next = members.size();
    if (options.order == MemberOrder::kRandom) {
      std::vector<std::size_t> remaining;
      for (std::size_t i = 0; i < members.size(); ++i) {
        if (!placed[i]) remaining.push_back(i);
      }
      next = remaining[static_cast<std::size_t>(rng.Index(remaining.size()))];
    } else {
      Bits best = std::numeric_limits<Bits>::max();
      for (std::size_t i = 0; i < members.size(); ++i) {
        if (placed[i]) continue;
        const Bits loss = step_loss(out.gen, members[i]->points);
        if (loss < best || (loss == best && id_before(i, next))) {
          best = loss;
          next = i;
        }
      }
    }

    AlignmentResult pair = align(out.gen, members[next]->points);
    const Structure& via_running = pair.structures[0];
    for (const std::size_t member : order) {
      const Structure& old = out.structures[member];
      Structure composed(via_running.size(), kGap);
      for (std::size_t pos = 0; pos < via_running.size(); ++pos) {
        if (via_running[pos] != kGap) {
          composed[pos] = old[static_cast<std::size_t>(via_running[pos])];
        }
      }
      out.structures[member] = std::move(composed);
    }
    out.structures[next] = std::move(pair.structures[1]);
    out.gen = std::move(pair.gen);
    out.accumulated_loss += pair.total_loss;
    placed[next] = true;
    order.push_back(next);
  }

  for (std::size_t i = 0; i < members.size(); ++i) {
    out.total_loss += StructureLoss(h, members[i]->points, out.gen, out.structures[i]);
  }
  return out;
}

}  // namespace trajanon

#endif  // TRAJANON_ALIGN_HPP_
