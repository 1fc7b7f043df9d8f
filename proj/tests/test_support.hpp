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

// Shared generators and independent reference implementations for tests.
// The reference code works on raw (level, prefix) integers and never calls
// the library's loss or alignment routines.

#ifndef TRAJANON_TESTS_TEST_SUPPORT_HPP_
#define TRAJANON_TESTS_TEST_SUPPORT_HPP_

#include <cstdint>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "trajanon/cluster.hpp"
#include "trajanon/dgh.hpp"
#include "trajanon/error.hpp"
#include "trajanon/model.hpp"

namespace trajanon::testing {

// ---------------------------------------------------------------------------
// Generators

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t Below(std::uint64_t n) { return eng_() % n; }
  bool Coin(unsigned percent) { return Below(100) < percent; }

  // Any node of the tree; leaves with probability leaf_pct, otherwise a
  // uniform level (root included).
  Node AnyNode(const DghTree& t, unsigned leaf_pct = 60) {
    const int level = Coin(leaf_pct) ? t.depth() : static_cast<int>(Below(t.depth() + 1));
    const std::uint64_t prefix = level == 0 ? 0 : Below(std::uint64_t{1} << level);
    return Node{t.attribute(), static_cast<std::uint8_t>(level),
                static_cast<std::uint32_t>(prefix)};
  }

  Point AnyPoint(const Hierarchies& h, unsigned leaf_pct = 60) {
    return Point{AnyNode(h.x, leaf_pct), AnyNode(h.y, leaf_pct), AnyNode(h.t, leaf_pct)};
  }

  Point AnyLeaf(const Hierarchies& h) { return AnyPoint(h, 100); }

  std::vector<Point> Sequence(const Hierarchies& h, std::size_t max_len,
                              unsigned leaf_pct = 60) {
    std::vector<Point> s(1 + Below(max_len));
    for (auto& p : s) p = AnyPoint(h, leaf_pct);
    return s;
  }

 private:
  std::mt19937_64 eng_;
};

inline std::string TestId(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "t%04zu", i);
  return buf;
}

// ---------------------------------------------------------------------------
// Reference DGH arithmetic

inline Node RefLca(Node a, Node b) {
  while (a.level > b.level) {
    a.prefix >>= 1;
    --a.level;
  }
  while (b.level > a.level) {
    b.prefix >>= 1;
    --b.level;
  }
  while (a.prefix != b.prefix) {
    a.prefix >>= 1;
    b.prefix >>= 1;
    --a.level;
    --b.level;
  }
  return a;
}

inline bool RefCovers(Node anc, Node desc) {
  if (anc.level > desc.level) return false;
  while (desc.level > anc.level) {
    desc.prefix >>= 1;
    --desc.level;
  }
  return desc.prefix == anc.prefix;
}

// log2(lf(anc) / lf(desc)) computed from leaf counts.
inline std::int64_t RefLs(const DghTree& t, Node desc, Node anc) {
  const std::uint64_t lf_desc = std::uint64_t{1} << (t.depth() - desc.level);
  const std::uint64_t lf_anc = std::uint64_t{1} << (t.depth() - anc.level);
  std::uint64_t ratio = lf_anc / lf_desc;
  std::int64_t bits = 0;
  while (ratio > 1) {
    ratio >>= 1;
    ++bits;
  }
  return bits;
}

inline std::int64_t RefMerge(const Hierarchies& h, const Point& p, const Point& q) {
  std::int64_t loss = 0;
  for (int a = 0; a < 3; ++a) {
    const DghTree& t = a == 0 ? h.x : a == 1 ? h.y : h.t;
    const Node np = a == 0 ? p.x : a == 1 ? p.y : p.t;
    const Node nq = a == 0 ? q.x : a == 1 ? q.y : q.t;
    const Node l = RefLca(np, nq);
    loss += RefLs(t, np, l) + RefLs(t, nq, l);
  }
  return loss;
}

inline std::int64_t RefSuppress(const Hierarchies& h, const Point& p) {
  return RefLs(h.x, p.x, h.x.Root()) + RefLs(h.y, p.y, h.y.Root()) +
         RefLs(h.t, p.t, h.t.Root());
}

// Least loss over every alignment of a and b, by explicit enumeration of
// merge / drop-a / drop-b operation strings.
inline std::int64_t BruteForcePairLoss(const Hierarchies& h, const std::vector<Point>& a,
                                       const std::vector<Point>& b) {
  if (a.size() > 6 || b.size() > 6) {
    throw Error(ErrorCode::kSizeLimit, "brute-force oracle is limited to length 6");
  }
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  std::vector<int> ops;
  auto score = [&] {
    std::size_t i = 0, j = 0;
    std::int64_t loss = 0;
    for (int op : ops) {
      if (op == 0) {
        loss += RefMerge(h, a[i++], b[j++]);
      } else if (op == 1) {
        loss += RefSuppress(h, a[i++]);
      } else {
        loss += RefSuppress(h, b[j++]);
      }
    }
    return loss;
  };
  auto rec = [&](auto&& self, std::size_t i, std::size_t j) -> void {
    if (i == a.size() && j == b.size()) {
      best = std::min(best, score());
      return;
    }
    if (i < a.size() && j < b.size()) {
      ops.push_back(0);
      self(self, i + 1, j + 1);
      ops.pop_back();
    }
    if (i < a.size()) {
      ops.push_back(1);
      self(self, i + 1, j);
      ops.pop_back();
    }
    if (j < b.size()) {
      ops.push_back(2);
      self(self, i, j + 1);
      ops.pop_back();
    }
  };
  rec(rec, 0, 0);
  return best;
}

// Dataset loss by walking every member position: level distance between the
// original point and the released point, per attribute.
inline std::int64_t NaiveDatasetLoss(const Dataset& ds, const AnonymizedDataset& anon) {
  std::int64_t total = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& orig = ds.trajectories[i].points;
    const auto& rel = anon.Released(i);
    const auto& s = anon.trajectories[i].structure;
    std::vector<int> seen(orig.size(), 0);
    for (std::size_t pos = 0; pos < s.size(); ++pos) {
      if (s[pos] < 0) continue;
      const Point& p = orig.at(static_cast<std::size_t>(s[pos]));
      const Point& g = rel.at(pos);
      ++seen[static_cast<std::size_t>(s[pos])];
      const Node ps[3] = {p.x, p.y, p.t};
      const Node gs[3] = {g.x, g.y, g.t};
      for (int a = 0; a < 3; ++a) {
        if (!RefCovers(gs[a], ps[a])) return -1;
        total += ps[a].level - gs[a].level;
      }
    }
    for (int c : seen) {
      if (c != 1) return -1;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Datasets

inline Dataset MakeDataset(const GridSpec& grid,
                           const std::vector<std::vector<Point>>& sequences) {
  Dataset ds;
  ds.grid = grid;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    ds.trajectories.push_back(Trajectory{TestId(i), sequences[i]});
  }
  return ds;
}

inline GridSpec SmallGrid(int bx = 3, int by = 3, int bt = 3) {
  GridSpec g;
  g.bits_x = bx;
  g.bits_y = by;
  g.bits_t = bt;
  g.epsilon_t = 86400.0 / (1 << bt);
  return g;
}

// m groups of k identical leaf trajectories; group g has length g + 1 so the
// groups differ in every feature component.
inline Dataset IdenticalGroups(const GridSpec& grid, std::size_t m, std::size_t k,
                               std::uint64_t seed) {
  const Hierarchies h = grid.MakeHierarchies();
  Gen gen(seed);
  std::vector<std::vector<Point>> seqs;
  for (std::size_t g = 0; g < m; ++g) {
    std::vector<Point> base(g + 1);
    for (auto& p : base) p = gen.AnyLeaf(h);
    for (std::size_t c = 0; c < k; ++c) seqs.push_back(base);
  }
  return MakeDataset(grid, seqs);
}

}  // namespace trajanon::testing

#endif  // TRAJANON_TESTS_TEST_SUPPORT_HPP_
