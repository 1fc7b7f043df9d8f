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

// Domain generalization hierarchies over perfect binary trees.
//
// A node is identified by its bit-prefix label: the root is the empty string,
// leaves carry `depth` bits, and the parent of a label drops its last bit. A
// node at level `l` therefore covers the dyadic range of 2^(depth - l) leaves
// and generalizing it to an ancestor at level `a` costs exactly `l - a` bits.

#ifndef TRAJANON_DGH_HPP_
#define TRAJANON_DGH_HPP_

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

#include "trajanon/error.hpp"

namespace trajanon {

enum class Attribute : std::uint8_t { kX = 0, kY = 1, kT = 2 };

inline constexpr Attribute kAttributes[] = {Attribute::kX, Attribute::kY,
                                            Attribute::kT};

inline std::string_view AttributeName(Attribute a) {
  switch (a) {
    case Attribute::kX: return "x";
    case Attribute::kY: return "y";
    case Attribute::kT: return "t";
  }
  return "?";
}

// Information loss, in bits. Exact integers under the binary-tree restriction.
using Bits = std::int64_t;

inline constexpr int kMaxDghDepth = 32;

// A node of some DghTree: `level` bits of label stored right-aligned in
// `prefix`. Carries its attribute so cross-tree use is detected.
struct Node {
  Attribute attribute = Attribute::kX;
  std::uint8_t level = 0;
  std::uint32_t prefix = 0;

  friend bool operator==(const Node&, const Node&) = default;
  friend auto operator<=>(const Node&, const Node&) = default;
};

class DghTree {
 public:
  DghTree(Attribute attribute, int depth) : attribute_(attribute), depth_(depth) {
    if (depth < 1 || depth > kMaxDghDepth) {
      throw Error(ErrorCode::kInvalidGrid,
                  "DGH depth must be in [1, 32], got " + std::to_string(depth));
    }
  }

  Attribute attribute() const { return attribute_; }
  int depth() const { return depth_; }

  std::uint64_t LeafCount() const { return std::uint64_t{1} << depth_; }
  std::uint64_t NodeCount() const { return (std::uint64_t{1} << (depth_ + 1)) - 1; }

  Node Root() const { return Node{attribute_, 0, 0}; }

  Node Leaf(std::uint64_t index) const {
    if (index >= LeafCount()) {
      throw Error(ErrorCode::kInvalidLabel,
                  "leaf index " + std::to_string(index) + " out of range");
    }
    return Node{attribute_, static_cast<std::uint8_t>(depth_),
                static_cast<std::uint32_t>(index)};
  }

  bool Contains(const Node& n) const {
    return n.attribute == attribute_ && n.level <= depth_ &&
           (static_cast<std::uint64_t>(n.prefix) >> n.level) == 0;
  }

  bool IsLeaf(const Node& n) const {
    Check(n);
    return n.level == depth_;
  }

  Node Parent(const Node& n) const {
    Check(n);
    if (n.level == 0) return n;
    return Node{attribute_, static_cast<std::uint8_t>(n.level - 1), n.prefix >> 1};
  }

  Node Child(const Node& n, int bit) const {
    Check(n);
    if (n.level == depth_) {
      throw Error(ErrorCode::kInvalidLabel, "leaf has no children");
    }
    const std::uint64_t p = (static_cast<std::uint64_t>(n.prefix) << 1) | (bit & 1);
    return Node{attribute_, static_cast<std::uint8_t>(n.level + 1),
                static_cast<std::uint32_t>(p)};
  }

  // Number of leaves under `n`: 2^(depth - level).
  std::uint64_t Lf(const Node& n) const {
    Check(n);
    return std::uint64_t{1} << (depth_ - n.level);
  }

  bool IsAncestorOrSelf(const Node& ancestor, const Node& descendant) const {
    Check(ancestor);
    Check(descendant);
    if (ancestor.level > descendant.level) return false;
    return (static_cast<std::uint64_t>(descendant.prefix) >>
            (descendant.level - ancestor.level)) ==
           static_cast<std::uint64_t>(ancestor.prefix);
  }

  // Longest common prefix of the two labels.
  Node Lca(const Node& a, const Node& b) const {
    Check(a);
    Check(b);
    const int level = std::min(a.level, b.level);
    const std::uint64_t pa = static_cast<std::uint64_t>(a.prefix) >> (a.level - level);
    const std::uint64_t pb = static_cast<std::uint64_t>(b.prefix) >> (b.level - level);
    const int diff = std::bit_width(pa ^ pb);
    return Node{attribute_, static_cast<std::uint8_t>(level - diff),
                static_cast<std::uint32_t>(pa >> diff)};
  }

  // log2 Lf(ancestor) - log2 Lf(descendant).
  Bits Ls(const Node& descendant, const Node& ancestor) const {
    if (!IsAncestorOrSelf(ancestor, descendant)) {
      throw Error(ErrorCode::kNotAncestor,
                  "'" + Label(ancestor) + "' is not an ancestor of '" +
                      Label(descendant) + "'");
    }
    return static_cast<Bits>(descendant.level) - ancestor.level;
  }

  // Cost of generalizing both nodes to their LCA.
  Bits PairLoss(const Node& a, const Node& b) const {
    const Node p = Lca(a, b);
    return (static_cast<Bits>(a.level) - p.level) + (static_cast<Bits>(b.level) - p.level);
  }

  Bits SuppressionLoss(const Node& n) const {
    Check(n);
    return n.level;
  }

  // |Ls(a, root) - Ls(b, root)|. Equals PairLoss only for ancestor pairs.
  Bits AncestorLossDifference(const Node& a, const Node& b) const {
    const Bits d = SuppressionLoss(a) - SuppressionLoss(b);
    return d < 0 ? -d : d;
  }

  std::string Label(const Node& n) const {
    Check(n);
    std::string out(n.level, '0');
    for (int i = 0; i < n.level; ++i) {
      if ((n.prefix >> (n.level - 1 - i)) & 1U) out[i] = '1';
    }
    return out;
  }

  // Accepts a bit string of length <= depth; "*" also denotes the root.
  Node Parse(std::string_view label) const {
    if (label == "*") return Root();
    if (label.size() > static_cast<std::size_t>(depth_)) {
      throw Error(ErrorCode::kInvalidLabel,
                  "label '" + std::string(label) + "' deeper than tree depth " +
                      std::to_string(depth_));
    }
    std::uint64_t p = 0;
    for (char c : label) {
      if (c != '0' && c != '1') {
        throw Error(ErrorCode::kInvalidLabel,
                    "label '" + std::string(label) + "' is not a bit string");
      }
      p = (p << 1) | static_cast<std::uint64_t>(c - '0');
    }
    return Node{attribute_, static_cast<std::uint8_t>(label.size()),
                static_cast<std::uint32_t>(p)};
  }

  // Inclusive leaf-index range [first, last] covered by `n`.
  std::pair<std::uint64_t, std::uint64_t> LeafRange(const Node& n) const {
    Check(n);
    const int shift = depth_ - n.level;
    const std::uint64_t first = static_cast<std::uint64_t>(n.prefix) << shift;
    return {first, first + (std::uint64_t{1} << shift) - 1};
  }

  friend bool operator==(const DghTree&, const DghTree&) = default;

 private:
  void Check(const Node& n) const {
    if (n.attribute != attribute_) {
      throw Error(ErrorCode::kTreeMismatch,
                  "node of attribute " + std::string(AttributeName(n.attribute)) +
                      " used with the " + std::string(AttributeName(attribute_)) +
                      " tree");
    }
    if (n.level > depth_ || (static_cast<std::uint64_t>(n.prefix) >> n.level) != 0) {
      throw Error(ErrorCode::kTreeMismatch, "node does not belong to this tree");
    }
  }

  Attribute attribute_;
  int depth_;
};

inline DghTree BuildBinaryDgh(Attribute attribute, int bits) {
  return DghTree(attribute, bits);
}

// The three hierarchies H_x, H_y, H_t used by every point.
struct Hierarchies {
  DghTree x;
  DghTree y;
  DghTree t;

  Hierarchies(int bits_x, int bits_y, int bits_t)
      : x(Attribute::kX, bits_x), y(Attribute::kY, bits_y), t(Attribute::kT, bits_t) {}

  const DghTree& operator[](Attribute a) const {
    switch (a) {
      case Attribute::kX: return x;
      case Attribute::kY: return y;
      case Attribute::kT: return t;
    }
    return x;
  }

  friend bool operator==(const Hierarchies&, const Hierarchies&) = default;
};

}  // namespace trajanon

#endif  // TRAJANON_DGH_HPP_
