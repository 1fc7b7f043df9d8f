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

#include "trajanon/model.hpp"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "test_support.hpp"
#include "trajanon/error.hpp"

namespace trajanon {
namespace {

RawRecord At(const GridSpec& g, const std::string& id, double east, double north,
             std::int64_t ts) {
  const auto [lat, lon] = Unproject(LocalOffset{east, north}, g.origin_lat, g.origin_lon);
  return RawRecord{id, lat, lon, ts};
}

TEST(GridSpecTest, ValidatesParameters) {
  GridSpec g;
  EXPECT_NO_THROW(g.Validate());
  g.epsilon = 0;
  EXPECT_THROW(g.Validate(), Error);
  g = GridSpec{};
  g.epsilon_t = -1;
  EXPECT_THROW(g.Validate(), Error);
  g = GridSpec{};
  g.bits_x = 33;
  EXPECT_THROW(g.Validate(), Error);
  g = GridSpec{};
  g.bits_t = 4;  // 24 hourly bins do not fit in 16 leaves
  EXPECT_THROW(g.Validate(), Error);
}

TEST(ProjectionTest, RoundTrips) {
  const GridSpec g;
  const auto [lat, lon] = Unproject(LocalOffset{812.5, -40.25}, g.origin_lat, g.origin_lon);
  const LocalOffset back = Project(lat, lon, g.origin_lat, g.origin_lon);
  EXPECT_NEAR(back.east, 812.5, 1e-6);
  EXPECT_NEAR(back.north, -40.25, 1e-6);
}

TEST(DiscretizeTest, OriginMapsToFirstCell) {
  const GridSpec g;
  const Dataset ds = Discretize({At(g, "u", 0, 0, 0)}, g);
  ASSERT_EQ(ds.size(), 1u);
  const Hierarchies h = g.MakeHierarchies();
  const Point& p = ds.trajectories[0].points[0];
  EXPECT_EQ(h.x.Label(p.x), "0000000");
  EXPECT_EQ(h.y.Label(p.y), "0000000");
  EXPECT_EQ(h.t.Label(p.t), "00000");
}

TEST(DiscretizeTest, CellIndexIsFloorOfOffset) {
  const GridSpec g;
  const Dataset ds = Discretize({At(g, "u", 1.5 * g.epsilon, 0, 0)}, g);
  const Hierarchies h = g.MakeHierarchies();
  EXPECT_EQ(h.x.Label(ds.trajectories[0].points[0].x), "0000001");
}

TEST(DiscretizeTest, TimeBinIsTimeOfDay) {
  const GridSpec g;
  EXPECT_EQ(TimeBin(0, g), 0);
  EXPECT_EQ(TimeBin(3599, g), 0);
  EXPECT_EQ(TimeBin(3600, g), 1);
  EXPECT_EQ(TimeBin(86400 + 7200, g), 2);
  EXPECT_EQ(TimeBin(86399, g), 23);
  EXPECT_EQ(TimeBin(-1, g), 23);
}

TEST(DiscretizeTest, GroupsSortsAndDrops) {
  const GridSpec g;
  DiscretizeStats stats;
  const Dataset ds = Discretize(
      {
          At(g, "b", 5, 5, 7200),
          At(g, "a", 25, 5, 3600),
          At(g, "b", 15, 5, 100),
          At(g, "a", -5, 5, 0),  // west of the origin
          At(g, "a", 35, 5, 3600),
          At(g, "c", 5, 1e6, 0),  // far north
      },
      g, &stats);
  EXPECT_EQ(stats.input_records, 6u);
  EXPECT_EQ(stats.kept_records, 4u);
  EXPECT_EQ(stats.dropped_outside, 2u);
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.trajectories[0].id, "b");
  EXPECT_EQ(ds.trajectories[1].id, "a");
  const Hierarchies h = g.MakeHierarchies();
  // b is re-ordered by timestamp.
  EXPECT_EQ(h.x.Label(ds.trajectories[0].points[0].x), "0000001");
  EXPECT_EQ(h.x.Label(ds.trajectories[0].points[1].x), "0000000");
  // a keeps input order on equal timestamps.
  EXPECT_EQ(h.x.Label(ds.trajectories[1].points[0].x), "0000010");
  EXPECT_EQ(h.x.Label(ds.trajectories[1].points[1].x), "0000011");
  EXPECT_EQ(ds.PointCount(), stats.kept_records);
}

TEST(DiscretizeTest, EmptyResultIsAnError) {
  const GridSpec g;
  try {
    Discretize({At(g, "u", -100, -100, 0)}, g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyDataset);
  }
}

TEST(DiscretizeTest, IdempotentOnCellCenters) {
  GridSpec g = testing::SmallGrid(6, 6, 5);
  g.epsilon_t = 3600;
  const Hierarchies h = g.MakeHierarchies();
  testing::Gen gen(7);
  std::vector<RawRecord> records;
  for (int i = 0; i < 400; ++i) {
    const std::uint64_t cx = gen.Below(64), cy = gen.Below(64);
    const auto [lat, lon] = CellCenter(g, cx, cy);
    const std::int64_t bin = static_cast<std::int64_t>(gen.Below(24));
    records.push_back(RawRecord{"u" + std::to_string(i % 17), lat, lon, bin * 3600 + 1800});
  }
  const Dataset first = Discretize(records, g);
  std::vector<RawRecord> again;
  for (const auto& tr : first.trajectories) {
    for (const auto& p : tr.points) {
      const auto [lat, lon] = CellCenter(g, p.x.prefix, p.y.prefix);
      again.push_back(RawRecord{tr.id, lat, lon, static_cast<std::int64_t>(p.t.prefix) * 3600 + 1800});
    }
  }
  const Dataset second = Discretize(again, g);
  ASSERT_EQ(first.size(), second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    EXPECT_EQ(first.trajectories[i].id, second.trajectories[i].id);
    EXPECT_EQ(first.trajectories[i].points, second.trajectories[i].points);
  }
  for (const auto& tr : first.trajectories) {
    for (const auto& p : tr.points) EXPECT_TRUE(IsLeafPoint(h, p));
  }
}

TEST(CropTest, KeepsBox) {
  const GridSpec g;
  const double clat = g.origin_lat, clon = g.origin_lon;
  const auto east = [&](double m) {
    const auto [lat, lon] = Unproject(LocalOffset{m, 0}, clat, clon);
    return RawRecord{"u", lat, lon, 0};
  };
  const auto kept = Crop({east(0), east(600), east(-499), east(499.9)}, clat, clon, 1000, 1000);
  ASSERT_EQ(kept.size(), 3u);
  EXPECT_DOUBLE_EQ(kept[0].longitude, clon);
}

TEST(DatasetTest, ValidateChecksInvariants) {
  const GridSpec g = testing::SmallGrid();
  const Hierarchies h = g.MakeHierarchies();
  Dataset ds = testing::MakeDataset(g, {{LeafPoint(h, 1, 2, 3)}, {LeafPoint(h, 0, 0, 0)}});
  EXPECT_NO_THROW(ds.Validate());
  ds.trajectories[1].id = ds.trajectories[0].id;
  EXPECT_THROW(ds.Validate(), Error);
  ds = testing::MakeDataset(g, {{RootPoint(h)}});
  EXPECT_THROW(ds.Validate(), Error);
  ds = testing::MakeDataset(g, {{}});
  EXPECT_THROW(ds.Validate(), Error);
  ds.trajectories.clear();
  EXPECT_THROW(ds.Validate(), Error);
}

}  // namespace
}  // namespace trajanon
