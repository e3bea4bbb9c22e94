#include <numeric>
#include <random>

#include "doctest.h"
#include "lesionq/errors.hpp"
#include "lesionq/labeling.hpp"
#include "support/oracles.hpp"
#include "support/phantom.hpp"

using namespace lesionq;
using namespace lesionq::testing;

namespace {

MaskVolume empty_mask(std::int64_t nx, std::int64_t ny, std::int64_t nz) {
  MaskVolume m;
  m.grid.dims = {nx, ny, nz};
  m.data.assign(m.grid.voxel_count(), 0);
  return m;
}

void set(MaskVolume& m, std::int64_t x, std::int64_t y, std::int64_t z) { m.data[m.grid.index(x, y, z)] = 1; }

}  // namespace

TEST_CASE("single voxel is one lesion") {
  MaskVolume m = empty_mask(4, 4, 4);
  set(m, 2, 1, 3);
  const auto map = label_components(m);
  CHECK(map.lesion_count == 1);
  const auto lesions = extract_lesions(map);
  REQUIRE(lesions.size() == 1);
  CHECK(lesions[0].voxel_count == 1);
  CHECK(lesions[0].cube.min == std::array<std::int64_t, 3>{2, 1, 3});
  CHECK(lesions[0].cube.max == std::array<std::int64_t, 3>{2, 1, 3});
}

TEST_CASE("diagonal neighbors depend on connectivity") {
  MaskVolume m = empty_mask(3, 3, 3);
  set(m, 0, 0, 0);
  set(m, 1, 1, 1);
  CHECK(label_components(m, Connectivity::TwentySix).lesion_count == 1);
  CHECK(label_components(m, Connectivity::Eighteen).lesion_count == 2);
  CHECK(label_components(m, Connectivity::Six).lesion_count == 2);

  MaskVolume edge = empty_mask(3, 3, 3);
  set(edge, 0, 0, 0);
  set(edge, 1, 1, 0);
  CHECK(label_components(edge, Connectivity::Eighteen).lesion_count == 1);
  CHECK(label_components(edge, Connectivity::Six).lesion_count == 2);
}

TEST_CASE("connectivity_from_int accepts only 6, 18, 26") {
  CHECK(connectivity_from_int(18) == Connectivity::Eighteen);
  CHECK_THROWS_AS(connectivity_from_int(8), InvalidArgument);
}

TEST_CASE("labels follow raster order of each component's first voxel") {
  // U shape: the two arms meet only in the last row, forcing a merge.
  MaskVolume m = empty_mask(5, 4, 1);
  for (int y = 0; y < 4; ++y) {
    set(m, 0, y, 0);
    set(m, 4, y, 0);
  }
  for (int x = 0; x < 5; ++x) set(m, x, 3, 0);
  set(m, 2, 0, 0);  // isolated, first seen between the arms
  const auto map = label_components(m, Connectivity::Six);
  CHECK(map.lesion_count == 2);
  CHECK(map.at(0, 0, 0) == 1);
  CHECK(map.at(2, 0, 0) == 2);
  CHECK(map.at(4, 0, 0) == 1);
}

TEST_CASE("random 20^3 mask at 30% matches the flood-fill oracle") {
  std::mt19937_64 rng(2024);
  const MaskVolume m = random_mask(rng, {20, 20, 20}, 0.3);
  for (int c : {6, 18, 26}) {
    CAPTURE(c);
    std::int32_t count = 0;
    const auto oracle = flood_fill_labels(m, c, count);
    const auto map = label_components(m, connectivity_from_int(c));
    CHECK(map.lesion_count == count);
    CHECK(same_partition(map.labels, oracle));
    // Both number components in raster order, so labels agree exactly.
    CHECK(map.labels == oracle);
  }
}

TEST_CASE("extract_lesions on an empty map") {
  const auto map = label_components(empty_mask(3, 3, 3));
  CHECK(map.lesion_count == 0);
  CHECK(extract_lesions(map).empty());
}

TEST_CASE("solid 3x3x3 block") {
  MaskVolume m = empty_mask(8, 8, 8);
  const std::int64_t a = 2, b = 4, c = 1;
  for (int z = 0; z < 3; ++z)
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 3; ++x) set(m, a + x, b + y, c + z);
  const auto lesions = extract_lesions(label_components(m));
  REQUIRE(lesions.size() == 1);
  CHECK(lesions[0].voxel_count == 27);
  CHECK(lesions[0].volume_mm3 == 27.0);
  CHECK(lesions[0].cube.min == std::array<std::int64_t, 3>{a, b, c});
  CHECK(lesions[0].cube.max == std::array<std::int64_t, 3>{a + 2, b + 2, c + 2});

  m.grid.spacing = {0.5, 0.5, 2.0};
  CHECK(extract_lesions(label_components(m))[0].volume_mm3 == 27.0 * 0.5);
}

TEST_CASE("min_voxels filter, ascending order and reindexing") {
  MaskVolume m = empty_mask(40, 6, 6);
  auto line = [&](std::int64_t x0, std::int64_t len) {
    for (std::int64_t i = 0; i < len; ++i) set(m, x0 + (i % 5), i / 5 % 5, i / 25);
  };
  line(0, 5);     // 5 voxels
  line(10, 120);  // 120 voxels
  line(20, 7);    // 7 voxels
  const auto map = label_components(m);
  REQUIRE(map.lesion_count == 3);

  const auto all = extract_lesions(map);
  REQUIRE(all.size() == 3);
  CHECK(all[0].voxel_count == 5);
  CHECK(all[1].voxel_count == 7);
  CHECK(all[2].voxel_count == 120);
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i].index == static_cast<std::int32_t>(i) + 1);

  const auto big = extract_lesions(map, 10);
  REQUIRE(big.size() == 1);
  CHECK(big[0].voxel_count == 120);
  CHECK(big[0].index == 1);
  CHECK(big[0].label == map.at(10, 0, 0));
}

TEST_CASE("equal volumes are ordered by first voxel in raster order") {
  MaskVolume m = empty_mask(6, 6, 1);
  set(m, 4, 0, 0);  // first in raster order
  set(m, 1, 3, 0);
  set(m, 0, 5, 0);
  const auto lesions = extract_lesions(label_components(m));
  REQUIRE(lesions.size() == 3);
  CHECK(lesions[0].cube.min == std::array<std::int64_t, 3>{4, 0, 0});
  CHECK(lesions[1].cube.min == std::array<std::int64_t, 3>{1, 3, 0});
  CHECK(lesions[2].cube.min == std::array<std::int64_t, 3>{0, 5, 0});
}

TEST_CASE("lesion_center is the componentwise midpoint") {
  CHECK(lesion_center({{0, 0, 0}, {0, 0, 0}}) == std::array<double, 3>{0, 0, 0});
  CHECK(lesion_center({{2, 4, 6}, {6, 8, 10}}) == std::array<double, 3>{4, 6, 8});
  CHECK(lesion_center({{0, 0, 0}, {3, 3, 3}}) == std::array<double, 3>{1.5, 1.5, 1.5});
}

TEST_CASE("properties on random masks: partition, minimality, determinism, monotonicity") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> dim(1, 16);
  const double densities[] = {0.1, 0.3, 0.5};
  for (int trial = 0; trial < 60; ++trial) {
    const MaskVolume m = random_mask(rng, {dim(rng), dim(rng), dim(rng)}, densities[trial % 3]);
    std::int32_t counts[3];
    int ci = 0;
    for (int c : {6, 18, 26}) {
      const auto map = label_components(m, connectivity_from_int(c));
      counts[ci++] = map.lesion_count;
      const auto lesions = extract_lesions(map);
      std::int64_t total = 0;
      for (const auto& r : lesions) total += r.voxel_count;
      CHECK(static_cast<std::size_t>(total) == m.foreground_count());

      const auto brute = brute_lesions(map.labels, map.grid, map.lesion_count);
      for (const auto& r : lesions) {
        CHECK(r.cube == brute[static_cast<std::size_t>(r.label)].cube);
        CHECK(r.voxel_count == brute[static_cast<std::size_t>(r.label)].count);
      }
      CHECK(label_components(m, connectivity_from_int(c)) == map);
      CHECK(extract_lesions(label_components(m, connectivity_from_int(c))) == lesions);
    }
    CHECK(counts[0] >= counts[1]);
    CHECK(counts[1] >= counts[2]);
  }
}
