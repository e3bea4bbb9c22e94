#include <map>
#include <random>

#include "doctest.h"
#include "lesionq/config.hpp"
#include "lesionq/errors.hpp"
#include "lesionq/matching.hpp"
#include "lesionq/pipeline.hpp"
#include "support/oracles.hpp"
#include "support/phantom.hpp"

using namespace lesionq;
using namespace lesionq::testing;

namespace {

BoundingCube cube(std::int64_t x0, std::int64_t y0, std::int64_t z0, std::int64_t x1, std::int64_t y1, std::int64_t z1) {
  return {{x0, y0, z0}, {x1, y1, z1}};
}

LesionRecord record(std::int32_t index, std::int64_t voxels, const BoundingCube& c, std::int32_t label = 0) {
  return {index, label == 0 ? index : label, voxels, static_cast<double>(voxels), c};
}

BoundingCube random_cube(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> lo(0, 20), ext(0, 9);
  BoundingCube c;
  for (int k = 0; k < 3; ++k) {
    c.min[k] = lo(rng);
    c.max[k] = c.min[k] + ext(rng);
  }
  return c;
}

}  // namespace

TEST_CASE("IoC hand case: 4^3 cubes offset by 2 voxels give 8/64") {
  const IocRatio r = ioc_ratio(cube(0, 0, 0, 3, 3, 3), cube(2, 2, 2, 5, 5, 5));
  CHECK(r.intersection == 8);
  CHECK(r.larger == 64);
  CHECK(r.value() == 0.125);
}

TEST_CASE("IoC agrees with voxel enumeration and has the expected algebra") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 1000; ++i) {
    const BoundingCube a = random_cube(rng), b = random_cube(rng);
    const IocRatio r = ioc_ratio(a, b);
    const auto [inter, larger] = brute_ioc(a, b);
    CHECK(r.intersection == inter);
    CHECK(r.larger == larger);
    CHECK(r.value() >= 0.0);
    CHECK(r.value() <= 1.0);
    const IocRatio s = ioc_ratio(b, a);
    CHECK(s.intersection == r.intersection);
    CHECK(s.larger == r.larger);
    CHECK((r.value() == 1.0) == (a == b));
    BoundingCube ta = a, tb = b;
    for (int k = 0; k < 3; ++k) {
      ta.min[k] += 7 - k, ta.max[k] += 7 - k;
      tb.min[k] += 7 - k, tb.max[k] += 7 - k;
    }
    const IocRatio t = ioc_ratio(ta, tb);
    CHECK(t.intersection == r.intersection);
    CHECK(t.larger == r.larger);
  }
}

TEST_CASE("IoC edge cases") {
  CHECK(ioc(cube(0, 0, 0, 0, 0, 0), cube(0, 0, 0, 0, 0, 0)) == 1.0);
  CHECK(ioc(cube(0, 0, 0, 1, 1, 1), cube(2, 0, 0, 3, 1, 1)) == 0.0);
  // Sharing one face plane counts as overlap on an inclusive grid.
  CHECK(ioc(cube(0, 0, 0, 1, 1, 1), cube(1, 0, 0, 2, 1, 1)) == 0.5);
  // Containment: smaller over larger.
  CHECK(ioc(cube(0, 0, 0, 9, 9, 9), cube(2, 2, 2, 3, 3, 3)) == 0.008);
}

TEST_CASE("classify_change honors the tolerance band") {
  CHECK(classify_change(100, 101, 0.0) == ChangeCategory::Grow);
  CHECK(classify_change(100, 99, 0.0) == ChangeCategory::Shrink);
  CHECK(classify_change(100, 100, 0.0) == ChangeCategory::Stable);
  CHECK(classify_change(100, 105, 0.05) == ChangeCategory::Stable);
  CHECK(classify_change(100, 106, 0.05) == ChangeCategory::Grow);
  CHECK(classify_change(100, 95, 0.05) == ChangeCategory::Stable);
  CHECK(category_name(ChangeCategory::Shrink) == "shrink");
}

TEST_CASE("match_lesions: argmax, ties, threshold, split and emerge") {
  const std::vector<LesionRecord> prev{
      record(1, 50, cube(0, 0, 0, 3, 3, 3)),
      record(2, 60, cube(10, 0, 0, 13, 3, 3)),
      record(3, 70, cube(20, 20, 20, 23, 23, 23)),
  };
  // Follow 1 overlaps prev 1 more than prev 2.
  // Follow 2 sits exactly between prev 1 and prev 2 -> tie -> smaller index.
  // Follows 3 and 4 are both inside prev 3 (split).
  // Follow 5 overlaps nothing; follow 6 vanished during resampling.
  const std::vector<LesionRecord> native{
      record(1, 40, cube(0, 0, 0, 3, 3, 3), 11), record(2, 30, cube(0, 0, 0, 1, 1, 1), 12),
      record(3, 20, cube(0, 0, 0, 1, 1, 1), 13), record(4, 25, cube(0, 0, 0, 1, 1, 1), 14),
      record(5, 10, cube(0, 0, 0, 1, 1, 1), 15), record(6, 5, cube(0, 0, 0, 1, 1, 1), 16),
  };
  const std::vector<LesionRecord> registered{
      record(1, 40, cube(1, 0, 0, 4, 3, 3), 11),   record(2, 30, cube(6, 0, 0, 7, 3, 3), 12),
      record(3, 20, cube(20, 20, 20, 21, 23, 23), 13), record(4, 25, cube(22, 20, 20, 23, 23, 23), 14),
      record(5, 10, cube(40, 40, 40, 41, 41, 41), 15),
  };
  // Give follow 2 equal overlap with both: extend it to touch prev 1 and prev 2 by one column each.
  auto reg = registered;
  reg[1].cube = cube(3, 0, 0, 10, 3, 3);

  const MatchResult m = match_lesions(prev, reg, native);
  REQUIRE(m.matched.size() == 4);
  CHECK(m.matched[0].prev_index == 1);
  CHECK(m.matched[0].follow_index == 1);
  CHECK(m.matched[0].ioc == 0.75);
  CHECK(m.matched[0].prev_voxels == 50);
  CHECK(m.matched[0].follow_voxels == 40);
  CHECK(m.matched[1].prev_index == 1);  // tie between prev 1 and 2
  CHECK(m.matched[2].prev_index == 3);
  CHECK(m.matched[3].prev_index == 3);
  REQUIRE(m.emerge.size() == 2);
  CHECK(m.emerge[0] == EmergeEntry{5, 10, false});
  CHECK(m.emerge[1] == EmergeEntry{6, 5, true});

  // Follow 2 (IoC 0.125) drops out; a pair exactly at the threshold does not match.
  const MatchResult strict = match_lesions(prev, reg, native, 0.4);
  CHECK(strict.matched.size() == 3);
  CHECK(strict.emerge.size() == 3);
  CHECK(match_lesions(prev, reg, native, 0.5).matched.size() == 1);
}

TEST_CASE("classify_matches collects vanish and categories") {
  const std::vector<LesionRecord> prev{record(1, 50, cube(0, 0, 0, 3, 3, 3)), record(2, 60, cube(9, 9, 9, 9, 9, 9))};
  MatchResult m;
  m.matched.push_back({1, 1, 1.0, 50, 70, ChangeCategory::Stable});
  m.matched.push_back({1, 2, 0.5, 50, 10, ChangeCategory::Stable});
  MatchParams params;
  const ComparisonReport r = classify_matches(m, prev, params);
  CHECK(r.matched[0].category == ChangeCategory::Grow);
  CHECK(r.matched[1].category == ChangeCategory::Shrink);
  REQUIRE(r.vanish.size() == 1);
  CHECK(r.vanish[0] == VanishEntry{2, 60});
  params.stability_tolerance = -1;
  CHECK_THROWS_AS(classify_matches(m, prev, params), InvalidArgument);
}

TEST_CASE("longitudinal phantom with the true transform reproduces the ground truth") {
  const LongitudinalPhantom ph = make_longitudinal_phantom();
  RunConfig config;
  const ExamComparison cmp =
      compare_exams(ph.prev_image, ph.prev_mask, ph.follow_image, ph.follow_mask, config, ph.transform);

  // Map library lesion indices to phantom shape ids through the voxel truth.
  auto shape_of = [](const LesionStats& stats, const std::vector<int>& ids) {
    std::map<std::int32_t, std::map<int, int>> votes;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (stats.map.labels[i] > 0) ++votes[stats.map.labels[i]][ids[i]];
    }
    std::map<std::int32_t, int> out;
    for (const auto& l : stats.lesions) {
      const auto& v = votes[l.label];
      REQUIRE(v.size() == 1);  // every lesion is exactly one shape
      out[l.index] = v.begin()->first;
    }
    return out;
  };
  const auto prev_shape = shape_of(cmp.prev, ph.prev_shape_ids);
  const auto follow_shape = shape_of(cmp.follow, ph.follow_shape_ids);
  CHECK(prev_shape.size() == 12);
  CHECK(follow_shape.size() == 14);

  std::map<int, std::optional<int>> parent;
  for (const auto& f : ph.follow) parent[f.shape.id] = f.parent;

  const auto& report = cmp.report;
  CHECK(report.matched.size() == 12);
  for (const auto& m : report.matched) {
    const auto p = parent.at(follow_shape.at(m.follow_index));
    REQUIRE(p.has_value());
    CHECK(prev_shape.at(m.prev_index) == *p);
  }
  REQUIRE(report.emerge.size() == 2);
  for (const auto& e : report.emerge) CHECK_FALSE(parent.at(follow_shape.at(e.follow_index)).has_value());
  REQUIRE(report.vanish.size() == 2);
  std::vector<int> vanished;
  for (const auto& v : report.vanish) vanished.push_back(prev_shape.at(v.prev_index));
  std::sort(vanished.begin(), vanished.end());
  CHECK(vanished == ph.deleted);

  std::map<std::int32_t, int> children;
  for (const auto& m : report.matched) ++children[m.prev_index];
  int split_parent = 0;
  for (const auto& [p, n] : children) {
    if (n > 1) {
      CHECK(n == 3);
      split_parent = prev_shape.at(p);
    }
  }
  CHECK(std::vector<int>{split_parent} == ph.split);

  for (const auto& m : report.matched) {
    const int id = prev_shape.at(m.prev_index);
    if (std::find(ph.grown.begin(), ph.grown.end(), id) != ph.grown.end()) CHECK(m.category == ChangeCategory::Grow);
    if (std::find(ph.shrunk.begin(), ph.shrunk.end(), id) != ph.shrunk.end())
      CHECK(m.category == ChangeCategory::Shrink);
  }
}

TEST_CASE("compare_exams rejects image/mask grid mismatch") {
  const Grid g{{4, 4, 4}, {1, 1, 1}};
  const Grid h{{4, 4, 5}, {1, 1, 1}};
  const Volume img{g, DType::F32, std::vector<float>(64, 1.0f)};
  const MaskVolume bad{h, std::vector<std::uint8_t>(80, 0)};
  const MaskVolume ok{g, std::vector<std::uint8_t>(64, 0)};
  RunConfig config;
  CHECK_THROWS_AS(compare_exams(img, bad, img, ok, config, RigidTransform::identity(g.center_mm())), ShapeMismatch);
}

TEST_CASE("an exam compared with itself is fully matched and stable") {
  const LongitudinalPhantom ph = make_longitudinal_phantom();
  RunConfig config;
  const ExamComparison cmp = compare_exams(ph.prev_image, ph.prev_mask, ph.prev_image, ph.prev_mask, config);
  for (int a = 0; a < 3; ++a) {
    CHECK(std::abs(cmp.registration.transform.translation_mm[a]) < 0.1);
    CHECK(std::abs(cmp.registration.transform.rotation_deg[a]) < 0.1);
  }
  CHECK(cmp.report.matched.size() == 12);
  CHECK(cmp.report.emerge.empty());
  CHECK(cmp.report.vanish.empty());
  for (const auto& m : cmp.report.matched) {
    CHECK(m.prev_index == m.follow_index);
    CHECK(m.ioc == 1.0);
    CHECK(m.category == ChangeCategory::Stable);
  }
}
