#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "lesionq/errors.hpp"
#include "lesionq/labeling.hpp"
#include "lesionq/report.hpp"
#include "support/test_util.hpp"

using namespace lesionq;
using namespace lesionq::testing;

namespace {

LabelSlice slice_from(const std::vector<std::string>& rows) {
  LabelSlice s;
  s.height = static_cast<int>(rows.size());
  s.width = static_cast<int>(rows[0].size());
  for (const auto& r : rows)
    for (char c : r) s.labels.push_back(c == '.' ? 0 : c - '0');
  return s;
}

bool adjacent8(Pixel a, Pixel b) { return std::abs(a.x - b.x) <= 1 && std::abs(a.y - b.y) <= 1; }

// Pixels of a label with a 4-neighbor of a different value or on the border.
std::set<std::pair<int, int>> boundary_pixels(const LabelSlice& s, std::int32_t label) {
  std::set<std::pair<int, int>> out;
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x) {
      if (s.at(x, y) != label) continue;
      bool edge = false;
      for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
        const int nx = x + dx, ny = y + dy;
        edge |= nx < 0 || ny < 0 || nx >= s.width || ny >= s.height || s.at(nx, ny) != label;
      }
      if (edge) out.insert({x, y});
    }
  return out;
}

LesionRecord rec(std::int32_t index, std::int64_t voxels) { return {index, index, voxels, double(voxels), {}}; }

ComparisonReport sample_report() {
  ComparisonReport r;
  r.matched = {{1, 2, 0.5, 1196, 1127, ChangeCategory::Shrink},
               {2, 1, 0.8, 50, 60, ChangeCategory::Grow},
               {2, 4, 0.3, 400, 90, ChangeCategory::Shrink},
               {3, 5, 0.9, 300, 300, ChangeCategory::Stable}};
  r.matched[1].prev_voxels = 50;
  r.emerge = {{3, 639, false}, {6, 80, true}};
  r.vanish = {{4, 200}};
  return r;
}

}  // namespace

TEST_CASE("contours of simple shapes") {
  const ContourSet single = trace_contours(slice_from({"...", ".1.", "..."}));
  REQUIRE(single.contours.size() == 1);
  CHECK(single.contours[0].points == std::vector<Pixel>{{1, 1}, {1, 1}});

  const ContourSet square = trace_contours(slice_from({"11", "11"}));
  REQUIRE(square.contours.size() == 1);
  CHECK(square.contours[0].points == std::vector<Pixel>{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}});

  const ContourSet ring = trace_contours(slice_from({".....", ".111.", ".1.1.", ".111.", "....."}));
  REQUIRE(ring.contours.size() == 2);
  CHECK(ring.contours[0].outer);
  CHECK_FALSE(ring.contours[1].outer);
  CHECK(ring.contours[0].points.size() == 9);

  const ContourSet two = trace_contours(slice_from({"1..2", "1..2"}));
  REQUIRE(two.contours.size() == 2);
  CHECK(two.contours[0].label == 1);
  CHECK(two.contours[1].label == 2);
}

TEST_CASE("contours are closed 8-paths covering every boundary pixel") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 300; ++trial) {
    LabelSlice s;
    s.width = 4 + static_cast<int>(rng() % 20);
    s.height = 4 + static_cast<int>(rng() % 20);
    const unsigned density = 3 + rng() % 6;
    const int nlabels = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < s.width * s.height; ++i)
      s.labels.push_back((rng() % 10) < density ? 1 + static_cast<int>(rng() % nlabels) : 0);

    const ContourSet cs = trace_contours(s);
    std::map<std::int32_t, std::set<std::pair<int, int>>> covered;
    for (const auto& c : cs.contours) {
      REQUIRE(c.points.size() >= 2);
      CHECK(c.points.front() == c.points.back());
      for (std::size_t i = 0; i < c.points.size(); ++i) {
        const Pixel p = c.points[i];
        REQUIRE(s.at(p.x, p.y) == c.label);
        if (i > 0) CHECK(adjacent8(c.points[i - 1], p));
        covered[c.label].insert({p.x, p.y});
      }
    }
    for (int l = 1; l <= nlabels; ++l) {
      for (const auto& px : boundary_pixels(s, l)) CHECK(covered[l].contains(px));
    }
  }
}

TEST_CASE("collage layout, padding and contour flags") {
  const Grid g{{8, 6, 5}, {1, 1, 1}};
  Volume v{g, DType::F32, std::vector<float>(g.voxel_count())};
  for (std::size_t i = 0; i < v.data.size(); ++i) v.data[i] = static_cast<float>(i % 17);
  LesionLabelMap labels{g, std::vector<std::int32_t>(g.voxel_count(), 0), 2};
  for (int y = 2; y <= 4; ++y)
    for (int x = 3; x <= 5; ++x) labels.labels[g.index(x, y, 1)] = 1;
  labels.labels[g.index(0, 0, 3)] = 2;
  const std::vector<LesionRecord> lesions{{7, 1, 9, 9.0, {{3, 2, 1}, {5, 4, 1}}}};  // label 2 is not listed

  const auto pages = render_collage(v, labels, lesions, {0, 4}, {2, 2});
  REQUIRE(pages.size() == 2);
  CHECK(pages[0].image.width == 16);
  CHECK(pages[0].image.height == 12);
  CHECK(pages[1].image.height == 6);
  REQUIRE(pages[1].tiles.size() == 2);
  CHECK(pages[1].tiles[0].z == 4);
  CHECK(pages[1].tiles[1].z == -1);
  CHECK(pages[0].tiles[1].has_contour);
  CHECK(pages[0].tiles[1].indices == std::vector<std::int32_t>{7});
  CHECK_FALSE(pages[0].tiles[3].has_contour);  // label 2 filtered
  // Red boundary pixel at (3, 2) of tile z = 1 (page column 1).
  CHECK(pages[0].image.get(8 + 3, 2) == std::array<std::uint8_t, 3>{255, 0, 0});
  // Interior pixel keeps its gray value.
  const auto mid = pages[0].image.get(8 + 4, 3);
  CHECK(mid[0] == mid[1]);

  const auto one = render_collage(v, labels, lesions, {1, 1}, {4, 0});
  REQUIRE(one.size() == 1);
  CHECK(one[0].image.width == 32);

  CHECK_THROWS_AS(render_collage(v, labels, lesions, {3, 2}, {}), EmptyRange);
  CHECK_THROWS_AS(render_collage(v, labels, lesions, {0, 5}, {}), EmptyRange);
  LesionLabelMap other{Grid{{8, 6, 4}, {1, 1, 1}}, std::vector<std::int32_t>(192, 0), 0};
  CHECK_THROWS_AS(render_collage(v, other, lesions, {0, 1}, {}), ShapeMismatch);
}

TEST_CASE("chart data floor and ordering") {
  const ChartData d = chart_data(sample_report(), 100);
  CHECK(d.matched == std::vector<ChartData::Pair>{{300, 300}, {400, 90}, {1196, 1127}});
  CHECK(d.unmatched == std::vector<std::int64_t>{639});
  const ChartData all = chart_data(sample_report(), 0);
  CHECK(all.matched.front() == ChartData::Pair{50, 60});
  CHECK(all.unmatched == std::vector<std::int64_t>{80, 639});
}

TEST_CASE("line chart SVG matches the pinned rendering") {
  const std::string svg = render_line_chart(chart_data(sample_report(), 100));
  CHECK(svg.find("<g id=\"matched\">") != std::string::npos);
  CHECK(svg.find("<g id=\"unmatched\">") != std::string::npos);
  auto count = [&svg](const std::string& needle) {
    std::size_t n = 0;
    for (auto p = svg.find(needle); p != std::string::npos; p = svg.find(needle, p + 1)) ++n;
    return n;
  };
  CHECK(count("<circle class=\"previous\"") == 3);
  CHECK(count("<circle class=\"follow-up\"") == 3);
  CHECK(count("<circle class=\"unmatched\"") == 1);

  const auto golden = test_data("chart_golden.svg");
  if (std::getenv("LESIONQ_UPDATE_GOLDEN") != nullptr) {
    std::ofstream(golden, std::ios::binary) << svg;
  }
  std::ifstream in(golden, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream expected;
  expected << in.rdbuf();
  CHECK(svg == expected.str());
}

TEST_CASE("volume bins reproduce the 71/22/7 distribution") {
  std::vector<LesionRecord> lesions;
  for (int i = 0; i < 70; ++i) lesions.push_back(rec(i + 1, 1 + i % 200));
  for (int i = 0; i < 22; ++i) lesions.push_back(rec(71 + i, 201 + i * 100));
  for (int i = 0; i < 7; ++i) lesions.push_back(rec(93 + i, 3500 + i * 1000));
  const VolumeBins b = volume_bin_stats(lesions, {200, 3500});
  CHECK(b.counts == std::vector<std::int64_t>{70, 22, 7});
  CHECK(display_percentages(b) == std::vector<int>{71, 22, 7});
  CHECK(b.labels == std::vector<std::string>{"<=200", "200-3500", ">=3500"});
  CHECK(format_bins(b) == "<=200 70 (71%)\n200-3500 22 (22%)\n>=3500 7 (7%)\n");
}

TEST_CASE("volume bin boundaries and validation") {
  const std::vector<LesionRecord> edge{rec(1, 200), rec(2, 201), rec(3, 3499), rec(4, 3500)};
  CHECK(volume_bin_stats(edge, {200, 3500}).counts == std::vector<std::int64_t>{1, 2, 1});
  const VolumeBins one = volume_bin_stats(edge, {200});
  CHECK(one.counts == std::vector<std::int64_t>{1, 3});
  CHECK(one.labels[1] == ">200");
  CHECK(volume_bin_stats(edge, {10, 200, 3500}).counts == std::vector<std::int64_t>{0, 1, 2, 1});
  const VolumeBins empty = volume_bin_stats({}, {200, 3500});
  CHECK(empty.proportions == std::vector<double>{0, 0, 0});
  CHECK_THROWS_AS(volume_bin_stats(edge, {}), InvalidArgument);
  CHECK_THROWS_AS(volume_bin_stats(edge, {300, 200}), InvalidArgument);
  CHECK_THROWS_AS(volume_bin_stats(edge, {0, 200}), InvalidArgument);
}

TEST_CASE("volume table rows and CSV") {
  const auto rows = volume_table(sample_report());
  REQUIRE(rows.size() == 6);
  CHECK(rows[1].lesion == 2);
  CHECK(rows[1].volume_text() == "[1196, 1127]");
  CHECK(rows[2].volume_text() == "639");
  CHECK(rows[2].category == "emerge");
  const std::string csv = volume_table_csv(rows);
  CHECK(csv.rfind("lesion,volume,prev_index,prev_voxels,follow_voxels,category\n", 0) == 0);
  CHECK(csv.find("2,\"[1196, 1127]\",1,1196,1127,shrink\n") != std::string::npos);
  CHECK(csv.find("3,\"639\",,,639,emerge\n") != std::string::npos);
}

TEST_CASE("a single matched pair draws both markers at the same x") {
  ChartData d;
  d.matched = {{120, 150}};
  const std::string svg = render_line_chart(d);
  auto cx_of = [&svg](const std::string& cls) {
    const auto p = svg.find("<circle class=\"" + cls + "\" cx=\"");
    REQUIRE(p != std::string::npos);
    const auto start = svg.find("cx=\"", p) + 4;
    return svg.substr(start, svg.find('"', start) - start);
  };
  CHECK(cx_of("previous") == cx_of("follow-up"));
  CHECK(render_line_chart(d) == svg);
}
