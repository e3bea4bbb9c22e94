#include "lesionq/matching.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "lesionq/errors.hpp"

namespace lesionq {

IocRatio ioc_ratio(const BoundingCube& a, const BoundingCube& b) {
  std::int64_t inter = 1;
  for (int k = 0; k < 3; ++k) {
    const std::int64_t lo = std::max(a.min[k], b.min[k]);
    const std::int64_t hi = std::min(a.max[k], b.max[k]);
    if (hi < lo) {
      inter = 0;
      break;
    }
    inter *= hi - lo + 1;
  }
  return {inter, std::max(a.voxel_count(), b.voxel_count())};
}

double ioc(const BoundingCube& a, const BoundingCube& b) { return ioc_ratio(a, b).value(); }

std::string_view category_name(ChangeCategory c) {
  switch (c) {
    case ChangeCategory::Grow:
      return "grow";
    case ChangeCategory::Shrink:
      return "shrink";
    case ChangeCategory::Stable:
      return "stable";
  }
  return "stable";
}

MatchResult match_lesions(const std::vector<LesionRecord>& prev, const std::vector<LesionRecord>& follow_registered,
                          const std::vector<LesionRecord>& follow_native, double min_ioc) {
  std::map<std::int32_t, const LesionRecord*> registered_by_label;
  for (const auto& r : follow_registered) registered_by_label.emplace(r.label, &r);

  std::vector<const LesionRecord*> natives;
  for (const auto& r : follow_native) natives.push_back(&r);
  std::sort(natives.begin(), natives.end(), [](auto* a, auto* b) { return a->index < b->index; });

  MatchResult out;
  for (const LesionRecord* f : natives) {
    const auto it = registered_by_label.find(f->label);
    if (it == registered_by_label.end()) {
      out.emerge.push_back({f->index, f->voxel_count, true});
      continue;
    }
    const BoundingCube& cube = it->second->cube;
    const LesionRecord* best = nullptr;
    IocRatio best_ratio{0, 1};
    for (const auto& p : prev) {
      const IocRatio r = ioc_ratio(cube, p.cube);
      if (r.value() <= min_ioc || r.intersection == 0) continue;
      // Exact comparison r > best_ratio via cross-multiplication.
      const auto lhs = static_cast<__int128>(r.intersection) * best_ratio.larger;
      const auto rhs = static_cast<__int128>(best_ratio.intersection) * r.larger;
      if (best == nullptr || lhs > rhs || (lhs == rhs && p.index < best->index)) {
        best = &p;
        best_ratio = r;
      }
    }
    if (best == nullptr) {
      out.emerge.push_back({f->index, f->voxel_count, false});
    } else {
      out.matched.push_back(
          {best->index, f->index, best_ratio.value(), best->voxel_count, f->voxel_count, ChangeCategory::Stable});
    }
  }
  return out;
}

ChangeCategory classify_change(std::int64_t prev_voxels, std::int64_t follow_voxels, double tolerance) {
  const auto p = static_cast<double>(prev_voxels);
  const auto f = static_cast<double>(follow_voxels);
  if (f > p * (1.0 + tolerance)) return ChangeCategory::Grow;
  if (f < p * (1.0 - tolerance)) return ChangeCategory::Shrink;
  return ChangeCategory::Stable;
}

ComparisonReport classify_matches(const MatchResult& matches, const std::vector<LesionRecord>& prev,
                                  const MatchParams& params) {
  if (!(params.stability_tolerance >= 0.0)) throw InvalidArgument("stability tolerance must be >= 0");
  ComparisonReport report;
  report.params = params;
  report.emerge = matches.emerge;
  std::set<std::int32_t> selected;
  for (LesionMatch m : matches.matched) {
    m.category = classify_change(m.prev_voxels, m.follow_voxels, params.stability_tolerance);
    selected.insert(m.prev_index);
    report.matched.push_back(m);
  }
  for (const auto& p : prev) {
    if (!selected.contains(p.index)) report.vanish.push_back({p.index, p.voxel_count});
  }
  std::sort(report.vanish.begin(), report.vanish.end(),
            [](const auto& a, const auto& b) { return a.prev_index < b.prev_index; });
  return report;
}

}  // namespace lesionq
