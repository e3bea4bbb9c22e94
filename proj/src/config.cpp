#include "lesionq/config.hpp"

#include <cmath>

#include "lesionq/errors.hpp"
#include "lesionq/labeling.hpp"

namespace lesionq {

void validate(const RunConfig& c) {
  connectivity_from_int(c.connectivity);
  if (c.min_voxels < 0) throw InvalidArgument("min_voxels must be >= 0");
  if (!(c.stability_tolerance >= 0.0 && c.stability_tolerance < 1.0)) {
    throw InvalidArgument("stability_tolerance must be in [0, 1)");
  }
  if (!(c.min_ioc >= 0.0 && c.min_ioc < 1.0)) throw InvalidArgument("min_ioc must be in [0, 1)");
  if (c.chart_floor < 0) throw InvalidArgument("chart_floor must be >= 0");
  if (c.bins.empty()) throw InvalidArgument("bins must list at least one threshold");
  for (std::size_t i = 0; i < c.bins.size(); ++i) {
    if (!(c.bins[i] > 0) || (i > 0 && !(c.bins[i] > c.bins[i - 1]))) {
      throw InvalidArgument("bins must be positive and strictly ascending");
    }
  }
  validate(c.registration);
  if (c.mask_threshold && !std::isfinite(*c.mask_threshold)) throw InvalidArgument("mask_threshold must be finite");
  for (double s : c.slice_spacing) {
    if (!(s > 0) || !std::isfinite(s)) throw InvalidArgument("slice spacing must be finite and > 0");
  }
  if (c.columns < 1) throw InvalidArgument("columns must be >= 1");
  if (c.rows_per_page < 0) throw InvalidArgument("rows_per_page must be >= 0");
}

}  // namespace lesionq
