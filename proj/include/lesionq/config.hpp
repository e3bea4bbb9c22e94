#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lesionq/registration.hpp"

namespace lesionq {

/// Effective settings for a CLI run. Loaded from a JSON config file, then
/// overridden by explicit flags, and echoed into every JSON output.
struct RunConfig {
  int connectivity = 26;
  std::int64_t min_voxels = 0;
  double stability_tolerance = 0.0;
  double min_ioc = 0.0;
  std::int64_t chart_floor = 100;
  std::vector<double> bins{200.0, 3500.0};
  RegistrationParams registration;
  std::string out_dir = ".";
  std::optional<double> mask_threshold;  // unset: half of the mask maximum
  std::array<double, 3> slice_spacing{1.0, 1.0, 1.0};
  int columns = 4;
  int rows_per_page = 8;
};

/// Throws InvalidArgument when any value is outside its documented range.
void validate(const RunConfig& config);

}  // namespace lesionq
