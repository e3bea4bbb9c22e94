#include "lesionq/slices.hpp"

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "lesionq/errors.hpp"

namespace lesionq {

Volume stack_image_slices(const std::filesystem::path& dir, const std::array<double, 3>& spacing) {
  if (!std::filesystem::is_directory(dir)) throw IoFailure(dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
  }
  if (files.empty()) throw EmptyDirectory(dir.string() + " contains no PNG/PGM slices");
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });

  Volume volume;
  volume.dtype = DType::U8;
  std::size_t plane = 0;
  for (std::size_t z = 0; z < files.size(); ++z) {
    const Image2D img = read_image(files[z]);
    if (z == 0) {
      volume.grid.dims = {img.width, img.height, static_cast<std::int64_t>(files.size())};
      volume.grid.spacing = spacing;
      validate_grid(volume.grid);
      plane = img.pixels.size();
      volume.data.reserve(plane * files.size());
    } else if (img.width != volume.grid.dims[0] || img.height != volume.grid.dims[1]) {
      throw InconsistentDimensions(files[z].filename().string() + " is " + std::to_string(img.width) + "x" +
                                   std::to_string(img.height) + ", expected " + std::to_string(volume.grid.dims[0]) +
                                   "x" + std::to_string(volume.grid.dims[1]));
    }
    if (img.bit_depth == 16) volume.dtype = DType::U16;
    volume.data.insert(volume.data.end(), img.pixels.begin(), img.pixels.end());
  }
  return volume;
}

MaskVolume stack_slices(const std::filesystem::path& dir, const std::array<double, 3>& spacing,
                        std::optional<double> threshold) {
  const Volume volume = stack_image_slices(dir, spacing);
  return binarize(volume, threshold.value_or(default_mask_threshold(volume)));
}

Image2D mask_slice(const MaskVolume& mask, std::int64_t z) {
  Image2D img;
  img.width = static_cast<int>(mask.grid.dims[0]);
  img.height = static_cast<int>(mask.grid.dims[1]);
  img.bit_depth = 8;
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) img.at(x, y) = mask.at(x, y, z) ? 255 : 0;
  }
  return img;
}

void write_slices(const MaskVolume& mask, const std::filesystem::path& dir, const std::string& prefix) {
  std::filesystem::create_directories(dir);
  for (std::int64_t z = 0; z < mask.grid.dims[2]; ++z) {
    char name[32];
    std::snprintf(name, sizeof(name), "%04lld.png", static_cast<long long>(z));
    write_png(mask_slice(mask, z), dir / (prefix + name));
  }
}

}  // namespace lesionq
