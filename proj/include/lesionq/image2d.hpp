#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace lesionq {

/// 2D grayscale raster, row-major, (0,0) at the top-left.
struct Image2D {
  int width = 0;
  int height = 0;
  int bit_depth = 8;  // 8 or 16
  std::vector<std::uint16_t> pixels;

  std::uint16_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint16_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  bool operator==(const Image2D&) const = default;
};

/// 8-bit RGB raster, row-major, 3 bytes per pixel.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {}

  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    auto* p = &pixels[(static_cast<std::size_t>(y) * width + x) * 3];
    p[0] = r, p[1] = g, p[2] = b;
  }
  std::array<std::uint8_t, 3> get(int x, int y) const {
    const auto* p = &pixels[(static_cast<std::size_t>(y) * width + x) * 3];
    return {p[0], p[1], p[2]};
  }
};

/// Reads 8/16-bit grayscale PNG (RGB/palette inputs are converted to gray)
/// or binary/ASCII PGM. Throws UnreadableImage.
Image2D read_image(const std::filesystem::path& path);

/// Writes a grayscale PNG at the image's bit depth.
void write_png(const Image2D& image, const std::filesystem::path& path);
void write_png(const RgbImage& image, const std::filesystem::path& path);

/// Binary PGM (P5), 8- or 16-bit.
void write_pgm(const Image2D& image, const std::filesystem::path& path);

/// True for extensions read_image understands (.png, .pgm).
bool is_image_file(const std::filesystem::path& path);

}  // namespace lesionq
