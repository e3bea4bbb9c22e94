#include "lesionq/image2d.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "lesionq/errors.hpp"

namespace lesionq {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

std::string lower_ext(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

Image2D read_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) throw UnreadableImage("cannot open " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw UnreadableImage("libpng initialization failed");
  }
  Image2D image;
  std::vector<png_bytep> rows;
  std::vector<png_byte> buffer;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw UnreadableImage(path.string() + ": not a readable PNG");
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  const int color = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA || color == PNG_COLOR_TYPE_PALETTE) {
    png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  }
  if (depth == 16) png_set_swap(png);  // host little-endian samples
  png_read_update_info(png, info);

  depth = png_get_bit_depth(png, info);
  image.width = static_cast<int>(png_get_image_width(png, info));
  image.height = static_cast<int>(png_get_image_height(png, info));
  image.bit_depth = depth == 16 ? 16 : 8;
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  buffer.resize(rowbytes * image.height);
  rows.resize(image.height);
  for (int y = 0; y < image.height; ++y) rows[y] = buffer.data() + rowbytes * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  image.pixels.resize(static_cast<std::size_t>(image.width) * image.height);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      if (image.bit_depth == 16) {
        std::uint16_t v;
        std::memcpy(&v, rows[y] + 2 * x, 2);
        image.at(x, y) = v;
      } else {
        image.at(x, y) = rows[y][x];
      }
    }
  }
  return image;
}

Image2D read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UnreadableImage("cannot open " + path.string());
  auto next_token = [&in]() {
    std::string tok;
    char c;
    while (in.get(c)) {
      if (c == '#') {
        std::string skip;
        std::getline(in, skip);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!tok.empty()) break;
        continue;
      }
      tok.push_back(c);
    }
    return tok;
  };
  const std::string magic = next_token();
  if (magic != "P5" && magic != "P2") throw UnreadableImage(path.string() + ": not a PGM file");
  Image2D image;
  int maxval = 0;
  try {
    image.width = std::stoi(next_token());
    image.height = std::stoi(next_token());
    maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    throw UnreadableImage(path.string() + ": malformed PGM header");
  }
  if (image.width <= 0 || image.height <= 0 || maxval <= 0 || maxval > 65535) {
    throw UnreadableImage(path.string() + ": invalid PGM geometry");
  }
  image.bit_depth = maxval > 255 ? 16 : 8;
  const std::size_t n = static_cast<std::size_t>(image.width) * image.height;
  image.pixels.resize(n);
  if (magic == "P5") {
    const std::size_t bpp = image.bit_depth == 16 ? 2 : 1;
    std::vector<unsigned char> raw(n * bpp);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw UnreadableImage(path.string() + ": truncated PGM");
    for (std::size_t i = 0; i < n; ++i) {
      image.pixels[i] = bpp == 2 ? static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]) : raw[i];
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const std::string tok = next_token();
      if (tok.empty()) throw UnreadableImage(path.string() + ": truncated PGM");
      image.pixels[i] = static_cast<std::uint16_t>(std::stoi(tok));
    }
  }
  return image;
}

void write_png_rows(const std::filesystem::path& path, int width, int height, int depth, int color,
                    const std::vector<png_bytep>& rows) {
  FilePtr fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) throw IoFailure("cannot open " + path.string() + " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoFailure("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoFailure("PNG encoding failed for " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), depth, color,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (depth == 16) png_set_swap(png);
  png_write_image(png, const_cast<png_bytepp>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

bool is_image_file(const std::filesystem::path& path) {
  const std::string ext = lower_ext(path);
  return ext == ".png" || ext == ".pgm";
}

Image2D read_image(const std::filesystem::path& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".pgm") return read_pgm(path);
  throw UnreadableImage(path.string() + ": unsupported image extension");
}

void write_png(const Image2D& image, const std::filesystem::path& path) {
  const int bpp = image.bit_depth == 16 ? 2 : 1;
  std::vector<png_byte> buffer(static_cast<std::size_t>(image.width) * image.height * bpp);
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    if (bpp == 2) {
      std::memcpy(&buffer[2 * i], &image.pixels[i], 2);
    } else {
      buffer[i] = static_cast<png_byte>(image.pixels[i]);
    }
  }
  std::vector<png_bytep> rows(image.height);
  for (int y = 0; y < image.height; ++y) rows[y] = buffer.data() + static_cast<std::size_t>(y) * image.width * bpp;
  write_png_rows(path, image.width, image.height, image.bit_depth == 16 ? 16 : 8, PNG_COLOR_TYPE_GRAY, rows);
}

void write_png(const RgbImage& image, const std::filesystem::path& path) {
  std::vector<png_bytep> rows(image.height);
  auto* base = const_cast<png_bytep>(image.pixels.data());
  for (int y = 0; y < image.height; ++y) rows[y] = base + static_cast<std::size_t>(y) * image.width * 3;
  write_png_rows(path, image.width, image.height, 8, PNG_COLOR_TYPE_RGB, rows);
}

void write_pgm(const Image2D& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open " + path.string() + " for writing");
  const int maxval = image.bit_depth == 16 ? 65535 : 255;
  out << "P5\n" << image.width << ' ' << image.height << '\n' << maxval << '\n';
  for (std::uint16_t v : image.pixels) {
    if (maxval > 255) {
      out.put(static_cast<char>(v >> 8));
      out.put(static_cast<char>(v & 0xff));
    } else {
      out.put(static_cast<char>(v));
    }
  }
  if (!out) throw IoFailure("write failed for " + path.string());
}

}  // namespace lesionq
