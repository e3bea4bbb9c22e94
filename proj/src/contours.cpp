#include <algorithm>
#include <array>
#include <queue>

#include "lesionq/report.hpp"

namespace lesionq {
namespace {

// Clockwise on screen (y grows downward), starting west.
constexpr std::array<Pixel, 8> kRing{{{-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}}};

int ring_index(Pixel d) {
  for (int i = 0; i < 8; ++i) {
    if (kRing[i] == d) return i;
  }
  return -1;
}

// Binary raster of one region with a 1-pixel background margin.
class RegionRaster {
 public:
  RegionRaster(int x0, int y0, int w, int h) : x0_(x0 - 1), y0_(y0 - 1), w_(w + 2), h_(h + 2), in_(w_ * h_, 0) {}

  void set(Pixel p) { in_[idx(p)] = 1; }
  bool in(Pixel p) const {
    const int lx = p.x - x0_, ly = p.y - y0_;
    if (lx < 0 || ly < 0 || lx >= w_ || ly >= h_) return false;
    return in_[static_cast<std::size_t>(ly) * w_ + lx] != 0;
  }
  int x0() const { return x0_; }
  int y0() const { return y0_; }
  int width() const { return w_; }
  int height() const { return h_; }
  std::size_t idx(Pixel p) const { return static_cast<std::size_t>(p.y - y0_) * w_ + (p.x - x0_); }

 private:
  int x0_, y0_, w_, h_;
  std::vector<std::uint8_t> in_;
};

struct TraceState {
  Pixel p;
  Pixel back;
  bool operator==(const TraceState&) const = default;
};

// One Moore step: scan clockwise around p starting after the backtrack pixel.
bool moore_step(const RegionRaster& r, const TraceState& s, TraceState& next) {
  const int d0 = ring_index({s.back.x - s.p.x, s.back.y - s.p.y});
  for (int k = 1; k <= 8; ++k) {
    const int d = (d0 + k) % 8;
    const Pixel c{s.p.x + kRing[d].x, s.p.y + kRing[d].y};
    if (r.in(c)) {
      const Pixel b = kRing[(d + 7) % 8];
      next = {c, {s.p.x + b.x, s.p.y + b.y}};
      return true;
    }
  }
  return false;
}

std::vector<Pixel> trace(const RegionRaster& r, Pixel start, Pixel backtrack, std::size_t region_pixels) {
  std::vector<Pixel> points{start};
  const TraceState initial{start, backtrack};
  TraceState first;
  if (!moore_step(r, initial, first)) {
    points.push_back(start);
    return points;
  }
  // The walk is periodic in (pixel, backtrack) state; it has closed when the
  // step out of the start pixel repeats the first step.
  TraceState state = first;
  const std::size_t cap = 8 * region_pixels + 16;
  for (std::size_t n = 0; n < cap; ++n) {
    points.push_back(state.p);
    TraceState next;
    moore_step(r, state, next);
    if (state.p == start && next == first) break;
    state = next;
  }
  if (!(points.back() == start)) points.push_back(start);
  return points;
}

}  // namespace

LabelSlice label_slice(const LesionLabelMap& map, std::int64_t z) {
  LabelSlice s;
  s.width = static_cast<int>(map.grid.dims[0]);
  s.height = static_cast<int>(map.grid.dims[1]);
  const std::size_t plane = static_cast<std::size_t>(s.width) * s.height;
  const auto begin = map.labels.begin() + static_cast<std::ptrdiff_t>(plane * static_cast<std::size_t>(z));
  s.labels.assign(begin, begin + static_cast<std::ptrdiff_t>(plane));
  return s;
}

ContourSet trace_contours(const LabelSlice& slice) {
  ContourSet out;
  std::vector<std::uint8_t> visited(slice.labels.size(), 0);
  for (int y = 0; y < slice.height; ++y) {
    for (int x = 0; x < slice.width; ++x) {
      const std::int32_t label = slice.at(x, y);
      if (label == 0 || visited[static_cast<std::size_t>(y) * slice.width + x]) continue;

      // 8-connected flood of the region; (x, y) is its topmost-leftmost pixel.
      std::vector<Pixel> pixels;
      std::queue<Pixel> queue;
      queue.push({x, y});
      visited[static_cast<std::size_t>(y) * slice.width + x] = 1;
      int bx0 = x, by0 = y, bx1 = x, by1 = y;
      while (!queue.empty()) {
        const Pixel p = queue.front();
        queue.pop();
        pixels.push_back(p);
        bx0 = std::min(bx0, p.x), by0 = std::min(by0, p.y), bx1 = std::max(bx1, p.x), by1 = std::max(by1, p.y);
        for (const Pixel d : kRing) {
          const Pixel q{p.x + d.x, p.y + d.y};
          if (q.x < 0 || q.y < 0 || q.x >= slice.width || q.y >= slice.height) continue;
          const std::size_t qi = static_cast<std::size_t>(q.y) * slice.width + q.x;
          if (visited[qi] || slice.labels[qi] != label) continue;
          visited[qi] = 1;
          queue.push(q);
        }
      }

      RegionRaster raster(bx0, by0, bx1 - bx0 + 1, by1 - by0 + 1);
      for (const Pixel p : pixels) raster.set(p);
      out.contours.push_back({label, true, trace(raster, {x, y}, {x - 1, y}, pixels.size())});

      // Holes: 4-connected background components not reachable from the margin.
      const int w = raster.width(), h = raster.height();
      std::vector<int> comp(static_cast<std::size_t>(w) * h, -1);
      int next_comp = 0;
      for (int ly = 0; ly < h; ++ly) {
        for (int lx = 0; lx < w; ++lx) {
          const Pixel seed{lx + raster.x0(), ly + raster.y0()};
          const std::size_t si = raster.idx(seed);
          if (raster.in(seed) || comp[si] >= 0) continue;
          const int id = next_comp++;
          bool exterior = false;
          std::queue<Pixel> q;
          q.push(seed);
          comp[si] = id;
          while (!q.empty()) {
            const Pixel p = q.front();
            q.pop();
            const int plx = p.x - raster.x0(), ply = p.y - raster.y0();
            if (plx == 0 || ply == 0 || plx == w - 1 || ply == h - 1) exterior = true;
            for (const Pixel d : {Pixel{1, 0}, Pixel{-1, 0}, Pixel{0, 1}, Pixel{0, -1}}) {
              const Pixel n{p.x + d.x, p.y + d.y};
              const int nlx = n.x - raster.x0(), nly = n.y - raster.y0();
              if (nlx < 0 || nly < 0 || nlx >= w || nly >= h) continue;
              if (raster.in(n) || comp[raster.idx(n)] >= 0) continue;
              comp[raster.idx(n)] = id;
              q.push(n);
            }
          }
          // seed is the hole's topmost-leftmost pixel, so the pixel above it
          // belongs to the region.
          if (!exterior) {
            const Pixel start{seed.x, seed.y - 1};
            out.contours.push_back({label, false, trace(raster, start, seed, pixels.size())});
          }
        }
      }
    }
  }
  return out;
}

}  // namespace lesionq
