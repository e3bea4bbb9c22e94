#include "lesionq/registration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "lesionq/errors.hpp"

namespace lesionq {
namespace {

constexpr double kSnap = 1e-6;

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

Vec3 mat_vec(const Mat3& m, const Vec3& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2], m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
          m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

Vec3 mat_t_vec(const Mat3& m, const Vec3& v) {
  return {m[0][0] * v[0] + m[1][0] * v[1] + m[2][0] * v[2], m[0][1] * v[0] + m[1][1] * v[1] + m[2][1] * v[2],
          m[0][2] * v[0] + m[1][2] * v[1] + m[2][2] * v[2]};
}

Mat3 mat_mul(const Mat3& a, const Mat3& b) {
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) out[i][j] += a[i][k] * b[k][j];
  return out;
}

double snap(double v) {
  const double r = std::round(v);
  return std::abs(v - r) < kSnap ? r : v;
}

// Image on a grid with an explicit physical origin; pyramid levels need one
// because block-averaged voxels are centered between the source voxels.
struct LevelImage {
  std::array<std::int64_t, 3> dims{};
  Vec3 spacing{};
  Vec3 origin{};
  std::vector<float> data;

  float at(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return data[static_cast<std::size_t>((z * dims[1] + y) * dims[0] + x)];
  }
};

LevelImage level_from_volume(const Volume& v) { return {v.grid.dims, v.grid.spacing, {0, 0, 0}, v.data}; }

LevelImage downsample(const LevelImage& src, int factor) {
  if (factor == 1) return src;
  LevelImage out;
  for (int a = 0; a < 3; ++a) {
    const std::int64_t f = std::min<std::int64_t>(factor, src.dims[a]);
    out.dims[a] = std::max<std::int64_t>(1, src.dims[a] / f);
    out.spacing[a] = src.spacing[a] * static_cast<double>(f);
    out.origin[a] = src.origin[a] + 0.5 * static_cast<double>(f - 1) * src.spacing[a];
  }
  std::array<std::int64_t, 3> f{};
  for (int a = 0; a < 3; ++a) f[a] = std::min<std::int64_t>(factor, src.dims[a]);
  out.data.resize(static_cast<std::size_t>(out.dims[0] * out.dims[1] * out.dims[2]));
  const double norm = 1.0 / static_cast<double>(f[0] * f[1] * f[2]);
  std::size_t o = 0;
  for (std::int64_t z = 0; z < out.dims[2]; ++z) {
    for (std::int64_t y = 0; y < out.dims[1]; ++y) {
      for (std::int64_t x = 0; x < out.dims[0]; ++x, ++o) {
        double sum = 0.0;
        for (std::int64_t dz = 0; dz < f[2]; ++dz)
          for (std::int64_t dy = 0; dy < f[1]; ++dy)
            for (std::int64_t dx = 0; dx < f[0]; ++dx) sum += src.at(x * f[0] + dx, y * f[1] + dy, z * f[2] + dz);
        out.data[o] = static_cast<float>(sum * norm);
      }
    }
  }
  return out;
}

// Affine map from fixed voxel indices to moving voxel indices: u = M i + b.
struct IndexMap {
  Mat3 m{};
  Vec3 b{};
};

IndexMap index_map(const Vec3& fixed_spacing, const Vec3& fixed_origin, const Vec3& moving_spacing,
                   const Vec3& moving_origin, const RigidTransform& t) {
  const Mat3 r = t.rotation_matrix();
  IndexMap map;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) map.m[i][j] = r[i][j] * fixed_spacing[j] / moving_spacing[i];
  Vec3 d{};
  for (int a = 0; a < 3; ++a) d[a] = fixed_origin[a] - t.center_mm[a];
  const Vec3 rd = mat_vec(r, d);
  for (int a = 0; a < 3; ++a) {
    map.b[a] = (rd[a] + t.center_mm[a] + t.translation_mm[a] - moving_origin[a]) / moving_spacing[a];
  }
  return map;
}

// Trilinear sample at index coordinates; false when outside [0, n-1].
template <typename Getter>
bool sample_trilinear(const std::array<std::int64_t, 3>& dims, Getter get, Vec3 u, double& value) {
  std::array<std::int64_t, 3> i0{};
  Vec3 w{};
  for (int a = 0; a < 3; ++a) {
    u[a] = snap(u[a]);
    const auto hi = static_cast<double>(dims[a] - 1);
    if (u[a] < 0.0 || u[a] > hi) return false;
    i0[a] = std::min(static_cast<std::int64_t>(std::floor(u[a])), std::max<std::int64_t>(dims[a] - 2, 0));
    w[a] = u[a] - static_cast<double>(i0[a]);
  }
  double acc = 0.0;
  for (int c = 0; c < 8; ++c) {
    const int bx = c & 1, by = (c >> 1) & 1, bz = (c >> 2) & 1;
    const double wx = bx ? w[0] : 1.0 - w[0];
    const double wy = by ? w[1] : 1.0 - w[1];
    const double wz = bz ? w[2] : 1.0 - w[2];
    const double weight = wx * wy * wz;
    if (weight == 0.0) continue;
    acc += weight * get(i0[0] + bx, i0[1] + by, i0[2] + bz);
  }
  value = acc;
  return true;
}

struct NccSums {
  double n = 0, sf = 0, sm = 0, sff = 0, smm = 0, sfm = 0;

  double value() const {
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    const double cov = sfm - sf * sm / n;
    const double vf = sff - sf * sf / n;
    const double vm = smm - sm * sm / n;
    if (vf <= 0.0 || vm <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    return cov / std::sqrt(vf * vm);
  }
};

NccSums ncc_sums(const LevelImage& fixed, const LevelImage& moving, const RigidTransform& t) {
  const IndexMap map = index_map(fixed.spacing, fixed.origin, moving.spacing, moving.origin, t);
  NccSums s;
  auto get = [&moving](std::int64_t x, std::int64_t y, std::int64_t z) { return moving.at(x, y, z); };
  std::size_t idx = 0;
  for (std::int64_t z = 0; z < fixed.dims[2]; ++z) {
    for (std::int64_t y = 0; y < fixed.dims[1]; ++y) {
      Vec3 u{};
      for (int a = 0; a < 3; ++a) {
        u[a] = map.m[a][1] * static_cast<double>(y) + map.m[a][2] * static_cast<double>(z) + map.b[a];
      }
      for (std::int64_t x = 0; x < fixed.dims[0]; ++x, ++idx) {
        const Vec3 ux{u[0] + map.m[0][0] * static_cast<double>(x), u[1] + map.m[1][0] * static_cast<double>(x),
                      u[2] + map.m[2][0] * static_cast<double>(x)};
        double mv;
        if (!sample_trilinear(moving.dims, get, ux, mv)) continue;
        const double fv = fixed.data[idx];
        s.n += 1;
        s.sf += fv;
        s.sm += mv;
        s.sff += fv * fv;
        s.smm += mv * mv;
        s.sfm += fv * mv;
      }
    }
  }
  return s;
}

bool has_variance(const std::vector<float>& data) {
  return std::adjacent_find(data.begin(), data.end(), std::not_equal_to<>()) != data.end();
}

// Parameter vector: rx, ry, rz (deg), tx, ty, tz (mm).
RigidTransform with_params(const RigidTransform& base, const std::array<double, 6>& p) {
  RigidTransform t = base;
  t.rotation_deg = {p[0], p[1], p[2]};
  t.translation_mm = {p[3], p[4], p[5]};
  return t;
}

double score(const LevelImage& fixed, const LevelImage& moving, const RigidTransform& t) {
  const double v = ncc_sums(fixed, moving, t).value();
  return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
}

}  // namespace

Mat3 RigidTransform::rotation_matrix() const {
  const double x = deg2rad(rotation_deg[0]);
  const double y = deg2rad(rotation_deg[1]);
  const double z = deg2rad(rotation_deg[2]);
  const Mat3 rx{{{1, 0, 0}, {0, std::cos(x), -std::sin(x)}, {0, std::sin(x), std::cos(x)}}};
  const Mat3 ry{{{std::cos(y), 0, std::sin(y)}, {0, 1, 0}, {-std::sin(y), 0, std::cos(y)}}};
  const Mat3 rz{{{std::cos(z), -std::sin(z), 0}, {std::sin(z), std::cos(z), 0}, {0, 0, 1}}};
  return mat_mul(rz, mat_mul(ry, rx));
}

Vec3 RigidTransform::apply(const Vec3& p) const {
  const Vec3 d{p[0] - center_mm[0], p[1] - center_mm[1], p[2] - center_mm[2]};
  const Vec3 r = mat_vec(rotation_matrix(), d);
  return {r[0] + center_mm[0] + translation_mm[0], r[1] + center_mm[1] + translation_mm[1],
          r[2] + center_mm[2] + translation_mm[2]};
}

Vec3 RigidTransform::apply_inverse(const Vec3& q) const {
  const Vec3 d{q[0] - center_mm[0] - translation_mm[0], q[1] - center_mm[1] - translation_mm[1],
               q[2] - center_mm[2] - translation_mm[2]};
  const Vec3 r = mat_t_vec(rotation_matrix(), d);
  return {r[0] + center_mm[0], r[1] + center_mm[1], r[2] + center_mm[2]};
}

void validate(const RegistrationParams& p) {
  if (p.pyramid_levels < 1) throw InvalidArgument("pyramid_levels must be >= 1");
  if (p.pyramid_levels > 8) throw InvalidArgument("pyramid_levels must be <= 8");
  if (!(p.min_translation_step_mm > 0 && p.min_translation_step_mm < p.initial_translation_step_mm)) {
    throw InvalidArgument("translation steps must satisfy 0 < min < initial");
  }
  if (!(p.min_rotation_step_deg > 0 && p.min_rotation_step_deg < p.initial_rotation_step_deg)) {
    throw InvalidArgument("rotation steps must satisfy 0 < min < initial");
  }
  if (p.max_iterations_per_level < 1) throw InvalidArgument("max_iterations_per_level must be >= 1");
}

RegistrationResult register_rigid(const Volume& fixed, const Volume& moving, const RegistrationParams& params) {
  validate(fixed);
  validate(moving);
  validate(params);
  if (!has_variance(fixed.data) || !has_variance(moving.data)) {
    throw DegenerateInput("constant-intensity volume: NCC is undefined");
  }

  const Vec3 fc = fixed.grid.center_mm();
  const Vec3 mc = moving.grid.center_mm();
  RigidTransform base = RigidTransform::identity(fc);
  std::array<double, 6> p{0, 0, 0, mc[0] - fc[0], mc[1] - fc[1], mc[2] - fc[2]};

  const LevelImage fixed_full = level_from_volume(fixed);
  const LevelImage moving_full = level_from_volume(moving);
  if (ncc_sums(fixed_full, moving_full, with_params(base, p)).n == 0) {
    throw NoOverlap("volumes do not overlap after center alignment");
  }

  RegistrationResult result;
  const int coarsest = 1 << (params.pyramid_levels - 1);
  for (int level = 0; level < params.pyramid_levels; ++level) {
    const int factor = coarsest >> level;
    const LevelImage f = downsample(fixed_full, factor);
    const LevelImage m = downsample(moving_full, factor);

    // Steps shrink by half per level; each level stops once they fall below
    // the minimum scaled by the level's downsample factor.
    double scale = 1.0 / static_cast<double>(1 << level);
    const double stop_scale =
        std::max(params.min_translation_step_mm / params.initial_translation_step_mm,
                 params.min_rotation_step_deg / params.initial_rotation_step_deg) *
        static_cast<double>(factor);

    double current = score(f, m, with_params(base, p));
    auto& trace = result.accepted_ncc.emplace_back();
    trace.push_back(current);
    int iter = 0;
    bool level_done = scale < stop_scale;
    for (; iter < params.max_iterations_per_level && !level_done; ++iter) {
      const double step_t = params.initial_translation_step_mm * scale;
      const double step_r = params.initial_rotation_step_deg * scale;
      double best = current;
      std::array<double, 6> best_p = p;
      for (int k = 0; k < 6; ++k) {
        for (int sign : {+1, -1}) {
          std::array<double, 6> cand = p;
          cand[k] += sign * (k < 3 ? step_r : step_t);
          const double s = score(f, m, with_params(base, cand));
          if (s > best) {
            best = s;
            best_p = cand;
          }
        }
      }
      if (best > current) {
        current = best;
        p = best_p;
        trace.push_back(current);
      } else {
        scale *= 0.5;
        level_done = scale < stop_scale;
      }
    }
    result.iterations += iter;
    if (!level_done) result.converged = false;
  }

  result.transform = with_params(base, p);
  result.final_ncc = ncc_sums(fixed_full, moving_full, result.transform).value();
  return result;
}

double normalized_cross_correlation(const Volume& fixed, const Volume& moving, const RigidTransform& transform) {
  return ncc_sums(level_from_volume(fixed), level_from_volume(moving), transform).value();
}

Volume resample_volume(const Volume& moving, const RigidTransform& transform, const Grid& reference) {
  validate(moving);
  validate_grid(reference);
  Volume out{reference, DType::F32, std::vector<float>(reference.voxel_count(), 0.0f)};
  const IndexMap map = index_map(reference.spacing, {0, 0, 0}, moving.grid.spacing, {0, 0, 0}, transform);
  auto get = [&moving](std::int64_t x, std::int64_t y, std::int64_t z) {
    return static_cast<double>(moving.at(x, y, z));
  };
  std::size_t idx = 0;
  for (std::int64_t z = 0; z < reference.dims[2]; ++z) {
    for (std::int64_t y = 0; y < reference.dims[1]; ++y) {
      for (std::int64_t x = 0; x < reference.dims[0]; ++x, ++idx) {
        const Vec3 i{static_cast<double>(x), static_cast<double>(y), static_cast<double>(z)};
        const Vec3 mi = mat_vec(map.m, i);
        double v;
        if (sample_trilinear(moving.grid.dims, get, {mi[0] + map.b[0], mi[1] + map.b[1], mi[2] + map.b[2]}, v)) {
          out.data[idx] = static_cast<float>(v);
        }
      }
    }
  }
  return out;
}

LesionLabelMap resample_labelmap(const LesionLabelMap& labels, const RigidTransform& transform, const Grid& reference) {
  validate_grid(reference);
  LesionLabelMap out{reference, std::vector<std::int32_t>(reference.voxel_count(), 0), 0};
  const IndexMap map = index_map(reference.spacing, {0, 0, 0}, labels.grid.spacing, {0, 0, 0}, transform);
  std::set<std::int32_t> survivors;
  std::size_t idx = 0;
  for (std::int64_t z = 0; z < reference.dims[2]; ++z) {
    for (std::int64_t y = 0; y < reference.dims[1]; ++y) {
      for (std::int64_t x = 0; x < reference.dims[0]; ++x, ++idx) {
        const Vec3 i{static_cast<double>(x), static_cast<double>(y), static_cast<double>(z)};
        const Vec3 mi = mat_vec(map.m, i);
        std::array<std::int64_t, 3> n{};
        bool inside = true;
        for (int a = 0; a < 3; ++a) {
          n[a] = static_cast<std::int64_t>(std::floor(snap(mi[a] + map.b[a]) + 0.5));
          inside = inside && n[a] >= 0 && n[a] < labels.grid.dims[a];
        }
        if (!inside) continue;
        const std::int32_t l = labels.at(n[0], n[1], n[2]);
        out.labels[idx] = l;
        if (l > 0) survivors.insert(l);
      }
    }
  }
  out.lesion_count = static_cast<std::int32_t>(survivors.size());
  return out;
}

Vec3 map_moving_point_to_fixed(const RigidTransform& transform, const Vec3& q) { return transform.apply_inverse(q); }

Vec3 voxel_to_physical(const Grid& grid, const Vec3& v) {
  return {v[0] * grid.spacing[0], v[1] * grid.spacing[1], v[2] * grid.spacing[2]};
}

Vec3 physical_to_voxel(const Grid& grid, const Vec3& p) {
  return {p[0] / grid.spacing[0], p[1] / grid.spacing[1], p[2] / grid.spacing[2]};
}

}  // namespace lesionq
