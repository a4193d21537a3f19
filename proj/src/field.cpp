#include "geolab/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "geolab/error.hpp"
#include "geolab/parallel.hpp"

namespace geolab {

namespace {
constexpr double kTwoPi = 2 * std::numbers::pi;
}

DistanceField::DistanceField(const Surface& s, const SurfacePoint& source)
    : surface_(s), source_(source), n_rays_(s.num.fan_dirs) {
  if (!s.embedded())
    throw Error("DistanceField: flat torus uses the analytic backend");
  const double h = s.num.step * s.num.fan_step_factor;
  horizon_ = std::min(s.t_max(), s.num.fan_horizon_factor * s.diameter_estimate());
  const int steps = static_cast<int>(std::ceil(horizon_ / h));
  const int stride = std::max(1, s.num.fan_stride);
  spacing_ = h * stride;
  const int per_ray = steps / stride + 1;

  ray_offset_.assign(n_rays_ + 1, 0);
  for (int i = 0; i <= n_rays_; ++i) ray_offset_[i] = i * per_ray;
  samples_.resize(static_cast<std::size_t>(n_rays_) * per_ray);

  const TangentFrame frame = frame_at(s, source);
  parallel_for(static_cast<std::size_t>(n_rays_), [&](std::size_t i) {
    detail::OdeState y{source.r, direction(frame, ray_theta(static_cast<int>(i))),
                       0, 1};
    Sample* out = &samples_[ray_offset_[i]];
    int stored = 0;
    out[stored++] = {y.x, 0.0f, static_cast<std::int32_t>(i)};
    double sd, vd;
    for (int k = 1; k <= steps && stored < per_ray; ++k) {
      detail::rk4_step(surface_, y, h, false);
      detail::renormalize(surface_, y, sd, vd);
      if (k % stride == 0)
        out[stored++] = {y.x, static_cast<float>(k * h),
                         static_cast<std::int32_t>(i)};
    }
    while (stored < per_ray)  // defensive fill; loop above always completes
      out[stored++] = {y.x, static_cast<float>(horizon_),
                       static_cast<std::int32_t>(i)};
  });

  // spatial hash sized for the largest query radius we will serve
  cell_ = query_radius(horizon_);
  grid_.reserve(samples_.size() / 2);
  for (std::size_t idx = 0; idx < samples_.size(); ++idx)
    grid_[cell_key(samples_[idx].x)].push_back(static_cast<std::int32_t>(idx));
}

double DistanceField::ray_theta(int i) const { return kTwoPi * i / n_rays_; }

double DistanceField::query_radius(double t_scale) const {
  // half the transverse fan gap at arclength t_scale, padded, plus the
  // along-ray spacing
  return 2.0 * spacing_ + 0.75 * t_scale * (kTwoPi / n_rays_);
}

Vec3 DistanceField::sample_pos(int ray, int idx) const {
  return samples_[ray_offset_[ray] + idx].x;
}
double DistanceField::sample_t(int ray, int idx) const {
  return samples_[ray_offset_[ray] + idx].t;
}

std::int64_t DistanceField::cell_key(Vec3 x) const {
  const auto q = [&](double v) {
    return static_cast<std::int64_t>(std::floor(v / cell_)) & 0x1fffff;
  };
  return (q(x.x) << 42) | (q(x.y) << 21) | q(x.z);
}

std::vector<DistanceField::Hit> DistanceField::hits_near(Vec3 x,
                                                         double t_scale) const {
  const double radius = std::min(query_radius(t_scale), cell_);
  const double r2 = radius * radius;
  std::vector<Hit> raw;
  for (int dx = -1; dx <= 1; ++dx)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dz = -1; dz <= 1; ++dz) {
        const Vec3 probe{x.x + dx * cell_, x.y + dy * cell_, x.z + dz * cell_};
        const auto it = grid_.find(cell_key(probe));
        if (it == grid_.end()) continue;
        for (const std::int32_t idx : it->second) {
          const Sample& s = samples_[idx];
          const double c2 = norm2(s.x - x);
          if (c2 <= r2) raw.push_back({s.ray, s.t, c2});
        }
      }
  if (raw.empty()) return raw;

  // a ray can pass the query region several times (wrapping geodesics), so
  // cluster per (ray, pass): same ray, contiguous arclength window
  std::sort(raw.begin(), raw.end(), [](const Hit& a, const Hit& b) {
    return a.ray != b.ray ? a.ray < b.ray : a.t < b.t;
  });
  const double pass_gap = 4 * spacing_;
  std::vector<Hit> per_pass;
  double window_t = -1e300;
  int window_ray = -1;
  for (const Hit& h : raw) {
    if (h.ray == window_ray && h.t - window_t < pass_gap) {
      if (h.chord2 < per_pass.back().chord2) per_pass.back() = h;
    } else {
      per_pass.push_back(h);
    }
    window_ray = h.ray;
    window_t = h.t;
  }

  // merge adjacent rays belonging to the same branch: close ray index and
  // close arclength
  std::vector<Hit> clusters;
  for (const Hit& h : per_pass) {
    bool merged = false;
    for (Hit& c : clusters) {
      const int dray = std::min(std::abs(c.ray - h.ray),
                                n_rays_ - std::abs(c.ray - h.ray));
      if (dray <= 2 && std::abs(c.t - h.t) < 6 * spacing_) {
        if (h.chord2 < c.chord2) c = h;
        merged = true;
        break;
      }
    }
    if (!merged) clusters.push_back(h);
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const Hit& a, const Hit& b) { return a.chord2 < b.chord2; });
  return clusters;
}

double DistanceField::estimate(Vec3 x) const {
  const auto hits = hits_near(x, horizon_);
  double best = 1e300;
  for (const Hit& h : hits) {
    // refine the foot of x along the hit ray's polyline
    const int idx = static_cast<int>(std::lround(h.t / spacing_));
    const int count = ray_offset_[h.ray + 1] - ray_offset_[h.ray];
    double foot_t = h.t;
    double orth2 = h.chord2;
    for (int seg = std::max(0, idx - 1); seg < std::min(count - 1, idx + 1);
         ++seg) {
      const Vec3 a = sample_pos(h.ray, seg);
      const Vec3 b = sample_pos(h.ray, seg + 1);
      const Vec3 ab = b - a;
      const double len2 = norm2(ab);
      if (len2 <= 0) continue;
      const double s = std::clamp(dot(x - a, ab) / len2, 0.0, 1.0);
      const Vec3 ft = a + s * ab;
      const double o2 = norm2(x - ft);
      if (o2 < orth2) {
        orth2 = o2;
        foot_t = sample_t(h.ray, seg) + s * (sample_t(h.ray, seg + 1) -
                                             sample_t(h.ray, seg));
      }
    }
    const double d = foot_t + orth2 / (2 * std::max(foot_t, 0.2));
    best = std::min(best, d);
  }
  return best;
}

}  // namespace geolab
