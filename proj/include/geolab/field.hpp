#pragma once
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "geolab/geodesic.hpp"
#include "geolab/surface.hpp"

namespace geolab {

// Polar geodesic fan from a fixed source point with a spatial hash over its
// samples. This is the global-search half of every distance query sourced
// at that point: the fan proposes (direction, arclength) seeds near a target
// and the Newton solver in connect.cpp polishes them. Embedded families
// only; the flat torus has exact backends throughout.
class DistanceField {
 public:
  struct Hit {
    int ray;
    double t;       // arclength of the closest stored sample
    double chord2;  // squared chord from that sample to the query
  };

  DistanceField(const Surface& s, const SurfacePoint& source);

  const Surface& surface() const { return surface_; }
  const SurfacePoint& source() const { return source_; }
  double horizon() const { return horizon_; }
  double ray_theta(int i) const;
  int n_rays() const { return n_rays_; }
  double sample_spacing() const { return spacing_; }

  // Best sample of each contiguous ray cluster within `radius` of x
  // (adaptive default: fan transverse gap at arclength scale `t_scale`).
  std::vector<Hit> hits_near(Vec3 x, double t_scale) const;

  // Fast distance estimate: foot of x on the hit polylines plus a transverse
  // correction. Accurate to about the squared fan gap; used for bulk grid
  // sweeps and argmin preselection, never for final reported values.
  double estimate(Vec3 x) const;

  double query_radius(double t_scale) const;

 private:
  struct Sample {
    Vec3 x;
    float t;
    std::int32_t ray;
  };

  Vec3 sample_pos(int ray, int idx) const;
  double sample_t(int ray, int idx) const;
  std::int64_t cell_key(Vec3 x) const;

  Surface surface_;
  SurfacePoint source_;
  int n_rays_;
  double horizon_;
  double spacing_;    // arclength between stored samples
  double cell_;       // spatial hash cell size
  std::vector<Sample> samples_;           // contiguous per ray
  std::vector<std::int32_t> ray_offset_;  // n_rays + 1 entries
  std::unordered_map<std::int64_t, std::vector<std::int32_t>> grid_;
};

}  // namespace geolab
