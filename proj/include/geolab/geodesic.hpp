#pragma once
#include <optional>
#include <vector>

#include "geolab/surface.hpp"

namespace geolab {

struct GeoSample {
  double t;
  Vec3 x;
  Vec3 tan;
};

// Unit-speed geodesic from `start` in direction angle `theta`, sampled at
// every integrator step (plus the endpoint when length is not a multiple of
// the step). Embedded samples carry raw ambient coordinates; flat-torus
// samples carry unwrapped chart coordinates so the trajectory is continuous.
struct Geodesic {
  Surface surface;
  SurfacePoint start;
  double theta = 0;
  double length = 0;
  double step = 0;
  std::vector<GeoSample> samples;
  double max_surface_drift = 0;  // pre-projection residual, worst step
  double max_speed_drift = 0;    // pre-renormalization | |T| - 1 |, worst step

  const GeoSample& end() const { return samples.back(); }
  // State at arclength t in [0, length]: nearest stored sample plus one
  // partial RK4 step.
  GeoSample at(double t) const;
  SurfacePoint end_point() const { return {surface.canonical(end().x)}; }
};

Geodesic shoot(const Surface& s, const SurfacePoint& p, double theta,
               double length, double step = 0);

struct JacobiSample {
  double t, j, jp;
};

// Scalar Jacobi field j'' + K(gamma(t)) j = 0, j(0) = 0, j'(0) = 1,
// co-integrated along the geodesic.
struct JacobiProfile {
  Geodesic geodesic;
  std::vector<JacobiSample> samples;
  std::optional<double> first_zero;

  double j_at(double t) const;
};

JacobiProfile jacobi_profile(const Geodesic& g);

// First zero of the Jacobi field in (0, t_max], refined by bisection.
// Absent means no conjugate point up to the horizon.
std::optional<double> conjugate_time(const Surface& s, const SurfacePoint& p,
                                     double theta, double t_max);

namespace detail {

// Integrator state shared by the engine, the connection solver and the
// distance field.
struct OdeState {
  Vec3 x, tan;
  double j = 0, jp = 1;
};

void rk4_step(const Surface& s, OdeState& y, double h, bool with_jacobi);
// Reprojects x onto the surface and renormalizes the tangent; reports the
// pre-correction drifts.
void renormalize(const Surface& s, OdeState& y, double& surf_drift,
                 double& speed_drift);

// Endpoint-only integration (no sample storage); the hot path of the
// Newton solvers.
OdeState integrate_endpoint(const Surface& s, const TangentFrame& frame,
                            double theta, double length, bool with_jacobi);

}  // namespace detail

}  // namespace geolab
