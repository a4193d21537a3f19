#pragma once
#include <optional>
#include <vector>

#include "geolab/field.hpp"
#include "geolab/geodesic.hpp"
#include "geolab/surface.hpp"

namespace geolab {

// One geodesic from a to b: initial direction angle at a, arclength, final
// endpoint residual, and the arrival tangent at b. `closed` is only
// meaningful for loops (return tangent equals the initial tangent).
struct Connection {
  double theta = 0;
  double length = 0;
  double residual = 0;
  Vec3 end_tangent;
  bool closed = false;
};

struct ConnectionSet {
  SurfacePoint a, b;
  double l_max = 0;
  bool continuum_suspected = false;
  std::vector<Connection> members;

  bool empty() const { return members.empty(); }
  double min_length() const { return members.front().length; }
};

struct ConnectOptions {
  // Forces the ODE multi-start pipeline on the flat torus, whose default
  // backend is the exact lattice enumeration.
  bool force_ode = false;
  // Extra (theta, length) Newton seeds, e.g. warm competitor branches.
  std::vector<std::pair<double, double>> extra_seeds;
};

// Multi-start shooting: for each of n_starts initial angles, Newton on
// (theta, L) -> exp_a(L v(theta)) - b with finite-difference Jacobians;
// converged solutions deduplicated and sorted by (length, angle).
ConnectionSet connect_points(const Surface& s, const SurfacePoint& a,
                             const SurfacePoint& b, double l_max, int n_starts,
                             const ConnectOptions& opts = {});

double distance(const Surface& s, const SurfacePoint& a, const SurfacePoint& b);

// Geodesic loops at p with 0 < L <= l_max. Orientation-reversed duplicates
// are merged; each loop carries the closed-geodesic flag.
ConnectionSet find_loops(const Surface& s, const SurfacePoint& p, double l_max,
                         int n_starts);

struct LiftSample {
  double t;         // arclength parameter of the input curve sample
  double radius;    // |lift| in T_p M
  double angle;     // direction angle of the lift
  double residual;  // |exp_p(lift) - curve(t)|
};

struct LiftedCurve {
  SurfacePoint base;
  std::vector<SurfacePoint> curve;
  std::vector<LiftSample> lifts;
  double max_residual = 0;
};

// Continuation lifting of a surface curve into the tangential segment
// domain at p: each sample is Newton-solved seeded by the previous lift.
// Interior Newton failure raises LiftObstructionError with the sample index.
LiftedCurve lift_curve(const Surface& s, const SurfacePoint& p,
                       const std::vector<SurfacePoint>& curve);

// Single Newton solve of exp_from(L v(theta)) = target from one seed.
// The building block of connect_points, the field polish and the lift.
std::optional<Connection> newton_connect(const Surface& s,
                                         const SurfacePoint& from,
                                         const SurfacePoint& target,
                                         double theta0, double l0,
                                         double l_hi);

// Accurate distance from the field source to x: polishes the best field
// candidates with newton_connect. Absent when nothing converged.
std::optional<Connection> field_connection(const Surface& s,
                                           const DistanceField& field,
                                           const SurfacePoint& x,
                                           int max_candidates = 4);

}  // namespace geolab
