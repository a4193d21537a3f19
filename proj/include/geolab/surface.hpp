#pragma once
#include <cstdint>
#include <string>

#include "geolab/vec.hpp"

namespace geolab {

enum class Family { Sphere, Ellipsoid, TorusOfRevolution, FlatTorus };

std::string family_name(Family f);

// Every tolerance used anywhere in the pipeline, with its default. All of
// them can be overridden from the configuration file.
struct Tolerances {
  double on_surface = 1e-10;        // point-off-surface residual
  double frame_fallback = 1e-6;     // axis-projection degeneracy threshold
  double unit_speed = 1e-8;         // per-sample |tangent| - 1 bound
  double sample_surface = 1e-8;     // per-sample surface residual bound
  double energy_guard = 1e-7;       // relative drift guard for a whole run
  double jacobi_bisect = 1e-10;     // bracket width for Jacobi zeros
  double endpoint = 1e-6;           // connection-membership endpoint residual
  double newton = 1e-10;            // Newton convergence on endpoint residual
  double newton_fd = 1e-6;          // finite-difference step for Jacobians
  int newton_max_iter = 50;
  double dedup_angle = 1e-3;        // connection dedup radius, angle
  double dedup_length = 1e-4;       // connection dedup radius, length
  double continuum_equal = 1e-6;    // equal-length threshold for continua
  double loop_closure = 1e-3;       // closed-geodesic tangent angle (rad)
  double cut = 1e-5;                // distance shortfall in the cut predicate
  double cut_bisect = 1e-6;         // bisection width for cut times
  double conjugacy_factor = 1e-3;   // conjugacy flag: |j(d)| < factor * d
  double lift = 1e-5;               // lift residual bound
  double refine_width = 1e-4;       // golden-section angular width
  double through_angle = 1e-3;      // tangent-opposition tolerance (rad)
  double through_land = 1e-4;       // confirmation-shot landing tolerance
  double q_margin = 1e-3;           // q-not-on-cut-locus margin
};

// Integration and search resolutions. Zeros mean "derive from the surface":
// t_max defaults to 4x the diameter estimate, l_max to 2.5x.
struct NumericParams {
  double step = 1e-3;        // RK4 arclength step
  double t_max = 0;          // conjugate-search horizon
  double l_max = 0;          // connection/loop length budget
  int n_dirs = 64;           // cut-locus atlas directions
  int n_starts = 16;         // multi-start Newton initial angles
  int fan_dirs = 512;        // distance-field fan resolution
  int fan_stride = 3;        // field sample stride (in fan steps)
  int fan_step_factor = 4;   // fan integrates at step * this factor
  double fan_horizon_factor = 1.5;  // fan horizon / diameter estimate
  int cut_step_factor = 2;   // cut-search solves integrate at step * factor
  double diam_override = 0;  // overrides the per-family diameter estimate
  std::uint64_t seed = 12345;
  Tolerances tol;
};

// One of the four catalog surfaces plus its numeric defaults. The three
// embedded families are evaluated chart-free through their implicit
// equation in R^3; the flat torus is the exact analytic backend.
struct Surface {
  Family family = Family::Sphere;
  double p0 = 1, p1 = 1, p2 = 1;  // R | a,b,c | R,r | a,b
  NumericParams num;

  static Surface sphere(double R);
  static Surface ellipsoid(double a, double b, double c);
  static Surface torus(double major, double minor);
  static Surface flat_torus(double a, double b);

  bool embedded() const { return family != Family::FlatTorus; }

  // Heuristic diameter; config-overridable.
  double diameter_estimate() const;
  double t_max() const;
  double l_max() const;

  // Implicit-equation machinery (embedded families only).
  double implicit(Vec3 p) const;        // F, zero level set = surface
  Vec3 gradient(Vec3 p) const;          // grad F (outward)
  double hess_quad(Vec3 p, Vec3 t) const;  // t . HessF . t
  double residual(Vec3 p) const;        // |F| / |grad F|, surface units
  Vec3 project(Vec3 p) const;           // nearest/Newton projection
  Vec3 normal(Vec3 p) const;

  double curvature(Vec3 p) const;       // Gaussian K, closed form per family

  // Flat-torus helpers. canonical() reduces into [0,a) x [0,b) and is exact
  // and idempotent; wrap_delta() is the minimum-image difference.
  Vec3 canonical(Vec3 p) const;
  Vec3 wrap_delta(Vec3 from, Vec3 to) const;
};

// A validated point of the surface: ambient coordinates for embedded
// families, canonical chart coordinates (u, v, 0) for the flat torus.
struct SurfacePoint {
  Vec3 r;
};

// Validates and canonicalizes; throws InputError when the residual exceeds
// the on-surface tolerance.
SurfacePoint make_point(const Surface& s, Vec3 coords);

// Builds the exact point from family parameters: sphere/ellipsoid
// (colatitude, longitude), torus (axial angle u, tube angle v), flat torus
// (u, v).
SurfacePoint param_point(const Surface& s, double u, double v);

struct TangentFrame {
  SurfacePoint base;
  Vec3 e1, e2;
};

double curvature_at(const Surface& s, const SurfacePoint& p);
TangentFrame frame_at(const Surface& s, const SurfacePoint& p);

inline Vec3 direction(const TangentFrame& f, double theta) {
  return std::cos(theta) * f.e1 + std::sin(theta) * f.e2;
}
// Angle of a tangent vector in [0, 2pi).
double angle_of(const TangentFrame& f, Vec3 tangent);

double wrap_angle(double theta);                 // into [0, 2pi)
double angle_distance(double a, double b);       // shortest angular distance

}  // namespace geolab
