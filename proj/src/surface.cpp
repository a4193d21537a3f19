#include "geolab/surface.hpp"

#include <cmath>
#include <numbers>

#include "geolab/error.hpp"

namespace geolab {

namespace {
constexpr double kPi = std::numbers::pi;

void require(bool ok, const std::string& what) {
  if (!ok) throw InputError(what);
}
}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::Sphere: return "sphere";
    case Family::Ellipsoid: return "ellipsoid";
    case Family::TorusOfRevolution: return "torus";
    case Family::FlatTorus: return "flat_torus";
  }
  return "?";
}

Surface Surface::sphere(double R) {
  require(R > 0, "sphere: radius must be positive");
  Surface s;
  s.family = Family::Sphere;
  s.p0 = R;
  return s;
}

Surface Surface::ellipsoid(double a, double b, double c) {
  require(a > 0 && b > 0 && c > 0, "ellipsoid: semi-axes must be positive");
  require(a >= b && b >= c, "ellipsoid: semi-axes must satisfy a >= b >= c");
  Surface s;
  s.family = Family::Ellipsoid;
  s.p0 = a; s.p1 = b; s.p2 = c;
  return s;
}

Surface Surface::torus(double major, double minor) {
  require(major > 0 && minor > 0, "torus: radii must be positive");
  require(major > minor, "torus: major radius must exceed minor radius");
  Surface s;
  s.family = Family::TorusOfRevolution;
  s.p0 = major; s.p1 = minor;
  return s;
}

Surface Surface::flat_torus(double a, double b) {
  require(a > 0 && b > 0, "flat_torus: periods must be positive");
  Surface s;
  s.family = Family::FlatTorus;
  s.p0 = a; s.p1 = b;
  return s;
}

double Surface::diameter_estimate() const {
  if (num.diam_override > 0) return num.diam_override;
  switch (family) {
    case Family::Sphere: return kPi * p0;
    case Family::Ellipsoid: return kPi * p0;
    case Family::TorusOfRevolution: return kPi * (p0 + p1);
    case Family::FlatTorus: return 0.5 * std::sqrt(p0 * p0 + p1 * p1);
  }
  return 0;
}

double Surface::t_max() const {
  return num.t_max > 0 ? num.t_max : 4.0 * diameter_estimate();
}

double Surface::l_max() const {
  return num.l_max > 0 ? num.l_max : 2.5 * diameter_estimate();
}

double Surface::implicit(Vec3 p) const {
  switch (family) {
    case Family::Sphere:
      return 0.5 * (norm2(p) - p0 * p0);
    case Family::Ellipsoid: {
      const double u = p.x / p0, v = p.y / p1, w = p.z / p2;
      return 0.5 * (u * u + v * v + w * w - 1.0);
    }
    case Family::TorusOfRevolution: {
      const double rho = std::hypot(p.x, p.y);
      const double d = rho - p0;
      return 0.5 * (d * d + p.z * p.z - p1 * p1);
    }
    case Family::FlatTorus:
      return 0;
  }
  return 0;
}

Vec3 Surface::gradient(Vec3 p) const {
  switch (family) {
    case Family::Sphere:
      return p;
    case Family::Ellipsoid:
      return {p.x / (p0 * p0), p.y / (p1 * p1), p.z / (p2 * p2)};
    case Family::TorusOfRevolution: {
      const double rho = std::hypot(p.x, p.y);
      const double w = (rho - p0) / rho;
      return {w * p.x, w * p.y, p.z};
    }
    case Family::FlatTorus:
      return {0, 0, 1};
  }
  return {};
}

double Surface::hess_quad(Vec3 p, Vec3 t) const {
  switch (family) {
    case Family::Sphere:
      return norm2(t);
    case Family::Ellipsoid:
      return t.x * t.x / (p0 * p0) + t.y * t.y / (p1 * p1) +
             t.z * t.z / (p2 * p2);
    case Family::TorusOfRevolution: {
      const double rho = std::hypot(p.x, p.y);
      const double rho3 = rho * rho * rho;
      const double w = 1.0 - p0 / rho;
      const double hxx = w + p0 * p.x * p.x / rho3;
      const double hyy = w + p0 * p.y * p.y / rho3;
      const double hxy = p0 * p.x * p.y / rho3;
      return hxx * t.x * t.x + 2 * hxy * t.x * t.y + hyy * t.y * t.y +
             t.z * t.z;
    }
    case Family::FlatTorus:
      return 0;
  }
  return 0;
}

double Surface::residual(Vec3 p) const {
  if (!embedded()) return 0;
  const double g = norm(gradient(p));
  return std::abs(implicit(p)) / (g > 0 ? g : 1.0);
}

Vec3 Surface::project(Vec3 p) const {
  switch (family) {
    case Family::Sphere:
      return (p0 / norm(p)) * p;
    case Family::Ellipsoid: {
      // Newton steps along the gradient; quadratic for near-surface points,
      // which is the only use (drift correction, user input snapping).
      Vec3 q = p;
      for (int it = 0; it < 12; ++it) {
        const double f = implicit(q);
        const Vec3 g = gradient(q);
        const double g2 = norm2(g);
        q -= (f / g2) * g;
        if (std::abs(f) < 1e-16) break;
      }
      return q;
    }
    case Family::TorusOfRevolution: {
      const double rho = std::hypot(p.x, p.y);
      const Vec3 center{p0 * p.x / rho, p0 * p.y / rho, 0};
      return center + p1 * normalized(p - center);
    }
    case Family::FlatTorus:
      return canonical(p);
  }
  return p;
}

Vec3 Surface::normal(Vec3 p) const { return normalized(gradient(p)); }

double Surface::curvature(Vec3 p) const {
  switch (family) {
    case Family::Sphere:
      return 1.0 / (p0 * p0);
    case Family::Ellipsoid: {
      const double hx = p.x / (p0 * p0), hy = p.y / (p1 * p1),
                   hz = p.z / (p2 * p2);
      const double h2 = hx * hx + hy * hy + hz * hz;
      const double abc = p0 * p1 * p2;
      return 1.0 / (abc * abc * h2 * h2);
    }
    case Family::TorusOfRevolution: {
      // cos v / (r (R + r cos v)) with r cos v = rho - R.
      const double rho = std::hypot(p.x, p.y);
      return (rho - p0) / (p1 * p1 * rho);
    }
    case Family::FlatTorus:
      return 0;
  }
  return 0;
}

namespace {
double reduce_period(double u, double period) {
  double r = u - period * std::floor(u / period);
  if (r >= period) r -= period;  // guard the floor rounding edge
  if (r < 0) r = 0;
  return r;
}
double wrap_half(double d, double period) {
  // into [-period/2, period/2)
  double r = d - period * std::floor(d / period + 0.5);
  return r;
}
}  // namespace

Vec3 Surface::canonical(Vec3 p) const {
  if (embedded()) return p;
  return {reduce_period(p.x, p0), reduce_period(p.y, p1), 0};
}

Vec3 Surface::wrap_delta(Vec3 from, Vec3 to) const {
  Vec3 d = to - from;
  if (!embedded()) return {wrap_half(d.x, p0), wrap_half(d.y, p1), 0};
  return d;
}

SurfacePoint make_point(const Surface& s, Vec3 coords) {
  if (!s.embedded()) return {s.canonical(coords)};
  const double res = s.residual(coords);
  if (res >= s.num.tol.on_surface) {
    // Snap points that are merely imprecise (hand-typed config values);
    // reject anything genuinely off the surface.
    if (res < 1e-6 * (1.0 + s.diameter_estimate())) return {s.project(coords)};
    throw InputError("point off " + family_name(s.family) +
                     " surface (residual " + std::to_string(res) + ")");
  }
  return {coords};
}

SurfacePoint param_point(const Surface& s, double u, double v) {
  switch (s.family) {
    case Family::Sphere: {
      const double R = s.p0;
      return {{R * std::sin(u) * std::cos(v), R * std::sin(u) * std::sin(v),
               R * std::cos(u)}};
    }
    case Family::Ellipsoid:
      return {{s.p0 * std::sin(u) * std::cos(v),
               s.p1 * std::sin(u) * std::sin(v), s.p2 * std::cos(u)}};
    case Family::TorusOfRevolution: {
      const double R = s.p0, r = s.p1;
      const double rho = R + r * std::cos(v);
      return {{rho * std::cos(u), rho * std::sin(u), r * std::sin(v)}};
    }
    case Family::FlatTorus:
      return {s.canonical({u, v, 0})};
  }
  return {};
}

double curvature_at(const Surface& s, const SurfacePoint& p) {
  if (s.embedded() && s.residual(p.r) >= s.num.tol.on_surface)
    throw InputError("curvature_at: point off surface");
  return s.curvature(p.r);
}

TangentFrame frame_at(const Surface& s, const SurfacePoint& p) {
  if (!s.embedded()) return {p, {1, 0, 0}, {0, 1, 0}};
  const Vec3 n = s.normal(p.r);
  Vec3 e1 = Vec3{1, 0, 0} - n.x * n;
  if (norm(e1) < s.num.tol.frame_fallback) e1 = Vec3{0, 1, 0} - n.y * n;
  e1 = normalized(e1);
  return {p, e1, cross(n, e1)};
}

double wrap_angle(double theta) {
  constexpr double two_pi = 2 * std::numbers::pi;
  double r = theta - two_pi * std::floor(theta / two_pi);
  if (r >= two_pi) r -= two_pi;
  if (r < 0) r = 0;
  return r;
}

double angle_distance(double a, double b) {
  const double d = wrap_angle(a - b);
  return std::min(d, 2 * std::numbers::pi - d);
}

double angle_of(const TangentFrame& f, Vec3 tangent) {
  return wrap_angle(std::atan2(dot(tangent, f.e2), dot(tangent, f.e1)));
}

}  // namespace geolab
