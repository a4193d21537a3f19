// Test-only oracles, independent of the solver paths they check:
//  - closed-form constant-curvature Jacobi solutions
//  - quadrature of the spheroid meridian ellipse
//  - dense-shooting distance (angle scan + golden-section, no Newton)
//  - exhaustive lattice scans on the flat torus
#pragma once
#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "geolab/geodesic.hpp"
#include "geolab/surface.hpp"

namespace oracle {

constexpr double kPi = std::numbers::pi;

// Arclength of the full meridian ellipse (semi-axes a, c) by composite
// Gauss-Legendre quadrature; the pole-to-pole route on the spheroid is half
// of this.
inline double meridian_length(double a, double c, int panels = 256) {
  // 5-point Gauss-Legendre nodes on [-1, 1]
  static const double xs[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                               0.5384693101056831, 0.9061798459386640};
  static const double ws[5] = {0.2369268850561891, 0.4786286704993665,
                               0.5688888888888889, 0.4786286704993665,
                               0.2369268850561891};
  double total = 0;
  const double width = 2 * kPi / panels;
  for (int k = 0; k < panels; ++k) {
    const double mid = (k + 0.5) * width;
    for (int q = 0; q < 5; ++q) {
      const double u = mid + 0.5 * width * xs[q];
      const double speed =
          std::hypot(a * std::sin(u), c * std::cos(u));
      total += 0.5 * width * ws[q] * speed;
    }
  }
  return total;
}

// Dense-shooting distance: scans `n_angles` directions, records the closest
// approach of each trajectory to the target, then golden-sections the best
// angular bracket. Deliberately avoids the production Newton solver.
inline double dense_shooting_distance(const geolab::Surface& s,
                                      const geolab::SurfacePoint& a,
                                      const geolab::SurfacePoint& b,
                                      double l_max, int n_angles = 512) {
  using geolab::Vec3;
  struct Approach {
    double chord2, t;
  };
  const auto closest = [&](double theta) -> Approach {
    const geolab::Geodesic g = geolab::shoot(s, a, theta, l_max);
    std::size_t jb = 0;
    double cb = 1e300;
    std::vector<double> c2s(g.samples.size());
    for (std::size_t j = 0; j < g.samples.size(); ++j) {
      const Vec3 d = s.wrap_delta(s.canonical(g.samples[j].x), b.r);
      c2s[j] = norm2(d);
      if (c2s[j] < cb) {
        cb = c2s[j];
        jb = j;
      }
    }
    Approach best{cb, g.samples[jb].t};
    if (jb > 0 && jb + 1 < g.samples.size()) {
      // parabolic sub-grid refinement of the closest approach
      const double cm = c2s[jb - 1], c0 = c2s[jb], cp = c2s[jb + 1];
      const double denom = cm - 2 * c0 + cp;
      if (denom > 0) {
        const double delta = 0.5 * (cm - cp) / denom;  // in grid units
        const double h = g.samples[jb].t - g.samples[jb - 1].t;
        best.t += delta * h;
        best.chord2 = std::max(0.0, c0 - 0.125 * (cm - cp) * delta);
      }
    }
    return best;
  };

  std::vector<Approach> scan(n_angles);
  for (int i = 0; i < n_angles; ++i)
    scan[i] = closest(2 * kPi * i / n_angles);

  // local minima of chord over the angle grid -> refine each, keep the
  // smallest arclength among those that actually reach the target
  double dist = 1e300;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int i = 0; i < n_angles; ++i) {
    const int prev = (i + n_angles - 1) % n_angles;
    const int next = (i + 1) % n_angles;
    if (scan[i].chord2 > scan[prev].chord2 ||
        scan[i].chord2 > scan[next].chord2)
      continue;
    if (scan[i].chord2 > 0.25) continue;
    double lo = 2 * kPi * (i - 1) / n_angles, hi = 2 * kPi * (i + 1) / n_angles;
    double m1 = hi - gr * (hi - lo), m2 = lo + gr * (hi - lo);
    Approach f1 = closest(m1), f2 = closest(m2);
    for (int it = 0; it < 40; ++it) {
      if (f1.chord2 < f2.chord2) {
        hi = m2; m2 = m1; f2 = f1;
        m1 = hi - gr * (hi - lo);
        f1 = closest(m1);
      } else {
        lo = m1; m1 = m2; f1 = f2;
        m2 = lo + gr * (hi - lo);
        f2 = closest(m2);
      }
    }
    const Approach fin = f1.chord2 < f2.chord2 ? f1 : f2;
    if (fin.chord2 < 1e-8) dist = std::min(dist, fin.t);
  }
  return dist;
}

// Exact flat-torus distance by lattice enumeration.
inline double flat_distance(double pa, double pb, geolab::Vec3 a,
                            geolab::Vec3 b) {
  double best = 1e300;
  for (int m = -3; m <= 3; ++m)
    for (int n = -3; n <= 3; ++n) {
      const double du = b.x - a.x + m * pa;
      const double dv = b.y - a.y + n * pb;
      best = std::min(best, std::hypot(du, dv));
    }
  return best;
}

// Exhaustive scan of F(x) = d(p,x) + d(q,x) over the flat-torus Voronoi
// boundary of p (the analytic cut locus).
struct BoundaryMin {
  double f;
  geolab::Vec3 x;
};
inline BoundaryMin flat_voronoi_f_min(double pa, double pb, geolab::Vec3 p,
                                      geolab::Vec3 q, int samples_per_edge) {
  BoundaryMin best{1e300, {}};
  const auto consider = [&](double ox, double oy) {
    const geolab::Vec3 x{p.x + ox, p.y + oy, 0};
    const double f = flat_distance(pa, pb, p, x) + flat_distance(pa, pb, q, x);
    if (f < best.f) best = {f, x};
  };
  for (int i = 0; i <= samples_per_edge; ++i) {
    const double su = -0.5 * pa + pa * i / samples_per_edge;
    const double sv = -0.5 * pb + pb * i / samples_per_edge;
    consider(su, 0.5 * pb);
    consider(su, -0.5 * pb);
    consider(0.5 * pa, sv);
    consider(-0.5 * pa, sv);
  }
  return best;
}

}  // namespace oracle
