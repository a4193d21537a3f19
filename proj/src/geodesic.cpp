#include "geolab/geodesic.hpp"

#include <algorithm>
#include <cmath>

#include "geolab/error.hpp"

namespace geolab {

namespace detail {

namespace {

struct Deriv {
  Vec3 dx, dtan;
  double dj, djp;
};

inline Deriv eval(const Surface& s, const OdeState& y, bool with_jacobi) {
  Deriv d;
  d.dx = y.tan;
  if (s.embedded()) {
    const Vec3 g = s.gradient(y.x);
    const double quad = s.hess_quad(y.x, y.tan);
    d.dtan = -(quad / norm2(g)) * g;
  } else {
    d.dtan = {0, 0, 0};
  }
  if (with_jacobi) {
    d.dj = y.jp;
    d.djp = -s.curvature(y.x) * y.j;
  } else {
    d.dj = d.djp = 0;
  }
  return d;
}

inline OdeState advance(const OdeState& y, const Deriv& k, double f) {
  return {y.x + f * k.dx, y.tan + f * k.dtan, y.j + f * k.dj, y.jp + f * k.djp};
}

}  // namespace

void rk4_step(const Surface& s, OdeState& y, double h, bool with_jacobi) {
  const Deriv k1 = eval(s, y, with_jacobi);
  const Deriv k2 = eval(s, advance(y, k1, 0.5 * h), with_jacobi);
  const Deriv k3 = eval(s, advance(y, k2, 0.5 * h), with_jacobi);
  const Deriv k4 = eval(s, advance(y, k3, h), with_jacobi);
  const double w = h / 6.0;
  y.x += w * (k1.dx + 2 * k2.dx + 2 * k3.dx + k4.dx);
  y.tan += w * (k1.dtan + 2 * k2.dtan + 2 * k3.dtan + k4.dtan);
  if (with_jacobi) {
    y.j += w * (k1.dj + 2 * k2.dj + 2 * k3.dj + k4.dj);
    y.jp += w * (k1.djp + 2 * k2.djp + 2 * k3.djp + k4.djp);
  }
}

void renormalize(const Surface& s, OdeState& y, double& surf_drift,
                 double& speed_drift) {
  if (s.embedded()) {
    surf_drift = s.residual(y.x);
    y.x = s.project(y.x);
    const Vec3 n = s.normal(y.x);
    y.tan -= dot(y.tan, n) * n;
  } else {
    surf_drift = 0;
  }
  const double sp = norm(y.tan);
  speed_drift = std::abs(sp - 1.0);
  y.tan = y.tan / sp;
}

OdeState integrate_endpoint(const Surface& s, const TangentFrame& frame,
                            double theta, double length, bool with_jacobi) {
  const double h = s.num.step;
  OdeState y{frame.base.r, direction(frame, theta), 0, 1};
  double sd, vd;
  const std::size_t n_full = static_cast<std::size_t>(length / h);
  for (std::size_t i = 0; i < n_full; ++i) {
    rk4_step(s, y, h, with_jacobi);
    renormalize(s, y, sd, vd);
  }
  const double rem = length - static_cast<double>(n_full) * h;
  if (rem > 1e-13) {
    rk4_step(s, y, rem, with_jacobi);
    renormalize(s, y, sd, vd);
  }
  return y;
}

}  // namespace detail

namespace {

using detail::OdeState;

OdeState initial_state(const Surface& s, const SurfacePoint& p, double theta) {
  const TangentFrame f = frame_at(s, p);
  return {p.r, direction(f, theta), 0.0, 1.0};
}

// One corrected step; throws when the drift guard trips.
void step_checked(const Surface& s, OdeState& y, double h, bool with_jacobi,
                  double t_next, Geodesic* g) {
  detail::rk4_step(s, y, h, with_jacobi);
  double sd = 0, vd = 0;
  detail::renormalize(s, y, sd, vd);
  if (g) {
    g->max_surface_drift = std::max(g->max_surface_drift, sd);
    g->max_speed_drift = std::max(g->max_speed_drift, vd);
    const double guard = s.num.tol.energy_guard;
    if (vd > guard || sd > guard)
      throw IntegrationError("geodesic drift guard exceeded", t_next);
  }
}

}  // namespace

Geodesic shoot(const Surface& s, const SurfacePoint& p, double theta,
               double length, double step) {
  if (length <= 0) throw InputError("shoot: length must be positive");
  const double h = step > 0 ? step : s.num.step;
  if (h <= 0) throw InputError("shoot: step must be positive");

  Geodesic g;
  g.surface = s;
  g.start = p;
  g.theta = theta;
  g.length = length;
  g.step = h;

  OdeState y = initial_state(s, p, theta);
  const std::size_t n_full = static_cast<std::size_t>(length / h);
  g.samples.reserve(n_full + 2);
  g.samples.push_back({0.0, y.x, y.tan});
  for (std::size_t i = 1; i <= n_full; ++i) {
    const double t = static_cast<double>(i) * h;
    step_checked(s, y, h, false, t, &g);
    g.samples.push_back({t, y.x, y.tan});
  }
  const double rem = length - static_cast<double>(n_full) * h;
  if (rem > 1e-12 * length) {
    step_checked(s, y, rem, false, length, &g);
    g.samples.push_back({length, y.x, y.tan});
  }
  return g;
}

GeoSample Geodesic::at(double t) const {
  t = std::clamp(t, 0.0, length);
  std::size_t i = static_cast<std::size_t>(t / step);
  if (i >= samples.size()) i = samples.size() - 1;
  // stored grid is uniform except for a possible short last interval
  if (samples[i].t > t && i > 0) --i;
  const GeoSample& base = samples[i];
  const double rem = t - base.t;
  if (rem < 1e-13) return {t, base.x, base.tan};
  OdeState y{base.x, base.tan, 0, 1};
  detail::rk4_step(surface, y, rem, false);
  double sd, vd;
  detail::renormalize(surface, y, sd, vd);
  return {t, y.x, y.tan};
}

namespace {

// j at base + delta, one partial RK4 step with the Jacobi block.
double jacobi_probe(const Surface& s, const OdeState& base, double delta) {
  if (delta <= 0) return base.j;
  OdeState y = base;
  detail::rk4_step(s, y, delta, true);
  return y.j;
}

}  // namespace

JacobiProfile jacobi_profile(const Geodesic& g) {
  const Surface& s = g.surface;
  JacobiProfile prof;
  prof.geodesic = g;
  prof.samples.reserve(g.samples.size());

  OdeState y = initial_state(s, g.start, g.theta);
  prof.samples.push_back({0.0, 0.0, 1.0});

  std::vector<OdeState> states;
  states.reserve(g.samples.size());
  states.push_back(y);

  for (std::size_t i = 1; i < g.samples.size(); ++i) {
    const double h = g.samples[i].t - g.samples[i - 1].t;
    step_checked(s, y, h, true, g.samples[i].t, nullptr);
    states.push_back(y);
    prof.samples.push_back({g.samples[i].t, y.j, y.jp});
  }

  // First sign change of j on (0, L]; an exact zero at the horizon counts.
  // j(0) = 0 is the initial condition, not a conjugate point.
  for (std::size_t i = 1; i < prof.samples.size(); ++i) {
    const double ja = prof.samples[i - 1].j;
    const double jb = prof.samples[i].j;
    const bool crossing = (i == 1) ? (jb < 0) : (ja * jb < 0 || jb == 0.0);
    if (crossing) {
      // bisect within [t_{i-1}, t_i] from the stored state
      const OdeState& base = states[i - 1];
      double lo = 0, hi = prof.samples[i].t - prof.samples[i - 1].t;
      double jlo = (i == 1) ? 1.0 : ja;  // sign surrogate at the left end
      const double width = s.num.tol.jacobi_bisect;
      while (hi - lo > width) {
        const double mid = 0.5 * (lo + hi);
        const double jm = jacobi_probe(s, base, mid);
        if (jm == 0.0) { lo = hi = mid; break; }
        if ((jlo > 0) == (jm > 0)) {
          lo = mid;
          jlo = jm;
        } else {
          hi = mid;
        }
      }
      prof.first_zero = prof.samples[i - 1].t + 0.5 * (lo + hi);
      break;
    }
  }
  return prof;
}

double JacobiProfile::j_at(double t) const {
  const Geodesic& g = geodesic;
  t = std::clamp(t, 0.0, g.length);
  std::size_t i = static_cast<std::size_t>(t / g.step);
  if (i >= samples.size()) i = samples.size() - 1;
  if (samples[i].t > t && i > 0) --i;
  const double rem = t - samples[i].t;
  if (rem < 1e-13) return samples[i].j;
  const GeoSample& gs = g.samples[i];
  OdeState y{gs.x, gs.tan, samples[i].j, samples[i].jp};
  return jacobi_probe(g.surface, y, rem);
}

std::optional<double> conjugate_time(const Surface& s, const SurfacePoint& p,
                                     double theta, double t_max) {
  if (t_max <= 0) throw InputError("conjugate_time: horizon must be positive");
  if (!s.embedded()) return std::nullopt;  // flat: j(t) = t, never zero

  // same stepping as jacobi_profile, but without sample storage and with an
  // early exit at the first crossing
  const double h = s.num.step;
  OdeState y = initial_state(s, p, theta);
  const std::size_t n_full = static_cast<std::size_t>(t_max / h);
  const double rem = t_max - static_cast<double>(n_full) * h;

  OdeState prev = y;
  double t_prev = 0;
  const std::size_t total = n_full + (rem > 1e-13 ? 1 : 0);
  for (std::size_t k = 1; k <= total; ++k) {
    const double hk = k <= n_full ? h : rem;
    const double t = k <= n_full ? static_cast<double>(k) * h : t_max;
    step_checked(s, y, hk, true, t, nullptr);
    const bool crossing =
        (k == 1) ? (y.j < 0) : (prev.j * y.j < 0 || y.j == 0.0);
    if (crossing) {
      double lo = 0, hi = hk;
      double jlo = (k == 1) ? 1.0 : prev.j;
      const double width = s.num.tol.jacobi_bisect;
      while (hi - lo > width) {
        const double mid = 0.5 * (lo + hi);
        const double jm = jacobi_probe(s, prev, mid);
        if (jm == 0.0) { lo = hi = mid; break; }
        if ((jlo > 0) == (jm > 0)) {
          lo = mid;
          jlo = jm;
        } else {
          hi = mid;
        }
      }
      return t_prev + 0.5 * (lo + hi);
    }
    prev = y;
    t_prev = t;
  }
  return std::nullopt;
}

}  // namespace geolab
