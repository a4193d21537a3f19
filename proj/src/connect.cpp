#include "geolab/connect.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "geolab/error.hpp"
#include "geolab/parallel.hpp"

namespace geolab {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

// ---------------------------------------------------------------------
// flat torus: exact lattice backends

struct LatticeReach {
  double du, dv, len;
};

std::vector<LatticeReach> lattice_reaches(const Surface& s, Vec3 a, Vec3 b,
                                          double l_max) {
  const double pa = s.p0, pb = s.p1;
  std::vector<LatticeReach> out;
  const int mu = static_cast<int>(std::ceil(l_max / pa)) + 1;
  const int mv = static_cast<int>(std::ceil(l_max / pb)) + 1;
  for (int m = -mu; m <= mu; ++m)
    for (int n = -mv; n <= mv; ++n) {
      const double du = b.x - a.x + m * pa;
      const double dv = b.y - a.y + n * pb;
      const double len = std::hypot(du, dv);
      if (len > 0 && len <= l_max) out.push_back({du, dv, len});
    }
  std::sort(out.begin(), out.end(), [](const LatticeReach& x,
                                       const LatticeReach& y) {
    if (x.len != y.len) return x.len < y.len;
    return std::atan2(x.dv, x.du) < std::atan2(y.dv, y.du);
  });
  return out;
}

ConnectionSet flat_connect(const Surface& s, const SurfacePoint& a,
                           const SurfacePoint& b, double l_max) {
  ConnectionSet set{a, b, l_max, false, {}};
  for (const LatticeReach& r : lattice_reaches(s, a.r, b.r, l_max)) {
    Connection c;
    c.theta = wrap_angle(std::atan2(r.dv, r.du));
    c.length = r.len;
    c.residual = 0;
    c.end_tangent = {r.du / r.len, r.dv / r.len, 0};
    set.members.push_back(c);
  }
  return set;
}

double flat_distance(const Surface& s, Vec3 a, Vec3 b) {
  const Vec3 d = s.wrap_delta(a, b);
  return std::hypot(d.x, d.y);
}

// ---------------------------------------------------------------------

struct Residual {
  Vec3 full;   // ambient (or wrapped chart) endpoint mismatch
  double n{};  // its norm
};

Residual endpoint_residual(const Surface& s, Vec3 endpoint, const SurfacePoint& b) {
  Residual r;
  r.full = s.embedded() ? endpoint - b.r : s.wrap_delta(b.r, s.canonical(endpoint));
  r.n = norm(r.full);
  return r;
}

}  // namespace

std::optional<Connection> newton_connect(const Surface& s,
                                         const SurfacePoint& from,
                                         const SurfacePoint& target,
                                         double theta0, double l0,
                                         double l_hi) {
  const Tolerances& tol = s.num.tol;
  const TangentFrame frame = frame_at(s, from);
  const TangentFrame tframe = frame_at(s, target);

  const auto project2 = [&](const Residual& r) {
    if (s.embedded())
      return std::pair<double, double>{dot(r.full, tframe.e1),
                                       dot(r.full, tframe.e2)};
    return std::pair<double, double>{r.full.x, r.full.y};
  };

  double theta = theta0;
  double len = std::clamp(l0, 16 * s.num.step, l_hi);
  detail::OdeState y = detail::integrate_endpoint(s, frame, theta, len, false);
  Residual res = endpoint_residual(s, y.x, target);

  const double fd = tol.newton_fd;
  for (int it = 0; it < tol.newton_max_iter; ++it) {
    if (res.n < tol.newton) {
      Connection c;
      c.theta = wrap_angle(theta);
      c.length = len;
      c.residual = res.n;
      c.end_tangent = y.tan;
      return c;
    }
    // finite-difference Jacobian of the frame-projected residual
    const auto [r0a, r0b] = project2(res);
    detail::OdeState yt =
        detail::integrate_endpoint(s, frame, theta + fd, len, false);
    const auto [rta, rtb] = project2(endpoint_residual(s, yt.x, target));
    detail::OdeState yl = y;
    detail::rk4_step(s, yl, fd, false);
    double sd, vd;
    detail::renormalize(s, yl, sd, vd);
    const auto [rla, rlb] = project2(endpoint_residual(s, yl.x, target));

    const double j11 = (rta - r0a) / fd, j12 = (rla - r0a) / fd;
    const double j21 = (rtb - r0b) / fd, j22 = (rlb - r0b) / fd;
    const double det = j11 * j22 - j12 * j21;
    if (!std::isfinite(det) || std::abs(det) < 1e-14) return std::nullopt;
    const double dtheta = (-r0a * j22 + r0b * j12) / det;
    const double dlen = (-j11 * r0b + j21 * r0a) / det;

    // damped step: halve on residual increase
    double lambda = 1.0;
    bool accepted = false;
    for (int halv = 0; halv < 12; ++halv) {
      const double th_try = theta + lambda * dtheta;
      const double ln_try = len + lambda * dlen;
      if (ln_try <= 8 * s.num.step || ln_try > l_hi * 1.05) {
        lambda *= 0.5;
        continue;
      }
      detail::OdeState y_try =
          detail::integrate_endpoint(s, frame, th_try, ln_try, false);
      const Residual r_try = endpoint_residual(s, y_try.x, target);
      if (r_try.n < res.n) {
        theta = th_try;
        len = ln_try;
        y = y_try;
        res = r_try;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) return std::nullopt;
  }
  if (res.n < tol.newton) {
    Connection c;
    c.theta = wrap_angle(theta);
    c.length = len;
    c.residual = res.n;
    c.end_tangent = y.tan;
    return c;
  }
  return std::nullopt;
}

namespace {

// Closest-approach arclengths of a trajectory to a target: the Newton seeds
// contributed by one start angle.
std::vector<double> approach_seeds(const Surface& s, const Geodesic& g,
                                   const SurfacePoint& target, double gate2,
                                   int max_seeds) {
  const int scan_stride =
      std::max<int>(1, static_cast<int>(std::lround(0.01 / g.step)));
  struct Local {
    double chord2, t;
  };
  std::vector<Local> minima;
  double prev2 = 1e300, cur2 = 1e300;
  double prev_t = 0, cur_t = 0;
  for (std::size_t i = 0; i < g.samples.size(); i += scan_stride) {
    const GeoSample& smp = g.samples[i];
    const Vec3 d = s.embedded() ? smp.x - target.r
                                : s.wrap_delta(target.r, s.canonical(smp.x));
    const double c2 = norm2(d);
    if (cur2 < prev2 && c2 >= cur2 && cur2 < gate2 && cur_t > 0)
      minima.push_back({cur2, cur_t});
    prev2 = cur2;
    prev_t = cur_t;
    cur2 = c2;
    cur_t = smp.t;
  }
  (void)prev_t;
  if (cur2 < prev2 && cur2 < gate2) minima.push_back({cur2, cur_t});
  std::sort(minima.begin(), minima.end(),
            [](const Local& a, const Local& b) { return a.chord2 < b.chord2; });
  if (static_cast<int>(minima.size()) > max_seeds) minima.resize(max_seeds);
  std::vector<double> out;
  for (const Local& m : minima) out.push_back(m.t);
  return out;
}

void dedup_and_sort(const Surface& s, std::vector<Connection>& members) {
  const Tolerances& tol = s.num.tol;
  std::sort(members.begin(), members.end(),
            [](const Connection& a, const Connection& b) {
              if (a.length != b.length) return a.length < b.length;
              return a.theta < b.theta;
            });
  std::vector<Connection> kept;
  for (const Connection& c : members) {
    bool dup = false;
    for (const Connection& k : kept) {
      if (std::abs(c.length - k.length) < tol.dedup_length &&
          angle_distance(c.theta, k.theta) < tol.dedup_angle) {
        dup = true;
        break;
      }
    }
    if (!dup) kept.push_back(c);
  }
  members = std::move(kept);
}

bool continuum_check(const Surface& s, const std::vector<Connection>& members,
                     int n_starts) {
  if (members.empty()) return false;
  const double lmin = members.front().length;
  int equal_angles = 0;
  for (const Connection& c : members)
    if (std::abs(c.length - lmin) < s.num.tol.continuum_equal) ++equal_angles;
  return equal_angles >= (n_starts + 1) / 2;
}

}  // namespace

ConnectionSet connect_points(const Surface& s, const SurfacePoint& a,
                             const SurfacePoint& b, double l_max, int n_starts,
                             const ConnectOptions& opts) {
  if (n_starts < 8) throw InputError("connect_points: n_starts must be >= 8");
  if (l_max <= 0) throw InputError("connect_points: l_max must be positive");
  if (!s.embedded() && !opts.force_ode) return flat_connect(s, a, b, l_max);

  const double gate = 0.35 * s.diameter_estimate();
  std::vector<std::vector<Connection>> found(n_starts + 1);

  parallel_for(static_cast<std::size_t>(n_starts), [&](std::size_t k) {
    const double theta = kTwoPi * static_cast<double>(k) / n_starts;
    const Geodesic g = shoot(s, a, theta, l_max);
    for (const double t : approach_seeds(s, g, b, gate * gate, 4)) {
      if (auto c = newton_connect(s, a, b, theta, t, l_max))
        if (c->length <= l_max + s.num.tol.dedup_length)
          found[k].push_back(*c);
    }
  });
  for (const auto& seed : opts.extra_seeds)
    if (auto c = newton_connect(s, a, b, seed.first, seed.second, l_max))
      if (c->length <= l_max + s.num.tol.dedup_length)
        found[n_starts].push_back(*c);

  ConnectionSet set{a, b, l_max, false, {}};
  for (const auto& chunk : found)
    set.members.insert(set.members.end(), chunk.begin(), chunk.end());
  dedup_and_sort(s, set.members);
  set.continuum_suspected = continuum_check(s, set.members, n_starts);

  if (set.members.empty() && l_max >= 2 * s.diameter_estimate())
    throw NoConnectionError("connect_points: no connection found with l_max " +
                            std::to_string(l_max));
  return set;
}

double distance(const Surface& s, const SurfacePoint& a,
                const SurfacePoint& b) {
  if (!s.embedded()) return flat_distance(s, a.r, b.r);
  if (norm(a.r - b.r) == 0) return 0;
  const double l_max = 1.5 * s.diameter_estimate();
  const ConnectionSet set = connect_points(s, a, b, l_max, s.num.n_starts);
  if (set.empty())
    throw NoConnectionError("distance: no connection found");
  return set.min_length();
}

namespace {

ConnectionSet flat_loops(const Surface& s, const SurfacePoint& p,
                         double l_max) {
  ConnectionSet set{p, p, l_max, false, {}};
  for (const LatticeReach& r : lattice_reaches(s, p.r, p.r, l_max)) {
    Connection c;
    c.theta = wrap_angle(std::atan2(r.dv, r.du));
    c.length = r.len;
    c.end_tangent = {r.du / r.len, r.dv / r.len, 0};
    c.closed = true;  // lattice translations close up smoothly
    // orientation merge: keep the representative with theta in [0, pi)
    if (c.theta >= std::numbers::pi - 1e-12) continue;
    set.members.push_back(c);
  }
  return set;
}

}  // namespace

ConnectionSet find_loops(const Surface& s, const SurfacePoint& p, double l_max,
                         int n_starts) {
  if (l_max <= 0) throw InputError("find_loops: l_max must be positive");
  if (!s.embedded()) return flat_loops(s, p, l_max);

  ConnectionSet set = connect_points(s, p, p, l_max, n_starts);
  const TangentFrame frame = frame_at(s, p);
  const Tolerances& tol = s.num.tol;

  // drop near-zero-length artifacts, flag closure, merge reversed twins
  std::vector<Connection> loops;
  for (Connection c : set.members) {
    if (c.length < 32 * s.num.step) continue;
    const double back = angle_of(frame, c.end_tangent);
    c.closed = angle_distance(back, c.theta) < tol.loop_closure;
    bool reversed_dup = false;
    for (const Connection& k : loops) {
      const double rev_theta = angle_of(frame, -k.end_tangent);
      if (std::abs(c.length - k.length) < tol.dedup_length &&
          angle_distance(c.theta, rev_theta) < 10 * tol.dedup_angle) {
        reversed_dup = true;
        break;
      }
    }
    if (!reversed_dup) loops.push_back(c);
  }
  set.members = std::move(loops);
  return set;
}

LiftedCurve lift_curve(const Surface& s, const SurfacePoint& p,
                       const std::vector<SurfacePoint>& curve) {
  if (curve.empty()) throw InputError("lift_curve: empty curve");
  LiftedCurve lifted;
  lifted.base = p;
  lifted.curve = curve;
  const double l_hi = 1.5 * s.diameter_estimate();

  // seed: minimal connection to the first sample (it lies in the open
  // segment domain by precondition)
  const ConnectionSet c0 = connect_points(s, p, curve[0], l_hi, s.num.n_starts);
  if (c0.empty()) throw LiftObstructionError("lift_curve: seed failed", 0);
  double theta = c0.members.front().theta;
  double radius = c0.members.front().length;

  double t_acc = 0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (i > 0)
      t_acc += s.embedded()
                   ? norm(curve[i].r - curve[i - 1].r)
                   : norm(s.wrap_delta(curve[i - 1].r, curve[i].r));
    const auto c = newton_connect(s, p, curve[i], theta, radius, l_hi);
    if (!c) {
      if (i + 1 == curve.size()) {
        // Lemma-style boundary endpoint: the Newton solve may stall exactly
        // on the cut locus; accept the continuation seed with its residual.
        const detail::OdeState y = detail::integrate_endpoint(
            s, frame_at(s, p), theta, radius, false);
        const double res =
            s.embedded() ? norm(y.x - curve[i].r)
                         : norm(s.wrap_delta(curve[i].r, s.canonical(y.x)));
        lifted.lifts.push_back({t_acc, radius, wrap_angle(theta), res});
        lifted.max_residual = std::max(lifted.max_residual, res);
        break;
      }
      throw LiftObstructionError("lift_curve: interior Newton divergence", i);
    }
    theta = c->theta;
    radius = c->length;
    lifted.lifts.push_back({t_acc, radius, theta, c->residual});
    lifted.max_residual = std::max(lifted.max_residual, c->residual);
  }
  return lifted;
}

std::optional<Connection> field_connection(const Surface& s,
                                           const DistanceField& field,
                                           const SurfacePoint& x,
                                           int max_candidates) {
  const auto hits = field.hits_near(x.r, field.horizon());
  std::optional<Connection> best;
  int polished = 0;
  for (const auto& h : hits) {
    if (polished >= max_candidates) break;
    ++polished;
    auto c = newton_connect(s, field.source(), x, field.ray_theta(h.ray), h.t,
                            field.horizon() * 1.05);
    if (c && (!best || c->length < best->length)) best = c;
  }
  return best;
}

}  // namespace geolab
