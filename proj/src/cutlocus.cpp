#include "geolab/cutlocus.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "geolab/error.hpp"
#include "geolab/parallel.hpp"

namespace geolab {

namespace {
constexpr double kTwoPi = 2 * std::numbers::pi;

double golden_min(double lo, double hi, int iters,
                  const std::function<double(double)>& f, double* arg) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double m1 = hi - gr * (hi - lo), m2 = lo + gr * (hi - lo);
  double f1 = f(m1), f2 = f(m2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      hi = m2; m2 = m1; f2 = f1;
      m1 = hi - gr * (hi - lo);
      f1 = f(m1);
    } else {
      lo = m1; m1 = m2; f1 = f2;
      m2 = lo + gr * (hi - lo);
      f2 = f(m2);
    }
  }
  if (f1 < f2) {
    *arg = m1;
    return f1;
  }
  *arg = m2;
  return f2;
}

int golden_iters(double width, double target) {
  int n = 0;
  while (width > target && n < 64) {
    width *= 0.6180339887498949;
    ++n;
  }
  return n;
}

}  // namespace

namespace detail_cut {

double flat_cut_time(const Surface& s, double theta) {
  const double vdx = std::cos(theta), vdy = std::sin(theta);
  const double diag = std::hypot(s.p0, s.p1);
  const int mu = static_cast<int>(std::ceil(diag / s.p0)) + 1;
  const int mv = static_cast<int>(std::ceil(diag / s.p1)) + 1;
  double best = 1e300;
  for (int m = -mu; m <= mu; ++m)
    for (int n = -mv; n <= mv; ++n) {
      if (m == 0 && n == 0) continue;
      const double wx = m * s.p0, wy = n * s.p1;
      const double along = vdx * wx + vdy * wy;
      if (along <= 1e-15) continue;
      best = std::min(best, (wx * wx + wy * wy) / (2 * along));
    }
  return best;
}

namespace {

struct Meeting {
  bool ok = false;
  double t = 0;
  double theta_c = 0;
};

// Solves exp_p(t v(theta_c)) = gamma(t) for (theta_c, t): the first-meeting
// arclength of the competing branch against the walked geodesic.
Meeting meeting_solve(const Surface& s, const TangentFrame& frame,
                      const Geodesic& own, double theta_c0, double t0,
                      double hi) {
  const double fd = s.num.tol.newton_fd;
  double theta_c = theta_c0;
  double t = std::min(t0, hi);

  const auto resid = [&](double thc, double tt, detail::OdeState* out_c,
                         GeoSample* out_g) {
    const detail::OdeState yc =
        detail::integrate_endpoint(s, frame, thc, tt, false);
    const GeoSample g = own.at(tt);
    if (out_c) *out_c = yc;
    if (out_g) *out_g = g;
    return yc.x - g.x;
  };

  detail::OdeState yc;
  GeoSample g;
  Vec3 r = resid(theta_c, t, &yc, &g);
  double rn = norm(r);
  double best_rn = rn;
  int stagnant = 0;
  for (int it = 0; it < 20; ++it) {
    if (rn < 1e-9) return {true, t, wrap_angle(theta_c)};
    // bail out of singular (tangential) meetings instead of crawling
    if (rn < 0.6 * best_rn) {
      best_rn = rn;
      stagnant = 0;
    } else if (++stagnant >= 4) {
      return {};
    }
    // project onto the frame at the walked point
    const TangentFrame tf = frame_at(s, SurfacePoint{s.canonical(g.x)});
    const auto proj = [&](Vec3 v) {
      return std::pair<double, double>{dot(v, tf.e1), dot(v, tf.e2)};
    };
    const auto [r1, r2] = proj(r);
    const Vec3 rth = resid(theta_c + fd, t, nullptr, nullptr) - r;
    const auto [a11, a21] = proj(rth / fd);
    // d/dt of the mismatch is the tangent difference, available analytically
    const auto [a12, a22] = proj(yc.tan - g.tan);
    const double det = a11 * a22 - a12 * a21;
    if (!std::isfinite(det) || std::abs(det) < 1e-12) return {};
    const double dth = (-r1 * a22 + r2 * a12) / det;
    const double dt = (-a11 * r2 + a21 * r1) / det;
    double lambda = 1.0;
    bool accepted = false;
    for (int halv = 0; halv < 10; ++halv) {
      const double th_try = theta_c + lambda * dth;
      const double t_try = std::clamp(t + lambda * dt, 0.1 * t0, hi);
      const Vec3 r_try = resid(th_try, t_try, &yc, &g);
      const double rn_try = norm(r_try);
      if (rn_try < rn) {
        theta_c = th_try;
        t = t_try;
        r = r_try;
        rn = rn_try;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) return {};
  }
  return {};
}

}  // namespace

CutResult cut_time_with_field(const Surface& s_prod, const SurfacePoint& p,
                              double theta, const DistanceField& field,
                              std::optional<double> kappa) {
  // internal solves run at a coarser integration step; the answers they
  // feed (sigma to the cut tolerance) are far above the step error
  Surface s = s_prod;
  s.num.step *= std::max(1, s.num.cut_step_factor);
  const Tolerances& tol = s.num.tol;
  const double hi = std::min(kappa.value_or(s.t_max()), s.t_max());
  const TangentFrame frame = frame_at(s, p);
  const Geodesic own = shoot(s, p, theta, hi);

  const double spacing = field.sample_spacing();
  const double fan_gap = kTwoPi / field.n_rays();
  const double l_cap = hi * 1.02 + 4 * spacing;
  constexpr int kMaxBranches = 10;

  // Competitor branches are tracked by fan-ray id and re-associated as the
  // walk slides; the Newton polish runs lazily, close to the meeting.
  struct Branch {
    int ray;
    double last_ht;
    std::optional<Connection> conn;
    int meetings = 0;
    int polish_fails = 0;
  };
  std::vector<Branch> branches;
  const auto ray_dist = [&](int a, int b) {
    const int d = std::abs(a - b);
    return std::min(d, field.n_rays() - d);
  };
  const auto same_branch = [&](const Connection& c, double t) {
    return angle_distance(c.theta, theta) < 2.5 * fan_gap &&
           std::abs(c.length - t) < 5 * spacing;
  };
  // the walked geodesic itself and the fan rays that hug it: same arrival
  // arclength and a nearby direction
  const int own_ray = static_cast<int>(std::lround(theta / fan_gap)) %
                      field.n_rays();
  const auto own_pass = [&](const DistanceField::Hit& h, double t) {
    return ray_dist(h.ray, own_ray) <= 8 && std::abs(h.t - t) < 4 * spacing;
  };
  const auto polish = [&](const GeoSample& smp, double th_seed, double t_seed)
      -> std::optional<Connection> {
    const SurfacePoint xt{s.canonical(smp.x)};
    auto c = newton_connect(s, p, xt, th_seed, t_seed, l_cap);
    if (!c || same_branch(*c, smp.t)) return std::nullopt;
    return c;
  };

  // predicate of the bisection: is the geodesic still minimizing at t,
  // judged against the re-solved competitor branches with the raw fan
  // estimate as a coarse safety net
  const auto minimizing = [&](double t) {
    const GeoSample smp = own.at(t);
    const SurfacePoint xt{s.canonical(smp.x)};
    for (Branch& b : branches) {
      if (!b.conn) continue;
      auto c = newton_connect(s, p, xt, b.conn->theta,
                              std::min(b.conn->length, l_cap), l_cap);
      if (c && !same_branch(*c, t)) {
        b.conn = *c;
        if (c->length < t - tol.cut) return false;
      }
    }
    return field.estimate(smp.x) >= t - 30 * spacing;
  };

  const auto finish = [&](double sigma) {
    CutResult out;
    out.sigma = sigma;
    out.capped_at_kappa =
        kappa.has_value() && std::abs(sigma - *kappa) < 2 * tol.cut_bisect;
    for (const Branch& b : branches)
      if (b.conn) out.competitors.push_back({b.conn->theta, b.conn->length});
    return out;
  };
  const auto bisect = [&](double lo, double bhi) {
    while (bhi - lo > tol.cut_bisect) {
      const double mid = 0.5 * (lo + bhi);
      if (minimizing(mid))
        lo = mid;
      else
        bhi = mid;
    }
    return finish(0.5 * (lo + bhi));
  };

  // Fast exit for conjugate/horizon-capped directions: inspect the top end
  // first; if nothing undercuts it, the predicate holds on all of [0, hi).
  {
    const double t_pre = hi - 2 * tol.cut_bisect;
    const GeoSample pre = own.at(t_pre);
    bool disproved = false;
    int polished = 0;
    for (const auto& h : field.hits_near(pre.x, t_pre)) {
      if (own_pass(h, t_pre)) continue;
      const double cross = 2 * std::sqrt(h.chord2);
      // fan upper bound: reaching the sample and crossing the chord
      if (h.t + cross + 1e-6 < t_pre - tol.cut) disproved = true;
      // fan lower bound: branches that cannot undercut need no polish
      const bool could_undercut =
          h.t - cross - 2 * spacing < t_pre - tol.cut;
      if (!disproved && could_undercut && polished < 4) {
        ++polished;
        if (auto c = polish(pre, field.ray_theta(h.ray), h.t)) {
          branches.push_back({h.ray, h.t, c, 0, 0});
          if (c->length < t_pre - tol.cut) disproved = true;
        }
      }
      if (disproved) break;
    }
    if (!disproved) return finish(hi);
  }

  // walk the trajectory against the fan, tracking competitor branches
  const int walk_stride =
      std::max<int>(1, static_cast<int>(std::lround(spacing / own.step)));
  for (std::size_t i = walk_stride; i < own.samples.size(); i += walk_stride) {
    const GeoSample& smp = own.samples[i];
    const double t = smp.t;
    if (t < 24 * own.step) continue;
    for (const auto& h : field.hits_near(smp.x, t)) {
      if (own_pass(h, t)) continue;
      // the fan sample gives an upper bound t_sample + crossing; a certain
      // undercut ends the walk, the bisection pins sigma exactly
      if (h.t + 2 * std::sqrt(h.chord2) + 1e-6 < t - tol.cut)
        return bisect(0, t);
      if (h.t - t >= 8 * spacing) continue;  // branch still far from meeting

      // associate with a tracked branch, or start tracking; branches whose
      // polish failed twice stay as tombstones that absorb their hits
      Branch* br = nullptr;
      for (Branch& b : branches)
        if (ray_dist(b.ray, h.ray) <= 4 &&
            std::abs(b.last_ht - h.t) < 12 * spacing) {
          br = &b;
          break;
        }
      if (!br) {
        int live = 0;
        for (const Branch& b : branches)
          if (b.conn || b.polish_fails < 2) ++live;
        if (live >= kMaxBranches) continue;
        branches.push_back({h.ray, h.t, std::nullopt, 0, 0});
        br = &branches.back();
      }
      br->ray = h.ray;
      br->last_ht = h.t;

      const bool stale =
          br->conn && std::abs(br->conn->length - h.t) > 8 * spacing;
      if ((!br->conn || stale) && br->polish_fails < 2) {
        auto c = polish(smp, field.ray_theta(h.ray), h.t);
        if (c)
          br->conn = c;
        else if (!br->conn)
          ++br->polish_fails;
      }
      if (!br->conn) continue;
      if (br->conn->length < t - tol.cut) return bisect(0, t);
      if (br->meetings < 2) {
        ++br->meetings;
        const Meeting m =
            meeting_solve(s, frame, own, br->conn->theta, t, hi);
        if (m.ok && m.t < hi - tol.cut_bisect) {
          const bool below_ok = minimizing(m.t - 10 * tol.cut_bisect);
          const bool above_cut = !minimizing(m.t + 10 * tol.cut_bisect);
          if (below_ok && above_cut) return finish(m.t);
        }
      }
    }
  }

  // the precheck said minimality fails near hi, so a cut exists: bisect
  return bisect(0, hi);
}

}  // namespace detail_cut

double cut_time(const Surface& s, const SurfacePoint& p, double theta) {
  if (!s.embedded()) return detail_cut::flat_cut_time(s, theta);
  const DistanceField field(s, p);
  const auto kappa = conjugate_time(s, p, theta, s.t_max());
  return detail_cut::cut_time_with_field(s, p, theta, field, kappa).sigma;
}

double CutLocusAtlas::sigma_interp(double theta) const {
  const double th = wrap_angle(theta);
  const double step = kTwoPi / samples.size();
  const std::size_t i0 =
      static_cast<std::size_t>(th / step) % samples.size();
  const std::size_t i1 = (i0 + 1) % samples.size();
  const double w = (th - samples[i0].theta) / step;
  return (1 - w) * samples[i0].sigma + w * samples[i1].sigma;
}

const CutSample& CutLocusAtlas::nearest(double theta) const {
  const double step = kTwoPi / samples.size();
  const std::size_t i =
      static_cast<std::size_t>(std::lround(wrap_angle(theta) / step)) %
      samples.size();
  return samples[i];
}

namespace {

Classification classify_impl(const Surface& s, const SurfacePoint& p,
                             const SurfacePoint& x, double d_px,
                             const ConnectOptions& opts) {
  const Tolerances& tol = s.num.tol;
  Classification cls;
  cls.minimal = connect_points(s, p, x, d_px + 1e-5, s.num.n_starts, opts);
  if (cls.minimal.empty())
    throw NumericalError(
        "classify_cut_point: no minimal geodesic found at the claimed "
        "distance " +
        std::to_string(d_px));
  const TangentFrame frame = frame_at(s, p);
  cls.essential = true;
  for (const Connection& m : cls.minimal.members) {
    const double j =
        s.embedded()
            ? detail::integrate_endpoint(s, frame, m.theta, d_px, true).j
            : d_px;  // flat torus: j(t) = t
    cls.j_values.push_back(std::abs(j));
    const bool conj = std::abs(j) < tol.conjugacy_factor * d_px;
    cls.conjugate.push_back(conj);
    cls.essential = cls.essential && conj;
  }
  return cls;
}

// re-bisects the minimality predicate against explicitly known competitor
// connections; used when classification uncovers a branch the fan missed
// (sub-resolution tangential merges near cut-segment endpoints)
double bisect_against(const Surface& s, const SurfacePoint& p, double theta,
                      double hi, std::vector<Connection> branches) {
  const Tolerances& tol = s.num.tol;
  const Geodesic own = shoot(s, p, theta, hi);
  const double l_cap = hi * 1.05 + 0.1;
  const auto minimizing = [&](double t) {
    const SurfacePoint xt{s.canonical(own.at(t).x)};
    for (Connection& b : branches) {
      auto c = newton_connect(s, p, xt, b.theta, std::min(b.length, l_cap),
                              l_cap);
      if (c && (angle_distance(c->theta, theta) > 5 * tol.dedup_angle ||
                std::abs(c->length - t) > 1e-3)) {
        b = *c;
        if (c->length < t - tol.cut) return false;
      }
    }
    return true;
  };
  double lo = 0, bhi = hi;
  while (bhi - lo > tol.cut_bisect) {
    const double mid = 0.5 * (lo + bhi);
    if (minimizing(mid))
      lo = mid;
    else
      bhi = mid;
  }
  return 0.5 * (lo + bhi);
}

}  // namespace

Classification classify_cut_point(const Surface& s, const SurfacePoint& p,
                                  const SurfacePoint& x, double d_px,
                                  const ConnectOptions& opts) {
  Classification cls = classify_impl(s, p, x, d_px, opts);
  if (cls.minimal.min_length() < d_px - 1e-4)
    throw InputError(
        "classify_cut_point: found a connection shorter than the claimed "
        "distance (precondition |distance(p,x) - d_px| < 1e-5 violated)");
  return cls;
}

void classify_sample(CutLocusAtlas& atlas, std::size_t i) {
  CutSample& smp = atlas.samples[i];
  if (smp.classified || !smp.ok) return;
  const Surface& s = atlas.surface;
  ConnectOptions opts;
  opts.extra_seeds.push_back({smp.theta, smp.sigma});
  try {
    Classification cls =
        classify_impl(s, atlas.base, smp.cut_point, smp.sigma, opts);
    if (cls.minimal.min_length() < smp.sigma - 1e-4) {
      // the enumeration exposed a competitor the fan could not resolve:
      // repair sigma by re-bisecting against it, then classify again
      smp.sigma = bisect_against(s, atlas.base, smp.theta, smp.sigma,
                                 cls.minimal.members);
      smp.cut_point = shoot(s, atlas.base, smp.theta, smp.sigma).end_point();
      opts.extra_seeds[0].second = smp.sigma;
      cls = classify_impl(s, atlas.base, smp.cut_point, smp.sigma, opts);
      if (cls.minimal.min_length() < smp.sigma - 1e-4)
        throw NumericalError("classify_sample: inconsistent cut time after "
                             "repair at theta " +
                             std::to_string(smp.theta));
    }
    smp.minimal_count = static_cast<int>(cls.minimal.members.size());
    smp.continuum = cls.minimal.continuum_suspected;
    smp.essential = cls.essential;
    for (const Connection& m : cls.minimal.members)
      smp.minimal_angles.push_back(m.theta);
    smp.conjugacy_residuals = cls.j_values;
    smp.classified = true;
  } catch (const NumericalError& e) {
    smp.ok = false;
    smp.error = e.what();
  }
}

CutLocusAtlas sample_cut_locus(const Surface& s, const SurfacePoint& p,
                               int n_dirs, const AtlasOptions& opts) {
  if (n_dirs < 64) throw InputError("sample_cut_locus: n_dirs must be >= 64");
  CutLocusAtlas atlas;
  atlas.surface = s;
  atlas.base = p;
  atlas.samples.resize(n_dirs);

  if (s.embedded()) atlas.field = std::make_shared<DistanceField>(s, p);

  parallel_for(static_cast<std::size_t>(n_dirs), [&](std::size_t k) {
    CutSample& smp = atlas.samples[k];
    smp.theta = kTwoPi * static_cast<double>(k) / n_dirs;
    try {
      if (!s.embedded()) {
        smp.sigma = detail_cut::flat_cut_time(s, smp.theta);
        const Vec3 v{std::cos(smp.theta), std::sin(smp.theta), 0};
        smp.cut_point = {s.canonical(p.r + smp.sigma * v)};
      } else {
        smp.kappa = conjugate_time(s, p, smp.theta, s.t_max());
        const auto res = detail_cut::cut_time_with_field(s, p, smp.theta,
                                                         *atlas.field, smp.kappa);
        smp.sigma = res.sigma;
        smp.cut_point = shoot(s, p, smp.theta, smp.sigma).end_point();
      }
    } catch (const NumericalError& e) {
      smp.ok = false;
      smp.error = e.what();
    }
  });

  if (opts.classify)
    parallel_for(static_cast<std::size_t>(n_dirs),
                 [&](std::size_t k) { classify_sample(atlas, k); });
  return atlas;
}

namespace {

// sigma along an arbitrary direction, reusing the atlas field
double sigma_eval(const CutLocusAtlas& atlas, double theta) {
  const Surface& s = atlas.surface;
  if (!s.embedded()) return detail_cut::flat_cut_time(s, theta);
  const auto kappa = conjugate_time(s, atlas.base, theta, s.t_max());
  return detail_cut::cut_time_with_field(s, atlas.base, theta, *atlas.field,
                                         kappa)
      .sigma;
}

struct Refined {
  double theta, value;
};

// golden-section refinement of a discrete argmin over the atlas grid
Refined refine_min(const CutLocusAtlas& atlas, std::size_t k,
                   const std::function<double(double)>& f) {
  const double step = kTwoPi / atlas.samples.size();
  const double th0 = atlas.samples[k].theta;
  const int iters = golden_iters(2 * step, atlas.surface.num.tol.refine_width);
  Refined r;
  r.value = golden_min(th0 - step, th0 + step, iters, f, &r.theta);
  if (atlas.samples[k].sigma < r.value) {  // guard: keep the grid value
    r.theta = th0;
    r.value = atlas.samples[k].sigma;
  }
  return r;
}

}  // namespace

RadiiReport radii_report(const Surface& s, const SurfacePoint& p, int n_dirs,
                         double l_max) {
  CutLocusAtlas atlas = sample_cut_locus(s, p, n_dirs, {true});
  return radii_report(s, atlas, l_max);
}

RadiiReport radii_report(const Surface& s, CutLocusAtlas& atlas,
                         double l_max) {
  for (std::size_t i = 0; i < atlas.samples.size(); ++i)
    classify_sample(atlas, i);

  RadiiReport rep;
  const auto& smps = atlas.samples;

  // injrad: argmin sigma, refined
  std::size_t k_inj = 0;
  for (std::size_t i = 0; i < smps.size(); ++i)
    if (smps[i].ok && smps[i].sigma < smps[k_inj].sigma) k_inj = i;
  const auto sig = [&](double th) { return sigma_eval(atlas, th); };
  const Refined inj = refine_min(atlas, k_inj, sig);
  rep.injrad = inj.value;
  rep.injrad_theta = wrap_angle(inj.theta);

  // conj: argmin kappa over present values, refined
  std::size_t k_conj = smps.size();
  for (std::size_t i = 0; i < smps.size(); ++i)
    if (smps[i].ok && smps[i].kappa &&
        (k_conj == smps.size() || *smps[i].kappa < *smps[k_conj].kappa))
      k_conj = i;
  if (k_conj < smps.size()) {
    const auto kap = [&](double th) {
      const auto k = conjugate_time(s, atlas.base, th, s.t_max());
      return k ? *k : s.t_max() * 2;
    };
    const double step = kTwoPi / smps.size();
    const double th0 = smps[k_conj].theta;
    const int iters = golden_iters(2 * step, s.num.tol.refine_width);
    double arg;
    const double val = golden_min(th0 - step, th0 + step, iters, kap, &arg);
    rep.conj = std::min(val, *smps[k_conj].kappa);
    rep.conj_theta =
        wrap_angle(val < *smps[k_conj].kappa ? arg : th0);
  }

  // conj_eps: argmin sigma over essential samples
  std::size_t k_eps = smps.size();
  for (std::size_t i = 0; i < smps.size(); ++i)
    if (smps[i].ok && smps[i].classified && smps[i].essential &&
        (k_eps == smps.size() || smps[i].sigma < smps[k_eps].sigma))
      k_eps = i;
  if (k_eps < smps.size()) {
    const Refined eps = refine_min(atlas, k_eps, sig);
    rep.conj_eps = eps.value;
    rep.conj_eps_theta = wrap_angle(eps.theta);
  }

  // shortest geodesic loop
  const ConnectionSet loops = find_loops(s, atlas.base, l_max, s.num.n_starts);
  if (!loops.empty()) {
    rep.shortest_loop = loops.min_length();
    rep.shortest_loop_theta = loops.members.front().theta;
    rep.shortest_loop_closed = loops.members.front().closed;
    for (const Connection& c : loops.members)
      if (c.closed && (!rep.shortest_closed_loop ||
                       c.length < *rep.shortest_closed_loop))
        rep.shortest_closed_loop = c.length;
  }

  double bound = 1e300;
  if (rep.conj_eps) bound = std::min(bound, *rep.conj_eps);
  if (rep.shortest_loop) bound = std::min(bound, 0.5 * *rep.shortest_loop);
  rep.theorem_residual = std::abs(rep.injrad - bound);
  return rep;
}

ManifoldRadii manifold_radii(const Surface& s, int grid_n, int n_dirs,
                             double l_max) {
  if (grid_n < 2) throw InputError("manifold_radii: grid_n must be >= 2");
  ManifoldRadii out;
  out.injrad = 1e300;
  for (int i = 0; i < grid_n; ++i)
    for (int j = 0; j < grid_n; ++j) {
      const double u = s.embedded()
                           ? std::numbers::pi * (i + 0.5) / grid_n
                           : s.p0 * i / grid_n;
      const double v = s.embedded() ? kTwoPi * j / grid_n : s.p1 * j / grid_n;
      const double uu =
          s.family == Family::TorusOfRevolution ? kTwoPi * (i + 0.5) / grid_n : u;
      const SurfacePoint p = param_point(s, uu, v);
      const RadiiReport rep = radii_report(s, p, n_dirs, l_max);
      out.injrad = std::min(out.injrad, rep.injrad);
      if (rep.conj_eps &&
          (!out.conj_eps || *rep.conj_eps < *out.conj_eps))
        out.conj_eps = rep.conj_eps;
      if (rep.shortest_closed_loop &&
          (!out.shortest_closed_geodesic ||
           *rep.shortest_closed_loop < *out.shortest_closed_geodesic))
        out.shortest_closed_geodesic = rep.shortest_closed_loop;
    }
  double bound = 1e300;
  if (out.conj_eps) bound = std::min(bound, *out.conj_eps);
  if (out.shortest_closed_geodesic)
    bound = std::min(bound, 0.5 * *out.shortest_closed_geodesic);
  out.theorem_residual = std::abs(out.injrad - bound);
  return out;
}

}  // namespace geolab
