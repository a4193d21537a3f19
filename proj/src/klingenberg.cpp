#include "geolab/klingenberg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "geolab/error.hpp"
#include "geolab/parallel.hpp"

namespace geolab {

namespace {
constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr double kPi = std::numbers::pi;

double flat_dist(const Surface& s, Vec3 a, Vec3 b) {
  const Vec3 d = s.wrap_delta(a, b);
  return std::hypot(d.x, d.y);
}

// accurate d(q, x): exact on the flat torus, field-polished otherwise
double polished_distance(const Surface& s, const SurfacePoint& q,
                         const DistanceField* q_field, const SurfacePoint& x) {
  if (!s.embedded()) return flat_dist(s, q.r, x.r);
  if (auto c = field_connection(s, *q_field, x)) return c->length;
  // fall back to the full multi-start solver
  return distance(s, q, x);
}

double sigma_exact(const CutLocusAtlas& atlas, double theta) {
  const Surface& s = atlas.surface;
  if (!s.embedded()) return detail_cut::flat_cut_time(s, theta);
  const auto kappa = conjugate_time(s, atlas.base, theta, s.t_max());
  return detail_cut::cut_time_with_field(s, atlas.base, theta, *atlas.field,
                                         kappa)
      .sigma;
}

SurfacePoint cut_point_at(const CutLocusAtlas& atlas, double theta,
                          double sigma) {
  const Surface& s = atlas.surface;
  if (!s.embedded()) {
    const Vec3 v{std::cos(theta), std::sin(theta), 0};
    return {s.canonical(atlas.base.r + sigma * v)};
  }
  return shoot(s, atlas.base, theta, sigma).end_point();
}

void check_q_not_on_cut_locus(const Surface& s, const CutLocusAtlas& atlas,
                              const SurfacePoint& q) {
  const SurfacePoint& p = atlas.base;
  const double gap = s.embedded() ? norm(q.r - p.r)
                                  : norm(s.wrap_delta(p.r, q.r));
  if (gap < 1e-12) return;  // p = q: Klingenberg reduction, no hypothesis
  double theta_pq, d_pq;
  if (s.embedded()) {
    const auto c = field_connection(s, *atlas.field, q);
    if (!c) throw NumericalError("f_min_on_cutlocus: cannot connect p to q");
    theta_pq = c->theta;
    d_pq = c->length;
  } else {
    const Vec3 d = s.wrap_delta(p.r, q.r);
    theta_pq = wrap_angle(std::atan2(d.y, d.x));
    d_pq = std::hypot(d.x, d.y);
  }
  const double sig = sigma_exact(atlas, theta_pq);
  if (d_pq >= sig - s.num.tol.q_margin)
    throw InputError(
        "f_min_on_cutlocus: q lies on or within " +
        std::to_string(s.num.tol.q_margin) +
        " of the cut locus of p; the theorem hypothesis q not in C_p fails");
}

}  // namespace

FAtlas f_min_on_cutlocus(const Surface& s, const SurfacePoint& q,
                         std::shared_ptr<CutLocusAtlas> atlas) {
  const SurfacePoint p = atlas->base;
  check_q_not_on_cut_locus(s, *atlas, q);

  FAtlas fa;
  fa.p = p;
  fa.q = q;
  fa.atlas = atlas;
  if (s.embedded()) fa.q_field = std::make_shared<DistanceField>(s, q);

  const std::size_t n = atlas->samples.size();
  fa.samples.resize(n);
  parallel_for(n, [&](std::size_t k) {
    const CutSample& cs = atlas->samples[k];
    FSample& f = fa.samples[k];
    f.theta = cs.theta;
    f.sigma = cs.sigma;
    f.x = cs.cut_point;
    f.ok = cs.ok;
    if (!cs.ok) return;
    f.d_qx = polished_distance(s, q, fa.q_field.get(), cs.cut_point);
    f.f = f.sigma + f.d_qx;
  });

  // discrete local minima with plateau merging
  std::size_t k_glob = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (fa.samples[k].ok && fa.samples[k].f < fa.samples[k_glob].f) k_glob = k;

  const double plateau = 1e-9 * (1 + std::abs(fa.samples[k_glob].f));
  std::vector<std::size_t> candidates;
  bool all_flat = true;
  for (std::size_t k = 0; k < n; ++k) {
    const FSample& cur = fa.samples[k];
    const FSample& prev = fa.samples[(k + n - 1) % n];
    const FSample& next = fa.samples[(k + 1) % n];
    if (!cur.ok || !prev.ok || !next.ok) continue;
    if (std::abs(cur.f - fa.samples[k_glob].f) > plateau) all_flat = false;
    if (cur.f < prev.f - plateau && cur.f < next.f - plateau)
      candidates.push_back(k);
  }
  if (candidates.empty()) {
    // plateau (continuum cut locus, e.g. the round sphere): one candidate
    candidates.push_back(k_glob);
    (void)all_flat;
  }

  // golden-section refinement of each candidate
  const double step = kTwoPi / static_cast<double>(n);
  const auto f_eval = [&](double th) {
    const double sig = sigma_exact(*atlas, th);
    const SurfacePoint x = cut_point_at(*atlas, th, sig);
    return sig + polished_distance(s, q, fa.q_field.get(), x);
  };
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (const std::size_t k : candidates) {
    double lo = fa.samples[k].theta - step, hi = fa.samples[k].theta + step;
    double m1 = hi - gr * (hi - lo), m2 = lo + gr * (hi - lo);
    double f1 = f_eval(m1), f2 = f_eval(m2);
    while (hi - lo > s.num.tol.refine_width) {
      if (f1 < f2) {
        hi = m2; m2 = m1; f2 = f1;
        m1 = hi - gr * (hi - lo);
        f1 = f_eval(m1);
      } else {
        lo = m1; m1 = m2; f1 = f2;
        m2 = lo + gr * (hi - lo);
        f2 = f_eval(m2);
      }
    }
    FAtlas::Extremum ex;
    ex.theta = wrap_angle(0.5 * (lo + hi));
    ex.sigma = sigma_exact(*atlas, ex.theta);
    ex.x = cut_point_at(*atlas, ex.theta, ex.sigma);
    ex.d_qx = polished_distance(s, q, fa.q_field.get(), ex.x);
    ex.f = ex.sigma + ex.d_qx;
    // keep the grid sample when refinement did not improve
    if (fa.samples[k].ok && fa.samples[k].f < ex.f) {
      ex.theta = fa.samples[k].theta;
      ex.sigma = fa.samples[k].sigma;
      ex.x = fa.samples[k].x;
      ex.d_qx = fa.samples[k].d_qx;
      ex.f = fa.samples[k].f;
    }
    fa.local_minima.push_back(ex);
    fa.samples[k].local_min = true;
  }

  std::sort(fa.local_minima.begin(), fa.local_minima.end(),
            [](const FAtlas::Extremum& a, const FAtlas::Extremum& b) {
              return a.f < b.f;
            });
  fa.global = fa.local_minima.front();
  return fa;
}

FAtlas f_min_on_cutlocus(const Surface& s, const SurfacePoint& p,
                         const SurfacePoint& q, int n_dirs) {
  auto atlas = std::make_shared<CutLocusAtlas>(
      sample_cut_locus(s, p, n_dirs, {false}));
  return f_min_on_cutlocus(s, q, std::move(atlas));
}

namespace {

double tangent_angle(Vec3 a, Vec3 b) {
  const double c = std::clamp(dot(a, b) / (norm(a) * norm(b)), -1.0, 1.0);
  return std::acos(c);
}

}  // namespace

DichotomyVerdict dichotomy_verdict(const Surface& s, const SurfacePoint& p,
                                   const SurfacePoint& q,
                                   const FAtlas::Extremum& x0,
                                   const FAtlas& fatlas) {
  const Tolerances& tol = s.num.tol;
  bool is_local_min = false;
  for (const FAtlas::Extremum& ex : fatlas.local_minima)
    if (angle_distance(ex.theta, x0.theta) < 8 * tol.refine_width &&
        std::abs(ex.f - x0.f) < 1e-6 * (1 + std::abs(x0.f)))
      is_local_min = true;
  if (!is_local_min)
    throw InputError(
        "dichotomy_verdict: x0 is not a refined local minimum of the F atlas");

  DichotomyVerdict v;
  v.x0 = x0.x;
  v.d_px0 = x0.sigma;
  v.d_qx0 = x0.d_qx;
  v.f_x0 = x0.f;

  // p side: minimal geodesics and their conjugacy flags
  ConnectOptions popts;
  popts.extra_seeds.push_back({x0.theta, x0.sigma});
  Classification cls = classify_cut_point(s, p, x0.x, x0.sigma, popts);
  v.branch_conjugate = cls.essential;
  v.continuum = cls.minimal.continuum_suspected;

  const TangentFrame frame_x0 = frame_at(s, x0.x);
  const TangentFrame frame_p = frame_at(s, p);
  for (const Connection& m : cls.minimal.members)
    v.p_angles_at_x0.push_back(angle_of(frame_x0, m.end_tangent));

  // q side
  const bool q_is_p =
      (s.embedded() ? norm(q.r - p.r) : norm(s.wrap_delta(p.r, q.r))) < 1e-12;
  ConnectionSet q_min = [&] {
    if (q_is_p) return cls.minimal;
    ConnectOptions qopts;
    if (fatlas.q_field)
      if (auto c = field_connection(s, *fatlas.q_field, x0.x))
        qopts.extra_seeds.push_back({c->theta, c->length});
    return connect_points(s, q, x0.x, x0.d_qx + 1e-5, s.num.n_starts, qopts);
  }();
  if (q_min.empty())
    throw NumericalError("dichotomy_verdict: no minimal geodesic q -> x0");
  for (const Connection& m : q_min.members)
    v.q_angles_at_x0.push_back(angle_of(frame_x0, m.end_tangent));

  // through detection: a q-geodesic continues through x0 into a minimal
  // p-geodesic iff their arrival tangents are opposite; each match is
  // confirmed by a shot of length F(x0) from p that must land at q
  std::vector<Connection> p_members = cls.minimal.members;
  std::vector<char> p_conjugate(cls.conjugate.begin(), cls.conjugate.end());
  std::vector<char> p_paired(p_members.size(), 0);

  const auto confirm_through = [&](const Connection& pm) {
    const Geodesic conf = shoot(s, p, pm.theta, v.f_x0);
    const double miss =
        s.embedded() ? norm(conf.end().x - q.r)
                     : norm(s.wrap_delta(q.r, s.canonical(conf.end().x)));
    v.confirmation_residual = std::min(v.confirmation_residual, miss);
    return miss < tol.through_land;
  };

  for (const Connection& gq : q_min.members) {
    // targeted continuation: helps when the p side is a continuum, whose
    // discrete representatives rarely include the exactly-opposite one
    const double cont_angle = angle_of(frame_x0, gq.end_tangent);
    const Geodesic cont = shoot(s, x0.x, cont_angle, x0.sigma);
    const double land =
        s.embedded() ? norm(cont.end().x - p.r)
                     : norm(s.wrap_delta(p.r, s.canonical(cont.end().x)));
    if (land < 1e-3) {
      const TangentFrame fp = frame_at(s, SurfacePoint{s.canonical(cont.end().x)});
      const double theta_seed = angle_of(frame_p, -cont.end().tan);
      (void)fp;
      if (auto pm = newton_connect(s, p, x0.x, theta_seed, x0.sigma,
                                   x0.sigma * 1.02 + 1e-3)) {
        bool present = false;
        for (const Connection& m : p_members)
          if (angle_distance(m.theta, pm->theta) < tol.dedup_angle &&
              std::abs(m.length - pm->length) < tol.dedup_length)
            present = true;
        if (!present) {
          p_members.push_back(*pm);
          const double j =
              s.embedded()
                  ? detail::integrate_endpoint(s, frame_p, pm->theta, x0.sigma,
                                               true)
                        .j
                  : x0.sigma;
          p_conjugate.push_back(std::abs(j) < tol.conjugacy_factor * x0.sigma);
          p_paired.push_back(0);
          v.p_angles_at_x0.push_back(angle_of(frame_x0, pm->end_tangent));
        }
      }
    }
    // pairwise opposition test
    bool matched = false;
    for (std::size_t i = 0; i < p_members.size(); ++i) {
      const double opp =
          std::abs(tangent_angle(p_members[i].end_tangent, gq.end_tangent) -
                   kPi);
      v.best_opposition_residual = std::min(v.best_opposition_residual, opp);
      if (opp < tol.through_angle && confirm_through(p_members[i])) {
        matched = true;
        p_paired[i] = 1;
      }
    }
    if (matched) ++v.through_count;
  }
  v.branch_through = v.through_count > 0;

  // Lemma-style lift in the broken case: a non-conjugate minimal p-geodesic
  // that does not continue gamma smoothly pins the lift endpoint
  if (!q_is_p) {
    int broken = -1;
    for (std::size_t i = 0; i < p_members.size(); ++i)
      if (!p_conjugate[i] && !p_paired[i]) {
        broken = static_cast<int>(i);
        break;
      }
    if (broken >= 0) {
      const Connection& gq = q_min.members.front();
      const Geodesic gamma = shoot(s, q, gq.theta, gq.length);
      std::vector<SurfacePoint> curve;
      const int n_lift = 24;
      for (int i = 0; i <= n_lift; ++i)
        curve.push_back({s.canonical(gamma.at(gq.length * i / n_lift).x)});
      v.lift.ran = true;
      v.lift.expected_radius = x0.sigma;
      v.lift.expected_angle = p_members[broken].theta;
      try {
        const LiftedCurve lc = lift_curve(s, p, curve);
        v.lift.final_radius = lc.lifts.back().radius;
        v.lift.final_angle = lc.lifts.back().angle;
        v.lift.max_residual = lc.max_residual;
      } catch (const LiftObstructionError& e) {
        v.lift.obstructed = true;
        v.lift.obstruction_index = e.sample_index;
      }
    }
  }
  return v;
}

MovedQResult moving_q_reduction(const Surface& s, const SurfacePoint& p,
                                const SurfacePoint& q,
                                const FAtlas::Extremum& x0, double t_fraction,
                                const FAtlas& fatlas) {
  if (t_fraction <= 0 || t_fraction >= 1)
    throw InputError("moving_q_reduction: t must be in (0,1)");

  // minimal geodesic gamma from q to x0
  ConnectOptions qopts;
  if (fatlas.q_field)
    if (auto c = field_connection(s, *fatlas.q_field, x0.x))
      qopts.extra_seeds.push_back({c->theta, c->length});
  const ConnectionSet gq =
      connect_points(s, q, x0.x, x0.d_qx + 1e-5, s.num.n_starts, qopts);
  if (gq.empty())
    throw NumericalError("moving_q_reduction: no minimal geodesic q -> x0");

  MovedQResult out;
  out.d_q_qt = t_fraction * gq.min_length();
  const Geodesic gamma = shoot(s, q, gq.members.front().theta, out.d_q_qt);
  out.q_t = gamma.end_point();

  FAtlas fa2 = f_min_on_cutlocus(s, out.q_t, fatlas.atlas);
  out.argmin_shift = angle_distance(fa2.global.theta, x0.theta);
  // F_{p;q_t}(x0) evaluated at the same refined direction
  const double f2_at_x0 =
      x0.sigma + polished_distance(s, out.q_t, fa2.q_field.get(), x0.x);
  out.f_drop = x0.f - f2_at_x0;

  // verdict at (the re-refined) x0 for the moved point
  const FAtlas::Extremum* nearest = &fa2.local_minima.front();
  for (const FAtlas::Extremum& ex : fa2.local_minima)
    if (angle_distance(ex.theta, x0.theta) <
        angle_distance(nearest->theta, x0.theta))
      nearest = &ex;
  out.verdict = dichotomy_verdict(s, p, out.q_t, *nearest, fa2);
  return out;
}

SublevelResult starshaped_check(const Surface& s, const SurfacePoint& p,
                                const SurfacePoint& q,
                                const FAtlas::Extremum& x0,
                                const FAtlas& fatlas, int n_samples) {
  if (std::abs(x0.f - fatlas.global.f) > 1e-6 * (1 + std::abs(x0.f)))
    throw InputError("starshaped_check: x0 must be the global F argmin");

  ConnectOptions qopts;
  if (fatlas.q_field)
    if (auto c = field_connection(s, *fatlas.q_field, x0.x))
      qopts.extra_seeds.push_back({c->theta, c->length});
  const ConnectionSet gq =
      connect_points(s, q, x0.x, x0.d_qx + 1e-5, s.num.n_starts, qopts);
  if (gq.empty())
    throw NumericalError("starshaped_check: no minimal geodesic q -> x0");
  const double d = gq.min_length();
  const Geodesic gamma = shoot(s, q, gq.members.front().theta, d);

  const DistanceField* p_field =
      fatlas.atlas && fatlas.atlas->field ? fatlas.atlas->field.get() : nullptr;

  SublevelResult res;
  res.samples = n_samples;
  for (int i = 0; i < n_samples; ++i) {
    const double t = d * i / n_samples;  // [0, d), endpoint excluded
    const SurfacePoint gt{s.canonical(gamma.at(t).x)};
    // d(q, gamma(t)) = t exactly along the minimal geodesic
    const double d_pgt = polished_distance(s, p, p_field, gt);
    const double val = (t + d_pgt) - x0.f;
    res.max_violation = std::max(res.max_violation, val);
    if (i == n_samples / 2) {
      res.mid_value = val;
      // independent triangle defect: d(gt,x0) + d(x0,p) - d(gt,p)
      res.mid_defect = (d - t) + x0.sigma - d_pgt;
    }
  }
  return res;
}

CharacterizationReport two_geodesics_characterization(const Surface& s,
                                                      const SurfacePoint& p,
                                                      int n_dirs, int grid_n) {
  CharacterizationReport rep;
  CutLocusAtlas atlas = sample_cut_locus(s, p, n_dirs, {true});
  for (const CutSample& smp : atlas.samples) {
    if (smp.ok && smp.classified && smp.essential &&
        (!rep.essential_found || smp.sigma < rep.essential_sigma)) {
      rep.essential_found = true;
      rep.essential_theta = smp.theta;
      rep.essential_sigma = smp.sigma;
    }
  }
  if (rep.essential_found) return rep;  // branch 1: assertion skipped

  rep.assertion_checked = true;
  rep.grid_points = grid_n * grid_n;
  const double l_max = s.l_max();
  std::vector<int> counts(static_cast<std::size_t>(grid_n) * grid_n, 0);
  parallel_for(counts.size(), [&](std::size_t idx) {
    const int i = static_cast<int>(idx) / grid_n;
    const int j = static_cast<int>(idx) % grid_n;
    const double u = s.embedded() ? kPi * (i + 0.5) / grid_n
                                  : s.p0 * i / grid_n;
    const double uu = s.family == Family::TorusOfRevolution
                          ? kTwoPi * (i + 0.5) / grid_n
                          : u;
    const double vv = s.embedded() ? kTwoPi * j / grid_n : s.p1 * j / grid_n;
    const SurfacePoint q = param_point(s, uu, vv);
    const double gap =
        s.embedded() ? norm(q.r - p.r) : norm(s.wrap_delta(p.r, q.r));
    if (gap < 1e-12) {
      // the point itself counts as one geodesic; loops add the rest
      counts[idx] = 1 + static_cast<int>(
                            find_loops(s, p, l_max, s.num.n_starts).members.size());
    } else {
      counts[idx] = static_cast<int>(
          connect_points(s, p, q, l_max, s.num.n_starts).members.size());
    }
  });
  rep.min_connections = *std::min_element(counts.begin(), counts.end());
  rep.assertion_holds = rep.min_connections >= 2;
  return rep;
}

double manifold_radius(const Surface& s, int grid_n) {
  if (grid_n < 32) throw InputError("manifold_radius: grid must be >= 32x32");
  const std::size_t n = static_cast<std::size_t>(grid_n) * grid_n;

  std::vector<SurfacePoint> grid(n);
  for (int i = 0; i < grid_n; ++i)
    for (int j = 0; j < grid_n; ++j) {
      const double u = s.embedded() ? kPi * (i + 0.5) / grid_n
                                    : s.p0 * i / grid_n;
      const double uu = s.family == Family::TorusOfRevolution
                            ? kTwoPi * (i + 0.5) / grid_n
                            : u;
      const double vv = s.embedded() ? kTwoPi * j / grid_n : s.p1 * j / grid_n;
      grid[static_cast<std::size_t>(i) * grid_n + j] = param_point(s, uu, vv);
    }

  std::vector<double> row_max(n, 0);
  if (!s.embedded()) {
    parallel_for(n, [&](std::size_t a) {
      double m = 0;
      for (std::size_t b = 0; b < n; ++b)
        m = std::max(m, flat_dist(s, grid[a].r, grid[b].r));
      row_max[a] = m;
    });
  } else {
    // dedicated coarse fan per base point: the estimate picks the argmax,
    // a Newton polish makes the reported value exact
    Surface sf = s;
    sf.num.fan_dirs = 128;
    sf.num.fan_step_factor = 8;
    sf.num.fan_stride = 2;
    parallel_for(n, [&](std::size_t a) {
      const DistanceField field(sf, grid[a]);
      std::vector<std::pair<double, std::size_t>> est(n);
      for (std::size_t b = 0; b < n; ++b)
        est[b] = {b == a ? 0.0 : field.estimate(grid[b].r), b};
      std::sort(est.begin(), est.end());
      double m = 0;
      for (std::size_t k = n - 3; k < n; ++k) {
        if (est[k].first >= 1e300) continue;
        const auto c = field_connection(sf, field, grid[est[k].second]);
        m = std::max(m, c ? c->length : est[k].first);
      }
      row_max[a] = m;
    });
  }
  double rad = 1e300;
  for (const double m : row_max) rad = std::min(rad, m);
  return rad;
}

}  // namespace geolab
