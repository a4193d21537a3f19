#pragma once
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "geolab/connect.hpp"
#include "geolab/field.hpp"
#include "geolab/surface.hpp"

namespace geolab {

// Per-direction record of the sampled cut locus.
struct CutSample {
  double theta = 0;
  double sigma = 0;                  // cut time
  std::optional<double> kappa;       // first conjugate time up to t_max
  SurfacePoint cut_point;
  bool ok = true;
  std::string error;

  // classification (filled by classify_cut_point)
  bool classified = false;
  int minimal_count = 0;
  bool continuum = false;
  bool essential = false;
  std::vector<double> minimal_angles;
  std::vector<double> conjugacy_residuals;  // |j(sigma)| per minimal geodesic
};

// Minimal geodesics to a cut point with per-geodesic conjugacy flags.
struct Classification {
  ConnectionSet minimal;
  std::vector<double> j_values;
  std::vector<bool> conjugate;
  bool essential = false;
};

struct CutLocusAtlas {
  Surface surface;
  SurfacePoint base;
  std::vector<CutSample> samples;
  std::shared_ptr<const DistanceField> field;  // null for the flat torus

  // linear interpolation of sigma over theta (cyclic)
  double sigma_interp(double theta) const;
  const CutSample& nearest(double theta) const;
};

// Cut time via bisection of the minimality predicate
// distance(p, exp_p(t v)) >= t - cut_tol on [0, min(kappa, t_max)],
// with the distance side driven by fan-discovered competitor branches.
double cut_time(const Surface& s, const SurfacePoint& p, double theta);

struct AtlasOptions {
  bool classify = true;  // populate the classification of every sample
};

CutLocusAtlas sample_cut_locus(const Surface& s, const SurfacePoint& p,
                               int n_dirs, const AtlasOptions& opts = {});

Classification classify_cut_point(const Surface& s, const SurfacePoint& p,
                                  const SurfacePoint& x, double d_px,
                                  const ConnectOptions& opts = {});

// Classifies sample i of an atlas in place (idempotent).
void classify_sample(CutLocusAtlas& atlas, std::size_t i);

struct RadiiReport {
  double injrad = 0;
  double injrad_theta = 0;
  std::optional<double> conj;       // absent = no conjugate point up to t_max
  double conj_theta = 0;
  std::optional<double> conj_eps;   // absent = no essential conjugate point
  double conj_eps_theta = 0;
  std::optional<double> shortest_loop;
  double shortest_loop_theta = 0;
  bool shortest_loop_closed = false;
  std::optional<double> shortest_closed_loop;
  double theorem_residual = 0;  // |injrad - min(conj_eps, loop/2)|
  // heuristic-completeness caveat: minimal-geodesic enumeration is
  // multi-start, so essential flags are exact only up to discovered members
  bool enumeration_caveat = true;
};

RadiiReport radii_report(const Surface& s, const SurfacePoint& p, int n_dirs,
                         double l_max);
RadiiReport radii_report(const Surface& s, CutLocusAtlas& atlas, double l_max);

// Manifold-level variants: minima over a uniform base-point grid, with the
// shortest-loop term restricted to loops flagged as closed geodesics.
struct ManifoldRadii {
  double injrad = 0;
  std::optional<double> conj_eps;
  std::optional<double> shortest_closed_geodesic;
  double theorem_residual = 0;
};

ManifoldRadii manifold_radii(const Surface& s, int grid_n, int n_dirs,
                             double l_max);

namespace detail_cut {
// One direction of the cut pipeline with a shared field; exposes the
// competitor branches found at the cut point for downstream reuse.
struct CutResult {
  double sigma;
  std::vector<std::pair<double, double>> competitors;  // (theta, length)
  bool capped_at_kappa = false;
};
CutResult cut_time_with_field(const Surface& s, const SurfacePoint& p,
                              double theta, const DistanceField& field,
                              std::optional<double> kappa);
double flat_cut_time(const Surface& s, double theta);
}  // namespace detail_cut

}  // namespace geolab
