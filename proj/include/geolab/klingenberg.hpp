#pragma once
#include <memory>
#include <optional>
#include <vector>

#include "geolab/cutlocus.hpp"

namespace geolab {

// F(x) = d(p,x) + d(q,x) sampled over the cut-locus atlas of p.
struct FSample {
  double theta = 0;
  double sigma = 0;  // = d(p, x) on the atlas
  double d_qx = 0;
  double f = 0;
  SurfacePoint x;
  bool local_min = false;
  bool ok = true;
};

struct FAtlas {
  SurfacePoint p, q;

  struct Extremum {
    double theta = 0;
    double sigma = 0;
    double d_qx = 0;
    double f = 0;
    SurfacePoint x;
  };

  std::vector<FSample> samples;
  Extremum global;
  std::vector<Extremum> local_minima;  // refined, global included
  std::shared_ptr<CutLocusAtlas> atlas;
  std::shared_ptr<const DistanceField> q_field;  // null on the flat torus
};

FAtlas f_min_on_cutlocus(const Surface& s, const SurfacePoint& p,
                         const SurfacePoint& q, int n_dirs);
// Variant reusing a prebuilt sigma atlas of p (classification not needed).
FAtlas f_min_on_cutlocus(const Surface& s, const SurfacePoint& q,
                         std::shared_ptr<CutLocusAtlas> atlas);

// Record of the Lemma-style lift run in the broken case.
struct LiftRecord {
  bool ran = false;
  double final_radius = 0;
  double final_angle = 0;
  double expected_radius = 0;  // d(p, x0)
  double expected_angle = 0;   // direction of the broken minimal geodesic
  double max_residual = 0;
  bool obstructed = false;
  std::size_t obstruction_index = 0;
};

struct DichotomyVerdict {
  SurfacePoint x0;
  double f_x0 = 0;
  double d_px0 = 0;
  double d_qx0 = 0;
  bool branch_conjugate = false;  // p, x0 conjugate along every minimal geodesic
  bool branch_through = false;    // a geodesic p -> q passes through x0
  int through_count = 0;
  std::vector<double> p_angles_at_x0;  // arrival angles of minimal p-geodesics
  std::vector<double> q_angles_at_x0;
  double best_opposition_residual = 1e300;  // min |angle - pi| over pairs
  double confirmation_residual = 1e300;     // landing error of the through shot
  bool continuum = false;
  LiftRecord lift;
  // essential/through flags depend on the heuristic completeness of the
  // minimal-geodesic enumeration
  bool enumeration_caveat = true;
};

DichotomyVerdict dichotomy_verdict(const Surface& s, const SurfacePoint& p,
                                   const SurfacePoint& q,
                                   const FAtlas::Extremum& x0,
                                   const FAtlas& fatlas);

// Moves q to gamma(t_fraction * d(q, x0)) along a minimal geodesic toward
// x0, re-minimizes F, and returns the verdict at x0 for the moved point.
struct MovedQResult {
  SurfacePoint q_t;
  double d_q_qt = 0;            // exact drop predicted by (the triangle identity)
  double f_drop = 0;            // measured F(x0) drop
  double argmin_shift = 0;      // angular distance between the two argmins
  DichotomyVerdict verdict;
};
MovedQResult moving_q_reduction(const Surface& s, const SurfacePoint& p,
                                const SurfacePoint& q,
                                const FAtlas::Extremum& x0, double t_fraction,
                                const FAtlas& fatlas);

// Max over samples of F(gamma(t)) - F(x0) along a minimal geodesic from q
// to the global argmin x0; the star-shaped sublevel property requires this
// to stay below tolerance.
struct SublevelResult {
  double max_violation = -1e300;
  double mid_value = 0;     // F(gamma(mid)) - F(x0)
  double mid_defect = 0;    // independent triangle defect at the midpoint
  int samples = 0;
};
SublevelResult starshaped_check(const Surface& s, const SurfacePoint& p,
    const SurfacePoint& q, const FAtlas::Extremum& x0, const FAtlas& fatlas,
    int n_samples = 16);

// Theorem-style characterization: either the atlas of p contains an
// essential point, or every grid point is reached by at least two geodesics.
struct CharacterizationReport {
  bool essential_found = false;
  double essential_theta = 0;
  double essential_sigma = 0;
  int grid_points = 0;
  int min_connections = 0;  // over the grid (p = q counts the point itself)
  bool assertion_checked = false;
  bool assertion_holds = false;
};
CharacterizationReport two_geodesics_characterization(const Surface& s,
                                                      const SurfacePoint& p,
                                                      int n_dirs, int grid_n);

// min over grid p of max over grid x of distance(p, x)
double manifold_radius(const Surface& s, int grid_n);

}  // namespace geolab
