#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "geolab/error.hpp"
#include "geolab/rng.hpp"
#include "geolab/surface.hpp"

using namespace geolab;

namespace {
constexpr double kPi = std::numbers::pi;

SurfacePoint random_point(const Surface& s, Rng& rng) {
  return param_point(s, rng.uniform(0.05, kPi - 0.05), rng.uniform(0, 2 * kPi));
}
}  // namespace

TEST_CASE("surface parameter validation") {
  CHECK_THROWS_AS(Surface::sphere(-1), InputError);
  CHECK_THROWS_AS(Surface::torus(1, 2), InputError);       // needs R > r
  CHECK_THROWS_AS(Surface::ellipsoid(1, 2, 0.5), InputError);  // a >= b >= c
  CHECK_THROWS_AS(Surface::flat_torus(0, 1), InputError);
  CHECK_NOTHROW(Surface::torus(2, 1));
}

TEST_CASE("curvature closed forms") {
  const Surface sph = Surface::sphere(1);
  CHECK(curvature_at(sph, param_point(sph, 0.7, 1.3)) == doctest::Approx(1.0));

  const Surface flat = Surface::flat_torus(1, 1);
  CHECK(curvature_at(flat, make_point(flat, {0.3, 0.9, 0})) == 0.0);

  const Surface tor = Surface::torus(2, 1);
  // outer equator, tube angle 0: K = cos 0 / (1 * (2 + 1)) = 1/3
  CHECK(curvature_at(tor, make_point(tor, {3, 0, 0})) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  // inner equator: K = -1 / (2 - 1) = -1
  CHECK(curvature_at(tor, make_point(tor, {1, 0, 0})) ==
        doctest::Approx(-1.0).epsilon(1e-12));

  const Surface ell = Surface::ellipsoid(1, 1, 0.8);
  // equator of the oblate spheroid: K = 1/c^2; pole: K = c^2/a^4
  CHECK(curvature_at(ell, make_point(ell, {1, 0, 0})) ==
        doctest::Approx(1.0 / 0.64).epsilon(1e-12));
  CHECK(curvature_at(ell, make_point(ell, {0, 0, 0.8})) ==
        doctest::Approx(0.64).epsilon(1e-12));
}

TEST_CASE("curvature rejects off-surface points") {
  const Surface sph = Surface::sphere(1);
  CHECK_THROWS_AS(curvature_at(sph, SurfacePoint{{1.5, 0, 0}}), InputError);
  CHECK_THROWS_AS(make_point(sph, {1.5, 0, 0}), InputError);
}

TEST_CASE("frames are deterministic and orthonormal") {
  const Surface flat = Surface::flat_torus(1, 1);
  const TangentFrame ff = frame_at(flat, make_point(flat, {0.2, 0.7, 0}));
  CHECK(ff.e1.x == 1.0);
  CHECK(ff.e1.y == 0.0);
  CHECK(ff.e2.y == 1.0);

  const Surface sph = Surface::sphere(1);
  const TangentFrame fp = frame_at(sph, make_point(sph, {0, 0, 1}));
  CHECK(std::abs(dot(fp.e1, fp.e2)) < 1e-10);
  CHECK(std::abs(norm(fp.e1) - 1) < 1e-10);
  CHECK(std::abs(norm(fp.e2) - 1) < 1e-10);

  // fallback rule at a point where the x-axis projects to zero
  const Surface ell = Surface::ellipsoid(1, 1, 0.8);
  const TangentFrame fe = frame_at(ell, make_point(ell, {1, 0, 0}));
  CHECK(std::abs(dot(fe.e1, fe.e2)) < 1e-10);
  CHECK(std::abs(norm(fe.e1) - 1) < 1e-10);

  // bitwise repeatability
  const TangentFrame fp2 = frame_at(sph, make_point(sph, {0, 0, 1}));
  CHECK(fp.e1.x == fp2.e1.x);
  CHECK(fp.e2.z == fp2.e2.z);
}

TEST_CASE("frames are right-handed and metric-orthonormal at random points") {
  Rng rng(2024);
  for (const Surface& s :
       {Surface::sphere(1), Surface::ellipsoid(1, 1, 0.8), Surface::torus(2, 1),
        Surface::flat_torus(1, 2)}) {
    for (int i = 0; i < 1000; ++i) {
      const SurfacePoint p = random_point(s, rng);
      const TangentFrame f = frame_at(s, p);
      CHECK(std::abs(dot(f.e1, f.e1) - 1) < 1e-9);
      CHECK(std::abs(dot(f.e2, f.e2) - 1) < 1e-9);
      CHECK(std::abs(dot(f.e1, f.e2)) < 1e-9);
      if (s.embedded()) {
        const Vec3 n = s.normal(p.r);
        CHECK(dot(cross(f.e1, f.e2), n) > 0.99);
        CHECK(std::abs(dot(f.e1, n)) < 1e-9);
      }
    }
  }
}

TEST_CASE("flat torus canonicalization is exactly idempotent") {
  const Surface flat = Surface::flat_torus(1, 2);
  Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    const Vec3 raw{rng.uniform(-40, 40), rng.uniform(-40, 40), 0};
    const Vec3 once = flat.canonical(raw);
    const Vec3 twice = flat.canonical(once);
    CHECK(once.x == twice.x);
    CHECK(once.y == twice.y);
    CHECK(once.x >= 0);
    CHECK(once.x < 1);
    CHECK(once.y >= 0);
    CHECK(once.y < 2);
  }
}

TEST_CASE("projection lands on the surface") {
  Rng rng(99);
  for (const Surface& s :
       {Surface::sphere(2), Surface::ellipsoid(1, 1, 0.8), Surface::torus(2, 1)}) {
    for (int i = 0; i < 200; ++i) {
      const SurfacePoint p = random_point(s, rng);
      const Vec3 off = p.r + 1e-4 * Vec3{rng.uniform(-1, 1), rng.uniform(-1, 1),
                                         rng.uniform(-1, 1)};
      CHECK(s.residual(s.project(off)) < 1e-12);
    }
  }
}

TEST_CASE("param_point lies on surface exactly") {
  const Surface ell = Surface::ellipsoid(1, 1, 0.8);
  const SurfacePoint mid = param_point(ell, kPi / 4, 0);
  CHECK(ell.residual(mid.r) < 1e-15);
  const Surface tor = Surface::torus(2, 1);
  CHECK(tor.residual(param_point(tor, 1.1, 2.2).r) < 1e-14);
}
