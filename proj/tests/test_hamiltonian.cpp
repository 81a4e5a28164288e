#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "accreta/hamiltonian.hpp"

using namespace accreta;

namespace {

HamiltonianModel ellipse() { return make_ellipsoidal({UProfile::constant(1.0), UProfile::constant(0.5)}, 0.5, 1.0); }

HamiltonianModel custom_unit_ball() {
  HamiltonianModel m;
  m.kind = CustomHamiltonian{[](const Point&, double, const Point& p) { return p.norm() - 1.0; }};
  m.sigma_lower = 1.0;
  m.sigma_upper = 1.0;
  return m;
}

Point random_vector(std::mt19937& rng, double scale = 3.0) {
  std::uniform_real_distribution<double> U(-scale, scale);
  return Point(U(rng), U(rng), 0.0);
}

}  // namespace

TEST_SUITE("hamiltonian") {

TEST_CASE("profiles: constant, clamped affine and tabulated") {
  CHECK(UProfile::constant(2.0)(5.0) == 2.0);
  const UProfile a = UProfile::affine(1.0, 0.2, 0.0, 1.0);
  CHECK(a(-3.0) == doctest::Approx(1.0));
  CHECK(a(0.5) == doctest::Approx(1.1));
  CHECK(a(7.0) == doctest::Approx(1.2));
  CHECK(a.min_value() == doctest::Approx(1.0));
  CHECK(a.max_value() == doctest::Approx(1.2));
  const UProfile t = UProfile::table({0.0, 1.0, 2.0}, {1.0, 3.0, 2.0});
  CHECK(t(0.5) == doctest::Approx(2.0));
  CHECK(t(-1.0) == doctest::Approx(1.0));
  CHECK(t(9.0) == doctest::Approx(2.0));
  CHECK(t.max_value() == doctest::Approx(3.0));
}

TEST_CASE("eikonal with gamma 2 has support radius one half") {
  const SupportEvaluator e(make_eikonal(UProfile::constant(2.0), 0.5, 0.5));
  CHECK(support(e, Point::Zero(), 0.0, Point(1.0, 0.0, 0.0)) == doctest::Approx(0.5));
}

TEST_CASE("support of the zero vector is zero for every kind") {
  const SupportEvaluator eik(make_eikonal(UProfile::constant(1.0), 1.0, 1.0));
  const SupportEvaluator ell(ellipse());
  const SupportEvaluator cus(custom_unit_ball());
  for (const SupportEvaluator* e : {&eik, &ell, &cus}) CHECK((*e)(Point::Zero(), 0.3, Point::Zero()) == 0.0);
}

TEST_CASE("ellipse support along the short axis") {
  const SupportEvaluator e(ellipse());
  CHECK(e(Point::Zero(), 0.0, Point(0.0, 1.0, 0.0)) == doctest::Approx(0.5));
  CHECK(e(Point::Zero(), 0.0, Point(1.0, 0.0, 0.0)) == doctest::Approx(1.0));
}

TEST_CASE("sampled custom support against a fine-sampling oracle") {
  const SupportEvaluator coarse(custom_unit_ball(), 2, 64, 1e-10);
  const SupportEvaluator fine(custom_unit_ball(), 2, 4096, 1e-10);
  const Point q(1.0, 1.0, 0.0);
  CHECK(coarse(Point::Zero(), 0.0, q) == doctest::Approx(fine(Point::Zero(), 0.0, q)).epsilon(1e-3));
  CHECK(coarse(Point::Zero(), 0.0, q) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));
  // Sampling only underestimates the support of a convex set.
  CHECK(coarse(Point::Zero(), 0.0, q) <= std::sqrt(2.0) + 1e-9);
}

TEST_CASE("custom evaluator errors") {
  HamiltonianModel nan_model = custom_unit_ball();
  nan_model.kind = CustomHamiltonian{[](const Point&, double, const Point&) { return std::nan(""); }};
  const SupportEvaluator bad(nan_model);
  CHECK_THROWS_WITH(bad(Point::Zero(), 0.0, Point(1.0, 0.0, 0.0)), "ill-posed Hamiltonian");

  HamiltonianModel small = custom_unit_ball();
  small.sigma_lower = 2.0;
  small.sigma_upper = 3.0;
  const SupportEvaluator violated(small);
  CHECK_THROWS_WITH(violated(Point::Zero(), 0.0, Point(1.0, 0.0, 0.0)), "sigma_* bound violated");
}

TEST_CASE("minkowski normalisation") {
  const HamiltonianModel eik = make_eikonal(UProfile::constant(1.0), 1.0, 1.0);
  CHECK(minkowski_normalize(eik, Point::Zero(), 0.0, Point(2.0, 0.0, 0.0)) == doctest::Approx(1.0));
  CHECK(minkowski_normalize(eik, Point::Zero(), 0.0, Point::Zero()) == -1.0);
}

TEST_CASE("minkowski sign agrees with the Hamiltonian sign") {
  std::mt19937 rng(11);
  const HamiltonianModel models[] = {make_eikonal(UProfile::affine(1.0, 0.5, 0.0, 1.0), 1.0 / 1.5, 1.0), ellipse()};
  for (const HamiltonianModel& m : models)
    for (int k = 0; k < 500; ++k) {
      const Point p = random_vector(rng, 2.0);
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const double hbar = minkowski_normalize(m, Point::Zero(), u, p);
      const double h = m(Point::Zero(), u, p);
      if (std::abs(h) < 1e-9) continue;
      CHECK((hbar <= 0.0) == (h <= 0.0));
    }
}

TEST_CASE("minkowski gauge is positively homogeneous") {
  std::mt19937 rng(5);
  const HamiltonianModel m = ellipse();
  for (int k = 0; k < 50; ++k) {
    const Point p = random_vector(rng);
    for (double lambda : {0.5, 2.0, 10.0})
      CHECK(minkowski_normalize(m, Point::Zero(), 0.0, lambda * p) + 1.0 ==
            doctest::Approx(lambda * (minkowski_normalize(m, Point::Zero(), 0.0, p) + 1.0)).epsilon(1e-8));
  }
}

TEST_CASE("support bounds, homogeneity and subadditivity") {
  std::mt19937 rng(2);
  const HamiltonianModel models[] = {make_eikonal(UProfile::affine(1.0, 0.2, 0.0, 1.0), 1.0 / 1.2, 1.0), ellipse(),
                                     custom_unit_ball()};
  for (const HamiltonianModel& m : models) {
    const SupportEvaluator e(m);
    // 64 sampled directions leave an angular gap of pi/64.
    const double tol = m.is_custom() ? 1.0 - std::cos(std::numbers::pi / 64.0) + 1e-9 : 1e-12;
    for (int k = 0; k < 200; ++k) {
      const Point x = random_vector(rng);
      const double u = std::uniform_real_distribution<double>(-0.5, 1.5)(rng);
      const Point q1 = random_vector(rng), q2 = random_vector(rng);
      const double s1 = e(x, u, q1), s2 = e(x, u, q2);
      CHECK(s1 >= m.sigma_lower * q1.norm() * (1.0 - tol) - 1e-12);
      CHECK(s1 <= m.sigma_upper * q1.norm() * (1.0 + tol) + 1e-12);
      CHECK(e(x, u, q1 + q2) <= s1 + s2 + tol * (q1.norm() + q2.norm()));
      for (double lambda : {0.5, 2.0, 10.0})
        CHECK(e(x, u, lambda * q1) == doctest::Approx(lambda * s1).epsilon(m.is_custom() ? 1e-9 : 1e-12));
    }
  }
}

TEST_CASE("verify_bounds passes and fails as declared") {
  const std::vector<ProbePoint> probes{{Point::Zero(), 0.0}, {Point(1.0, 2.0, 0.0), 1.0}};
  CHECK(verify_bounds(make_eikonal(UProfile::constant(1.0), 1.0, 1.0), probes).pass);
  const BoundsReport bad = verify_bounds(make_eikonal(UProfile::constant(1.0), 2.0, 3.0), probes);
  CHECK_FALSE(bad.pass);
  CHECK(bad.probes.at(0).worst_extent == doctest::Approx(1.0));
  CHECK(verify_bounds(ellipse(), probes).pass);
  CHECK_FALSE(verify_bounds(make_ellipsoidal({UProfile::constant(1.0), UProfile::constant(0.5)}, 0.6, 1.0), probes).pass);
}

TEST_CASE("3D unit directions are unit vectors") {
  const auto d = unit_directions(3, 512);
  REQUIRE(d.size() == 512);
  for (const Point& p : d) CHECK(p.norm() == doctest::Approx(1.0));
  const SupportEvaluator e(custom_unit_ball(), 3);
  CHECK(e.direction_samples() == 512);
  CHECK(e(Point::Zero(), 0.0, Point(0.0, 0.0, 2.0)) == doctest::Approx(2.0).epsilon(2e-2));
}

}  // TEST_SUITE
