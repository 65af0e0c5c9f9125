#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "mamix/expression.hpp"
#include "mamix/problems.hpp"

using namespace mamix;

namespace {

Vec2 random_interior_point(std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(0.05, 0.95);
  return {dist(rng), dist(rng)};
}

}  // namespace

TEST_CASE("catalog: determinant of the exact Hessian matches f") {
  std::mt19937 rng(57);
  for (const std::string label : {"quadratic", "smooth-radial", "boundary-singular"}) {
    const ProblemSpec spec = catalog(label);
    REQUIRE(spec.has_exact());
    for (int trial = 0; trial < 100; ++trial) {
      const Vec2 p = random_interior_point(rng);
      const double det = spec.exact_hessian(p).det();
      const double f = spec.f(p);
      CHECK(std::abs(det - f) <= 1e-8 * std::abs(f));
    }
  }
}

TEST_CASE("catalog: hand-computed anchor values") {
  const ProblemSpec quadratic = catalog("quadratic");
  CHECK(quadratic.f({0.3, 0.7}) == doctest::Approx(1.0));

  const ProblemSpec radial = catalog("smooth-radial");
  // det D^2 e^{r^2/2} = (1 + r^2) e^{r^2}
  const Vec2 p(0.5, 0.25);
  const double r2 = p.squaredNorm();
  CHECK(radial.f(p) == doctest::Approx((1 + r2) * std::exp(r2)).epsilon(1e-14));
  CHECK(radial.exact_u(p) == doctest::Approx(std::exp(0.5 * r2)).epsilon(1e-14));

  const ProblemSpec singular = catalog("boundary-singular");
  CHECK(singular.f({0, 0}) == doctest::Approx(0.5));  // 2 / (2 - 0)^2
  CHECK(singular.exact_u({0, 0}) == doctest::Approx(-std::sqrt(2.0)));
  CHECK(singular.f({0.99, 0.99}) > 1e2);  // blows up toward the corner (1,1)

  CHECK_THROWS_AS(catalog("no-such-problem"), std::invalid_argument);
}

TEST_CASE("catalog: Hessian formulas agree with finite differences") {
  std::mt19937 rng(61);
  const double h = 1e-5;
  for (const std::string label : {"smooth-radial", "boundary-singular"}) {
    const ProblemSpec spec = catalog(label);
    for (int trial = 0; trial < 20; ++trial) {
      const Vec2 p = random_interior_point(rng);
      auto u = spec.exact_u;
      const double uxx = (u({p.x() + h, p.y()}) - 2 * u(p) + u({p.x() - h, p.y()})) / (h * h);
      const double uyy = (u({p.x(), p.y() + h}) - 2 * u(p) + u({p.x(), p.y() - h})) / (h * h);
      const double uxy = (u({p.x() + h, p.y() + h}) - u({p.x() + h, p.y() - h}) -
                          u({p.x() - h, p.y() + h}) + u({p.x() - h, p.y() - h})) /
                         (4 * h * h);
      const SymMat2 H = spec.exact_hessian(p);
      CHECK(H.xx == doctest::Approx(uxx).epsilon(1e-4));
      CHECK(H.yy == doctest::Approx(uyy).epsilon(1e-4));
      CHECK(H.xy == doctest::Approx(uxy).epsilon(1e-4));
    }
  }
}

TEST_CASE("regularize: clipping") {
  const ProblemSpec quadratic = catalog("quadratic");
  const ProblemSpec huge = regularize(quadratic, 1e300);
  std::mt19937 rng(67);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec2 p = random_interior_point(rng);
    CHECK(huge.f(p) == quadratic.f(p));
  }

  const ProblemSpec clipped = regularize(catalog("boundary-singular"), 100.0);
  CHECK(clipped.f({1, 1}) == doctest::Approx(100.0));
  CHECK(clipped.f({0, 0}) == doctest::Approx(0.5));
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      const Vec2 p(i / 99.0, j / 99.0);
      CHECK(clipped.f(p) <= 100.0 + 1e-12);
    }
  }
  CHECK_THROWS_AS(regularize(quadratic, 0.0), std::invalid_argument);
}

TEST_CASE("regularize: clip-only regularization is idempotent") {
  const ProblemSpec once = regularize(catalog("boundary-singular"), 50.0);
  const ProblemSpec twice = regularize(once, 50.0);
  std::mt19937 rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec2 p = random_interior_point(rng);
    CHECK(once.f(p) == twice.f(p));
  }
}

TEST_CASE("regularize: mollification error decreases with the radius") {
  const ProblemSpec radial = catalog("smooth-radial");
  double previous = std::numeric_limits<double>::infinity();
  for (double radius : {0.1, 0.05, 0.025}) {
    const ProblemSpec mollified = regularize(radial, 1e300, radius);
    double diff = 0;
    for (int i = 0; i <= 40; ++i)
      for (int j = 0; j <= 40; ++j) {
        const Vec2 p(i / 40.0, j / 40.0);
        diff = std::max(diff, std::abs(mollified.f(p) - radial.f(p)));
      }
    CHECK(diff < previous);
    previous = diff;
  }
}

TEST_CASE("mollify_boundary: smooths g along the boundary, fixes nothing inside") {
  const ProblemSpec singular = catalog("boundary-singular");
  const ProblemSpec smooth = mollify_boundary(singular, 0.1);
  // away from the corner the data barely moves
  CHECK(smooth.g({0.5, 0.0}) == doctest::Approx(singular.g({0.5, 0.0})).epsilon(1e-2));
  // f is untouched
  CHECK(smooth.f({0.25, 0.5}) == singular.f({0.25, 0.5}));
  // at the singular corner the mollified data is averaged over the window
  CHECK(std::abs(smooth.g({1.0, 1.0}) - singular.g({1.0, 1.0})) > 1e-3);
  // constants are preserved exactly by the normalized bump weights
  ProblemSpec constant = singular;
  constant.g = [](Vec2) { return 2.5; };
  const ProblemSpec smoothed_const = mollify_boundary(constant, 0.1);
  CHECK(smoothed_const.g({0.7, 0.0}) == doctest::Approx(2.5).epsilon(1e-13));
}

TEST_CASE("bounds_check: catalog anchors and the degeneracy flag") {
  const BoundsReport quadratic = bounds_check(catalog("quadratic"), 2000);
  CHECK(quadratic.inf_f == doctest::Approx(1.0));
  CHECK(quadratic.sup_f == doctest::Approx(1.0));
  CHECK_FALSE(quadratic.degenerate_flag);

  // inf at the origin corner is 1, sup at (1,1) is 3 e^2; quasi-random samples
  // approach but do not reach the corners
  const BoundsReport radial = bounds_check(catalog("smooth-radial"), 20000);
  CHECK(radial.inf_f >= 1.0);
  CHECK(radial.inf_f <= 1.05);
  CHECK(radial.sup_f <= 3.0 * std::exp(2.0));
  CHECK(radial.sup_f >= 0.7 * 3.0 * std::exp(2.0));
  CHECK_FALSE(radial.degenerate_flag);

  const BoundsReport degenerate = bounds_check(catalog("degenerate"), 2000);
  CHECK(degenerate.degenerate_flag);
  CHECK(degenerate.inf_f == doctest::Approx(1e-3));
}

TEST_CASE("expression parser: arithmetic, precedence, functions") {
  CHECK(Expression::parse("1 + 2 * 3")(0, 0) == doctest::Approx(7.0));
  CHECK(Expression::parse("(1 + 2) * 3")(0, 0) == doctest::Approx(9.0));
  CHECK(Expression::parse("2 ^ 3")(0, 0) == doctest::Approx(8.0));
  CHECK(Expression::parse("2 ^ 3 ^ 2")(0, 0) == doctest::Approx(512.0));  // right associative
  CHECK(Expression::parse("-x ^ 2")(3, 0) == doctest::Approx(-9.0));
  CHECK(Expression::parse("x - y - 1")(5, 2) == doctest::Approx(2.0));
  CHECK(Expression::parse("exp(x + y)")(0.25, 0.5) == doctest::Approx(std::exp(0.75)));
  CHECK(Expression::parse("sqrt(abs(-4))")(0, 0) == doctest::Approx(2.0));
  CHECK(Expression::parse("min(x, y) + max(x, y)")(1.5, -2.0) == doctest::Approx(-0.5));
  CHECK(Expression::parse("(1 + x^2 + y^2) * exp(x^2 + y^2)")(0.5, 0.5) ==
        doctest::Approx(1.5 * std::exp(0.5)));
}

TEST_CASE("expression parser: malformed input") {
  CHECK_THROWS_AS(Expression::parse("x +"), std::invalid_argument);
  CHECK_THROWS_AS(Expression::parse("foo(x)"), std::invalid_argument);
  CHECK_THROWS_AS(Expression::parse("(x + y"), std::invalid_argument);
  CHECK_THROWS_AS(Expression::parse("min(x)"), std::invalid_argument);
  CHECK_THROWS_AS(Expression::parse("x y"), std::invalid_argument);
}

TEST_CASE("problem files: expressions load and evaluate") {
  const std::string path = "/tmp/mamix_test_problem.txt";
  {
    std::ofstream os(path);
    os << "label = shifted-quadratic\n"
       << "domain = 0 0 1 0 1 1 0 1\n"
       << "f = 1\n"
       << "g = 0.5 * (x^2 + y^2) + x\n"
       << "exact_u = 0.5 * (x^2 + y^2) + x\n"
       << "exact_hxx = 1\n"
       << "exact_hxy = 0\n"
       << "exact_hyy = 1\n";
  }
  const ProblemSpec spec = load_problem_file(path);
  CHECK(spec.label == "shifted-quadratic");
  REQUIRE(spec.domain.size() == 4);
  CHECK(spec.f({0.3, 0.3}) == doctest::Approx(1.0));
  CHECK(spec.exact_u({0.5, 0.5}) == doctest::Approx(0.75));
  CHECK(spec.exact_hessian({0.2, 0.8}).det() == doctest::Approx(1.0));
  std::remove(path.c_str());

  CHECK_THROWS(load_problem_file("/tmp/does-not-exist-mamix.txt"));
}

TEST_CASE("polygon helpers: membership and clamping") {
  const std::vector<Vec2> square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(point_in_polygon(square, {0.5, 0.5}));
  CHECK(point_in_polygon(square, {0.0, 0.0}));
  CHECK_FALSE(point_in_polygon(square, {1.2, 0.5}));
  CHECK((clamp_to_polygon(square, {0.5, 0.5}) - Vec2(0.5, 0.5)).norm() == 0.0);
  CHECK((clamp_to_polygon(square, {1.4, 0.5}) - Vec2(1.0, 0.5)).norm() <= 1e-14);
  CHECK((clamp_to_polygon(square, {-0.2, -0.3}) - Vec2(0.0, 0.0)).norm() <= 1e-14);
}
