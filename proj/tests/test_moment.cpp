#include <doctest.h>

#include <cmath>
#include <random>

#include "smec/errors.hpp"
#include "smec/moment.hpp"

using namespace smec;

namespace {

Polynomial var(int n, int i) { return Polynomial::variable(n, i); }

SemialgebraicSet unit_ball(int n, double radius = 1.0) {
  SemialgebraicSet s;
  s.n = n;
  Polynomial g = Polynomial::constant(n, radius * radius);
  for (int i = 0; i < n; ++i) g = g - var(n, i) * var(n, i);
  s.inequalities.push_back(g);
  return s;
}

SemialgebraicSet interval(double lo, double hi) {
  // (x - lo)(hi - x) >= 0
  SemialgebraicSet s;
  s.n = 1;
  Polynomial x = var(1, 0);
  s.inequalities.push_back((x - Polynomial::constant(1, lo)) * (Polynomial::constant(1, hi) - x));
  return s;
}

}  // namespace

TEST_CASE("structure sizes: unconstrained n=1 kappa=1") {
  SemialgebraicSet s;
  s.n = 1;
  MomentStructure st = build_structure(s, 1);
  CHECK(st.mat_basis.size() == 2);  // M_1 is 2x2 [[z0,z1],[z1,z2]]
  CHECK(st.z_basis.size() == 3);
  CHECK(st.localizers.empty());
  CHECK(st.equality_rows.empty());
}

TEST_CASE("structure sizes: disk at kappa=2 gives 6x6 moment and 3x3 localizer") {
  SemialgebraicSet s = unit_ball(2);
  MomentStructure st = build_structure(s, 2);
  CHECK(st.mat_basis.size() == 6);
  REQUIRE(st.localizers.size() == 1);
  CHECK(st.localizers[0].side == 3);
}

TEST_CASE("equality h = x1 - x2 at kappa=1 yields 3 linear functionals") {
  SemialgebraicSet s;
  s.n = 2;
  s.equalities.push_back(var(2, 0) - var(2, 1));
  MomentStructure st = build_structure(s, 1);
  CHECK(st.equality_rows.size() == 3);  // L(h), L(h x1), L(h x2)
}

TEST_CASE("kappa too small for constraint degree is rejected") {
  SemialgebraicSet s;
  s.n = 1;
  Polynomial x = var(1, 0);
  s.inequalities.push_back(Polynomial::constant(1, 1.0) - x * x * x * x);
  CHECK_THROWS_AS(build_structure(s, 1), std::invalid_argument);
}

TEST_CASE("linear functional: normalization, Dirac moments, uniform measure") {
  PseudomomentSolution pm;
  pm.n = 1;
  pm.kappa = 2;
  pm.status = SolveStatus::Optimal;

  SUBCASE("Dirac at 0.7") {
    const double t = 0.7;
    pm.z.resize(5);
    for (int k = 0; k < 5; ++k) pm.z[k] = std::pow(t, k);
    CHECK(linear_functional(pm, Polynomial::constant(1, 1.0)) == doctest::Approx(1.0));
    CHECK(linear_functional(pm, var(1, 0)) == doctest::Approx(t));
  }
  SUBCASE("uniform on [-1,1]: L(x^2) = 1/3") {
    pm.z.resize(5);
    pm.z << 1.0, 0.0, 1.0 / 3.0, 0.0, 1.0 / 5.0;
    CHECK(linear_functional(pm, var(1, 0) * var(1, 0)) == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("degree beyond 2 kappa rejected") {
    pm.z = Eigen::VectorXd::Ones(5);
    Polynomial x = var(1, 0);
    CHECK_THROWS_AS(linear_functional(pm, x * x * x * x * x), std::invalid_argument);
  }
}

TEST_CASE("min x^2 over [-1,1] at kappa=1 is 0") {
  SemialgebraicSet s = interval(-1.0, 1.0);
  Polynomial x = var(1, 0);
  auto r = lower_bound(s, x * x, 1);
  CHECK(r.bound == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(std::abs(r.pm.z[0] - 1.0) <= 1e-7);  // z_0 = 1
}

TEST_CASE("min x1+x2 over unit disk at kappa=1 is -sqrt(2)") {
  SemialgebraicSet s = unit_ball(2);
  auto r = lower_bound(s, var(2, 0) + var(2, 1), 1);
  CHECK(std::abs(r.bound - (-std::sqrt(2.0))) <= 1e-5);
}

TEST_CASE("quartic over interval: kappa=2 bound below dense grid minimum") {
  // f = (1 - x^2) (x^2 - 4) + 0.3 x, a nonconvex quartic on [-2, 2]
  Polynomial x = var(1, 0);
  Polynomial f = (Polynomial::constant(1, 1.0) - x * x) * (x * x - Polynomial::constant(1, 4.0)) +
                 Polynomial::constant(1, 0.3) * x;
  SemialgebraicSet s = interval(-2.0, 2.0);
  auto r = lower_bound(s, f, 2);

  double grid_min = std::numeric_limits<double>::infinity();
  Eigen::VectorXd pt(1);
  for (double t = -2.0; t <= 2.0; t += 1e-4) {
    pt[0] = t;
    grid_min = std::min(grid_min, f.evaluate(pt));
  }
  CHECK(r.bound <= grid_min + 1e-4);
  // kappa=2 is exact for a univariate quartic on an interval
  CHECK(r.bound >= grid_min - 1e-3);
}

TEST_CASE("monotonicity in kappa and soundness against feasible samples") {
  Polynomial x = var(1, 0);
  Polynomial f = (Polynomial::constant(1, 1.0) - x * x) * (x * x - Polynomial::constant(1, 4.0));
  SemialgebraicSet s = interval(-1.5, 1.5);

  auto r2 = lower_bound(s, f, 2);
  auto r3 = lower_bound(s, f, 3);
  auto r4 = lower_bound(s, f, 4);
  const double tol = 1e-6;
  CHECK(r3.bound >= r2.bound - tol);
  CHECK(r4.bound >= r3.bound - tol);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  Eigen::VectorXd pt(1);
  for (int i = 0; i < 50; ++i) {
    pt[0] = u(rng);
    CHECK(f.evaluate(pt) >= r2.bound - 1e-6);
  }
}

TEST_CASE("moment matrix of a solution is symmetric and nearly PSD") {
  SemialgebraicSet s = unit_ball(2);
  auto r = lower_bound(s, var(2, 0), 2);
  Eigen::MatrixXd M = r.pm.moment_matrix();
  CHECK((M - M.transpose()).norm() == 0.0);  // symmetric by construction
  CHECK(r.pm.psd_margin >= -1e-6);
}

TEST_CASE("empty set is reported primal infeasible") {
  // x = 2 and x^2 <= 1
  SemialgebraicSet s = interval(-1.0, 1.0);
  s.equalities.push_back(var(1, 0) - Polynomial::constant(1, 2.0));
  CHECK_THROWS_AS(lower_bound(s, var(1, 0), 1), InfeasibleError);
}

TEST_CASE("variable scaling: ball_bound does not change the bound") {
  SemialgebraicSet s = unit_ball(2, 3.0);
  auto r1 = lower_bound(s, var(2, 0) + var(2, 1), 1);
  s.ball_bound = 10.0;
  auto r2 = lower_bound(s, var(2, 0) + var(2, 1), 1);
  CHECK(std::abs(r1.bound - r2.bound) <= 1e-5);
  CHECK(std::abs(r1.bound - (-3.0 * std::sqrt(2.0))) <= 1e-4);
}

TEST_CASE("suggest_ball_bound covers the set with slack") {
  SemialgebraicSet s = unit_ball(2, 2.0);
  const double M = suggest_ball_bound(s);
  CHECK(M >= 2.0 * std::sqrt(2.0) * 0.99);  // covers the corner of the bounding box
  CHECK(M <= 10.0);
}
