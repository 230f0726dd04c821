#include <doctest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "smec/chebyshev.hpp"
#include "smec/errors.hpp"

using namespace smec;

namespace {

Polynomial var(int n, int i) { return Polynomial::variable(n, i); }

SemialgebraicSet ball_set(int n, double r) {
  SemialgebraicSet s;
  s.n = n;
  Polynomial g = Polynomial::constant(n, r * r);
  for (int i = 0; i < n; ++i) g = g - var(n, i) * var(n, i);
  s.inequalities.push_back(g);
  return s;
}

SolverSettings tight() {
  SolverSettings s;
  s.eps = 1e-10;
  return s;
}

}  // namespace

TEST_CASE("two-point set: midpoint center and unit squared radius") {
  // S = {(0,0), (2,0)} as h1 = x2 = 0, h2 = x1(x1-2) = 0.
  SemialgebraicSet s;
  s.n = 2;
  s.equalities.push_back(var(2, 1));
  s.equalities.push_back(var(2, 0) * (var(2, 0) - Polynomial::constant(2, 2.0)));
  s.ball_bound = 3.0;
  ChebyshevResult r = grcc(s, ProjectionSpec::identity(2), ShapeMatrix::identity(2), 2, tight());
  CHECK(r.mu[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(std::abs(r.mu[1]) <= 1e-6);
  CHECK(r.eta == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("sphere of radius 3: origin center, radius 3 at kappa=1") {
  SemialgebraicSet s;
  s.n = 3;
  Polynomial norm2 = var(3, 0) * var(3, 0) + var(3, 1) * var(3, 1) + var(3, 2) * var(3, 2);
  s.equalities.push_back(norm2 - Polynomial::constant(3, 9.0));
  ChebyshevResult r = grcc(s, ProjectionSpec::identity(3), ShapeMatrix::identity(3), 1, tight());
  CHECK(r.mu.norm() <= 1e-5);
  CHECK(std::abs(std::sqrt(r.eta) - 3.0) <= 1e-4);
}

TEST_CASE("cube |x|_inf <= 3: radius 3 sqrt(3) at kappa=1") {
  SemialgebraicSet s;
  s.n = 3;
  for (int i = 0; i < 3; ++i)
    s.inequalities.push_back(Polynomial::constant(3, 9.0) - var(3, i) * var(3, i));
  ChebyshevResult r = grcc(s, ProjectionSpec::identity(3), ShapeMatrix::identity(3), 1, tight());
  CHECK(r.mu.norm() <= 1e-5);
  CHECK(std::abs(std::sqrt(r.eta) - 3.0 * std::sqrt(3.0)) <= 1e-4);
}

TEST_CASE("TV screen quartic: radius 3^(1/4) at kappa=2") {
  SemialgebraicSet s;
  s.n = 3;
  Polynomial quart = Polynomial::constant(3, 1.0);
  for (int i = 0; i < 3; ++i) {
    Polynomial x2 = var(3, i) * var(3, i);
    quart = quart - x2 * x2;
  }
  s.inequalities.push_back(quart);
  ChebyshevResult r = grcc(s, ProjectionSpec::identity(3), ShapeMatrix::identity(3), 2, tight());
  CHECK(r.mu.norm() <= 1e-5);
  CHECK(std::abs(std::sqrt(r.eta) - std::pow(3.0, 0.25)) <= 1e-4);
}

TEST_CASE("translation equivariance: shifted disk") {
  SemialgebraicSet s;
  s.n = 2;
  // 1 - (x1-5)^2 - x2^2 >= 0
  Polynomial g = Polynomial::constant(2, 1.0) -
                 (var(2, 0) - Polynomial::constant(2, 5.0)) * (var(2, 0) - Polynomial::constant(2, 5.0)) -
                 var(2, 1) * var(2, 1);
  s.inequalities.push_back(g);
  s.ball_bound = 8.0;
  ChebyshevResult r = grcc(s, ProjectionSpec::identity(2), ShapeMatrix::identity(2), 1, tight());
  CHECK(r.mu[0] == doctest::Approx(5.0).epsilon(1e-5));
  CHECK(std::abs(r.mu[1]) <= 1e-5);
  CHECK(r.eta == doctest::Approx(1.0).epsilon(1e-5));

  // against the unshifted disk
  ChebyshevResult r0 = grcc(ball_set(2, 1.0), ProjectionSpec::identity(2),
                            ShapeMatrix::identity(2), 1, tight());
  CHECK(std::abs(r.eta - r0.eta) <= 1e-7 * (1 + r.eta));
}

TEST_CASE("random shape matrix on the unit disk matches the angular grid oracle") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int rep = 0; rep < 3; ++rep) {
    Eigen::MatrixXd B(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) B(i, j) = gauss(rng);
    Eigen::MatrixXd Q = B * B.transpose() + 0.3 * Eigen::MatrixXd::Identity(2, 2);

    ChebyshevResult r = grcc(ball_set(2, 1.0), ProjectionSpec::identity(2), ShapeMatrix{Q}, 1, tight());

    double grid_max = 0;
    for (double a = 0; a < 2 * M_PI; a += 1e-4) {
      Eigen::Vector2d xi(std::cos(a), std::sin(a));
      grid_max = std::max(grid_max, (xi - r.mu).dot(Q * (xi - r.mu)));
    }
    CHECK(r.eta >= grid_max - 1e-5);          // enclosure
    CHECK(std::abs(r.eta - grid_max) <= 1e-3);  // tight at this order
  }
}

TEST_CASE("rcc equals grcc(I, 1) on random quadratic systems") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int rep = 0; rep < 3; ++rep) {
    SemialgebraicSet s;
    s.n = 2;
    for (int k = 0; k < 8; ++k) {
      Eigen::MatrixXd G(2, 2);
      Eigen::VectorXd v(2);
      for (int i = 0; i < 2; ++i) {
        v[i] = 0.3 * gauss(rng);
        for (int j = 0; j < 2; ++j) G(i, j) = gauss(rng);
      }
      // beta^2 - |v - G theta|^2 >= 0
      const double beta = 0.8;
      Polynomial res2(2);
      for (int i = 0; i < 2; ++i) {
        Polynomial ri = Polynomial::constant(2, v[i]);
        for (int j = 0; j < 2; ++j) ri = ri - Polynomial::constant(2, G(i, j)) * var(2, j);
        res2 = res2 + ri * ri;
      }
      s.inequalities.push_back(Polynomial::constant(2, beta * beta) - res2);
    }
    s.ball_bound = 10.0;

    ChebyshevResult a = rcc(s, ProjectionSpec::identity(2), tight());
    ChebyshevResult b = grcc(s, ProjectionSpec::identity(2), ShapeMatrix::identity(2), 1, tight());
    CHECK(std::abs(a.eta - b.eta) <= 1e-9 * (1 + std::abs(b.eta)));
    CHECK((a.mu - b.mu).norm() <= 1e-7);
  }
}

TEST_CASE("rcc rejects constraints of degree above two") {
  SemialgebraicSet s;
  s.n = 1;
  Polynomial x = var(1, 0);
  s.inequalities.push_back(Polynomial::constant(1, 1.0) - x * x * x * x);
  CHECK_THROWS_AS(rcc(s, ProjectionSpec::identity(1)), std::invalid_argument);
}

TEST_CASE("hierarchy monotonicity and sample enclosure on a nonconvex set") {
  // Annulus-like slice: 4 - |x|^2 >= 0 and |x|^2 - 1 >= 0 (nonconvex).
  SemialgebraicSet s = ball_set(2, 2.0);
  Polynomial norm2 = var(2, 0) * var(2, 0) + var(2, 1) * var(2, 1);
  s.inequalities.push_back(norm2 - Polynomial::constant(2, 1.0));

  SolverSettings st = tight();
  ChebyshevResult r1 = grcc(s, ProjectionSpec::identity(2), ShapeMatrix::identity(2), 1, st);
  ChebyshevResult r2 = grcc(s, ProjectionSpec::identity(2), ShapeMatrix::identity(2), 2, st);
  ChebyshevResult r3 = grcc(s, ProjectionSpec::identity(2), ShapeMatrix::identity(2), 3, st);
  const double tol = 1e-6;
  CHECK(r1.eta >= r2.eta - tol * (1 + r1.eta));
  CHECK(r2.eta >= r3.eta - tol * (1 + r2.eta));

  // every sampled set point is enclosed, and the sample max lower-bounds eta
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double sample_max = 0;
  int found = 0;
  while (found < 2000) {
    Eigen::Vector2d p(u(rng), u(rng));
    const double n2 = p.squaredNorm();
    if (n2 > 4.0 || n2 < 1.0) continue;
    ++found;
    CHECK(r3.contains(p));
    sample_max = std::max(sample_max, (p - r3.mu).squaredNorm());
  }
  CHECK(r3.eta >= sample_max - tol * (1 + r3.eta));
}

TEST_CASE("projection to a subvector bounds the coordinate interval") {
  // box [-2,2] x [-1,1], projected to x2: eta = 1
  SemialgebraicSet s;
  s.n = 2;
  s.inequalities.push_back(Polynomial::constant(2, 4.0) - var(2, 0) * var(2, 0));
  s.inequalities.push_back(Polynomial::constant(2, 1.0) - var(2, 1) * var(2, 1));
  ProjectionSpec proj;
  proj.coords = {1};
  ChebyshevResult r = grcc(s, proj, ShapeMatrix::identity(1), 1, tight());
  CHECK(std::abs(r.mu[0]) <= 1e-6);
  CHECK(r.eta == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("chebyshev JSON round trip") {
  ChebyshevResult r = grcc(ball_set(2, 1.5), ProjectionSpec::identity(2),
                           ShapeMatrix::identity(2), 1, tight());
  nlohmann::json j = chebyshev_to_json(r);
  ChebyshevResult q = chebyshev_from_json(j);
  CHECK((q.mu - r.mu).norm() <= 1e-14);
  CHECK(q.eta == doctest::Approx(r.eta));
  CHECK(q.kappa == r.kappa);
  CHECK(j.contains("E"));
  CHECK(j.contains("logdet"));
}

TEST_CASE("empty set reports infeasible") {
  SemialgebraicSet s = ball_set(1, 1.0);
  s.equalities.push_back(var(1, 0) - Polynomial::constant(1, 5.0));
  CHECK_THROWS_AS(grcc(s, ProjectionSpec::identity(1), ShapeMatrix::identity(1), 1, tight()),
                  InfeasibleError);
}
