#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "smec/polynomial.hpp"

namespace smec {

/// Basic semialgebraic set {theta in R^n : g_i(theta) >= 0, h_j(theta) = 0}.
/// If ball_bound is set, the constraint ball_bound^2 - |theta|^2 >= 0 is
/// appended when the set is compiled into a relaxation, which makes the
/// description Archimedean.
struct SemialgebraicSet {
  int n = 0;
  std::vector<Polynomial> inequalities;
  std::vector<Polynomial> equalities;
  std::optional<double> ball_bound;

  void validate() const;
  int max_constraint_degree() const;

  /// g_i >= -tol for all i and |h_j| <= tol for all j.
  bool contains(const Eigen::VectorXd& point, double tol = 1e-9) const;
  /// Most negative slack over all constraints (0 if strictly inside).
  double violation(const Eigen::VectorXd& point) const;

  /// The explicit Archimedean ball constraint, if ball_bound is set.
  std::optional<Polynomial> ball_constraint() const;
};

/// Selection of coordinates xi = P theta (0-based, distinct).
struct ProjectionSpec {
  std::vector<int> coords;

  static ProjectionSpec identity(int n);
  int d() const { return static_cast<int>(coords.size()); }
  void validate(int n) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& theta) const;
  /// P' M P scatter of a d x d matrix into n x n coordinates.
  Eigen::MatrixXd lift_matrix(const Eigen::MatrixXd& M, int n) const;
};

// JSON round-trip. Polynomial: {"n":2,"terms":[{"exp":[2,0],"coef":1.0},...]}
// Set: {"n":..,"ineq":[poly...],"eq":[poly...],"ball_bound":number|null}
nlohmann::json polynomial_to_json(const Polynomial& p);
Polynomial polynomial_from_json(const nlohmann::json& j);
nlohmann::json set_to_json(const SemialgebraicSet& s);
SemialgebraicSet set_from_json(const nlohmann::json& j);

SemialgebraicSet load_set(const std::string& path);
void save_set(const SemialgebraicSet& s, const std::string& path);

}  // namespace smec
