#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

namespace smec {

/// {xi : (xi - mu)' E (xi - mu) <= 1} with E positive definite.
struct Ellipsoid {
  int d = 0;
  Eigen::MatrixXd E;
  Eigen::VectorXd mu;
  double logdet = 0.0;  // log det E
  int kappa = 0;
  bool degenerate = false;  // set lies in an affine subspace, true MEE volume 0

  double quadform(const Eigen::VectorXd& xi) const {
    return (xi - mu).dot(E * (xi - mu));
  }
  bool contains(const Eigen::VectorXd& xi, double tol = 1e-6) const {
    return quadform(xi) <= 1.0 + tol;
  }
  /// vol = V_d / sqrt(det E), V_d the unit-ball volume.
  double volume() const;
};

double unit_ball_volume(int d);

/// ok iff every sample satisfies the quadratic form within 1e-6;
/// max_violation = max quadform - 1 (negative when strictly inside).
std::pair<bool, double> enclosure_check(const Ellipsoid& ell,
                                        const std::vector<Eigen::VectorXd>& samples);

nlohmann::json ellipsoid_to_json(const Ellipsoid& e);
Ellipsoid ellipsoid_from_json(const nlohmann::json& j);

}  // namespace smec
