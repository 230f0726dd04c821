#pragma once

#include <nlohmann/json_fwd.hpp>

#include "smec/ellipsoid.hpp"
#include "smec/moment.hpp"

namespace smec {

/// Metric of the generalized Chebyshev problem, symmetric positive definite.
struct ShapeMatrix {
  Eigen::MatrixXd Q;

  static ShapeMatrix identity(int d) { return {Eigen::MatrixXd::Identity(d, d)}; }
  void validate() const;  // rejects condition number > 1e10
};

/// Fixed-shape enclosing ellipsoid {xi : |xi - mu|_Q^2 <= eta}.
struct ChebyshevResult {
  Eigen::VectorXd mu;
  double eta = 0.0;          // squared Q-radius for the raw Q
  double eta_detnorm = 0.0;  // squared radius after det-normalizing Q
  Eigen::MatrixXd Q;         // raw Q
  int kappa = 0;
  double solver_residual = 0.0;
  PseudomomentSolution pm;

  int d() const { return static_cast<int>(mu.size()); }
  Ellipsoid as_ellipsoid() const;
  double volume() const;
  bool contains(const Eigen::VectorXd& xi, double tol = 1e-6) const {
    return (xi - mu).dot(Q * (xi - mu)) <= eta + tol * (1.0 + eta);
  }
};

/// Lifted standard-form SDP of the order-kappa generalized relaxed Chebyshev
/// center: variables (z, t), objective t - <C, M_kappa(z)>, Schur block
/// [[Qn^-1, P L_z(theta)], [., t]]. Qn must be the already det-normalized
/// metric; the structure must come from the same (compiled) set.
ConicProgram lift_to_standard_sdp(const MomentStructure& st, const ProjectionSpec& proj,
                                  const Eigen::MatrixXd& Qn);

/// Generalized relaxed Chebyshev center of order kappa.
ChebyshevResult grcc(const SemialgebraicSet& set, const ProjectionSpec& proj, const ShapeMatrix& Q,
                     int kappa, const SolverSettings& settings = SolverSettings::defaults());

/// Relaxed Chebyshev center: the kappa = 1, Q = I special case, assembled
/// independently from the quadratic-form data of the constraints.
/// Rejects sets with constraints of degree > 2.
ChebyshevResult rcc(const SemialgebraicSet& set, const ProjectionSpec& proj,
                    const SolverSettings& settings = SolverSettings::defaults());

nlohmann::json chebyshev_to_json(const ChebyshevResult& r);
ChebyshevResult chebyshev_from_json(const nlohmann::json& j);

}  // namespace smec
