#pragma once

#include <vector>

#include "smec/conic.hpp"
#include "smec/polynomial.hpp"
#include "smec/semialgebraic.hpp"

namespace smec {

/// A set prepared for relaxation: variables rescaled by theta = var_scale *
/// theta_hat so the Archimedean ball becomes the unit ball, constraints
/// renormalized to unit leading size, ball constraint appended last.
struct CompiledSet {
  SemialgebraicSet set;  // in hat coordinates
  double var_scale = 1.0;
  int num_user_inequalities = 0;
};

CompiledSet compile_set(const SemialgebraicSet& set);

/// Sparse linear maps from the pseudomoment vector z to the moment matrix
/// M_kappa(z), the localizing matrices M_{kappa-ceil(deg g/2)}(g_i z) and the
/// equality functionals L_z(h_j [theta]_{2 kappa - deg h_j}).
struct MomentStructure {
  int n = 0;
  int kappa = 0;
  MonomialBasis z_basis;    // degree 2 kappa; defines z indexing
  MonomialBasis mat_basis;  // degree kappa

  // svec position (lower triangle, column major) -> list of (z index, coef),
  // already carrying the sqrt(2) off-diagonal svec scaling.
  using SvecMap = std::vector<std::vector<std::pair<int, double>>>;

  SvecMap moment_entries;  // side = mat_basis.size()
  struct Localizer {
    int side = 0;
    SvecMap entries;
  };
  std::vector<Localizer> localizers;                                // one per inequality
  std::vector<std::vector<std::pair<int, double>>> equality_rows;   // rows of L_z(h m) = 0

  std::vector<int> degree1_positions;  // z indices of theta_1..theta_n

  Eigen::MatrixXd assemble_moment_matrix(const Eigen::VectorXd& z) const;
};

/// Throws std::invalid_argument unless 2 kappa >= max(2, deg g_i, deg h_j).
MomentStructure build_structure(const SemialgebraicSet& set, int kappa);

/// Appends z_0 = 1, equality functionals, the moment matrix PSD block and all
/// localizer blocks to a program whose first z_basis.size() variables are z.
/// Returns the row index of the moment matrix block.
int append_moment_constraints(ProgramBuilder& pb, const MomentStructure& st);

struct PseudomomentSolution {
  Eigen::VectorXd z;  // pseudomoments in the original (unscaled) coordinates
  int n = 0;
  int kappa = 0;
  SolveStatus status = SolveStatus::NumericalError;
  double var_scale = 1.0;
  double psd_margin = 0.0;      // lambda_min of the solver-frame moment matrix
  double solver_residual = 0.0;

  MonomialBasis basis() const { return MonomialBasis(n, 2 * kappa); }
  Eigen::MatrixXd moment_matrix() const;
};

/// L_z(p) = sum_a p_a z_a. Throws if deg p > 2 kappa.
double linear_functional(const PseudomomentSolution& pm, const Polynomial& p);

struct LowerBoundResult {
  double bound = 0.0;
  PseudomomentSolution pm;
};

/// Order-kappa moment lower bound for min objective over the set.
/// Throws InfeasibleError when the relaxation is primal infeasible (empty or
/// numerically empty set) and SolverError on solver failure.
LowerBoundResult lower_bound(const SemialgebraicSet& set, const Polynomial& objective, int kappa,
                             const SolverSettings& settings = SolverSettings::defaults());

/// Conservative Archimedean radius from per-coordinate order-1 interval
/// bounds, inflated by 1.5. Throws if some direction is unbounded at order 1.
double suggest_ball_bound(const SemialgebraicSet& set,
                          const SolverSettings& settings = SolverSettings::defaults());

}  // namespace smec
