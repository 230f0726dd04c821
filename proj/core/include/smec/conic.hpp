#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace smec {

enum class ConeKind { Zero, NonNeg, SecondOrder, Psd };

/// One block of the cone product. For Psd, `dim` is the matrix side k and the
/// block occupies k(k+1)/2 rows in scaled-vectorized (svec) form; for the
/// other kinds `dim` is the row count itself.
struct ConeBlock {
  ConeKind kind;
  int dim;

  int rows() const { return kind == ConeKind::Psd ? dim * (dim + 1) / 2 : dim; }
};

/// Standard-form conic program
///     min c'x   s.t.   Ax + s = b,  s in K,
/// K the ordered product of the cone blocks. PSD blocks are stored in svec
/// form with off-diagonal entries scaled by sqrt(2), so the cone inner
/// product equals the plain dot product of the vectorizations.
struct ConicProgram {
  Eigen::SparseMatrix<double> A;  // m x n, column major
  Eigen::VectorXd b;              // m
  Eigen::VectorXd c;              // n
  std::vector<ConeBlock> cones;

  int num_vars() const { return static_cast<int>(A.cols()); }
  int num_rows() const { return static_cast<int>(A.rows()); }
  void validate() const;

  /// Text-based sparse dump for cross-checking against external solvers.
  /// Format documented in the repository README.
  void dump(std::ostream& os) const;
  void dump_file(const std::string& path) const;
};

enum class SolveStatus { Optimal, PrimalInfeasible, DualInfeasible, MaxIters, NumericalError };

std::string to_string(SolveStatus s);

struct ConicSolution {
  SolveStatus status = SolveStatus::NumericalError;
  Eigen::VectorXd x;  // primal
  Eigen::VectorXd y;  // dual (in K*)
  Eigen::VectorXd s;  // primal slack (in K)
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;  // relative duality gap
  int iterations = 0;
  bool polished = false;

  double worst_residual() const;
};

struct SolverSettings {
  double eps = 1e-7;
  int max_iters = 200000;
  double alpha = 1.5;           // over-relaxation
  double eps_infeasible = 1e-10;
  int check_interval = 25;
  bool equilibrate = true;
  int ruiz_iters = 10;
  bool polish = true;
  bool verbose = false;

  /// Defaults, with eps overridable through the SMEC_SOLVER_EPS env var.
  static SolverSettings defaults();
  SolverSettings with_eps(double e) const {
    SolverSettings s = *this;
    s.eps = e;
    return s;
  }
};

ConicSolution solve(const ConicProgram& prog, const SolverSettings& settings = SolverSettings::defaults());

// svec helpers (lower-triangular column-major order, off-diagonals * sqrt(2)).
int svec_dim(int side);
Eigen::VectorXd svec(const Eigen::MatrixXd& S);
Eigen::MatrixXd smat(const Eigen::VectorXd& v, int side);

/// Incremental assembly of a ConicProgram: declare variables, append cone
/// blocks, then fill A/b coefficients row by row.
class ProgramBuilder {
 public:
  explicit ProgramBuilder(int num_vars) : num_vars_(num_vars), c_(Eigen::VectorXd::Zero(num_vars)) {}

  int num_vars() const { return num_vars_; }
  int num_rows() const { return num_rows_; }

  /// Appends a cone block, returns the index of its first row.
  int add_block(ConeKind kind, int dim);

  void add_A(int row, int col, double value);
  void add_b(int row, double value);
  void add_c(int col, double value) { c_[col] += value; }

  ConicProgram build() const;

 private:
  int num_vars_;
  int num_rows_ = 0;
  std::vector<Eigen::Triplet<double>> triplets_;
  std::vector<std::pair<int, double>> b_entries_;
  std::vector<ConeBlock> cones_;
  Eigen::VectorXd c_;
};

}  // namespace smec
