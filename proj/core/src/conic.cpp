#include "smec/conic.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace smec {

void ConicProgram::validate() const {
  if (A.rows() != b.size()) throw std::invalid_argument("ConicProgram: A/b row mismatch");
  if (A.cols() != c.size()) throw std::invalid_argument("ConicProgram: A/c column mismatch");
  int rows = 0;
  for (const auto& blk : cones) {
    if (blk.dim <= 0) throw std::invalid_argument("ConicProgram: nonpositive cone dimension");
    rows += blk.rows();
  }
  if (rows != A.rows()) throw std::invalid_argument("ConicProgram: cone rows do not sum to A rows");
}

void ConicProgram::dump(std::ostream& os) const {
  os << "smec-conic 1\n";
  os << "vars " << num_vars() << " rows " << num_rows() << "\n";
  os << "cones";
  for (const auto& blk : cones) {
    char k = 'z';
    switch (blk.kind) {
      case ConeKind::Zero: k = 'z'; break;
      case ConeKind::NonNeg: k = 'l'; break;
      case ConeKind::SecondOrder: k = 'q'; break;
      case ConeKind::Psd: k = 's'; break;
    }
    os << " " << k << blk.dim;
  }
  os << "\n";
  os.precision(17);
  for (int i = 0; i < c.size(); ++i)
    if (c[i] != 0.0) os << "c " << i << " " << c[i] << "\n";
  for (int i = 0; i < b.size(); ++i)
    if (b[i] != 0.0) os << "b " << i << " " << b[i] << "\n";
  for (int col = 0; col < A.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, col); it; ++it)
      os << "A " << it.row() << " " << it.col() << " " << it.value() << "\n";
}

void ConicProgram::dump_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write program dump: " + path);
  dump(out);
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::PrimalInfeasible: return "primal_infeasible";
    case SolveStatus::DualInfeasible: return "dual_infeasible";
    case SolveStatus::MaxIters: return "max_iters";
    case SolveStatus::NumericalError: return "numerical_error";
  }
  return "unknown";
}

double ConicSolution::worst_residual() const {
  return std::max({primal_residual, dual_residual, std::abs(gap)});
}

SolverSettings SolverSettings::defaults() {
  SolverSettings s;
  if (const char* env = std::getenv("SMEC_SOLVER_EPS")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end != env && v > 0) s.eps = v;
  }
  return s;
}

int svec_dim(int side) { return side * (side + 1) / 2; }

Eigen::VectorXd svec(const Eigen::MatrixXd& S) {
  const int k = static_cast<int>(S.rows());
  Eigen::VectorXd v(svec_dim(k));
  const double r2 = std::sqrt(2.0);
  int idx = 0;
  for (int j = 0; j < k; ++j) {
    for (int i = j; i < k; ++i) {
      v[idx++] = (i == j) ? S(i, j) : r2 * 0.5 * (S(i, j) + S(j, i));
    }
  }
  return v;
}

Eigen::MatrixXd smat(const Eigen::VectorXd& v, int side) {
  Eigen::MatrixXd S(side, side);
  const double ir2 = 1.0 / std::sqrt(2.0);
  int idx = 0;
  for (int j = 0; j < side; ++j) {
    for (int i = j; i < side; ++i) {
      const double val = v[idx++];
      if (i == j) {
        S(i, j) = val;
      } else {
        S(i, j) = S(j, i) = val * ir2;
      }
    }
  }
  return S;
}

int ProgramBuilder::add_block(ConeKind kind, int dim) {
  const int base = num_rows_;
  cones_.push_back({kind, dim});
  num_rows_ += cones_.back().rows();
  return base;
}

void ProgramBuilder::add_A(int row, int col, double value) {
  if (value == 0.0) return;
  triplets_.emplace_back(row, col, value);
}

void ProgramBuilder::add_b(int row, double value) {
  if (value == 0.0) return;
  b_entries_.emplace_back(row, value);
}

ConicProgram ProgramBuilder::build() const {
  ConicProgram prog;
  prog.A.resize(num_rows_, num_vars_);
  prog.A.setFromTriplets(triplets_.begin(), triplets_.end());
  prog.A.makeCompressed();
  prog.b = Eigen::VectorXd::Zero(num_rows_);
  for (const auto& [row, val] : b_entries_) prog.b[row] += val;
  prog.c = c_;
  prog.cones = cones_;
  prog.validate();
  return prog;
}

}  // namespace smec
