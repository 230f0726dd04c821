#include "smec/chebyshev.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "smec/errors.hpp"

namespace smec {

namespace {

// Matrix with C's nonzeros in the degree-1 block so that <C, M_kappa(z)>
// equals L_z(theta' P'QP theta); assembled as objective coefficients on z.
void subtract_quadratic_moment(ProgramBuilder& pb, const MomentStructure& st,
                               const ProjectionSpec& proj, const Eigen::MatrixXd& Qn) {
  Eigen::MatrixXd lifted = proj.lift_matrix(Qn, st.n);
  Polynomial q = Polynomial::from_quadratic_form(st.n, 0.0, Eigen::VectorXd::Zero(st.n), lifted);
  for (const auto& [a, coef] : q.terms()) pb.add_c(st.z_basis.position(a), -coef);
}

double det_normalizer(const Eigen::MatrixXd& Q) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Q);
  double logdet = 0;
  for (int i = 0; i < Q.rows(); ++i) logdet += std::log(eig.eigenvalues()[i]);
  return std::exp(logdet / Q.rows());
}

ChebyshevResult finish(const MomentStructure& st, const CompiledSet& cs, const ProjectionSpec& proj,
                       const Eigen::MatrixXd& Qraw, double sQ, int kappa, const ConicSolution& sol) {
  if (sol.status == SolveStatus::PrimalInfeasible)
    throw InfeasibleError("grcc: relaxation primal infeasible (set empty or numerically empty)");
  if (sol.status != SolveStatus::Optimal)
    throw SolverError("grcc: solver failed with status " + to_string(sol.status));

  const double M = cs.var_scale;
  ChebyshevResult out;
  out.kappa = kappa;
  out.Q = Qraw;
  out.solver_residual = sol.worst_residual();

  const double eta_hat = std::max(0.0, -sol.primal_objective);
  out.eta_detnorm = M * M * eta_hat;
  out.eta = sQ * out.eta_detnorm;

  out.mu.resize(proj.d());
  for (int a = 0; a < proj.d(); ++a)
    out.mu[a] = M * sol.x[st.degree1_positions[proj.coords[a]]];

  out.pm.n = st.n;
  out.pm.kappa = kappa;
  out.pm.status = sol.status;
  out.pm.var_scale = M;
  out.pm.solver_residual = sol.worst_residual();
  Eigen::MatrixXd Mm = st.assemble_moment_matrix(sol.x.head(st.z_basis.size()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Mm);
  out.pm.psd_margin = eig.eigenvalues().minCoeff();
  out.pm.z = sol.x.head(st.z_basis.size());
  for (int i = 0; i < st.z_basis.size(); ++i)
    out.pm.z[i] *= std::pow(M, total_degree(st.z_basis[i]));
  return out;
}

}  // namespace

void ShapeMatrix::validate() const {
  if (Q.rows() != Q.cols() || Q.rows() == 0) throw std::invalid_argument("ShapeMatrix: not square");
  if ((Q - Q.transpose()).norm() > 1e-10 * (1.0 + Q.norm()))
    throw std::invalid_argument("ShapeMatrix: not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Q);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();
  if (lmin <= 0) throw std::invalid_argument("ShapeMatrix: not positive definite");
  if (lmax / lmin > 1e10)
    throw std::invalid_argument(
        "ShapeMatrix: condition number above 1e10; regularize the shape estimate upstream");
}

Ellipsoid ChebyshevResult::as_ellipsoid() const {
  Ellipsoid e;
  e.d = d();
  e.E = Q / eta;
  e.mu = mu;
  e.kappa = kappa;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(e.E);
  e.logdet = eig.eigenvalues().array().log().sum();
  return e;
}

double ChebyshevResult::volume() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Q);
  const double detQ = eig.eigenvalues().prod();
  return unit_ball_volume(d()) * std::pow(eta, d() / 2.0) / std::sqrt(detQ);
}

ConicProgram lift_to_standard_sdp(const MomentStructure& st, const ProjectionSpec& proj,
                                  const Eigen::MatrixXd& Qn) {
  const int d = proj.d();
  const int nz = st.z_basis.size();
  const int tcol = nz;
  ProgramBuilder pb(nz + 1);
  append_moment_constraints(pb, st);

  // Schur block [[Qn^-1, P L_z(theta)], [(P L_z(theta))', t]].
  Eigen::MatrixXd Qinv = Qn.inverse();
  const int base = pb.add_block(ConeKind::Psd, d + 1);
  const double r2 = std::sqrt(2.0);
  int p = 0;
  for (int j = 0; j < d + 1; ++j) {
    for (int i = j; i < d + 1; ++i) {
      if (i < d && j < d) {
        pb.add_b(base + p, (i == j ? 1.0 : r2) * Qinv(i, j));
      } else if (i == d && j < d) {
        pb.add_A(base + p, st.degree1_positions[proj.coords[j]], -r2);
      } else {
        pb.add_A(base + p, tcol, -1.0);
      }
      ++p;
    }
  }

  pb.add_c(tcol, 1.0);
  subtract_quadratic_moment(pb, st, proj, Qn);
  return pb.build();
}

ChebyshevResult grcc(const SemialgebraicSet& set, const ProjectionSpec& proj, const ShapeMatrix& Q,
                     int kappa, const SolverSettings& settings) {
  proj.validate(set.n);
  Q.validate();
  if (Q.Q.rows() != proj.d()) throw std::invalid_argument("grcc: Q dimension mismatch");

  const double sQ = det_normalizer(Q.Q);
  Eigen::MatrixXd Qn = Q.Q / sQ;

  CompiledSet cs = compile_set(set);
  MomentStructure st = build_structure(cs.set, kappa);
  ConicProgram prog = lift_to_standard_sdp(st, proj, Qn);
  ConicSolution sol = solve(prog, settings);
  return finish(st, cs, proj, Q.Q, sQ, kappa, sol);
}

ChebyshevResult rcc(const SemialgebraicSet& set, const ProjectionSpec& proj,
                    const SolverSettings& settings) {
  proj.validate(set.n);
  for (const auto& g : set.inequalities)
    if (g.degree() > 2)
      throw std::invalid_argument("rcc: defined for quadratic constraint sets only");
  for (const auto& h : set.equalities)
    if (h.degree() > 2)
      throw std::invalid_argument("rcc: defined for quadratic constraint sets only");

  // Direct Shor-form assembly at kappa = 1 from quadratic coefficient data:
  // moment matrix [[1, m'],[m, Theta]] >= 0, scalar rows L_z(g_i) >= 0.
  CompiledSet cs = compile_set(set);
  MomentStructure st = build_structure(cs.set, 1);
  const int n = set.n;
  const int nz = st.z_basis.size();
  const int tcol = nz;
  ProgramBuilder pb(nz + 1);

  auto zpos = [&](int i, int j) {  // z index of theta_i theta_j
    MultiIndex a(n, 0);
    a[i] += 1;
    a[j] += 1;
    return st.z_basis.position(a);
  };

  {  // z_0 = 1
    int row = pb.add_block(ConeKind::Zero, 1);
    pb.add_A(row, 0, 1.0);
    pb.add_b(row, 1.0);
  }
  // Equality functionals L_z(h [theta]_{2 - deg h}) = 0 written through
  // quadratic forms of h and h*theta_i.
  std::vector<Polynomial> eq_lifted;
  for (const auto& h : cs.set.equalities) {
    eq_lifted.push_back(h);
    if (h.degree() <= 1)
      for (int i = 0; i < n; ++i) eq_lifted.push_back(h * Polynomial::variable(n, i));
  }
  if (!eq_lifted.empty()) {
    int base = pb.add_block(ConeKind::Zero, static_cast<int>(eq_lifted.size()));
    for (size_t r = 0; r < eq_lifted.size(); ++r) {
      double c0;
      Eigen::VectorXd q;
      Eigen::MatrixXd H;
      eq_lifted[r].quadratic_form(c0, q, H);
      const int row = base + static_cast<int>(r);
      pb.add_A(row, 0, c0);
      for (int i = 0; i < n; ++i)
        if (q[i] != 0.0) pb.add_A(row, st.degree1_positions[i], 2.0 * q[i]);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          const double v = (i == j) ? H(i, i) : H(i, j) + H(j, i);
          if (v != 0.0) pb.add_A(row, zpos(i, j), v);
        }
    }
  }
  {  // M_1(z) in svec form
    const int base = pb.add_block(ConeKind::Psd, n + 1);
    const double r2 = std::sqrt(2.0);
    int p = 0;
    for (int j = 0; j < n + 1; ++j) {
      for (int i = j; i < n + 1; ++i) {
        if (i == 0 && j == 0) pb.add_A(base + p, 0, -1.0);
        else if (j == 0) pb.add_A(base + p, st.degree1_positions[i - 1], -r2);
        else pb.add_A(base + p, zpos(i - 1, j - 1), -(i == j ? 1.0 : r2));
        ++p;
      }
    }
  }
  for (const auto& g : cs.set.inequalities) {  // scalar localizers L_z(g) >= 0
    double c0;
    Eigen::VectorXd q;
    Eigen::MatrixXd H;
    g.quadratic_form(c0, q, H);
    const int row = pb.add_block(ConeKind::NonNeg, 1);
    pb.add_A(row, 0, -c0);
    for (int i = 0; i < n; ++i)
      if (q[i] != 0.0) pb.add_A(row, st.degree1_positions[i], -2.0 * q[i]);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double v = (i == j) ? H(i, i) : H(i, j) + H(j, i);
        if (v != 0.0) pb.add_A(row, zpos(i, j), -v);
      }
  }
  {  // Schur lifting with Q = I
    const int d = proj.d();
    const int base = pb.add_block(ConeKind::Psd, d + 1);
    const double r2 = std::sqrt(2.0);
    int p = 0;
    for (int j = 0; j < d + 1; ++j) {
      for (int i = j; i < d + 1; ++i) {
        if (i < d && j < d) pb.add_b(base + p, i == j ? 1.0 : 0.0);
        else if (i == d && j < d) pb.add_A(base + p, st.degree1_positions[proj.coords[j]], -r2);
        else pb.add_A(base + p, tcol, -1.0);
        ++p;
      }
    }
  }
  pb.add_c(tcol, 1.0);
  for (int a = 0; a < proj.d(); ++a) pb.add_c(zpos(proj.coords[a], proj.coords[a]), -1.0);

  ConicSolution sol = solve(pb.build(), settings);
  return finish(st, cs, proj, Eigen::MatrixXd::Identity(proj.d(), proj.d()), 1.0, 1, sol);
}

double unit_ball_volume(int d) {
  return std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

double Ellipsoid::volume() const {
  return unit_ball_volume(d) * std::exp(-0.5 * logdet);
}

std::pair<bool, double> enclosure_check(const Ellipsoid& ell,
                                        const std::vector<Eigen::VectorXd>& samples) {
  double max_violation = -std::numeric_limits<double>::infinity();
  for (const auto& xi : samples) {
    if (xi.size() != ell.d) throw std::invalid_argument("enclosure_check: dimension mismatch");
    max_violation = std::max(max_violation, ell.quadform(xi) - 1.0);
  }
  if (samples.empty()) max_violation = 0.0;
  return {max_violation <= 1e-6, max_violation};
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& M) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < M.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const int r = static_cast<int>(j.size());
  const int c = r > 0 ? static_cast<int>(j[0].size()) : 0;
  Eigen::MatrixXd M(r, c);
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < c; ++k) M(i, k) = j[i][k].get<double>();
  return M;
}

}  // namespace

nlohmann::json ellipsoid_to_json(const Ellipsoid& e) {
  return {{"d", e.d},
          {"E", matrix_to_json(e.E)},
          {"mu", std::vector<double>(e.mu.data(), e.mu.data() + e.mu.size())},
          {"logdet", e.logdet},
          {"kappa", e.kappa},
          {"degenerate", e.degenerate}};
}

Ellipsoid ellipsoid_from_json(const nlohmann::json& j) {
  Ellipsoid e;
  e.d = j.at("d").get<int>();
  e.E = matrix_from_json(j.at("E"));
  auto mu = j.at("mu").get<std::vector<double>>();
  e.mu = Eigen::Map<Eigen::VectorXd>(mu.data(), mu.size());
  e.logdet = j.at("logdet").get<double>();
  e.kappa = j.at("kappa").get<int>();
  if (j.contains("degenerate")) e.degenerate = j.at("degenerate").get<bool>();
  return e;
}

nlohmann::json chebyshev_to_json(const ChebyshevResult& r) {
  Ellipsoid e = r.as_ellipsoid();
  nlohmann::json j = ellipsoid_to_json(e);
  j["eta"] = r.eta;
  j["eta_detnorm"] = r.eta_detnorm;
  j["Q"] = matrix_to_json(r.Q);
  j["solver_residual"] = r.solver_residual;
  return j;
}

ChebyshevResult chebyshev_from_json(const nlohmann::json& j) {
  ChebyshevResult r;
  auto mu = j.at("mu").get<std::vector<double>>();
  r.mu = Eigen::Map<Eigen::VectorXd>(mu.data(), mu.size());
  r.eta = j.at("eta").get<double>();
  r.eta_detnorm = j.at("eta_detnorm").get<double>();
  r.Q = matrix_from_json(j.at("Q"));
  r.kappa = j.at("kappa").get<int>();
  if (j.contains("solver_residual")) r.solver_residual = j.at("solver_residual").get<double>();
  return r;
}

}  // namespace smec
