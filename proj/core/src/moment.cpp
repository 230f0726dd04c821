#include "smec/moment.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "smec/errors.hpp"

namespace smec {

namespace {

Polynomial normalized(const Polynomial& p) {
  const double m = p.max_abs_coefficient();
  return m > 0 ? p * (1.0 / m) : p;
}

MultiIndex add_indices(const MultiIndex& a, const MultiIndex& b) {
  MultiIndex s(a.size());
  for (size_t i = 0; i < a.size(); ++i) s[i] = a[i] + b[i];
  return s;
}

}  // namespace

CompiledSet compile_set(const SemialgebraicSet& set) {
  set.validate();
  CompiledSet cs;
  cs.var_scale = set.ball_bound.value_or(1.0);
  cs.num_user_inequalities = static_cast<int>(set.inequalities.size());
  cs.set.n = set.n;
  for (const auto& g : set.inequalities)
    cs.set.inequalities.push_back(normalized(g.scale_vars(cs.var_scale)));
  for (const auto& h : set.equalities)
    cs.set.equalities.push_back(normalized(h.scale_vars(cs.var_scale)));
  if (set.ball_bound) {
    // In hat coordinates the Archimedean ball is the unit ball.
    Polynomial ball = Polynomial::constant(set.n, 1.0);
    for (int i = 0; i < set.n; ++i) {
      Polynomial xi = Polynomial::variable(set.n, i);
      ball = ball - xi * xi;
    }
    cs.set.inequalities.push_back(ball);
  }
  return cs;
}

MomentStructure build_structure(const SemialgebraicSet& set, int kappa) {
  set.validate();
  const int maxdeg = std::max(2, set.max_constraint_degree());
  if (2 * kappa < maxdeg)
    throw std::invalid_argument("build_structure: 2*kappa must cover max constraint degree " +
                                std::to_string(maxdeg));

  MomentStructure st;
  st.n = set.n;
  st.kappa = kappa;
  st.z_basis = MonomialBasis(set.n, 2 * kappa);
  st.mat_basis = MonomialBasis(set.n, kappa);

  const double r2 = std::sqrt(2.0);
  const int S = st.mat_basis.size();
  st.moment_entries.resize(svec_dim(S));
  int pos = 0;
  for (int j = 0; j < S; ++j) {
    for (int i = j; i < S; ++i) {
      const int zidx = st.z_basis.position(add_indices(st.mat_basis[i], st.mat_basis[j]));
      st.moment_entries[pos].emplace_back(zidx, i == j ? 1.0 : r2);
      ++pos;
    }
  }

  for (const auto& g : set.inequalities) {
    MomentStructure::Localizer loc;
    const int order = kappa - (g.degree() + 1) / 2;
    MonomialBasis lb(set.n, order);
    loc.side = lb.size();
    loc.entries.resize(svec_dim(loc.side));
    int p = 0;
    for (int j = 0; j < loc.side; ++j) {
      for (int i = j; i < loc.side; ++i) {
        const double scale = (i == j) ? 1.0 : r2;
        MultiIndex ab = add_indices(lb[i], lb[j]);
        for (const auto& [gamma, coef] : g.terms()) {
          const int zidx = st.z_basis.position(add_indices(ab, gamma));
          loc.entries[p].emplace_back(zidx, coef * scale);
        }
        ++p;
      }
    }
    st.localizers.push_back(std::move(loc));
  }

  for (const auto& h : set.equalities) {
    MonomialBasis hb(set.n, 2 * kappa - h.degree());
    for (const auto& m : hb.exponents()) {
      std::vector<std::pair<int, double>> row;
      for (const auto& [gamma, coef] : h.terms())
        row.emplace_back(st.z_basis.position(add_indices(m, gamma)), coef);
      st.equality_rows.push_back(std::move(row));
    }
  }

  for (int i = 0; i < set.n; ++i) {
    MultiIndex e(set.n, 0);
    e[i] = 1;
    st.degree1_positions.push_back(st.z_basis.position(e));
  }
  return st;
}

Eigen::MatrixXd MomentStructure::assemble_moment_matrix(const Eigen::VectorXd& z) const {
  const int S = mat_basis.size();
  Eigen::MatrixXd M(S, S);
  for (int j = 0; j < S; ++j) {
    for (int i = j; i < S; ++i) {
      const int zidx = z_basis.position(add_indices(mat_basis[i], mat_basis[j]));
      M(i, j) = M(j, i) = z[zidx];
    }
  }
  return M;
}

int append_moment_constraints(ProgramBuilder& pb, const MomentStructure& st) {
  // z_0 = 1
  int row = pb.add_block(ConeKind::Zero, 1);
  pb.add_A(row, 0, 1.0);
  pb.add_b(row, 1.0);

  if (!st.equality_rows.empty()) {
    int base = pb.add_block(ConeKind::Zero, static_cast<int>(st.equality_rows.size()));
    for (size_t r = 0; r < st.equality_rows.size(); ++r)
      for (const auto& [zidx, coef] : st.equality_rows[r]) pb.add_A(base + static_cast<int>(r), zidx, coef);
  }

  const int S = st.mat_basis.size();
  const int mom_base = pb.add_block(ConeKind::Psd, S);
  for (size_t p = 0; p < st.moment_entries.size(); ++p)
    for (const auto& [zidx, coef] : st.moment_entries[p])
      pb.add_A(mom_base + static_cast<int>(p), zidx, -coef);

  for (const auto& loc : st.localizers) {
    const int base = loc.side == 1 ? pb.add_block(ConeKind::NonNeg, 1)
                                   : pb.add_block(ConeKind::Psd, loc.side);
    for (size_t p = 0; p < loc.entries.size(); ++p)
      for (const auto& [zidx, coef] : loc.entries[p]) pb.add_A(base + static_cast<int>(p), zidx, -coef);
  }
  return mom_base;
}

Eigen::MatrixXd PseudomomentSolution::moment_matrix() const {
  MonomialBasis mb(n, kappa);
  MonomialBasis zb(n, 2 * kappa);
  const int S = mb.size();
  Eigen::MatrixXd M(S, S);
  for (int j = 0; j < S; ++j)
    for (int i = j; i < S; ++i) {
      const int zidx = zb.position(add_indices(mb[i], mb[j]));
      M(i, j) = M(j, i) = z[zidx];
    }
  return M;
}

double linear_functional(const PseudomomentSolution& pm, const Polynomial& p) {
  if (p.degree() > 2 * pm.kappa)
    throw std::invalid_argument("linear_functional: polynomial degree exceeds 2*kappa");
  MonomialBasis zb(pm.n, 2 * pm.kappa);
  double total = 0;
  for (const auto& [a, c] : p.terms()) total += c * pm.z[zb.position(a)];
  return total;
}

LowerBoundResult lower_bound(const SemialgebraicSet& set, const Polynomial& objective, int kappa,
                             const SolverSettings& settings) {
  if (objective.n() != set.n) throw std::invalid_argument("lower_bound: variable count mismatch");
  if (objective.degree() > 2 * kappa)
    throw std::invalid_argument("lower_bound: objective degree exceeds 2*kappa");

  CompiledSet cs = compile_set(set);
  MomentStructure st = build_structure(cs.set, kappa);

  ProgramBuilder pb(st.z_basis.size());
  append_moment_constraints(pb, st);
  Polynomial f = objective.scale_vars(cs.var_scale);
  for (const auto& [a, c] : f.terms()) pb.add_c(st.z_basis.position(a), c);

  ConicSolution sol = solve(pb.build(), settings);
  if (sol.status == SolveStatus::PrimalInfeasible)
    throw InfeasibleError("lower_bound: relaxation primal infeasible (set empty or numerically empty)");
  if (sol.status == SolveStatus::DualInfeasible)
    throw SolverError("lower_bound: relaxation unbounded below; set may be unbounded (add ball_bound)");
  if (sol.status != SolveStatus::Optimal)
    throw SolverError("lower_bound: solver failed with status " + to_string(sol.status));

  LowerBoundResult out;
  out.bound = sol.primal_objective;
  out.pm.n = set.n;
  out.pm.kappa = kappa;
  out.pm.status = sol.status;
  out.pm.var_scale = cs.var_scale;
  out.pm.solver_residual = sol.worst_residual();

  Eigen::MatrixXd M = st.assemble_moment_matrix(sol.x);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M);
  out.pm.psd_margin = eig.eigenvalues().minCoeff();

  out.pm.z = sol.x;
  for (int i = 0; i < st.z_basis.size(); ++i)
    out.pm.z[i] *= std::pow(cs.var_scale, total_degree(st.z_basis[i]));
  return out;
}

double suggest_ball_bound(const SemialgebraicSet& set, const SolverSettings& settings) {
  SemialgebraicSet unbounded = set;
  unbounded.ball_bound.reset();
  const int kappa = std::max(1, (set.max_constraint_degree() + 1) / 2);
  double sumsq = 0;
  for (int i = 0; i < set.n; ++i) {
    Polynomial xi = Polynomial::variable(set.n, i);
    double lo, hi;
    try {
      lo = lower_bound(unbounded, xi, kappa, settings).bound;
      hi = -lower_bound(unbounded, -xi, kappa, settings).bound;
    } catch (const SolverError&) {
      throw SolverError("suggest_ball_bound: coordinate " + std::to_string(i) +
                        " unbounded at first order; supply an explicit ball_bound");
    }
    sumsq += std::max(lo * lo, hi * hi);
  }
  return 1.5 * std::sqrt(sumsq);
}

}  // namespace smec
