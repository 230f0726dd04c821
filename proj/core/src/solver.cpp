#include <cmath>
#include <iostream>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "smec/conic.hpp"
#include "smec/errors.hpp"

namespace smec {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using SpMatRow = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct BlockLayout {
  std::vector<int> base;  // first row of each block
  int m = 0;
};

BlockLayout layout(const std::vector<ConeBlock>& cones) {
  BlockLayout l;
  for (const auto& blk : cones) {
    l.base.push_back(l.m);
    l.m += blk.rows();
  }
  return l;
}

// Projection onto K* applied in place to the y-part. The zero cone's dual is
// the free cone, the other kinds are self-dual.
void project_dual_cone(const std::vector<ConeBlock>& cones, const BlockLayout& l,
                       Eigen::Ref<Vec> y) {
  for (size_t k = 0; k < cones.size(); ++k) {
    const auto& blk = cones[k];
    const int base = l.base[k];
    switch (blk.kind) {
      case ConeKind::Zero:
        break;
      case ConeKind::NonNeg:
        y.segment(base, blk.dim) = y.segment(base, blk.dim).cwiseMax(0.0);
        break;
      case ConeKind::SecondOrder: {
        const double t = y[base];
        const double zn = y.segment(base + 1, blk.dim - 1).norm();
        if (zn <= t) break;
        if (zn <= -t) {
          y.segment(base, blk.dim).setZero();
        } else {
          const double a = 0.5 * (t + zn);
          y[base] = a;
          y.segment(base + 1, blk.dim - 1) *= a / zn;
        }
        break;
      }
      case ConeKind::Psd: {
        const int rows = blk.rows();
        Mat S = smat(y.segment(base, rows), blk.dim);
        Eigen::SelfAdjointEigenSolver<Mat> eig(S);
        Mat proj = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).asDiagonal() *
                   eig.eigenvectors().transpose();
        y.segment(base, rows) = svec(proj);
        break;
      }
    }
  }
}

// Projection onto K (same as K* except the zero cone pins to 0).
void project_primal_cone(const std::vector<ConeBlock>& cones, const BlockLayout& l,
                         Eigen::Ref<Vec> s) {
  for (size_t k = 0; k < cones.size(); ++k) {
    if (cones[k].kind == ConeKind::Zero) s.segment(l.base[k], cones[k].dim).setZero();
  }
  project_dual_cone(cones, l, s);
}

struct Scaling {
  Vec D;          // row scales
  Vec E;          // column scales
  double sb = 1;  // scalar on b
  double sc = 1;  // scalar on c
};

// Ruiz equilibration with one uniform scale per cone block so cone geometry
// is preserved.
Scaling equilibrate(SpMat& A, Vec& b, Vec& c, const std::vector<ConeBlock>& cones,
                    const BlockLayout& l, int iters) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  Scaling sc;
  sc.D = Vec::Ones(m);
  sc.E = Vec::Ones(n);
  for (int it = 0; it < iters; ++it) {
    Vec rn = Vec::Zero(m), cn = Vec::Zero(n);
    for (int col = 0; col < A.outerSize(); ++col) {
      for (SpMat::InnerIterator a(A, col); a; ++a) {
        const double v = std::abs(a.value());
        rn[a.row()] = std::max(rn[a.row()], v);
        cn[col] = std::max(cn[col], v);
      }
    }
    Vec dr = Vec::Ones(m), dc = Vec::Ones(n);
    for (size_t k = 0; k < cones.size(); ++k) {
      double blockmax = 0;
      for (int i = 0; i < cones[k].rows(); ++i) blockmax = std::max(blockmax, rn[l.base[k] + i]);
      const double s = blockmax > 1e-12 ? 1.0 / std::sqrt(blockmax) : 1.0;
      for (int i = 0; i < cones[k].rows(); ++i) dr[l.base[k] + i] = s;
    }
    for (int j = 0; j < n; ++j) dc[j] = cn[j] > 1e-12 ? 1.0 / std::sqrt(cn[j]) : 1.0;
    for (int col = 0; col < A.outerSize(); ++col)
      for (SpMat::InnerIterator a(A, col); a; ++a) a.valueRef() *= dr[a.row()] * dc[col];
    sc.D.array() *= dr.array();
    sc.E.array() *= dc.array();
  }
  b = sc.D.asDiagonal() * b;
  c = sc.E.asDiagonal() * c;
  sc.sb = 1.0 / std::max(1.0, b.norm());
  sc.sc = 1.0 / std::max(1.0, c.norm());
  b *= sc.sb;
  c *= sc.sc;
  return sc;
}

class KktSolver {
 public:
  explicit KktSolver(const SpMat& A) : n_(static_cast<int>(A.cols())), m_(static_cast<int>(A.rows())) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(A.nonZeros() * 2 + n_ + m_);
    for (int i = 0; i < n_; ++i) trip.emplace_back(i, i, 1.0);
    for (int i = 0; i < m_; ++i) trip.emplace_back(n_ + i, n_ + i, -1.0);
    for (int col = 0; col < A.outerSize(); ++col) {
      for (SpMat::InnerIterator a(A, col); a; ++a) {
        trip.emplace_back(n_ + a.row(), col, a.value());
        trip.emplace_back(col, n_ + a.row(), a.value());
      }
    }
    SpMat K(n_ + m_, n_ + m_);
    K.setFromTriplets(trip.begin(), trip.end());
    K.makeCompressed();
    ldlt_.compute(K);
    if (ldlt_.info() != Eigen::Success)
      throw SolverError("conic solver: KKT factorization failed");
  }

  // Solves [[I, A'],[-A, I]] w = r by symmetrizing to the quasidefinite KKT.
  Vec solve(const Vec& r) const {
    Vec rhs(n_ + m_);
    rhs.head(n_) = r.head(n_);
    rhs.tail(m_) = -r.tail(m_);
    return ldlt_.solve(rhs);
  }

 private:
  int n_, m_;
  Eigen::SimplicialLDLT<SpMat> ldlt_;
};

struct Candidate {
  Vec x, y, s;
  double pres = std::numeric_limits<double>::infinity();
  double dres = std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  double pobj = 0, dobj = 0;

  double worst() const { return std::max({pres, dres, std::abs(gap)}); }
};

Candidate evaluate(const ConicProgram& prog, const Vec& x, const Vec& y, const Vec& s) {
  Candidate c;
  c.x = x;
  c.y = y;
  c.s = s;
  c.pres = (prog.A * x + s - prog.b).norm() / (1.0 + prog.b.norm());
  c.dres = (prog.A.transpose() * y + prog.c).norm() / (1.0 + prog.c.norm());
  c.pobj = prog.c.dot(x);
  c.dobj = -prog.b.dot(y);
  c.gap = (c.pobj - c.dobj) / (1.0 + std::abs(c.pobj) + std::abs(c.dobj));
  return c;
}

// ---------------------------------------------------------------------------
// Polish: identify the active cone faces at the ADMM solution from the
// spectral split of s - y, then refine the primal (and, when cheap, the dual)
// by least squares restricted to those faces. Accepted only if the combined
// residuals improve.
// ---------------------------------------------------------------------------

// svec(P M P') as a linear map of svec(M); columns are orthonormal when P is.
Mat face_map(const Mat& P) {
  const int r = static_cast<int>(P.cols());
  Mat L(svec_dim(static_cast<int>(P.rows())), svec_dim(r));
  int idx = 0;
  const double ir2 = 1.0 / std::sqrt(2.0);
  for (int b = 0; b < r; ++b) {
    for (int a = b; a < r; ++a) {
      Mat B;
      if (a == b)
        B = P.col(a) * P.col(a).transpose();
      else
        B = ir2 * (P.col(a) * P.col(b).transpose() + P.col(b) * P.col(a).transpose());
      L.col(idx++) = svec(B);
    }
  }
  return L;
}

Vec solve_sparse_ls(const SpMat& G, const Vec& rhs) {
  Eigen::LeastSquaresConjugateGradient<SpMat> lscg;
  lscg.setTolerance(1e-14);
  lscg.setMaxIterations(std::max<Eigen::Index>(2000, 6 * G.cols()));
  lscg.compute(G);
  return lscg.solve(rhs);
}

bool polish(const ConicProgram& prog, const BlockLayout& l, Candidate& cand) {
  for (const auto& blk : prog.cones)
    if (blk.kind == ConeKind::SecondOrder) return false;

  const int n = prog.num_vars();
  SpMatRow Arow(prog.A);

  std::vector<std::vector<int>> active(prog.cones.size());
  std::vector<Mat> Pface(prog.cones.size()), Nface(prog.cones.size());
  for (size_t k = 0; k < prog.cones.size(); ++k) {
    const auto& blk = prog.cones[k];
    const int base = l.base[k];
    if (blk.kind == ConeKind::NonNeg) {
      for (int i = 0; i < blk.dim; ++i)
        if (cand.y[base + i] > cand.s[base + i]) active[k].push_back(i);
    } else if (blk.kind == ConeKind::Psd) {
      Mat W = smat(cand.s.segment(base, blk.rows()) - cand.y.segment(base, blk.rows()), blk.dim);
      Eigen::SelfAdjointEigenSolver<Mat> eig(W);
      const Vec& lam = eig.eigenvalues();
      const double tol = 1e-5 * std::max(1.0, lam.cwiseAbs().maxCoeff());
      std::vector<int> pos, neg;
      for (int i = 0; i < blk.dim; ++i) {
        if (lam[i] > tol) pos.push_back(i);
        if (lam[i] < -tol) neg.push_back(i);
      }
      Pface[k].resize(blk.dim, pos.size());
      for (size_t i = 0; i < pos.size(); ++i) Pface[k].col(i) = eig.eigenvectors().col(pos[i]);
      Nface[k].resize(blk.dim, neg.size());
      for (size_t i = 0; i < neg.size(); ++i) Nface[k].col(i) = eig.eigenvectors().col(neg[i]);
    }
  }

  // --- Primal refinement: unknowns are x and the face coordinates of each
  //     PSD slack; rows are the pinned equalities.
  Vec x_new = cand.x;
  {
    std::vector<int> var_base(prog.cones.size(), -1);
    int unknowns = n;
    for (size_t k = 0; k < prog.cones.size(); ++k) {
      if (prog.cones[k].kind == ConeKind::Psd) {
        var_base[k] = unknowns;
        unknowns += svec_dim(static_cast<int>(Pface[k].cols()));
      }
    }
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<double> rhs;
    std::vector<Mat> Lmap(prog.cones.size());
    int row = 0;
    for (size_t k = 0; k < prog.cones.size(); ++k) {
      const auto& blk = prog.cones[k];
      const int base = l.base[k];
      auto add_x_row = [&](int r_glob) {
        for (SpMatRow::InnerIterator a(Arow, r_glob); a; ++a)
          trip.emplace_back(row, a.col(), a.value());
      };
      if (blk.kind == ConeKind::Zero) {
        for (int i = 0; i < blk.dim; ++i) {
          add_x_row(base + i);
          rhs.push_back(prog.b[base + i]);
          ++row;
        }
      } else if (blk.kind == ConeKind::NonNeg) {
        for (int i : active[k]) {
          add_x_row(base + i);
          rhs.push_back(prog.b[base + i]);
          ++row;
        }
      } else {
        Lmap[k] = face_map(Pface[k]);
        for (int i = 0; i < blk.rows(); ++i) {
          add_x_row(base + i);
          for (int j = 0; j < Lmap[k].cols(); ++j) {
            const double v = Lmap[k](i, j);
            if (std::abs(v) > 1e-14) trip.emplace_back(row, var_base[k] + j, v);
          }
          rhs.push_back(prog.b[base + i]);
          ++row;
        }
      }
    }
    SpMat G(row, unknowns);
    G.setFromTriplets(trip.begin(), trip.end());
    G.makeCompressed();
    Vec p = solve_sparse_ls(G, Eigen::Map<Vec>(rhs.data(), row));
    if (p.allFinite()) x_new = p.head(n);
  }
  Vec s_new = prog.b - prog.A * x_new;
  project_primal_cone(prog.cones, l, s_new);

  // --- Dual refinement: unknowns are the face coordinates of y; rows are
  //     A'y + c = 0. Skipped when the face is large.
  Vec y_new = cand.y;
  {
    std::vector<int> var_base(prog.cones.size(), -1);
    int unknowns = 0;
    for (size_t k = 0; k < prog.cones.size(); ++k) {
      const auto& blk = prog.cones[k];
      var_base[k] = unknowns;
      if (blk.kind == ConeKind::Zero) unknowns += blk.dim;
      else if (blk.kind == ConeKind::NonNeg) unknowns += static_cast<int>(active[k].size());
      else unknowns += svec_dim(static_cast<int>(Nface[k].cols()));
    }
    if (unknowns > 0 && unknowns <= 4000) {
      std::vector<Eigen::Triplet<double>> trip;
      for (size_t k = 0; k < prog.cones.size(); ++k) {
        const auto& blk = prog.cones[k];
        const int base = l.base[k];
        if (blk.kind == ConeKind::Zero) {
          for (int i = 0; i < blk.dim; ++i)
            for (SpMatRow::InnerIterator a(Arow, base + i); a; ++a)
              trip.emplace_back(a.col(), var_base[k] + i, a.value());
        } else if (blk.kind == ConeKind::NonNeg) {
          for (size_t ai = 0; ai < active[k].size(); ++ai)
            for (SpMatRow::InnerIterator a(Arow, base + active[k][ai]); a; ++a)
              trip.emplace_back(a.col(), var_base[k] + static_cast<int>(ai), a.value());
        } else if (Nface[k].cols() > 0) {
          Mat Nmap = face_map(Nface[k]);  // blk.rows() x q_svec
          Mat W = Mat::Zero(n, Nmap.cols());
          for (int i = 0; i < blk.rows(); ++i)
            for (SpMatRow::InnerIterator a(Arow, base + i); a; ++a)
              W.row(a.col()) += a.value() * Nmap.row(i);
          for (int col = 0; col < W.rows(); ++col)
            for (int j = 0; j < W.cols(); ++j)
              if (std::abs(W(col, j)) > 1e-14) trip.emplace_back(col, var_base[k] + j, W(col, j));
        }
      }
      SpMat G(n, unknowns);
      G.setFromTriplets(trip.begin(), trip.end());
      G.makeCompressed();
      Vec p = solve_sparse_ls(G, -prog.c);
      if (p.allFinite()) {
        Vec y(prog.num_rows());
        y.setZero();
        for (size_t k = 0; k < prog.cones.size(); ++k) {
          const auto& blk = prog.cones[k];
          const int base = l.base[k];
          if (blk.kind == ConeKind::Zero) {
            y.segment(base, blk.dim) = p.segment(var_base[k], blk.dim);
          } else if (blk.kind == ConeKind::NonNeg) {
            for (size_t ai = 0; ai < active[k].size(); ++ai)
              y[base + active[k][ai]] = p[var_base[k] + static_cast<int>(ai)];
          } else if (Nface[k].cols() > 0) {
            y.segment(base, blk.rows()) =
                face_map(Nface[k]) * p.segment(var_base[k], svec_dim(static_cast<int>(Nface[k].cols())));
          }
        }
        project_dual_cone(prog.cones, l, y);
        y_new = y;
      }
    }
  }

  Candidate refined = evaluate(prog, x_new, y_new, s_new);
  if (refined.worst() < cand.worst()) {
    cand = refined;
    return true;
  }
  // Mixed outcomes still help: keep the better primal with the old dual.
  Candidate primal_only = evaluate(prog, x_new, cand.y, s_new);
  if (primal_only.worst() < cand.worst()) {
    cand = primal_only;
    return true;
  }
  return false;
}

}  // namespace

ConicSolution solve(const ConicProgram& prog, const SolverSettings& settings) {
  prog.validate();
  const int n = prog.num_vars();
  const int m = prog.num_rows();
  const BlockLayout l = layout(prog.cones);

  SpMat A = prog.A;
  Vec b = prog.b, c = prog.c;
  Scaling sc;
  sc.D = Vec::Ones(m);
  sc.E = Vec::Ones(n);
  if (settings.equilibrate) {
    sc = equilibrate(A, b, c, prog.cones, l, settings.ruiz_iters);
  } else {
    sc.sb = 1.0 / std::max(1.0, b.norm());
    sc.sc = 1.0 / std::max(1.0, c.norm());
    b *= sc.sb;
    c *= sc.sc;
  }

  KktSolver kkt(A);
  Vec h(n + m);
  h.head(n) = c;
  h.tail(m) = b;
  const Vec g = kkt.solve(h);
  const double hg = 1.0 + h.dot(g);

  // Homogeneous self-dual embedding iterate u = (x, y, tau); at convergence
  // the v iterate carries (0, s, kappa).
  const int N = n + m + 1;
  Vec u = Vec::Zero(N), v = Vec::Zero(N);
  u[N - 1] = 1.0;

  ConicSolution out;
  Candidate best;
  bool have_candidate = false;
  bool polished = false;
  bool restarted = false;
  double alpha = settings.alpha;
  // Polish is attempted once the raw iterates are accurate enough to identify
  // the active faces, and again whenever the residual drops by another order
  // of magnitude; it is what carries the solution past the first-order tail.
  const double polish_trigger = std::max(100.0 * settings.eps, 1e-7);
  double last_polish_at = std::numeric_limits<double>::infinity();

  int iter = 0;
  for (; iter < settings.max_iters; ++iter) {
    // utld = (I + Q)^-1 (u + v), Sherman-Morrison on the rank-one (c,b) part.
    Vec r = u + v;
    Vec rxy = r.head(n + m) - r[N - 1] * h;
    Vec pvec = kkt.solve(rxy);
    Vec w = pvec - g * (h.dot(pvec) / hg);
    Vec utld(N);
    utld.head(n + m) = w;
    utld[N - 1] = r[N - 1] + h.dot(w);

    utld = alpha * utld + (1.0 - alpha) * u;

    Vec unew = utld - v;
    project_dual_cone(prog.cones, l, unew.segment(n, m));
    unew[N - 1] = std::max(0.0, unew[N - 1]);

    v += unew - utld;
    u = unew;

    if (!u.allFinite() || !v.allFinite()) {
      if (!restarted) {
        restarted = true;
        u.setZero();
        v.setZero();
        u[N - 1] = 1.0;
        alpha = 1.0;
        continue;
      }
      out.status = SolveStatus::NumericalError;
      out.iterations = iter + 1;
      return out;
    }

    if ((iter + 1) % settings.check_interval != 0) continue;

    const double tau = u[N - 1];
    if (tau > 1e-12) {
      Vec x = sc.E.asDiagonal() * (u.head(n) / tau) / sc.sb;
      Vec y = sc.D.asDiagonal() * (u.segment(n, m) / tau) / sc.sc;
      Vec s = ((v.segment(n, m) / tau).array() / sc.D.array()).matrix() / sc.sb;
      Candidate cand = evaluate(prog, x, y, s);
      if (!have_candidate || cand.worst() < best.worst()) {
        best = cand;
        have_candidate = true;
      }
      if (cand.worst() <= settings.eps) {
        best = cand;
        out.status = SolveStatus::Optimal;
        ++iter;
        break;
      }
      if (settings.polish && cand.worst() <= polish_trigger &&
          cand.worst() < 0.1 * last_polish_at) {
        last_polish_at = cand.worst();
        Candidate refined = cand;
        if (polish(prog, l, refined) && refined.worst() < best.worst()) {
          best = refined;
          if (best.worst() <= settings.eps) {
            polished = true;
            out.status = SolveStatus::Optimal;
            ++iter;
            break;
          }
        }
      }
    }

    // Infeasibility certificates from the raw (unnormalized) iterate.
    {
      Vec y_cert = sc.D.asDiagonal() * u.segment(n, m) / sc.sc;
      const double bty = prog.b.dot(y_cert);
      if (bty < -1e-12) {
        const double res = (prog.A.transpose() * y_cert).norm();
        if (res * std::max(1.0, prog.b.norm()) <= settings.eps_infeasible * (-bty)) {
          out.status = SolveStatus::PrimalInfeasible;
          out.y = y_cert / (-bty);
          out.iterations = iter + 1;
          return out;
        }
      }
      Vec x_cert = sc.E.asDiagonal() * u.head(n) / sc.sb;
      Vec s_cert = (v.segment(n, m).array() / sc.D.array()).matrix() / sc.sb;
      const double ctx = prog.c.dot(x_cert);
      if (ctx < -1e-12) {
        const double res = (prog.A * x_cert + s_cert).norm();
        if (res * std::max(1.0, prog.c.norm()) <= settings.eps_infeasible * (-ctx)) {
          out.status = SolveStatus::DualInfeasible;
          out.x = x_cert / (-ctx);
          out.iterations = iter + 1;
          return out;
        }
      }
    }
  }

  out.iterations = std::min(iter, settings.max_iters);
  if (out.status != SolveStatus::Optimal) {
    out.status = have_candidate ? SolveStatus::MaxIters : SolveStatus::NumericalError;
  }

  if (have_candidate) {
    if (settings.polish && !polished) {
      polished = polish(prog, l, best);
      if (out.status == SolveStatus::MaxIters && best.worst() <= settings.eps)
        out.status = SolveStatus::Optimal;
    }
    out.polished = polished;
    out.x = best.x;
    out.y = best.y;
    out.s = best.s;
    out.primal_objective = best.pobj;
    out.dual_objective = best.dobj;
    out.primal_residual = best.pres;
    out.dual_residual = best.dres;
    out.gap = best.gap;
  }
  return out;
}

}  // namespace smec
