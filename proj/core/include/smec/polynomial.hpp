#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace smec {

/// Exponent vector of a monomial, one entry per variable.
using MultiIndex = std::vector<int>;

int total_degree(const MultiIndex& a);

/// Strict total order: sort by total degree, then lexicographically with the
/// first variable dominating, so that for n=2, d=2 the basis reads
/// [1, x1, x2, x1^2, x1*x2, x2^2].
bool graded_lex_less(const MultiIndex& a, const MultiIndex& b);

struct GradedLexLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    return graded_lex_less(a, b);
  }
};

/// All monomials in n variables of degree <= d, in graded lex order.
class MonomialBasis {
 public:
  MonomialBasis() = default;
  MonomialBasis(int n, int d);

  int n() const { return n_; }
  int degree() const { return d_; }
  int size() const { return static_cast<int>(exponents_.size()); }
  const MultiIndex& operator[](int i) const { return exponents_[i]; }
  const std::vector<MultiIndex>& exponents() const { return exponents_; }

  /// Position of a multi-index in this basis; -1 if out of range.
  int position(const MultiIndex& a) const;

 private:
  int n_ = 0;
  int d_ = 0;
  std::vector<MultiIndex> exponents_;
  std::map<MultiIndex, int, GradedLexLess> index_;
};

inline MonomialBasis monomial_basis(int n, int d) { return MonomialBasis(n, d); }

/// s_n(d) = binom(n+d, d), the size of the degree-d monomial basis.
long basis_size(int n, int d);

/// Immutable sparse multivariate polynomial with real coefficients.
/// Terms with |coefficient| < 1e-14 are dropped on construction, so the
/// term map is always canonical.
class Polynomial {
 public:
  using TermMap = std::map<MultiIndex, double, GradedLexLess>;

  Polynomial() = default;
  explicit Polynomial(int n) : n_(n) {}
  Polynomial(int n, TermMap terms);

  static Polynomial constant(int n, double c);
  static Polynomial variable(int n, int i);

  int n() const { return n_; }
  int degree() const;  // degree of the zero polynomial is 0
  bool is_zero() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }
  double coefficient(const MultiIndex& a) const;
  double max_abs_coefficient() const;

  double evaluate(const Eigen::VectorXd& point) const;

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator-() const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator*(double s) const;

  /// Substitute theta_i -> s * theta_i.
  Polynomial scale_vars(double s) const;
  /// Substitute theta -> theta + shift.
  Polynomial shift_vars(const Eigen::VectorXd& shift) const;
  /// d/dtheta_i.
  Polynomial derivative(int i) const;

  /// Gradient at a point.
  Eigen::VectorXd gradient(const Eigen::VectorXd& point) const;

  /// Decompose as c + 2 q' x + x' H x. Throws if degree > 2.
  void quadratic_form(double& c, Eigen::VectorXd& q, Eigen::MatrixXd& H) const;

  static Polynomial from_quadratic_form(int n, double c, const Eigen::VectorXd& q,
                                        const Eigen::MatrixXd& H);

  std::string to_string() const;

  static constexpr double kCoefficientTol = 1e-14;

 private:
  int n_ = 0;
  TermMap terms_;
};

inline Polynomial operator*(double s, const Polynomial& p) { return p * s; }

}  // namespace smec
