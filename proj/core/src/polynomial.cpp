#include "smec/polynomial.hpp"

#include <cmath>
#include <sstream>

namespace smec {

int total_degree(const MultiIndex& a) {
  int d = 0;
  for (int e : a) d += e;
  return d;
}

bool graded_lex_less(const MultiIndex& a, const MultiIndex& b) {
  const int da = total_degree(a);
  const int db = total_degree(b);
  if (da != db) return da < db;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] > b[i];  // larger leading exponent ranks first
  }
  return false;
}

namespace {

void enumerate_degree(int n, int deg, int pos, MultiIndex& scratch,
                      std::vector<MultiIndex>& out) {
  if (pos == n - 1) {
    scratch[pos] = deg;
    out.push_back(scratch);
    return;
  }
  for (int e = deg; e >= 0; --e) {
    scratch[pos] = e;
    enumerate_degree(n, deg - e, pos + 1, scratch, out);
  }
  scratch[pos] = 0;
}

}  // namespace

MonomialBasis::MonomialBasis(int n, int d) : n_(n), d_(d) {
  if (n < 1) throw std::invalid_argument("MonomialBasis: need n >= 1");
  if (d < 0) throw std::invalid_argument("MonomialBasis: need d >= 0");
  MultiIndex scratch(n, 0);
  for (int deg = 0; deg <= d; ++deg) enumerate_degree(n, deg, 0, scratch, exponents_);
  for (int i = 0; i < size(); ++i) index_.emplace(exponents_[i], i);
}

int MonomialBasis::position(const MultiIndex& a) const {
  auto it = index_.find(a);
  return it == index_.end() ? -1 : it->second;
}

long basis_size(int n, int d) {
  long r = 1;
  for (int i = 1; i <= d; ++i) r = r * (n + i) / i;
  return r;
}

Polynomial::Polynomial(int n, TermMap terms) : n_(n) {
  for (auto& [a, c] : terms) {
    if (static_cast<int>(a.size()) != n)
      throw std::invalid_argument("Polynomial: multi-index length mismatch");
    if (std::abs(c) >= kCoefficientTol) terms_.emplace(a, c);
  }
}

Polynomial Polynomial::constant(int n, double c) {
  TermMap t;
  t.emplace(MultiIndex(n, 0), c);
  return Polynomial(n, std::move(t));
}

Polynomial Polynomial::variable(int n, int i) {
  if (i < 0 || i >= n) throw std::invalid_argument("Polynomial::variable: index out of range");
  MultiIndex a(n, 0);
  a[i] = 1;
  TermMap t;
  t.emplace(std::move(a), 1.0);
  return Polynomial(n, std::move(t));
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [a, c] : terms_) d = std::max(d, total_degree(a));
  return d;
}

double Polynomial::coefficient(const MultiIndex& a) const {
  auto it = terms_.find(a);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [a, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

double Polynomial::evaluate(const Eigen::VectorXd& point) const {
  if (point.size() != n_) throw std::invalid_argument("Polynomial::evaluate: dimension mismatch");
  double total = 0.0;
  for (const auto& [a, c] : terms_) {
    double m = c;
    for (int i = 0; i < n_; ++i) {
      for (int k = 0; k < a[i]; ++k) m *= point[i];
    }
    total += m;
  }
  return total;
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  if (n_ != other.n_) throw std::invalid_argument("Polynomial: variable count mismatch");
  TermMap t = terms_;
  for (const auto& [a, c] : other.terms_) t[a] += c;
  return Polynomial(n_, std::move(t));
}

Polynomial Polynomial::operator-(const Polynomial& other) const { return *this + (-other); }

Polynomial Polynomial::operator-() const {
  TermMap t;
  for (const auto& [a, c] : terms_) t.emplace(a, -c);
  return Polynomial(n_, std::move(t));
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  if (n_ != other.n_) throw std::invalid_argument("Polynomial: variable count mismatch");
  TermMap t;
  for (const auto& [a, ca] : terms_) {
    for (const auto& [b, cb] : other.terms_) {
      MultiIndex s(n_);
      for (int i = 0; i < n_; ++i) s[i] = a[i] + b[i];
      t[s] += ca * cb;
    }
  }
  return Polynomial(n_, std::move(t));
}

Polynomial Polynomial::operator*(double s) const {
  TermMap t;
  for (const auto& [a, c] : terms_) t.emplace(a, c * s);
  return Polynomial(n_, std::move(t));
}

Polynomial Polynomial::scale_vars(double s) const {
  TermMap t;
  for (const auto& [a, c] : terms_) t.emplace(a, c * std::pow(s, total_degree(a)));
  return Polynomial(n_, std::move(t));
}

Polynomial Polynomial::shift_vars(const Eigen::VectorXd& shift) const {
  if (shift.size() != n_) throw std::invalid_argument("shift_vars: dimension mismatch");
  Polynomial out(n_);
  for (const auto& [a, c] : terms_) {
    Polynomial term = Polynomial::constant(n_, c);
    for (int i = 0; i < n_; ++i) {
      Polynomial lin = Polynomial::variable(n_, i) + Polynomial::constant(n_, shift[i]);
      for (int k = 0; k < a[i]; ++k) term = term * lin;
    }
    out = out + term;
  }
  return out;
}

Polynomial Polynomial::derivative(int i) const {
  if (i < 0 || i >= n_) throw std::invalid_argument("derivative: index out of range");
  TermMap t;
  for (const auto& [a, c] : terms_) {
    if (a[i] == 0) continue;
    MultiIndex b = a;
    b[i] -= 1;
    t[b] += c * a[i];
  }
  return Polynomial(n_, std::move(t));
}

Eigen::VectorXd Polynomial::gradient(const Eigen::VectorXd& point) const {
  Eigen::VectorXd g(n_);
  for (int i = 0; i < n_; ++i) g[i] = derivative(i).evaluate(point);
  return g;
}

void Polynomial::quadratic_form(double& c, Eigen::VectorXd& q, Eigen::MatrixXd& H) const {
  c = 0.0;
  q = Eigen::VectorXd::Zero(n_);
  H = Eigen::MatrixXd::Zero(n_, n_);
  for (const auto& [a, coef] : terms_) {
    const int deg = total_degree(a);
    if (deg > 2) throw std::invalid_argument("quadratic_form: degree exceeds 2");
    if (deg == 0) {
      c = coef;
    } else if (deg == 1) {
      for (int i = 0; i < n_; ++i)
        if (a[i] == 1) q[i] = coef / 2.0;
    } else {
      int i = -1, j = -1;
      for (int k = 0; k < n_; ++k) {
        if (a[k] == 2) i = j = k;
        if (a[k] == 1) (i < 0 ? i : j) = k;
      }
      if (i == j) {
        H(i, i) = coef;
      } else {
        H(i, j) = H(j, i) = coef / 2.0;
      }
    }
  }
}

Polynomial Polynomial::from_quadratic_form(int n, double c, const Eigen::VectorXd& q,
                                           const Eigen::MatrixXd& H) {
  TermMap t;
  if (std::abs(c) > 0) t.emplace(MultiIndex(n, 0), c);
  for (int i = 0; i < n; ++i) {
    MultiIndex a(n, 0);
    a[i] = 1;
    t[a] += 2.0 * q[i];
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      MultiIndex a(n, 0);
      a[i] += 1;
      a[j] += 1;
      t[a] += (i == j) ? H(i, i) : H(i, j) + H(j, i);
    }
  }
  return Polynomial(n, std::move(t));
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [a, c] : terms_) {
    if (!first) os << (c >= 0 ? " + " : " - ");
    else if (c < 0) os << "-";
    os << std::abs(c);
    for (int i = 0; i < n_; ++i) {
      if (a[i] > 0) {
        os << "*x" << i + 1;
        if (a[i] > 1) os << "^" << a[i];
      }
    }
    first = false;
  }
  return os.str();
}

}  // namespace smec
