#include "smec/semialgebraic.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace smec {

void SemialgebraicSet::validate() const {
  if (n < 1) throw std::invalid_argument("SemialgebraicSet: need n >= 1");
  for (const auto& g : inequalities)
    if (g.n() != n) throw std::invalid_argument("SemialgebraicSet: inequality variable count mismatch");
  for (const auto& h : equalities)
    if (h.n() != n) throw std::invalid_argument("SemialgebraicSet: equality variable count mismatch");
  if (ball_bound && *ball_bound <= 0)
    throw std::invalid_argument("SemialgebraicSet: ball_bound must be positive");
}

int SemialgebraicSet::max_constraint_degree() const {
  int d = 0;
  for (const auto& g : inequalities) d = std::max(d, g.degree());
  for (const auto& h : equalities) d = std::max(d, h.degree());
  if (ball_bound) d = std::max(d, 2);
  return d;
}

bool SemialgebraicSet::contains(const Eigen::VectorXd& point, double tol) const {
  return violation(point) >= -tol;
}

double SemialgebraicSet::violation(const Eigen::VectorXd& point) const {
  double worst = 0.0;
  for (const auto& g : inequalities) worst = std::min(worst, g.evaluate(point));
  for (const auto& h : equalities) worst = std::min(worst, -std::abs(h.evaluate(point)));
  if (ball_bound) worst = std::min(worst, *ball_bound * *ball_bound - point.squaredNorm());
  return worst;
}

std::optional<Polynomial> SemialgebraicSet::ball_constraint() const {
  if (!ball_bound) return std::nullopt;
  Polynomial g = Polynomial::constant(n, *ball_bound * *ball_bound);
  for (int i = 0; i < n; ++i) {
    Polynomial xi = Polynomial::variable(n, i);
    g = g - xi * xi;
  }
  return g;
}

ProjectionSpec ProjectionSpec::identity(int n) {
  ProjectionSpec p;
  p.coords.resize(n);
  for (int i = 0; i < n; ++i) p.coords[i] = i;
  return p;
}

void ProjectionSpec::validate(int n) const {
  if (coords.empty()) throw std::invalid_argument("ProjectionSpec: empty coordinate list");
  std::set<int> seen;
  for (int c : coords) {
    if (c < 0 || c >= n) throw std::invalid_argument("ProjectionSpec: coordinate out of range");
    if (!seen.insert(c).second) throw std::invalid_argument("ProjectionSpec: duplicate coordinate");
  }
}

Eigen::VectorXd ProjectionSpec::apply(const Eigen::VectorXd& theta) const {
  Eigen::VectorXd xi(d());
  for (int i = 0; i < d(); ++i) xi[i] = theta[coords[i]];
  return xi;
}

Eigen::MatrixXd ProjectionSpec::lift_matrix(const Eigen::MatrixXd& M, int n) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < d(); ++a)
    for (int b = 0; b < d(); ++b) out(coords[a], coords[b]) = M(a, b);
  return out;
}

nlohmann::json polynomial_to_json(const Polynomial& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [a, c] : p.terms()) {
    terms.push_back({{"exp", a}, {"coef", c}});
  }
  return {{"n", p.n()}, {"terms", terms}};
}

Polynomial polynomial_from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  Polynomial::TermMap t;
  for (const auto& term : j.at("terms")) {
    MultiIndex a = term.at("exp").get<std::vector<int>>();
    if (static_cast<int>(a.size()) != n)
      throw std::invalid_argument("polynomial_from_json: exponent length mismatch");
    t[a] += term.at("coef").get<double>();
  }
  return Polynomial(n, std::move(t));
}

nlohmann::json set_to_json(const SemialgebraicSet& s) {
  nlohmann::json ineq = nlohmann::json::array();
  nlohmann::json eq = nlohmann::json::array();
  for (const auto& g : s.inequalities) ineq.push_back(polynomial_to_json(g));
  for (const auto& h : s.equalities) eq.push_back(polynomial_to_json(h));
  nlohmann::json j = {{"n", s.n}, {"ineq", ineq}, {"eq", eq}};
  if (s.ball_bound)
    j["ball_bound"] = *s.ball_bound;
  else
    j["ball_bound"] = nullptr;
  return j;
}

SemialgebraicSet set_from_json(const nlohmann::json& j) {
  SemialgebraicSet s;
  s.n = j.at("n").get<int>();
  for (const auto& g : j.at("ineq")) s.inequalities.push_back(polynomial_from_json(g));
  if (j.contains("eq"))
    for (const auto& h : j.at("eq")) s.equalities.push_back(polynomial_from_json(h));
  if (j.contains("ball_bound") && !j.at("ball_bound").is_null())
    s.ball_bound = j.at("ball_bound").get<double>();
  s.validate();
  return s;
}

SemialgebraicSet load_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open set file: " + path);
  nlohmann::json j;
  in >> j;
  return set_from_json(j);
}

void save_set(const SemialgebraicSet& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write set file: " + path);
  out << set_to_json(s).dump(2) << "\n";
}

}  // namespace smec
