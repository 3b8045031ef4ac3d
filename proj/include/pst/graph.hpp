// Weighted qubit graphs and their one-excitation Hamiltonian matrices.
//
// Sites are 0-based.  A graph stores undirected couplings J_uv (u < v) and a
// local field B_i per site.  The one-excitation matrix carries +J off the
// diagonal and B on it; the global sign of the XX Hamiltonian is dropped,
// which conjugates amplitudes and leaves every transfer probability unchanged.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace pst {

class validation_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class disconnected_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  double J = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

inline std::string describe(const Edge& e) {
  return "(" + std::to_string(e.u) + "," + std::to_string(e.v) + ")";
}

class SpinGraph {
 public:
  SpinGraph() = default;

  SpinGraph(std::size_t n, std::vector<Edge> edges, std::vector<double> fields = {})
      : n_(n), edges_(std::move(edges)), fields_(std::move(fields)) {
    if (n_ == 0) throw validation_error("graph needs at least one site");
    if (fields_.empty()) fields_.assign(n_, 0.0);
    if (fields_.size() != n_) {
      throw validation_error("expected " + std::to_string(n_) + " fields, got " +
                             std::to_string(fields_.size()));
    }
    for (std::size_t i = 0; i < n_; ++i) {
      if (!std::isfinite(fields_[i]))
        throw validation_error("field B_" + std::to_string(i) + " is not finite");
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (auto& e : edges_) {
      if (e.u > e.v) std::swap(e.u, e.v);
      if (e.v >= n_) throw validation_error("edge " + describe(e) + " has an out-of-range site");
      if (e.u == e.v) throw validation_error("edge " + describe(e) + " is a self-loop");
      if (!std::isfinite(e.J)) throw validation_error("edge " + describe(e) + " has non-finite J");
      if (e.J == 0.0) throw validation_error("edge " + describe(e) + " has zero coupling");
      if (!seen.emplace(e.u, e.v).second)
        throw validation_error("duplicate edge " + describe(e));
    }
    adjacency_.assign(n_, {});
    for (const auto& e : edges_) {
      adjacency_[e.u].push_back(e.v);
      adjacency_[e.v].push_back(e.u);
    }
    for (auto& nb : adjacency_) std::sort(nb.begin(), nb.end());
  }

  std::size_t size() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<double>& fields() const { return fields_; }
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return adjacency_.at(i); }
  std::size_t degree(std::size_t i) const { return adjacency_.at(i).size(); }

  SpinGraph with_fields(std::vector<double> fields) const { return {n_, edges_, std::move(fields)}; }

  friend bool operator==(const SpinGraph& a, const SpinGraph& b) {
    if (a.n_ != b.n_ || a.fields_ != b.fields_ || a.edges_.size() != b.edges_.size()) return false;
    auto key = [](const Edge& e) { return std::pair{e.u, e.v}; };
    auto ea = a.edges_, eb = b.edges_;
    auto less = [&](const Edge& x, const Edge& y) { return key(x) < key(y); };
    std::sort(ea.begin(), ea.end(), less);
    std::sort(eb.begin(), eb.end(), less);
    return ea == eb;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> fields_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

inline SpinGraph build_graph(std::size_t n, std::vector<Edge> edges, std::vector<double> fields = {}) {
  return SpinGraph(n, std::move(edges), std::move(fields));
}

/// Dense real symmetric matrix.  Writes go through set(), which updates both
/// triangles, so the stored matrix is always exactly symmetric.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t n) : m_(Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n))) {}

  /// Rejects inputs that are not exactly symmetric or contain non-finite values.
  static SymmetricMatrix from_dense(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw validation_error("matrix is not square");
    if (!m.allFinite()) throw validation_error("matrix has non-finite entries");
    if (m != m.transpose()) throw validation_error("matrix is not symmetric");
    SymmetricMatrix s;
    s.m_ = m;
    return s;
  }

  std::size_t size() const { return std::size_t(m_.rows()); }
  double operator()(std::size_t i, std::size_t j) const { return m_(Eigen::Index(i), Eigen::Index(j)); }
  void set(std::size_t i, std::size_t j, double v) {
    m_(Eigen::Index(i), Eigen::Index(j)) = v;
    m_(Eigen::Index(j), Eigen::Index(i)) = v;
  }
  const Eigen::MatrixXd& dense() const { return m_; }
  double max_abs() const { return m_.size() == 0 ? 0.0 : m_.cwiseAbs().maxCoeff(); }

  bool is_tridiagonal(double tol = 0.0) const {
    const auto n = m_.rows();
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = j + 2; i < n; ++i)
        if (std::abs(m_(i, j)) > tol) return false;
    return true;
  }

  friend bool operator==(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
  }

 private:
  Eigen::MatrixXd m_;
};

inline SymmetricMatrix one_excitation_hamiltonian(const SpinGraph& g) {
  SymmetricMatrix h(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) h.set(i, i, g.fields()[i]);
  for (const auto& e : g.edges()) h.set(e.u, e.v, e.J);
  return h;
}

enum class Side { A, B };

/// BFS two-colouring; the first site of every component is labelled A.
inline std::optional<std::vector<Side>> is_bipartite(const SpinGraph& g) {
  std::vector<int> colour(g.size(), -1);
  for (std::size_t root = 0; root < g.size(); ++root) {
    if (colour[root] >= 0) continue;
    colour[root] = 0;
    std::queue<std::size_t> q;
    q.push(root);
    while (!q.empty()) {
      const auto u = q.front();
      q.pop();
      for (auto v : g.neighbors(u)) {
        if (colour[v] < 0) {
          colour[v] = 1 - colour[u];
          q.push(v);
        } else if (colour[v] == colour[u]) {
          return std::nullopt;
        }
      }
    }
  }
  std::vector<Side> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = colour[i] == 0 ? Side::A : Side::B;
  return out;
}

/// Number of links on the shortest path between a and b.
inline std::size_t graph_distance(const SpinGraph& g, std::size_t a, std::size_t b) {
  if (a >= g.size() || b >= g.size()) throw validation_error("site index out of range");
  std::vector<std::size_t> dist(g.size(), g.size());
  dist[a] = 0;
  std::queue<std::size_t> q;
  q.push(a);
  while (!q.empty()) {
    const auto u = q.front();
    q.pop();
    if (u == b) return dist[u];
    for (auto v : g.neighbors(u)) {
      if (dist[v] == g.size()) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
    }
  }
  throw disconnected_error("sites " + std::to_string(a) + " and " + std::to_string(b) +
                           " are not connected");
}

struct DegreeReport {
  bool ok = true;
  std::vector<Edge> violations;
};

/// Flags every edge that joins two sites of degree three or more.
inline DegreeReport degree_constraint_check(const SpinGraph& g) {
  DegreeReport r;
  for (const auto& e : g.edges()) {
    if (g.degree(e.u) >= 3 && g.degree(e.v) >= 3) r.violations.push_back(e);
  }
  r.ok = r.violations.empty();
  return r;
}

}  // namespace pst
