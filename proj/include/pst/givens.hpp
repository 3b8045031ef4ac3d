// Givens-rotation tridiagonalisation of one-excitation matrices.
//
// A graph Hamiltonian h is carried to a tridiagonal T = Q h Q^T by plane
// rotations.  Columns are swept left to right; inside column j every entry
// below the subdiagonal is annihilated bottom-up with a rotation in the plane
// (j+1, i).  No rotation ever touches site 0, so Q e_0 = e_0 and the block
// containing site 0 is the chain seen by an excitation injected there.  An
// input that is already tridiagonal produces no rotations.
//
// After the sweep a diagonal +-1 similarity makes every coupling of T
// nonnegative (absorbed into Q), and T is cut into decoupled chain blocks.
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "pst/graph.hpp"

namespace pst {

class rotation_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Plane rotation acting on coordinates (i, j):
///   x_i' =  c x_i + s x_j,   x_j' = -s x_i + c x_j.
struct GivensRotation {
  std::size_t i = 0;
  std::size_t j = 1;
  double c = 1.0;
  double s = 0.0;

  Eigen::MatrixXd dense(std::size_t n) const {
    Eigen::MatrixXd g = Eigen::MatrixXd::Identity(Eigen::Index(n), Eigen::Index(n));
    const auto a = Eigen::Index(i), b = Eigen::Index(j);
    g(a, a) = c;
    g(b, b) = c;
    g(a, b) = s;
    g(b, a) = -s;
    return g;
  }
};

/// Rotation in plane (i, j) sending (a, b) to (r, 0) with r = +sqrt(a^2 + b^2).
inline GivensRotation rotation_zeroing(double a, double b, std::size_t i, std::size_t j) {
  if (i >= j) throw rotation_error("rotation plane needs i < j");
  if (a == 0.0 && b == 0.0) throw rotation_error("cannot build a rotation from (0, 0)");
  const double r = std::hypot(a, b);
  return {i, j, a / r, b / r};
}

namespace detail {

// m <- G m G^T, keeping m exactly symmetric.
inline void rotate_in_place(Eigen::MatrixXd& m, const GivensRotation& g) {
  const auto i = Eigen::Index(g.i), j = Eigen::Index(g.j);
  const double c = g.c, s = g.s;
  for (Eigen::Index k = 0; k < m.rows(); ++k) {
    if (k == i || k == j) continue;
    const double mi = m(i, k), mj = m(j, k);
    const double ni = c * mi + s * mj;
    const double nj = -s * mi + c * mj;
    m(i, k) = ni;
    m(k, i) = ni;
    m(j, k) = nj;
    m(k, j) = nj;
  }
  const double a = m(i, i), b = m(i, j), d = m(j, j);
  m(i, i) = c * c * a + 2.0 * c * s * b + s * s * d;
  m(j, j) = s * s * a - 2.0 * c * s * b + c * c * d;
  const double off = c * s * (d - a) + (c * c - s * s) * b;
  m(i, j) = off;
  m(j, i) = off;
}

// q <- G q
inline void rotate_rows(Eigen::MatrixXd& q, const GivensRotation& g) {
  const auto i = Eigen::Index(g.i), j = Eigen::Index(g.j);
  const Eigen::RowVectorXd ri = q.row(i), rj = q.row(j);
  q.row(i) = g.c * ri + g.s * rj;
  q.row(j) = -g.s * ri + g.c * rj;
}

}  // namespace detail

inline SymmetricMatrix apply_similarity(const SymmetricMatrix& h, const GivensRotation& g) {
  if (g.j >= h.size()) throw validation_error("rotation plane outside the matrix");
  Eigen::MatrixXd m = h.dense();
  detail::rotate_in_place(m, g);
  return SymmetricMatrix::from_dense(m);
}

/// A decoupled linear chain inside a tridiagonal matrix.  `diag` holds the
/// site fields, `offdiag` the (nonnegative) couplings.
struct ChainBlock {
  std::size_t offset = 0;
  std::size_t length = 1;
  std::vector<double> diag;
  std::vector<double> offdiag;
  bool null_block = false;

  std::size_t end() const { return offset + length; }
  bool contains(std::size_t row) const { return row >= offset && row < end(); }

  SymmetricMatrix matrix() const {
    SymmetricMatrix m(length);
    for (std::size_t k = 0; k < length; ++k) m.set(k, k, diag[k]);
    for (std::size_t k = 0; k + 1 < length; ++k) m.set(k, k + 1, offdiag[k]);
    return m;
  }

  static ChainBlock chain(std::vector<double> couplings, std::vector<double> fields = {}) {
    ChainBlock b;
    b.length = couplings.size() + 1;
    b.offdiag = std::move(couplings);
    b.diag = fields.empty() ? std::vector<double>(b.length, 0.0) : std::move(fields);
    if (b.diag.size() != b.length) throw validation_error("chain fields do not match its length");
    return b;
  }
};

struct ReductionResult {
  SymmetricMatrix T;
  Eigen::MatrixXd Q;  // T = Q h Q^T
  std::vector<GivensRotation> rotations;
  std::vector<ChainBlock> blocks;
  double tol = 0.0;

  /// Block holding chain row `row`.
  const ChainBlock& block_at(std::size_t row) const {
    for (const auto& b : blocks)
      if (b.contains(row)) return b;
    throw validation_error("row outside the reduction");
  }
};

inline double default_tolerance(const SymmetricMatrix& h) { return 1e-12 * h.max_abs(); }

/// Cuts a tridiagonal matrix at every coupling with |T(k,k+1)| <= tol.  Runs of
/// single rows that are identically zero are merged into one null block.
inline std::vector<ChainBlock> split_blocks(const SymmetricMatrix& T, double tol) {
  std::vector<ChainBlock> out;
  const std::size_t n = T.size();
  std::size_t start = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k + 1 < n && std::abs(T(k, k + 1)) > tol) continue;
    ChainBlock b;
    b.offset = start;
    b.length = k + 1 - start;
    for (std::size_t r = start; r <= k; ++r) b.diag.push_back(T(r, r));
    for (std::size_t r = start; r < k; ++r) b.offdiag.push_back(std::abs(T(r, r + 1)));
    b.null_block = b.length == 1 && std::abs(b.diag[0]) <= tol;
    if (b.null_block && !out.empty() && out.back().null_block) {
      out.back().length += 1;
      out.back().diag.push_back(b.diag[0]);
      out.back().offdiag.push_back(0.0);
    } else {
      out.push_back(std::move(b));
    }
    start = k + 1;
  }
  return out;
}

inline std::vector<ChainBlock> split_blocks(const ReductionResult& r, double tol) {
  return split_blocks(r.T, tol);
}

/// Reduces h to tridiagonal form.  Entries with magnitude <= tol are treated as
/// exact zeros (default tol = 1e-12 * max|h|).
inline ReductionResult tridiagonalize(const SymmetricMatrix& h, std::optional<double> tol = std::nullopt) {
  const std::size_t n = h.size();
  if (n == 0) throw validation_error("cannot reduce an empty matrix");
  ReductionResult r;
  r.tol = tol.value_or(default_tolerance(h));
  Eigen::MatrixXd m = h.dense();
  r.Q = Eigen::MatrixXd::Identity(Eigen::Index(n), Eigen::Index(n));

  for (std::size_t j = 0; j + 2 < n; ++j) {
    const auto col = Eigen::Index(j);
    for (std::size_t i = n - 1; i >= j + 2; --i) {
      const auto row = Eigen::Index(i);
      const double b = m(row, col);
      if (std::abs(b) <= r.tol) {
        m(row, col) = 0.0;
        m(col, row) = 0.0;
        continue;
      }
      const auto g = rotation_zeroing(m(col + 1, col), b, j + 1, i);
      detail::rotate_in_place(m, g);
      detail::rotate_rows(r.Q, g);
      m(row, col) = 0.0;
      m(col, row) = 0.0;
      r.rotations.push_back(g);
    }
  }

  // Gauge: flip signs so every coupling is nonnegative, site 0 keeps +1.
  std::vector<double> sign(n, 1.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double t = m(Eigen::Index(k + 1), Eigen::Index(k));
    sign[k + 1] = t < 0.0 ? -sign[k] : sign[k];
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (sign[a] < 0.0) r.Q.row(Eigen::Index(a)) *= -1.0;
    for (std::size_t b = 0; b < n; ++b) m(Eigen::Index(a), Eigen::Index(b)) *= sign[a] * sign[b];
  }
  // Clear everything outside the band so T is tridiagonal by storage.
  for (Eigen::Index a = 0; a < m.rows(); ++a)
    for (Eigen::Index b = 0; b < m.cols(); ++b)
      if (std::abs(a - b) >= 2) m(a, b) = 0.0;

  r.T = SymmetricMatrix::from_dense(m);
  r.blocks = split_blocks(r.T, r.tol);
  return r;
}

/// Image of graph site i in the chain basis, Q e_i.  When that image is a
/// single basis vector +-e_k, `chain_site` reports k.
struct SiteImage {
  Eigen::VectorXd vector;
  std::optional<std::size_t> chain_site;
};

inline SiteImage site_image(const ReductionResult& r, std::size_t i, double tol = 1e-12) {
  if (i >= r.T.size()) throw validation_error("site index out of range");
  SiteImage img{r.Q.col(Eigen::Index(i)), std::nullopt};
  Eigen::Index k = 0;
  const double peak = img.vector.cwiseAbs().maxCoeff(&k);
  if (std::abs(peak - 1.0) <= tol)
    img.chain_site = std::size_t(k);
  return img;
}

}  // namespace pst
