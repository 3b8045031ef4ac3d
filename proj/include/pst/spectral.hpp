// Spectra, single-excitation dynamics and perfect-transfer tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <optional>
#include <ostream>
#include <iomanip>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pst/givens.hpp"
#include "pst/graph.hpp"

namespace pst {

using Complex = std::complex<double>;
using Amplitudes = Eigen::VectorXcd;

/// Eigenvalues sorted descending; eigenvectors are the matching columns, each
/// with its first non-negligible component positive.
struct Spectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;

  std::size_t size() const { return std::size_t(values.size()); }
};

inline Spectrum eigendecompose(const SymmetricMatrix& h) {
  if (!h.dense().allFinite()) throw validation_error("matrix has non-finite entries");
  const auto n = Eigen::Index(h.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.dense());
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver did not converge");
  Spectrum s;
  s.values.resize(n);
  s.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    s.values(k) = solver.eigenvalues()(n - 1 - k);
    Eigen::VectorXd v = solver.eigenvectors().col(n - 1 - k);
    const double cut = 1e-12 * v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(v(i)) > cut) {
        if (v(i) < 0.0) v = -v;
        break;
      }
    }
    s.vectors.col(k) = v;
  }
  return s;
}

inline Spectrum eigendecompose(const ChainBlock& b) { return eigendecompose(b.matrix()); }

/// Single-excitation propagator exp(-i h t) built once from a spectrum.
/// Eigenvalues closer than 1e-8 * spread are merged into one eigenspace.
class Propagator {
 public:
  explicit Propagator(const SymmetricMatrix& h, double cluster_rel_tol = 1e-8)
      : Propagator(eigendecompose(h), cluster_rel_tol) {}

  explicit Propagator(Spectrum s, double cluster_rel_tol = 1e-8) : spec_(std::move(s)) {
    const auto n = Eigen::Index(spec_.size());
    if (n == 0) throw validation_error("empty spectrum");
    const double spread = spec_.values(0) - spec_.values(n - 1);
    const double tol = cluster_rel_tol * spread;
    Eigen::Index start = 0;
    for (Eigen::Index k = 1; k <= n; ++k) {
      if (k < n && spec_.values(k - 1) - spec_.values(k) <= tol) continue;
      clusters_.push_back({start, k, spec_.values.segment(start, k - start).mean()});
      start = k;
    }
  }

  std::size_t size() const { return spec_.size(); }
  const Spectrum& spectrum() const { return spec_; }

  /// Distinct energies after clustering, descending.
  std::vector<double> energies() const {
    std::vector<double> e;
    for (const auto& c : clusters_) e.push_back(c.energy);
    return e;
  }

  Complex amplitude(std::size_t a, std::size_t b, double t) const {
    check(a);
    check(b);
    Complex amp = 0.0;
    for (const auto& c : clusters_) {
      double w = 0.0;
      for (Eigen::Index k = c.begin; k < c.end; ++k)
        w += spec_.vectors(Eigen::Index(a), k) * spec_.vectors(Eigen::Index(b), k);
      amp += w * std::polar(1.0, -c.energy * t);
    }
    return amp;
  }

  double probability(std::size_t a, std::size_t b, double t) const { return std::norm(amplitude(a, b, t)); }

  Amplitudes evolve(const Amplitudes& psi, double t) const {
    if (std::size_t(psi.size()) != size()) throw validation_error("state dimension mismatch");
    const Eigen::MatrixXd& V = spec_.vectors;
    Amplitudes coeff = V.transpose().cast<Complex>() * psi;
    for (const auto& c : clusters_)
      for (Eigen::Index k = c.begin; k < c.end; ++k) coeff(k) *= std::polar(1.0, -c.energy * t);
    return V.cast<Complex>() * coeff;
  }

 private:
  struct Cluster {
    Eigen::Index begin, end;
    double energy;
  };

  void check(std::size_t i) const {
    if (i >= size()) throw validation_error("site " + std::to_string(i) + " out of range");
  }

  Spectrum spec_;
  std::vector<Cluster> clusters_;
};

/// P_{a,b}(t) = |<b| exp(-i h t) |a>|^2.
inline double transfer_probability(const SymmetricMatrix& h, std::size_t a, std::size_t b, double t) {
  if (!std::isfinite(t)) throw validation_error("time must be finite");
  return Propagator(h).probability(a, b, t);
}

struct ProbabilitySeries {
  std::size_t from = 0;
  std::size_t to = 0;
  std::vector<double> times;
  std::vector<double> values;
};

inline ProbabilitySeries probability_series(const SymmetricMatrix& h, std::size_t a, std::size_t b,
                                            double t_max, std::size_t steps) {
  if (steps < 2) throw validation_error("a series needs at least two samples");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw validation_error("t_max must be positive");
  const Propagator prop(h);
  ProbabilitySeries s{a, b, {}, {}};
  s.times.reserve(steps);
  s.values.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = t_max * double(k) / double(steps - 1);
    s.times.push_back(t);
    s.values.push_back(prop.probability(a, b, t));
  }
  return s;
}

/// CSV with header "t,p", 17 significant digits, LF endings.
inline void write_csv(std::ostream& os, const ProbabilitySeries& s) {
  os << "t,p\n" << std::setprecision(17);
  for (std::size_t k = 0; k < s.times.size(); ++k) os << s.times[k] << ',' << s.values[k] << '\n';
}

inline bool mirror_symmetric(const ChainBlock& b, double tol = 1e-9) {
  const std::size_t n = b.length;
  for (std::size_t k = 0; k + 1 < n; ++k)
    if (std::abs(b.offdiag[k] - b.offdiag[n - 2 - k]) > tol) return false;
  for (std::size_t k = 0; k < n; ++k)
    if (std::abs(b.diag[k] - b.diag[n - 1 - k]) > tol) return false;
  return true;
}

enum class Verdict { PT, NoPT, Undecided };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::PT: return "PT";
    case Verdict::NoPT: return "no-PT";
    default: return "undecided";
  }
}

struct PTConfig {
  long max_denominator = 64;
  double rational_tol = 1e-8;
  // Gap ratios farther than this from every fraction with denominator
  // <= max_denominator are incommensurate; between rational_tol and this the
  // verdict is left undecided.
  double incommensurate_tol = 1e-6;
  double mirror_tol = 1e-9;
};

struct PTReport {
  bool mirror_symmetric = false;
  std::vector<double> eigenvalues;
  std::optional<std::vector<long>> gap_integers;
  std::optional<double> pt_time;
  Verdict verdict = Verdict::Undecided;
  std::string diagnostics;
};

struct Fraction {
  long num = 0;
  long den = 1;
};

/// Closest fraction to x with denominator <= max_den (continued fractions
/// with semiconvergents).
inline Fraction limit_denominator(double x, long max_den) {
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int iter = 0; iter < 64; ++iter) {
    const double fa = std::floor(r);
    const long a = long(fa);
    const long q2 = q0 + a * q1;
    if (q2 > max_den) break;
    const long p2 = p0 + a * p1;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double frac = r - fa;
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  if (q1 == 0) return {long(std::lround(x)), 1};
  const long k = (max_den - q0) / q1;
  const Fraction lower{p0 + k * p1, q0 + k * q1};
  const Fraction upper{p1, q1};
  auto err = [x](const Fraction& f) { return std::abs(x - double(f.num) / double(f.den)); };
  return (lower.den > 0 && err(lower) < err(upper)) ? lower : upper;
}

/// Mirror symmetry plus odd-integer commensurability of consecutive
/// eigenvalue gaps.  On PT, pt_time is the earliest transfer time.
inline PTReport pt_chain_check(const ChainBlock& b, const PTConfig& cfg = {}) {
  if (b.length < 2) throw validation_error("PT check needs a chain of at least two sites");
  PTReport rep;
  double scale = 1.0;
  for (double v : b.offdiag) scale = std::max(scale, std::abs(v));
  for (double v : b.diag) scale = std::max(scale, std::abs(v));
  rep.mirror_symmetric = mirror_symmetric(b, cfg.mirror_tol * scale);
  const Spectrum s = eigendecompose(b);
  rep.eigenvalues.assign(s.values.data(), s.values.data() + s.values.size());

  if (!rep.mirror_symmetric) {
    rep.verdict = Verdict::NoPT;
    rep.diagnostics = "chain is not mirror symmetric";
    return rep;
  }
  std::vector<double> gaps;
  for (std::size_t k = 0; k + 1 < rep.eigenvalues.size(); ++k)
    gaps.push_back(rep.eigenvalues[k] - rep.eigenvalues[k + 1]);
  const double gmin = *std::min_element(gaps.begin(), gaps.end());
  if (!(gmin > 0.0)) {
    rep.verdict = Verdict::NoPT;
    rep.diagnostics = "degenerate spectrum";
    return rep;
  }

  std::vector<Fraction> ratios;
  double worst = 0.0;
  for (double g : gaps) {
    const double x = g / gmin;
    const Fraction f = limit_denominator(x, cfg.max_denominator);
    worst = std::max(worst, std::abs(x - double(f.num) / double(f.den)));
    ratios.push_back(f);
  }
  if (worst > cfg.incommensurate_tol) {
    rep.verdict = Verdict::NoPT;
    rep.diagnostics = "eigenvalue gaps are incommensurate (ratio error " + std::to_string(worst) + ")";
    return rep;
  }
  if (worst > cfg.rational_tol) {
    rep.verdict = Verdict::Undecided;
    rep.diagnostics = "gap ratios are near-rational but outside tolerance (error " + std::to_string(worst) + ")";
    return rep;
  }

  long lcm = 1;
  for (const auto& f : ratios) lcm = std::lcm(lcm, f.den);
  std::vector<long> m;
  for (const auto& f : ratios) m.push_back(f.num * (lcm / f.den));
  long g = 0;
  for (long v : m) g = std::gcd(g, v);
  for (long& v : m) v /= g;
  rep.gap_integers = m;
  const bool all_odd = std::all_of(m.begin(), m.end(), [](long v) { return v % 2 != 0; });
  if (all_odd) {
    rep.verdict = Verdict::PT;
    rep.pt_time = std::numbers::pi * double(m[0]) / gaps[0];
    rep.diagnostics = "mirror symmetric with odd gap integers";
  } else {
    rep.verdict = Verdict::NoPT;
    rep.diagnostics = "gap integers are not all odd";
  }
  return rep;
}

struct PairMaximum {
  double t = 0.0;
  double p = 0.0;
};

/// Global maximum of P_{a,b} on [0, t_max]: dense grid, then golden-section
/// refinement of the best cell down to 1e-10 in t.
inline PairMaximum pt_pair_search(const Propagator& prop, std::size_t a, std::size_t b, double t_max,
                                  std::size_t min_points = 4096) {
  if (!(t_max > 0.0)) throw validation_error("t_max must be positive");
  const auto energies = prop.energies();
  const double width = energies.front() - energies.back();
  const auto points = std::max<std::size_t>(min_points, std::size_t(std::ceil(t_max * width * 8.0)) + 1);
  const double dt = t_max / double(points - 1);
  PairMaximum best{0.0, prop.probability(a, b, 0.0)};
  std::size_t best_k = 0;
  for (std::size_t k = 1; k < points; ++k) {
    const double t = dt * double(k);
    const double p = prop.probability(a, b, t);
    if (p > best.p) {
      best = {t, p};
      best_k = k;
    }
  }
  double lo = dt * double(best_k == 0 ? 0 : best_k - 1);
  double hi = std::min(t_max, dt * double(best_k + 1));
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = prop.probability(a, b, x1), f2 = prop.probability(a, b, x2);
  while (hi - lo > 1e-10) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = prop.probability(a, b, x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = prop.probability(a, b, x1);
    }
  }
  const double t = 0.5 * (lo + hi);
  const double p = prop.probability(a, b, t);
  if (p > best.p) best = {t, p};
  return best;
}

inline PairMaximum pt_pair_search(const SymmetricMatrix& h, std::size_t a, std::size_t b, double t_max) {
  return pt_pair_search(Propagator(h), a, b, t_max);
}

/// J_n = sqrt(n (N - n)), n = 1..N-1.
inline std::vector<double> chain_pt_couplings(std::size_t N) {
  if (N < 2) throw validation_error("chain needs at least two sites");
  std::vector<double> J;
  for (std::size_t n = 1; n < N; ++n) J.push_back(std::sqrt(double(n) * double(N - n)));
  return J;
}

/// Mirror-symmetric zero-field chain with the given (symmetric, simple)
/// spectrum.  First-component weights of a persymmetric Jacobi matrix are
/// w_k^2 ~ 1/|chi'(lambda_k)|; the chain follows from the Lanczos recurrence
/// on diag(lambda) started from w.
inline ChainBlock jacobi_from_spectrum(std::vector<double> eigs) {
  const std::size_t n = eigs.size();
  if (n == 0) throw validation_error("empty spectrum");
  for (double e : eigs)
    if (!std::isfinite(e)) throw validation_error("non-finite eigenvalue");
  std::sort(eigs.begin(), eigs.end());
  const double spread = eigs.back() - eigs.front();
  const double scale = std::max(spread, std::abs(eigs.back()));
  for (std::size_t k = 0; k + 1 < n; ++k)
    if (eigs[k + 1] - eigs[k] <= 1e-8 * spread)
      throw validation_error("repeated eigenvalue " + std::to_string(eigs[k]));
  for (std::size_t k = 0; k < n; ++k)
    if (std::abs(eigs[k] + eigs[n - 1 - k]) > 1e-8 * std::max(scale, 1e-300))
      throw validation_error("spectrum is not symmetric under lambda -> -lambda");
  if (n == 1) return ChainBlock::chain({});

  // log-domain weights avoid overflow for wide spectra
  std::vector<double> logw(n);
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != k) s += std::log(std::abs(eigs[k] - eigs[j]));
    logw[k] = -s;
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  const auto N = Eigen::Index(n);
  Eigen::VectorXd w(N);
  for (std::size_t k = 0; k < n; ++k) w(Eigen::Index(k)) = std::sqrt(std::exp(logw[k] - top));
  w.normalize();

  const Eigen::VectorXd lambda = Eigen::Map<const Eigen::VectorXd>(eigs.data(), N);
  Eigen::MatrixXd basis(N, N);
  basis.col(0) = w;
  std::vector<double> J;
  for (Eigen::Index k = 0; k + 1 < N; ++k) {
    Eigen::VectorXd r = lambda.cwiseProduct(basis.col(k));
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index j = 0; j <= k; ++j) r -= basis.col(j).dot(r) * basis.col(j);
    const double beta = r.norm();
    J.push_back(beta);
    basis.col(k + 1) = r / beta;
  }
  // The diagonal of a persymmetric chain with symmetric spectrum vanishes.
  return ChainBlock::chain(std::move(J));
}

}  // namespace pst
