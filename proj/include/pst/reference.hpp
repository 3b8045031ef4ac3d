// Eigensolver-free evolution used to cross-check the spectral propagator.
#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "pst/graph.hpp"

namespace pst {

/// exp(-i h t) psi by scaling and squaring: the step t/2^s is small enough
/// that a truncated Taylor series of 30 terms is exact to rounding.
inline Eigen::VectorXcd taylor_evolve(const SymmetricMatrix& h, const Eigen::VectorXcd& psi, double t) {
  const Eigen::MatrixXcd A = std::complex<double>(0.0, -t) * h.dense().cast<std::complex<double>>();
  const double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  while (norm / std::ldexp(1.0, s) > 0.5) ++s;
  const Eigen::MatrixXcd B = A / std::ldexp(1.0, s);
  const auto n = h.dense().rows();
  Eigen::MatrixXcd E = Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd term = E;
  for (int k = 1; k <= 30; ++k) {
    term = term * B / double(k);
    E += term;
  }
  for (int k = 0; k < s; ++k) E = E * E;
  return E * psi;
}

}  // namespace pst
