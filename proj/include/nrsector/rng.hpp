/*
 * rng.hpp: deterministic random streams.
 *
 * Every randomized routine takes an explicit 64-bit seed and derives
 * independent substreams from (seed, index) pairs via splitmix64, so results
 * are reproducible bit-for-bit regardless of how work is divided among
 * threads.
 */

#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace nrsector {

namespace detail {

// splitmix64 finalizer; decorrelates consecutive (seed, index) pairs.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

// Engine for substream `index` of stream `seed`. Two calls with equal
// arguments yield identical engines.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(detail::mix64(detail::mix64(seed) ^ detail::mix64(index + 1)));
}

// Standard complex Gaussian: independent N(0,1) real and imaginary parts.
inline std::complex<double> complex_gaussian(std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  const double re = n01(rng);
  const double im = n01(rng);
  return {re, im};
}

inline Eigen::VectorXcd complex_gaussian_vector(std::mt19937_64& rng, Eigen::Index n) {
  Eigen::VectorXcd v(n);
  for (Eigen::Index j = 0; j < n; ++j) v[j] = complex_gaussian(rng);
  return v;
}

// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
// of R's diagonal folded into Q. Without that correction QR alone is not
// Haar.
inline Eigen::MatrixXcd haar_unitary(std::mt19937_64& rng, Eigen::Index n) {
  Eigen::MatrixXcd g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) g.col(j) = complex_gaussian_vector(rng, n);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    const std::complex<double> d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= (a == 0.0) ? std::complex<double>(1.0, 0.0) : d / a;
  }
  return q;
}

}  // namespace nrsector
