// Reference values computed by deliberately different algorithms than the
// library under test: Taylor series instead of eigendecompositions, plain
// sums instead of compensated ones, dense grids instead of optimizers. A
// test that agrees with one of these has reached the same number along two
// independent routes.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>

namespace oracle {

using Complex = std::complex<double>;

// e^M by scaling-and-squaring over a degree-30 Taylor polynomial. With the
// scaled norm at most 1/2 the series truncation error is ~0.5^31/31!.
inline Eigen::MatrixXcd matrix_exp(const Eigen::MatrixXcd& m) {
  double norm = 0.0;
  for (Eigen::Index j = 0; j < m.rows(); ++j)
    norm = std::max(norm, m.row(j).cwiseAbs().sum());
  int squarings = 0;
  while (std::ldexp(norm, -squarings) > 0.5) ++squarings;

  const Eigen::MatrixXcd scaled = m * std::ldexp(1.0, -squarings);
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Identity(m.rows(), m.cols());
  Eigen::MatrixXcd term = sum;
  for (int k = 1; k <= 30; ++k) {
    term = (term * scaled * (1.0 / k)).eval();
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = (sum * sum).eval();
  return sum;
}

// Closed form for the two-atom family A = [[1, -conj(l)], [-l, 1]] with
// |l| = 1: writing A = I - B, B = [[0, conj(l)], [l, 0]], one has B^2 = I,
// so e^(-tA) = e^(-t) (cosh(t) I + sinh(t) B).
inline Eigen::MatrixXcd coupled_pair_semigroup(Complex lambda, double t) {
  Eigen::MatrixXcd b(2, 2);
  b << 0.0, std::conj(lambda), lambda, 0.0;
  Eigen::MatrixXcd out =
      std::cosh(t) * Eigen::MatrixXcd::Identity(2, 2) + std::sinh(t) * b;
  return std::exp(-t) * out;
}

// The optimal angle in its arctangent form.
inline double arctan_angle(double p) {
  return std::atan(std::abs(p - 2.0) / (2.0 * std::sqrt(p - 1.0)));
}

// F_p(z) = z|z|^(p-2) written out locally.
inline Complex duality(Complex z, double p) {
  const double mod = std::abs(z);
  if (mod == 0.0) return Complex(0.0, 0.0);
  return z * std::pow(mod, p - 2.0);
}

// Weighted p-norm with a plain accumulation loop (finite p only).
inline double plain_pnorm(const Eigen::VectorXcd& f, const Eigen::VectorXd& mu, double p) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < f.size(); ++j)
    sum += std::pow(std::abs(f[j]), p) * mu[j];
  return std::pow(sum, 1.0 / p);
}

// <M fhat, F_p(fhat)> for fhat = f / ||f||_p, with plain sums throughout.
inline Complex plain_form(const Eigen::MatrixXcd& m, const Eigen::VectorXd& mu,
                          const Eigen::VectorXcd& f, double p) {
  const Eigen::VectorXcd fhat = f / plain_pnorm(f, mu, p);
  const Eigen::VectorXcd image = m * fhat;
  Complex out(0.0, 0.0);
  for (Eigen::Index j = 0; j < f.size(); ++j)
    out += image[j] * std::conj(duality(fhat[j], p)) * mu[j];
  return out;
}

// Jacobian of F_p as a map R^2 -> R^2, by central differences.
inline Eigen::Matrix2d fd_jacobian(const Eigen::Vector2d& y, double p, double h) {
  const auto f = [p](const Eigen::Vector2d& v) {
    const Complex w = duality(Complex(v[0], v[1]), p);
    return Eigen::Vector2d(w.real(), w.imag());
  };
  Eigen::Matrix2d jac;
  for (int c = 0; c < 2; ++c) {
    Eigen::Vector2d e = Eigen::Vector2d::Zero();
    e[c] = h;
    jac.col(c) = (f(y + e) - f(y - e)) / (2.0 * h);
  }
  return jac;
}

// Brute-force weighted p -> p operator norm of a 2x2 matrix: a dense grid
// over the projective input parameters x = (cos s, sin s e^(i phi)). Any
// grid value is a valid lower bound; at 400x400 the grid maximum is within
// ~1e-4 of the true norm, which is all the comparison tests need.
inline double grid_pnorm_2x2(const Eigen::MatrixXcd& m, const Eigen::VectorXd& mu, double p,
                             int grid = 400) {
  const double half_pi = std::asin(1.0);
  double best = 0.0;
  for (int a = 0; a < grid; ++a) {
    const double s = half_pi * (a + 0.5) / grid;
    for (int b = 0; b < grid; ++b) {
      const double phi = 4.0 * half_pi * b / grid;
      Eigen::VectorXcd x(2);
      x << Complex(std::cos(s), 0.0), std::polar(std::sin(s), phi);
      best = std::max(best, plain_pnorm(m * x, mu, p) / plain_pnorm(x, mu, p));
    }
  }
  return best;
}

}  // namespace oracle
