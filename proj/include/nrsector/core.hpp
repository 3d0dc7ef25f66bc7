/*
 * core.hpp: finite weighted measure spaces and L^p geometry.
 *
 * A FiniteMeasureSpace is a list of atoms with positive weights mu_1..mu_n.
 * Complex functions on it are vectors f in C^n, with
 *
 *   <f, g>      = sum_j f_j conj(g_j) mu_j            (duality pairing)
 *   ||f||_p     = (sum_j |f_j|^p mu_j)^(1/p)          (weighted p-norm)
 *   ||f||_inf   = max_j |f_j|                          (weights ignored)
 *   F_p(z)      = z |z|^(p-2),  F_p(0) = 0             (duality map, 1 < p < oo)
 *
 * For ||f||_p = 1 the function F_p(f) is the norming functional of f:
 * ||F_p(f)||_p' = 1 and <f, F_p(f)> = 1, where 1/p + 1/p' = 1.
 *
 * Sector geometry: Sigma(phi) = { z != 0 : |arg z| <= phi } u {0}, and the
 * angle attached to an exponent p in (1, oo) is
 *
 *   phi_p = arcsin|1 - 2/p| = arctan( |p-2| / (2 sqrt(p-1)) ),
 *
 * which runs from 0 (p = 2) towards pi/2 as p -> 1 or p -> oo and satisfies
 * phi_p = phi_p'.
 *
 * All types here are immutable after construction and all operations are
 * pure; they can be called concurrently without coordination.
 */

#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace nrsector {

using Complex = std::complex<double>;

// Default absolute tolerance wherever an operation does not take one.
inline constexpr double kDefaultTol = 1e-9;

namespace detail {

// Compensated (Kahan) accumulator. Weighted norms and pairings are summed
// with it so that residual checks around 1e-12 stay meaningful.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - compensation_;
    const double t = sum_ + y;
    compensation_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

class KahanComplexSum {
 public:
  void add(Complex z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  Complex value() const { return {re_.value(), im_.value()}; }

 private:
  KahanSum re_, im_;
};

}  // namespace detail

// Exponent of an L^p space: a real p >= 1 or the distinguished value p = oo.
// Infinity is a tagged state of this type, never approximated by a large
// finite float.
class Exponent {
 public:
  Exponent(double p) : value_(p) {  // NOLINT: implicit from double intended
    if (!(p >= 1.0) || !std::isfinite(p))
      throw std::domain_error("Exponent: p must be a finite real >= 1");
  }

  static Exponent inf() {
    Exponent e;
    e.value_ = std::numeric_limits<double>::infinity();
    return e;
  }

  bool is_inf() const { return std::isinf(value_); }

  // Finite exponent value; must not be called on Exponent::inf().
  double value() const {
    if (is_inf()) throw std::domain_error("Exponent: value() called on p = oo");
    return value_;
  }

  // Dual exponent p' with 1/p + 1/p' = 1 (dual of 1 is oo and vice versa).
  Exponent dual() const {
    if (is_inf()) return Exponent(1.0);
    if (value_ == 1.0) return inf();
    return Exponent(value_ / (value_ - 1.0));
  }

  friend bool operator==(const Exponent& a, const Exponent& b) {
    return a.value_ == b.value_ || (a.is_inf() && b.is_inf());
  }

  std::string str() const { return is_inf() ? "inf" : std::to_string(value_); }

 private:
  Exponent() = default;
  double value_ = 2.0;
};

namespace detail {

// Extracts a finite p in (1, oo); several operations (duality map, sector
// angle, the range forms) are only defined there.
inline double interior_exponent(const Exponent& p, const char* where) {
  if (p.is_inf() || p.value() <= 1.0)
    throw std::domain_error(std::string(where) + ": p must lie in (1, oo)");
  return p.value();
}

}  // namespace detail

// A finite atomic measure space: n atoms with weights mu_j > 0.
class FiniteMeasureSpace {
 public:
  explicit FiniteMeasureSpace(Eigen::VectorXd weights) : weights_(std::move(weights)) {
    if (weights_.size() < 1)
      throw std::invalid_argument("FiniteMeasureSpace: need at least one atom");
    for (Eigen::Index j = 0; j < weights_.size(); ++j)
      if (!(weights_[j] > 0.0) || !std::isfinite(weights_[j]))
        throw std::invalid_argument("FiniteMeasureSpace: weights must be positive and finite");
  }

  static FiniteMeasureSpace uniform(Eigen::Index n) {
    return FiniteMeasureSpace(Eigen::VectorXd::Ones(n));
  }

  Eigen::Index size() const { return weights_.size(); }
  double weight(Eigen::Index j) const { return weights_[j]; }
  const Eigen::VectorXd& weights() const { return weights_; }

  double total_mass() const {
    detail::KahanSum s;
    for (Eigen::Index j = 0; j < weights_.size(); ++j) s.add(weights_[j]);
    return s.value();
  }

  friend bool operator==(const FiniteMeasureSpace& a, const FiniteMeasureSpace& b) {
    return a.weights_.size() == b.weights_.size() && a.weights_ == b.weights_;
  }

 private:
  Eigen::VectorXd weights_;
};

// A complex function on a finite measure space.
struct CVec {
  CVec(FiniteMeasureSpace space_, Eigen::VectorXcd entries_)
      : space(std::move(space_)), entries(std::move(entries_)) {
    if (entries.size() != space.size())
      throw std::invalid_argument("CVec: entry count does not match the space");
  }

  FiniteMeasureSpace space;
  Eigen::VectorXcd entries;
};

namespace detail {

inline void require_same_space(const CVec& f, const CVec& g, const char* where) {
  if (!(f.space == g.space))
    throw std::invalid_argument(std::string(where) + ": vectors live on different spaces");
}

}  // namespace detail

// Duality pairing <f, g> = sum_j f_j conj(g_j) mu_j. Conjugate-symmetric:
// pairing(f, g) == conj(pairing(g, f)).
inline Complex pairing(const CVec& f, const CVec& g) {
  detail::require_same_space(f, g, "pairing");
  detail::KahanComplexSum s;
  for (Eigen::Index j = 0; j < f.entries.size(); ++j)
    s.add(f.entries[j] * std::conj(g.entries[j]) * f.space.weight(j));
  return s.value();
}

// Weighted p-norm; ||f||_inf = max_j |f_j| (weights ignored). The sum is
// scaled by max_j |f_j| so extreme entries neither overflow nor underflow
// when raised to large p.
inline double p_norm(const CVec& f, Exponent p) {
  double maxabs = 0.0;
  for (Eigen::Index j = 0; j < f.entries.size(); ++j)
    maxabs = std::max(maxabs, std::abs(f.entries[j]));
  if (p.is_inf() || maxabs == 0.0) return maxabs;
  const double pv = p.value();
  detail::KahanSum s;
  for (Eigen::Index j = 0; j < f.entries.size(); ++j)
    s.add(std::pow(std::abs(f.entries[j]) / maxabs, pv) * f.space.weight(j));
  return maxabs * std::pow(s.value(), 1.0 / pv);
}

// Scalar duality map F_p(z) = z |z|^(p-2), F_p(0) = 0. Entries below 1e-300
// are treated as exactly 0 so |z|^(p-2) cannot overflow for p < 2.
inline Complex duality_scalar(Complex z, double p) {
  const double a = std::abs(z);
  if (a <= 1e-300) return {0.0, 0.0};
  return z * std::pow(a, p - 2.0);
}

// Entrywise duality map. For ||f||_p = 1 the result g satisfies
// ||g||_p' = 1 and <f, g> = 1.
inline CVec duality_map(const CVec& f, Exponent p) {
  const double pv = detail::interior_exponent(p, "duality_map");
  Eigen::VectorXcd out(f.entries.size());
  for (Eigen::Index j = 0; j < f.entries.size(); ++j)
    out[j] = duality_scalar(f.entries[j], pv);
  return CVec(f.space, std::move(out));
}

// A closed sector Sigma(phi) = { z != 0 : |arg z| <= phi } u {0} with
// opening angle phi in [0, pi/2]. Sigma(0) is the nonnegative real axis,
// Sigma(pi/2) the closed right half-plane.
class Sector {
 public:
  explicit Sector(double angle) : angle_(angle) {
    if (!(angle >= 0.0 && angle <= std::asin(1.0)))
      throw std::domain_error("Sector: opening angle must lie in [0, pi/2]");
  }

  double angle() const { return angle_; }

 private:
  double angle_;
};

// Outcome of a search for the largest |arg| a form attains. `witness` is
// the point attaining best_angle (its meaning depends on the search:
// scalar arguments, a direction, or the entries of a function), and
// best_value is the form value there. `target` is the analytic angle the
// search is measured against.
struct AngleReport {
  double best_angle = 0.0;
  Complex best_value = 0.0;
  std::vector<Complex> witness;
  double target = 0.0;

  // target - best_angle; nonnegative when the search stayed inside the
  // target sector.
  double gap() const { return target - best_angle; }
};

// phi_p = arcsin|1 - 2/p| for p in (1, oo).
inline double sector_angle(Exponent p) {
  const double pv = detail::interior_exponent(p, "sector_angle");
  return std::asin(std::abs(1.0 - 2.0 / pv));
}

// The sector Sigma_p = Sigma(phi_p).
inline Sector sector_for_exponent(Exponent p) { return Sector(sector_angle(p)); }

// Membership test with tolerance semantics: z belongs to the sector when
// |z| <= tol (arg is ill-conditioned near 0, and 0 is always a member), or
// when Re z >= -tol and |arg z| <= angle + tol. arg is the principal value
// in (-pi, pi].
inline bool in_sector(Complex z, const Sector& sector, double tol = kDefaultTol) {
  if (tol < 0.0) throw std::domain_error("in_sector: tol must be nonnegative");
  if (std::abs(z) <= tol) return true;
  return z.real() >= -tol && std::abs(std::arg(z)) <= sector.angle() + tol;
}

}  // namespace nrsector
