/*
 * scalar_forms.hpp: the scalar building blocks behind sector containment.
 *
 * Everything on a finite space reduces to the two-point form
 *
 *   lp_form(z, w, p) = (w - z) conj(F_p(w) - F_p(z)),   z, w in C,
 *
 * which always lies in Sigma_p = Sigma(arcsin|1 - 2/p|). Its geometry is
 * explained by the derivative of the duality map. Viewing F_p as a map on
 * R^2, its Jacobian at y != 0 is the symmetric matrix
 *
 *   DF_p(y) = |y|^(p-2) ( I + (p-2) y y^t / |y|^2 )
 *
 * with eigenvalue |y|^(p-2) tangentially (direction y-perp) and
 * (p-1) |y|^(p-2) radially (direction y). For a symmetric 2x2 matrix A and
 * a direction u in C ~ R^2, the complex-valued quadratic form
 *
 *   quad_form_value(u, A) = u * conj(A u)
 *
 * (complex product of u with the conjugate of A applied to u as a real
 * vector) has Re = u^t A u. When A has eigenvalues 1 and lambda > 0 the
 * set of attainable arguments is exactly [-alpha, alpha] with
 * sin(alpha) = |lambda - 1| / (lambda + 1); along u = (1, x) the argument
 * obeys the product formula
 *
 *   sin(arg quad_form_value) = sin(arctan x + arctan(lambda x))
 *                              * (1 - lambda) / (1 + lambda).
 *
 * With lambda = p - 1 the extremal angle is arcsin(|p-2|/p) = phi_p, which
 * is why Sigma_p is sharp already for scalars. scalar_sharpness_search
 * hunts for that angle along two independent routes: directly on the
 * increment form lp_form, and through the Jacobian quadratic form.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "core.hpp"
#include "optim.hpp"
#include "rng.hpp"

namespace nrsector {

// (w - z) conj(F_p(w) - F_p(z)). Symmetric in z and w; vanishes iff z = w.
inline Complex lp_form(Complex z, Complex w, Exponent p) {
  const double pv = detail::interior_exponent(p, "lp_form");
  return (w - z) * std::conj(duality_scalar(w, pv) - duality_scalar(z, pv));
}

// Jacobian of F_p as a map on R^2, evaluated at y != 0, with its eigenpairs.
struct DualityJacobian {
  Eigen::Matrix2d matrix;
  double radial_eigenvalue;              // (p-1) |y|^(p-2)
  double tangential_eigenvalue;          // |y|^(p-2)
  Eigen::Vector2d radial_direction;      // y / |y|
  Eigen::Vector2d tangential_direction;  // rotation of the above by pi/2
};

inline DualityJacobian duality_map_jacobian(const Eigen::Vector2d& y, Exponent p) {
  const double pv = detail::interior_exponent(p, "duality_map_jacobian");
  const double r = y.norm();
  if (r == 0.0)
    throw std::domain_error("duality_map_jacobian: F_p is not differentiable at 0");
  const Eigen::Vector2d unit = y / r;
  const double scale = std::pow(r, pv - 2.0);
  DualityJacobian jac;
  jac.matrix = scale * (Eigen::Matrix2d::Identity() + (pv - 2.0) * unit * unit.transpose());
  jac.radial_eigenvalue = (pv - 1.0) * scale;
  jac.tangential_eigenvalue = scale;
  jac.radial_direction = unit;
  jac.tangential_direction = Eigen::Vector2d(-unit[1], unit[0]);
  return jac;
}

// u * conj(A u) with u read as the real vector (Re u, Im u). A must be
// symmetric to 1e-12. The real part equals u^t A u.
inline Complex quad_form_value(Complex u, const Eigen::Matrix2d& a) {
  if (std::abs(a(0, 1) - a(1, 0)) > 1e-12)
    throw std::domain_error("quad_form_value: matrix must be symmetric");
  const Eigen::Vector2d v(u.real(), u.imag());
  const Eigen::Vector2d av = a * v;
  return Complex(u.real(), u.imag()) * Complex(av[0], -av[1]);
}

// Both sides of the product formula for A = diag(1, lambda) along
// u = (1, x): sin(arg quad_form_value) versus
// sin(arctan x + arctan(lambda x)) (1 - lambda) / (1 + lambda).
inline double quad_form_sine(double lambda, double x) {
  const Complex q = quad_form_value(Complex(1.0, x),
                                    Eigen::Vector2d(1.0, lambda).asDiagonal().toDenseMatrix());
  return std::sin(std::arg(q));
}

inline double quad_form_sine_product_formula(double lambda, double x) {
  return std::sin(std::atan(x) + std::atan(lambda * x)) * (1.0 - lambda) / (1.0 + lambda);
}

struct QuadFormSweep {
  AngleReport report;                   // target arcsin(|lambda-1|/(lambda+1))
  double max_sine_identity_defect = 0;  // worst |lhs - rhs| of the product formula
};

// Sweeps u = (cos t, sin t) over a midpoint grid on (0, pi/2), records the
// worst defect of the product formula, and refines the largest |arg| by
// golden section around the best grid cell. The supremum is attained at
// x = 1/sqrt(lambda) with value arcsin(|lambda-1|/(lambda+1)).
inline QuadFormSweep quad_form_sup_angle(double lambda, int grid_size = 10000) {
  if (!(lambda > 0.0))
    throw std::domain_error("quad_form_sup_angle: lambda must be positive");
  if (grid_size < 3) throw std::invalid_argument("quad_form_sup_angle: grid too small");

  const Eigen::Matrix2d a = Eigen::Vector2d(1.0, lambda).asDiagonal();
  const auto angle_at = [&](double t) {
    return std::abs(std::arg(quad_form_value(Complex(std::cos(t), std::sin(t)), a)));
  };

  const double half_pi = std::asin(1.0);
  QuadFormSweep sweep;
  sweep.max_sine_identity_defect = 0.0;
  double best_t = half_pi / 2.0;
  double best_angle = -1.0;
  const double step = half_pi / grid_size;
  for (int k = 0; k < grid_size; ++k) {
    const double t = (k + 0.5) * step;
    const double angle = angle_at(t);
    if (angle > best_angle) {
      best_angle = angle;
      best_t = t;
    }
    const double x = std::tan(t);
    sweep.max_sine_identity_defect =
        std::max(sweep.max_sine_identity_defect,
                 std::abs(quad_form_sine(lambda, x) - quad_form_sine_product_formula(lambda, x)));
  }

  const double refined_t = golden_section_max(
      angle_at, std::max(best_t - step, 0.5 * step * 1e-3), std::min(best_t + step, half_pi));
  const double refined = angle_at(refined_t);
  const double final_t = refined >= best_angle ? refined_t : best_t;

  sweep.report.best_angle = std::max(refined, best_angle);
  sweep.report.best_value = quad_form_value(Complex(std::cos(final_t), std::sin(final_t)), a);
  sweep.report.witness = {Complex(std::cos(final_t), std::sin(final_t))};
  sweep.report.target = std::asin(std::abs(lambda - 1.0) / (lambda + 1.0));
  return sweep;
}

namespace detail {

// |arg| of a form value, floored: values with modulus below 1e-4 score 0.
// Near the zero set of a form the argument is dominated by rounding noise
// (absolute imaginary error ~1e-14 for the vector forms), so the floor
// keeps the search away from regions where |arg| is meaningless. The
// suprema are approached along paths where the value shrinks, but the
// angle sacrificed by stopping at modulus 1e-4 is below 1e-5, well inside
// every tolerance used here.
inline constexpr double kSearchModulusFloor = 1e-4;

inline double floored_abs_arg(Complex value) {
  if (std::abs(value) < kSearchModulusFloor) return 0.0;
  return std::abs(std::arg(value));
}

}  // namespace detail

// Largest |arg lp_form| found along two independent routes. `increment`
// searches pairs (z, w) directly; `derivative` searches directions u and
// base points y of the Jacobian quadratic form u * conj(DF_p(y) u), whose
// attainable arguments fill the same sector.
struct ScalarSharpness {
  AngleReport increment;
  AngleReport derivative;

  const AngleReport& best() const {
    return increment.best_angle >= derivative.best_angle ? increment : derivative;
  }
};

// Multistart Nelder-Mead maximization of |arg| over both routes. The
// increment route parametrizes z = e^(i a), w = e^r e^(i b) (the form is
// 2-homogeneous jointly in (z, w), so one modulus can be fixed); the
// derivative route parametrizes y = e^(i a), u = e^(i g) (the quadratic
// form's argument is invariant under scaling of either). Deterministic for
// fixed (p, restarts, seed).
inline ScalarSharpness scalar_sharpness_search(Exponent p, int restarts = 64,
                                               std::uint64_t seed = 0) {
  const double pv = detail::interior_exponent(p, "scalar_sharpness_search");
  if (restarts < 1) throw std::invalid_argument("scalar_sharpness_search: restarts < 1");
  const double target = sector_angle(p);

  ScalarSharpness result;
  result.increment.target = target;
  result.derivative.target = target;

  const auto increment_value = [pv](const Eigen::VectorXd& params) {
    const Complex z = std::polar(1.0, params[0]);
    const Complex w = std::polar(std::exp(params[1]), params[2]);
    return lp_form(z, w, pv);
  };
  const auto derivative_value = [pv](const Eigen::VectorXd& params) {
    const Eigen::Vector2d y(std::cos(params[0]), std::sin(params[0]));
    const Complex u = std::polar(1.0, params[1]);
    return quad_form_value(u, duality_map_jacobian(y, pv).matrix);
  };

  NelderMeadOptions options;
  options.max_iterations = 600;
  options.initial_step = 0.3;

  const double pi = std::acos(-1.0);
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng = substream(seed, static_cast<std::uint64_t>(r));
    std::uniform_real_distribution<double> angle_dist(-pi, pi);
    std::normal_distribution<double> log_radius(0.0, 0.7);

    Eigen::VectorXd start3(3);
    start3 << angle_dist(rng), log_radius(rng), angle_dist(rng);
    const NelderMeadResult inc = nelder_mead(
        [&](const Eigen::VectorXd& q) { return -detail::floored_abs_arg(increment_value(q)); },
        start3, options);
    if (-inc.value > result.increment.best_angle) {
      const Complex value = increment_value(inc.point);
      result.increment.best_angle = -inc.value;
      result.increment.best_value = value;
      result.increment.witness = {std::polar(1.0, inc.point[0]),
                                  std::polar(std::exp(inc.point[1]), inc.point[2])};
    }

    Eigen::VectorXd start2(2);
    start2 << angle_dist(rng), angle_dist(rng);
    const NelderMeadResult der = nelder_mead(
        [&](const Eigen::VectorXd& q) { return -detail::floored_abs_arg(derivative_value(q)); },
        start2, options);
    if (-der.value > result.derivative.best_angle) {
      const Complex value = derivative_value(der.point);
      result.derivative.best_angle = -der.value;
      result.derivative.best_value = value;
      result.derivative.witness = {std::polar(1.0, der.point[0]), std::polar(1.0, der.point[1])};
    }
  }
  return result;
}

}  // namespace nrsector
