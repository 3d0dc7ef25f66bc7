/*
 * analytic_sector.hpp: contraction of the semigroup on complex rays.
 *
 * The sector containment of the numerical range upgrades the semigroup
 * from contractive on the positive axis to contractive on the sector
 * |arg z| <= arccos|1 - 2/p| of the complex time plane (the complement
 * angle of phi_p: cos of one is sin of the other). contraction_sweep
 * probes this region: along each ray z = r e^(i theta) it evaluates
 * T(z) = e^(-zA) and records a certified lower bound for its
 * L^p operator norm.
 *
 * Lower bounds prove nothing about contractivity outside the critical
 * angle, but inside it they must not exceed 1 (up to rounding); that is
 * the checkable claim. Estimates above 1 outside the critical angle are
 * consistent with the theory and commonly observed.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "core.hpp"
#include "operators.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace nrsector {

// arccos|1 - 2/p|; 0 at p in {1, oo}, pi/2 at p = 2.
inline double analytic_sector_angle(Exponent p) {
  const double ratio = p.is_inf() ? 1.0 : std::abs(1.0 - 2.0 / p.value());
  return std::acos(ratio);
}

// 32 angles, uniform on [0, pi/2 - 1e-3].
inline std::vector<double> default_sweep_angles() {
  const double hi = std::asin(1.0) - 1e-3;
  std::vector<double> thetas(32);
  for (int k = 0; k < 32; ++k) thetas[k] = hi * k / 31.0;
  return thetas;
}

struct RaySweep {
  double p = 2.0;  // p = oo is recorded as infinity
  std::vector<double> theta_grid;
  std::vector<double> radius_grid;
  Eigen::MatrixXd norm_estimates;  // (theta index, radius index)
  double critical_angle = 0.0;     // arccos|1 - 2/p|

  bool inside(std::size_t theta_index) const {
    return theta_grid[theta_index] <= critical_angle;
  }
};

inline RaySweep contraction_sweep(const Generator& gen, Exponent p,
                                  const std::vector<double>& thetas = default_sweep_angles(),
                                  const std::vector<double>& radii = {0.1, 1.0, 10.0},
                                  int restarts = 8, std::uint64_t seed = 0) {
  if (thetas.empty() || radii.empty())
    throw std::invalid_argument("contraction_sweep: empty grid");
  const double half_pi = std::asin(1.0);
  for (const double theta : thetas)
    if (!(theta >= 0.0 && theta < half_pi))
      throw std::domain_error("contraction_sweep: angles must lie in [0, pi/2)");
  for (const double r : radii)
    if (!(r > 0.0)) throw std::domain_error("contraction_sweep: radii must be positive");

  RaySweep sweep;
  sweep.p = p.is_inf() ? std::numeric_limits<double>::infinity() : p.value();
  sweep.theta_grid = thetas;
  sweep.radius_grid = radii;
  sweep.critical_angle = analytic_sector_angle(p);
  sweep.norm_estimates.resize(static_cast<Eigen::Index>(thetas.size()),
                              static_cast<Eigen::Index>(radii.size()));

  const std::int64_t pairs = static_cast<std::int64_t>(thetas.size() * radii.size());
  parallel_for(pairs, [&](std::int64_t idx) {
    const std::size_t ti = static_cast<std::size_t>(idx) / radii.size();
    const std::size_t ri = static_cast<std::size_t>(idx) % radii.size();
    const Complex z = std::polar(radii[ri], thetas[ti]);
    const OperatorMatrix op = semigroup_at(gen, z);
    sweep.norm_estimates(static_cast<Eigen::Index>(ti), static_cast<Eigen::Index>(ri)) =
        operator_pnorm_lower_bound(op, p, restarts,
                                   seed ^ detail::mix64(static_cast<std::uint64_t>(idx) + 1));
  });
  return sweep;
}

}  // namespace nrsector
