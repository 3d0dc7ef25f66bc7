/*
 * numerical_range.hpp: the L^p numerical range of a generator.
 *
 * For a generator A and 1 < p < oo the quantity of interest is
 *
 *   form_value(A, f, p) = <A fhat, F_p(fhat)>,   fhat = f / ||f||_p,
 *
 * whose closure over all f != 0 is the L^p numerical range of A. The
 * containment being verified: every such value lies in the sector
 * Sigma_p = Sigma(arcsin|1 - 2/p|). difference_form evaluates the same
 * pairing with I - T(t) in place of A; for small t it approximates t times
 * the generator form and is the quantity the certificate decomposes.
 *
 * The argument of the form is scale-invariant (<A(cf), F_p(cf)> =
 * |c|^p <Af, F_p(f)>), so normalization only fixes the magnitude.
 *
 * Two probes are provided. sample_range draws random functions (Gaussian
 * entries, with every tenth draw heavy-tailed to visit extreme modulus
 * ratios) and records the form values. max_arg_search runs multistart
 * Nelder-Mead on |arg| over f in C^n ~ R^(2n); the extremal functions
 * are supported on two atoms, so half the starts are structured pairs
 * e_j + s e_k with s in {1, -1, i, -i}. Values with modulus below 1e-4
 * score 0 in the search (that close to the zero set the argument is
 * rounding noise); sampled values of modulus below 1e-12 are likewise
 * excluded from max_abs_arg.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "core.hpp"
#include "operators.hpp"
#include "optim.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "scalar_forms.hpp"

namespace nrsector {

namespace detail {

inline Complex normalized_form(const Eigen::MatrixXcd& op, const CVec& f, double pv,
                               const char* where) {
  const double norm = p_norm(f, Exponent(pv));
  if (norm <= 1e-300) throw std::domain_error(std::string(where) + ": f must be nonzero");
  const CVec fhat(f.space, f.entries / norm);
  const CVec image(f.space, op * fhat.entries);
  return pairing(image, duality_map(fhat, Exponent(pv)));
}

}  // namespace detail

// <A fhat, F_p(fhat)> for fhat = f / ||f||_p. Throws for f = 0.
inline Complex form_value(const Generator& gen, const CVec& f, Exponent p) {
  const double pv = detail::interior_exponent(p, "form_value");
  if (!(f.space == gen.space()))
    throw std::invalid_argument("form_value: f does not live on the generator's space");
  return detail::normalized_form(gen.matrix(), f, pv, "form_value");
}

namespace detail {

// <(I - T(t)) f, F_p(f)> without normalization; the certificate decomposes
// exactly this quantity at the scale of the given f.
inline Complex difference_form_raw(const Generator& gen, double t, const CVec& f, double pv) {
  const OperatorMatrix semigroup = semigroup_at(gen, Complex(t, 0.0));
  const CVec image(f.space, f.entries - semigroup.matrix * f.entries);
  return pairing(image, duality_map(f, Exponent(pv)));
}

}  // namespace detail

// <(I - T(t)) fhat, F_p(fhat)> for fhat = f / ||f||_p and T(t) = e^(-tA).
inline Complex difference_form(const Generator& gen, double t, const CVec& f, Exponent p) {
  const double pv = detail::interior_exponent(p, "difference_form");
  if (!(f.space == gen.space()))
    throw std::invalid_argument("difference_form: f does not live on the generator's space");
  if (!(t >= 0.0)) throw std::domain_error("difference_form: t must be nonnegative");
  const Eigen::MatrixXcd op = Eigen::MatrixXcd::Identity(gen.size(), gen.size()) -
                              semigroup_at(gen, Complex(t, 0.0)).matrix;
  return detail::normalized_form(op, f, pv, "difference_form");
}

// Form values of random functions, plus the largest |arg| among values of
// modulus above 1e-12.
struct RangeSample {
  std::vector<Complex> values;
  double p = 2.0;
  std::string generator_id;
  double max_abs_arg = 0.0;
  std::uint64_t seed = 0;
  std::int64_t sample_count = 0;
};

inline RangeSample sample_range(const Generator& gen, Exponent p, std::int64_t n_samples,
                                std::uint64_t seed) {
  const double pv = detail::interior_exponent(p, "sample_range");
  if (n_samples < 1) throw std::invalid_argument("sample_range: need at least one sample");

  RangeSample out;
  out.values.resize(n_samples);
  out.p = pv;
  out.generator_id = gen.label();
  out.seed = seed;
  out.sample_count = n_samples;

  const Eigen::Index n = gen.size();
  parallel_for(n_samples, [&](std::int64_t i) {
    std::mt19937_64 rng = substream(seed, static_cast<std::uint64_t>(i));
    Eigen::VectorXcd entries = complex_gaussian_vector(rng, n);
    if (i % 10 == 9) {
      // Heavy-tailed draw: Cauchy moduli with uniform phases.
      std::uniform_real_distribution<double> u01(0.0, 1.0);
      const double pi = std::acos(-1.0);
      for (Eigen::Index j = 0; j < n; ++j)
        entries[j] = std::polar(std::tan(0.5 * pi * u01(rng)), 2.0 * pi * u01(rng) - pi);
    }
    out.values[static_cast<std::size_t>(i)] =
        form_value(gen, CVec(gen.space(), std::move(entries)), pv);
  });

  for (const Complex v : out.values)
    if (std::abs(v) > 1e-12) out.max_abs_arg = std::max(out.max_abs_arg, std::abs(std::arg(v)));
  return out;
}

// Multistart Nelder-Mead maximization of |arg form_value| over f. Returns
// the best angle, the attaining f (as witness entries), and the target
// phi_p. Deterministic for fixed (generator, p, restarts, seed);
// independent of thread count.
inline AngleReport max_arg_search(const Generator& gen, Exponent p, int restarts = 24,
                                  std::uint64_t seed = 0) {
  const double pv = detail::interior_exponent(p, "max_arg_search");
  if (restarts < 1) throw std::invalid_argument("max_arg_search: restarts < 1");

  const Eigen::Index n = gen.size();
  const auto to_function = [n](const Eigen::VectorXd& x) {
    Eigen::VectorXcd f(n);
    for (Eigen::Index j = 0; j < n; ++j) f[j] = Complex(x[j], x[n + j]);
    return f;
  };
  const auto objective = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXcd entries = to_function(x);
    const CVec f(gen.space(), entries);
    if (p_norm(f, pv) < 1e-12) return 0.0;
    return -detail::floored_abs_arg(form_value(gen, f, pv));
  };

  // Structured starts: pairs e_j + s e_k, the profile of extremal functions.
  std::vector<Eigen::VectorXd> structured;
  const Complex signs[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = j + 1; k < n; ++k)
      for (const Complex s : signs) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * n);
        x[j] = 1.0;
        x[k] += s.real();
        x[n + k] += s.imag();
        structured.push_back(std::move(x));
      }
  {
    std::mt19937_64 shuffle_rng = substream(seed, ~std::uint64_t{0});
    std::shuffle(structured.begin(), structured.end(), shuffle_rng);
  }

  NelderMeadOptions options;
  options.max_iterations = 500;
  options.initial_step = 0.4;

  const int structured_count =
      std::min<int>(static_cast<int>(structured.size()), (restarts + 1) / 2);
  const int total = restarts;
  std::vector<double> angles(total, 0.0);
  std::vector<Eigen::VectorXd> points(total);
  parallel_for(total, [&](std::int64_t r) {
    Eigen::VectorXd start;
    if (r < structured_count) {
      start = structured[static_cast<std::size_t>(r)];
    } else {
      std::mt19937_64 rng = substream(seed, static_cast<std::uint64_t>(r));
      const Eigen::VectorXcd f = complex_gaussian_vector(rng, n);
      start.resize(2 * n);
      for (Eigen::Index j = 0; j < n; ++j) {
        start[j] = f[j].real();
        start[n + j] = f[j].imag();
      }
    }
    const NelderMeadResult best = nelder_mead(objective, start, options);
    angles[static_cast<std::size_t>(r)] = -best.value;
    points[static_cast<std::size_t>(r)] = best.point;
  });

  AngleReport report;
  report.target = sector_angle(pv);
  int best_index = 0;
  for (int r = 1; r < total; ++r)
    if (angles[static_cast<std::size_t>(r)] > angles[static_cast<std::size_t>(best_index)])
      best_index = r;
  report.best_angle = angles[static_cast<std::size_t>(best_index)];
  const Eigen::VectorXcd entries = to_function(points[static_cast<std::size_t>(best_index)]);
  const CVec f(gen.space(), entries);
  if (p_norm(f, pv) >= 1e-12) report.best_value = form_value(gen, f, pv);
  report.witness.assign(entries.data(), entries.data() + entries.size());
  return report;
}

}  // namespace nrsector
