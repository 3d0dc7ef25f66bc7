/*
 * operators.hpp: semigroup generators on finite weighted measure spaces.
 *
 * A matrix A is accepted as a generator when
 *
 *   (1) it is self-adjoint on L^2(mu):  D A = A^H D with D = diag(mu),
 *   (2) it is positive semidefinite:    H = D^(1/2) A D^(-1/2) has
 *       eigenvalues >= 0,
 *   (3) the semigroup T(t) = e^(-tA) is L^oo-contractive, checked on a
 *       geometric time grid, and
 *   (4) T(t) is L^1-contractive on the same grid (equivalent to (3) by
 *       duality; both norms are computed exactly and checked).
 *
 * The semigroup of a valid generator is evaluated through the Hermitian
 * eigendecomposition H = U L U^H:
 *
 *   e^(-zA) = D^(-1/2) U e^(-zL) U^H D^(1/2),   Re z >= 0.
 *
 * Eigenvalues within the PSD tolerance of 0 are clamped to 0 before
 * exponentiation, so e^(-zL) never grows along the positive time axis.
 * euler_approx provides an independent route to T(t) through resolvent
 * powers (I + (t/n)A)^(-n), which converges to e^(-tA) as n -> oo.
 *
 * Operator norms on L^p(mu): for M acting on functions,
 *
 *   ||M||_oo = max_j sum_k |M_jk|
 *   ||M||_1  = max_k (1/mu_k) sum_j mu_j |M_jk|
 *   ||M||_2  = largest singular value of D^(1/2) M D^(-1/2)
 *
 * and for general p a certified lower bound is produced by a power method
 * on the unweighted similarity D^(1/p) M D^(-1/p) (the map f -> D^(1/p) f
 * is an isometry from L^p(mu) onto unweighted l^p). Every estimate the
 * power method emits is of the form ||Mx||_p / ||x||_p, hence a true lower
 * bound; the sequence of estimates within one run is nondecreasing.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "core.hpp"
#include "rng.hpp"

namespace nrsector {

struct ValidationTolerances {
  double self_adjoint = 1e-12;   // entrywise defect of D A - A^H D
  double psd = 1e-10;            // admissible negative part of the spectrum
  double contraction = 1e-9;     // admissible excess over operator norm 1
};

// 20 geometric time points spanning [1e-3, 1e2].
inline std::vector<double> default_validation_grid() {
  std::vector<double> grid(20);
  for (int k = 0; k < 20; ++k)
    grid[k] = std::pow(10.0, -3.0 + 5.0 * k / 19.0);
  return grid;
}

struct ValidationReport {
  bool self_adjoint_ok = false;
  bool psd_ok = false;
  bool linf_contractive_ok = false;
  bool l1_contractive_ok = false;

  double self_adjoint_defect = 0.0;
  double min_eigenvalue = 0.0;
  double worst_linf_norm = 0.0;
  double worst_linf_t = 0.0;
  double worst_l1_norm = 0.0;
  double worst_l1_t = 0.0;

  bool valid() const {
    return self_adjoint_ok && psd_ok && linf_contractive_ok && l1_contractive_ok;
  }

  std::string failure_summary() const {
    std::string s;
    auto append = [&s](const std::string& part) {
      if (!s.empty()) s += "; ";
      s += part;
    };
    if (!self_adjoint_ok)
      append("not self-adjoint on L^2(mu) (defect " + std::to_string(self_adjoint_defect) + ")");
    if (!psd_ok)
      append("not positive semidefinite (min eigenvalue " + std::to_string(min_eigenvalue) + ")");
    if (!linf_contractive_ok)
      append("not L^oo-contractive (norm " + std::to_string(worst_linf_norm) + " at t = " +
             std::to_string(worst_linf_t) + ")");
    if (!l1_contractive_ok)
      append("not L^1-contractive (norm " + std::to_string(worst_l1_norm) + " at t = " +
             std::to_string(worst_l1_t) + ")");
    return s;
  }
};

// A matrix together with the measure space it acts on.
struct OperatorMatrix {
  OperatorMatrix(Eigen::MatrixXcd matrix_, FiniteMeasureSpace space_)
      : matrix(std::move(matrix_)), space(std::move(space_)) {
    if (matrix.rows() != matrix.cols() || matrix.rows() != space.size())
      throw std::invalid_argument("OperatorMatrix: matrix shape does not match the space");
  }

  Eigen::MatrixXcd matrix;
  FiniteMeasureSpace space;
};

// Exact L^oo -> L^oo operator norm: max absolute row sum.
inline double linf_operator_norm(const OperatorMatrix& op) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < op.matrix.rows(); ++j) {
    detail::KahanSum row;
    for (Eigen::Index k = 0; k < op.matrix.cols(); ++k) row.add(std::abs(op.matrix(j, k)));
    worst = std::max(worst, row.value());
  }
  return worst;
}

// Exact L^1(mu) -> L^1(mu) operator norm: max over columns k of
// (1/mu_k) sum_j mu_j |M_jk| (the norm of the image of the unit atom at k).
inline double l1_operator_norm(const OperatorMatrix& op) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < op.matrix.cols(); ++k) {
    detail::KahanSum col;
    for (Eigen::Index j = 0; j < op.matrix.rows(); ++j)
      col.add(op.space.weight(j) * std::abs(op.matrix(j, k)));
    worst = std::max(worst, col.value() / op.space.weight(k));
  }
  return worst;
}

namespace detail {

struct SpectralData {
  Eigen::VectorXd eigenvalues;       // of H = D^(1/2) A D^(-1/2), ascending, raw
  Eigen::VectorXd clamped;           // negatives clamped to 0
  Eigen::MatrixXcd basis;            // unitary U with H = U diag(eigenvalues) U^H
  Eigen::VectorXd sqrt_weights;      // mu_j^(1/2)
  Eigen::VectorXd inv_sqrt_weights;  // mu_j^(-1/2)
};

// Eigendecomposition of the Hermitian part of H = D^(1/2) A D^(-1/2). For a
// self-adjoint generator the Hermitian part equals H up to the self-adjoint
// defect.
inline SpectralData spectral_data(const Eigen::MatrixXcd& matrix,
                                  const FiniteMeasureSpace& space) {
  SpectralData data;
  data.sqrt_weights = space.weights().cwiseSqrt();
  data.inv_sqrt_weights = data.sqrt_weights.cwiseInverse();
  Eigen::MatrixXcd h =
      data.sqrt_weights.asDiagonal() * matrix * data.inv_sqrt_weights.asDiagonal();
  h = 0.5 * (h + h.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("spectral_data: eigendecomposition failed");
  data.eigenvalues = solver.eigenvalues();
  data.basis = solver.eigenvectors();
  data.clamped = data.eigenvalues.cwiseMax(0.0);
  return data;
}

// e^(-zA) assembled from precomputed spectral data. Clamping is reserved
// for validated generators, where any negative eigenvalue is rounding noise
// within the psd tolerance; validation itself must exponentiate the raw
// spectrum, or the contraction checks could never fail for spectral reasons.
inline Eigen::MatrixXcd exponential_from_spectrum(const SpectralData& data, Complex z,
                                                  bool clamp_spectrum = true) {
  const Eigen::VectorXd& spectrum = clamp_spectrum ? data.clamped : data.eigenvalues;
  const Eigen::Index n = data.eigenvalues.size();
  Eigen::VectorXcd phases(n);
  for (Eigen::Index j = 0; j < n; ++j) phases[j] = std::exp(-z * spectrum[j]);
  const Eigen::MatrixXcd core =
      data.basis * phases.asDiagonal() * data.basis.adjoint();
  return data.inv_sqrt_weights.asDiagonal() * core * data.sqrt_weights.asDiagonal();
}

}  // namespace detail

// Checks the four generator conditions. The semigroup used for the
// contraction checks is built from the raw Hermitian-part spectrum (no
// clamping), so an exponentially growing mode shows up as a failed grid
// check; it agrees with the true semigroup whenever the self-adjointness
// check passes.
inline ValidationReport validate_generator(
    const Eigen::MatrixXcd& matrix, const FiniteMeasureSpace& space,
    const std::vector<double>& t_grid = default_validation_grid(),
    const ValidationTolerances& tols = {}) {
  if (matrix.rows() != matrix.cols() || matrix.rows() != space.size())
    throw std::invalid_argument("validate_generator: matrix shape does not match the space");

  ValidationReport report;

  double defect = 0.0;
  for (Eigen::Index j = 0; j < matrix.rows(); ++j)
    for (Eigen::Index k = 0; k < matrix.cols(); ++k)
      defect = std::max(defect, std::abs(space.weight(j) * matrix(j, k) -
                                         std::conj(matrix(k, j)) * space.weight(k)));
  report.self_adjoint_defect = defect;
  report.self_adjoint_ok = defect <= tols.self_adjoint;

  const detail::SpectralData data = detail::spectral_data(matrix, space);
  report.min_eigenvalue = data.eigenvalues.minCoeff();
  report.psd_ok = report.min_eigenvalue >= -tols.psd;

  report.worst_linf_norm = 0.0;
  report.worst_l1_norm = 0.0;
  for (const double t : t_grid) {
    if (!(t > 0.0)) throw std::invalid_argument("validate_generator: grid times must be positive");
    const OperatorMatrix semigroup(
        detail::exponential_from_spectrum(data, Complex(t, 0.0), /*clamp_spectrum=*/false),
        space);
    const double linf = linf_operator_norm(semigroup);
    const double l1 = l1_operator_norm(semigroup);
    if (linf > report.worst_linf_norm) {
      report.worst_linf_norm = linf;
      report.worst_linf_t = t;
    }
    if (l1 > report.worst_l1_norm) {
      report.worst_l1_norm = l1;
      report.worst_l1_t = t;
    }
  }
  report.linf_contractive_ok = report.worst_linf_norm <= 1.0 + tols.contraction;
  report.l1_contractive_ok = report.worst_l1_norm <= 1.0 + tols.contraction;
  return report;
}

// A validated generator. Construction throws std::invalid_argument when any
// validation check fails; afterwards the spectral data is cached and the
// semigroup can be evaluated at any z with Re z >= 0.
class Generator {
 public:
  Generator(Eigen::MatrixXcd matrix, FiniteMeasureSpace space, std::string label = "generator",
            const std::vector<double>& t_grid = default_validation_grid(),
            const ValidationTolerances& tols = {})
      : matrix_(std::move(matrix)),
        space_(std::move(space)),
        label_(std::move(label)),
        report_(validate_generator(matrix_, space_, t_grid, tols)),
        data_(detail::spectral_data(matrix_, space_)) {
    if (!report_.valid())
      throw std::invalid_argument("Generator '" + label_ + "': " + report_.failure_summary());
  }

  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  const FiniteMeasureSpace& space() const { return space_; }
  const std::string& label() const { return label_; }
  const ValidationReport& report() const { return report_; }
  Eigen::Index size() const { return space_.size(); }

  // Spectrum of H = D^(1/2) A D^(-1/2), ascending, negatives clamped to 0.
  const Eigen::VectorXd& spectrum() const { return data_.clamped; }

  friend OperatorMatrix semigroup_at(const Generator& gen, Complex z);

 private:
  Eigen::MatrixXcd matrix_;
  FiniteMeasureSpace space_;
  std::string label_;
  ValidationReport report_;
  detail::SpectralData data_;
};

// T(z) = e^(-zA) for Re z >= 0.
inline OperatorMatrix semigroup_at(const Generator& gen, Complex z) {
  if (z.real() < 0.0)
    throw std::domain_error("semigroup_at: Re z must be nonnegative");
  return OperatorMatrix(detail::exponential_from_spectrum(gen.data_, z), gen.space());
}

// Euler scheme (I + (t/n)A)^(-n). Independent of the spectral route; the
// resolvent is inverted by full-pivot LU and raised to the n-th power by
// repeated squaring.
inline OperatorMatrix euler_approx(const Generator& gen, double t, long n) {
  if (!(t >= 0.0)) throw std::domain_error("euler_approx: t must be nonnegative");
  if (n < 1) throw std::domain_error("euler_approx: n must be a positive integer");
  const Eigen::Index dim = gen.size();
  const Eigen::MatrixXcd step =
      Eigen::MatrixXcd::Identity(dim, dim) + (t / static_cast<double>(n)) * gen.matrix();
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(step);
  if (!lu.isInvertible())
    throw std::runtime_error("euler_approx: I + (t/n)A is singular");
  Eigen::MatrixXcd base = lu.inverse();
  Eigen::MatrixXcd power = Eigen::MatrixXcd::Identity(dim, dim);
  for (long e = n; e > 0; e >>= 1) {
    if (e & 1) power = (power * base).eval();
    if (e > 1) base = (base * base).eval();
  }
  return OperatorMatrix(std::move(power), gen.space());
}

namespace detail {

inline double unweighted_p_norm(const Eigen::VectorXcd& v, double p) {
  double maxabs = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j) maxabs = std::max(maxabs, std::abs(v[j]));
  if (maxabs == 0.0) return 0.0;
  KahanSum s;
  for (Eigen::Index j = 0; j < v.size(); ++j) s.add(std::pow(std::abs(v[j]) / maxabs, p));
  return maxabs * std::pow(s.value(), 1.0 / p);
}

inline Eigen::VectorXcd entrywise_duality(const Eigen::VectorXcd& v, double p) {
  Eigen::VectorXcd out(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) out[j] = duality_scalar(v[j], p);
  return out;
}

// Power method for the unweighted l^p -> l^p norm of B from one start.
// Appends every norm estimate ||B x_k||_p (with ||x_k||_p = 1) to
// `estimates`; each is a certified lower bound and the sequence is
// nondecreasing.
inline void pnorm_power_run(const Eigen::MatrixXcd& b, double p, Eigen::VectorXcd x,
                            std::vector<double>& estimates, int max_iterations = 200) {
  const double q = p / (p - 1.0);
  const double start_norm = unweighted_p_norm(x, p);
  if (start_norm == 0.0) return;
  x /= start_norm;
  double previous = -1.0;
  for (int iter = 0; iter < max_iterations; ++iter) {
    const Eigen::VectorXcd y = b * x;
    const double gamma = unweighted_p_norm(y, p);
    estimates.push_back(gamma);
    if (gamma == 0.0) return;
    if (gamma <= previous * (1.0 + 1e-14)) return;
    previous = gamma;
    const Eigen::VectorXcd z = b.adjoint() * entrywise_duality(y, p);
    const Eigen::VectorXcd next = entrywise_duality(z, q);
    const double next_norm = unweighted_p_norm(next, p);
    if (next_norm == 0.0) return;
    x = next / next_norm;
  }
}

}  // namespace detail

// Certified lower bound for the L^p(mu) -> L^p(mu) operator norm. Exact for
// p in {1, 2, oo}; for other p, the best power-method estimate over
// 1 + n + restarts starts (all-ones, the unit atoms, then random).
inline double operator_pnorm_lower_bound(const OperatorMatrix& op, Exponent p, int restarts = 8,
                                         std::uint64_t seed = 0) {
  if (p.is_inf()) return linf_operator_norm(op);
  const double pv = p.value();
  if (pv == 1.0) return l1_operator_norm(op);

  const Eigen::Index n = op.matrix.rows();
  const Eigen::VectorXd mu = op.space.weights();
  if (pv == 2.0) {
    const Eigen::MatrixXcd sym = mu.cwiseSqrt().asDiagonal() * op.matrix *
                                 mu.cwiseSqrt().cwiseInverse().asDiagonal();
    return sym.jacobiSvd().singularValues()[0];
  }

  const Eigen::VectorXd scale = mu.array().pow(1.0 / pv).matrix();
  const Eigen::MatrixXcd b =
      scale.asDiagonal() * op.matrix * scale.cwiseInverse().asDiagonal();

  if (restarts < 0) throw std::invalid_argument("operator_pnorm_lower_bound: restarts < 0");
  std::vector<double> estimates;
  detail::pnorm_power_run(b, pv, Eigen::VectorXcd::Ones(n), estimates);
  for (Eigen::Index j = 0; j < n; ++j)
    detail::pnorm_power_run(b, pv, Eigen::VectorXcd::Unit(n, j), estimates);
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng = substream(seed, static_cast<std::uint64_t>(r));
    detail::pnorm_power_run(b, pv, complex_gaussian_vector(rng, n), estimates);
  }
  double best = 0.0;
  for (const double e : estimates) best = std::max(best, e);
  return best;
}

// The one-parameter family A = [[1, -conj(lambda)], [-lambda, 1]] on the
// two-atom space with unit weights, for unimodular lambda. Spectrum {0, 2};
// the semigroup e^(-tA) = e^(-t) (cosh(t) I + sinh(t) B) with
// B = [[0, conj(lambda)], [lambda, 0]] has L^oo norm exactly 1 for all t.
inline Generator make_lambda_family(Complex lambda) {
  if (std::abs(std::abs(lambda) - 1.0) > 1e-12)
    throw std::domain_error("make_lambda_family: lambda must be unimodular");
  Eigen::MatrixXcd a(2, 2);
  a << 1.0, -std::conj(lambda), -lambda, 1.0;
  char label[64];
  std::snprintf(label, sizeof(label), "lambda:%.17g,%.17g", lambda.real(), lambda.imag());
  return Generator(std::move(a), FiniteMeasureSpace::uniform(2), label);
}

// Weighted graph Laplacian A_jj = d_j, A_jk = -W_jk (j != k). Requirements:
// zero diagonal, W >= 0 entrywise, detailed balance mu_j W_jk = mu_k W_kj,
// and diagonal dominance sum_k W_jk <= d_j. These force all four generator
// conditions for every t, not only on the validation grid: A is similar to
// a PSD matrix via D^(1/2), and e^(-tA) is entrywise nonnegative with row
// sums <= 1.
inline Generator make_graph_laplacian(const Eigen::MatrixXd& w, const Eigen::VectorXd& d,
                                      const FiniteMeasureSpace& space,
                                      std::string label = "laplacian") {
  const Eigen::Index n = space.size();
  if (w.rows() != n || w.cols() != n || d.size() != n)
    throw std::invalid_argument("make_graph_laplacian: shapes do not match the space");
  for (Eigen::Index j = 0; j < n; ++j) {
    if (w(j, j) != 0.0)
      throw std::invalid_argument("make_graph_laplacian: row " + std::to_string(j) +
                                  " has a nonzero diagonal coupling");
    detail::KahanSum row;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (!(w(j, k) >= 0.0))
        throw std::invalid_argument("make_graph_laplacian: row " + std::to_string(j) +
                                    " has a negative coupling");
      if (std::abs(space.weight(j) * w(j, k) - space.weight(k) * w(k, j)) > 1e-12)
        throw std::invalid_argument("make_graph_laplacian: row " + std::to_string(j) +
                                    " breaks detailed balance mu_j W_jk = mu_k W_kj");
      row.add(w(j, k));
    }
    if (!(row.value() <= d(j) + 1e-12))
      throw std::invalid_argument("make_graph_laplacian: row " + std::to_string(j) +
                                  " is not diagonally dominant (coupling sum " +
                                  std::to_string(row.value()) + " > d_j = " + std::to_string(d(j)) +
                                  ")");
  }
  Eigen::MatrixXcd a = (-w).cast<Complex>();
  for (Eigen::Index j = 0; j < n; ++j) a(j, j) = d(j);
  return Generator(std::move(a), space, std::move(label));
}

// Random valid generator on a random weighted space (weights U[0.5, 2]).
//
// positivity_preserving = true: a random graph Laplacian. A symmetric
// coupling S_jk = S_kj ~ U[0, 1] is divided by mu_j to enforce detailed
// balance, and d_j adds U[0, 1] slack on top of the row sum; such a
// generator is valid by construction.
//
// positivity_preserving = false: H' = V diag(eta) V^H with Haar unitary V
// and eta_j ~ U[0, 2], mapped to A = D^(-1/2) H' D^(1/2). Conditions (1)
// and (2) hold by construction; the draw is accepted only if A is
// diagonally dominant (Re A_jj >= sum_{k != j} |A_jk|), which guarantees
// L^oo-contractivity for every t by entrywise domination against the
// comparison Laplacian L_jj = Re A_jj, L_jk = -|A_jk|. Full grid validation
// still runs inside the Generator constructor. Throws std::runtime_error
// when 10000 draws produce no dominant matrix.
inline Generator random_generator(Eigen::Index n, std::uint64_t seed,
                                  bool positivity_preserving) {
  if (n < 1) throw std::invalid_argument("random_generator: n must be >= 1");
  std::mt19937_64 rng = substream(seed, positivity_preserving ? 0 : 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> weight_dist(0.5, 2.0);

  char label[64];
  std::snprintf(label, sizeof(label), "random:%lld%s", static_cast<long long>(n),
                positivity_preserving ? ":pp" : "");

  if (positivity_preserving) {
    Eigen::VectorXd mu(n);
    for (Eigen::Index j = 0; j < n; ++j) mu[j] = weight_dist(rng);
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = j + 1; k < n; ++k) s(j, k) = s(k, j) = unit(rng);
    Eigen::MatrixXd w(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k) w(j, k) = (j == k) ? 0.0 : s(j, k) / mu[j];
    Eigen::VectorXd d(n);
    for (Eigen::Index j = 0; j < n; ++j) d[j] = w.row(j).sum() + unit(rng);
    return make_graph_laplacian(w, d, FiniteMeasureSpace(mu), label);
  }

  constexpr int kBudget = 10000;
  std::uniform_real_distribution<double> eig_dist(0.0, 2.0);
  for (int attempt = 0; attempt < kBudget; ++attempt) {
    Eigen::VectorXd mu(n);
    for (Eigen::Index j = 0; j < n; ++j) mu[j] = weight_dist(rng);
    Eigen::VectorXd eta(n);
    for (Eigen::Index j = 0; j < n; ++j) eta[j] = eig_dist(rng);
    const Eigen::MatrixXcd v = haar_unitary(rng, n);
    const Eigen::MatrixXcd h = v * eta.asDiagonal() * v.adjoint();
    const Eigen::VectorXd sqrt_mu = mu.cwiseSqrt();
    const Eigen::MatrixXcd a =
        sqrt_mu.cwiseInverse().asDiagonal() * h * sqrt_mu.asDiagonal();

    bool dominant = true;
    for (Eigen::Index j = 0; j < n && dominant; ++j) {
      detail::KahanSum off;
      for (Eigen::Index k = 0; k < n; ++k)
        if (k != j) off.add(std::abs(a(j, k)));
      dominant = a(j, j).real() >= off.value() - 1e-12;
    }
    if (!dominant) continue;
    return Generator(a, FiniteMeasureSpace(mu), label);
  }
  throw std::runtime_error(
      "random_generator: no diagonally dominant draw within 10000 attempts");
}

}  // namespace nrsector
