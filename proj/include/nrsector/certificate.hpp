/*
 * certificate.hpp: checkable decompositions of the difference form.
 *
 * Fix a generator A, a time t > 0 with T = e^(-tA), a partition of the
 * atoms into blocks B_1..B_m, and nonzero block coefficients c_1..c_m.
 * For the block-constant function f = sum_j c_j 1_Bj put
 *
 *   d_j      = mu(B_j)
 *   a_kj     = <T 1_Bj, 1_Bk>            (a Hermitian m x m matrix)
 *   lambda_kj = a_kj / |a_kj|            (:= 1 when a_kj = 0)
 *
 * Then the difference form splits into manifestly sectorial pieces:
 *
 *   <(I - T) f, F_p(f)> = sum_j (d_j - sum_k |a_kj|) |c_j|^p        (>= 0)
 *     + sum_{j,k} (1/2) |a_kj| (l_kj c_j - c_k) conj(F_p(l_kj c_j) - F_p(c_k))
 *
 * (l = lambda). The first sum is nonnegative because L^1-contractivity
 * gives sum_k |a_kj| <= ||T 1_Bj||_1 <= d_j; every summand of the second
 * sum is a two-point form (1/2)|a_kj| lp_form(c_k, l_kj c_j, p) and lies
 * in Sigma_p. A Certificate materializes all these quantities at the raw
 * (unnormalized) scale of f, together with the directly computed form, so
 * the identity can be checked to rounding error.
 *
 * The same data compresses T to the quotient space: with weights d_j, the
 * matrix S_jk = a_jk / d_j equals J* T J, where J c = sum c_k 1_Bk embeds
 * block-constant functions and J* takes block averages. S inherits the
 * L^1 and L^oo contraction bounds, and the reduction identity
 *
 *   <(I - S) c, F_p(c)>_quotient = <(I - T) J c, F_p(J c)>
 *
 * transports difference forms between the two spaces.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "core.hpp"
#include "numerical_range.hpp"
#include "operators.hpp"
#include "scalar_forms.hpp"

namespace nrsector {

// A partition of the atom indices {0..n-1} into nonempty disjoint blocks
// covering everything.
class Partition {
 public:
  Partition(std::vector<std::vector<Eigen::Index>> blocks, Eigen::Index ground_size)
      : blocks_(std::move(blocks)), n_(ground_size) {
    if (n_ < 1) throw std::invalid_argument("Partition: empty ground set");
    if (blocks_.empty()) throw std::invalid_argument("Partition: no blocks");
    std::vector<bool> seen(static_cast<std::size_t>(n_), false);
    for (const auto& block : blocks_) {
      if (block.empty()) throw std::invalid_argument("Partition: empty block");
      for (const Eigen::Index j : block) {
        if (j < 0 || j >= n_)
          throw std::invalid_argument("Partition: index out of range");
        if (seen[static_cast<std::size_t>(j)])
          throw std::invalid_argument("Partition: blocks are not disjoint");
        seen[static_cast<std::size_t>(j)] = true;
      }
    }
    for (Eigen::Index j = 0; j < n_; ++j)
      if (!seen[static_cast<std::size_t>(j)])
        throw std::invalid_argument("Partition: blocks do not cover every atom");
  }

  // Every atom its own block.
  static Partition identity(Eigen::Index n) {
    std::vector<std::vector<Eigen::Index>> blocks(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) blocks[static_cast<std::size_t>(j)] = {j};
    return Partition(std::move(blocks), n);
  }

  // All atoms in one block.
  static Partition single_block(Eigen::Index n) {
    std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) all[static_cast<std::size_t>(j)] = j;
    return Partition({std::move(all)}, n);
  }

  Eigen::Index ground_size() const { return n_; }
  Eigen::Index count() const { return static_cast<Eigen::Index>(blocks_.size()); }
  const std::vector<Eigen::Index>& block(Eigen::Index i) const {
    return blocks_.at(static_cast<std::size_t>(i));
  }

  // d_i = mu(B_i).
  Eigen::VectorXd block_measures(const FiniteMeasureSpace& space) const {
    require_space(space);
    Eigen::VectorXd d(count());
    for (Eigen::Index i = 0; i < count(); ++i) {
      detail::KahanSum s;
      for (const Eigen::Index j : block(i)) s.add(space.weight(j));
      d[i] = s.value();
    }
    return d;
  }

  // The quotient space: one atom per block, weight mu(B_i).
  FiniteMeasureSpace quotient_space(const FiniteMeasureSpace& space) const {
    return FiniteMeasureSpace(block_measures(space));
  }

  CVec indicator(const FiniteMeasureSpace& space, Eigen::Index i) const {
    require_space(space);
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n_);
    for (const Eigen::Index j : block(i)) e[j] = 1.0;
    return CVec(space, std::move(e));
  }

  // J as a matrix: column i is the indicator of B_i.
  Eigen::MatrixXcd embed_matrix() const {
    Eigen::MatrixXcd j = Eigen::MatrixXcd::Zero(n_, count());
    for (Eigen::Index i = 0; i < count(); ++i)
      for (const Eigen::Index atom : block(i)) j(atom, i) = 1.0;
    return j;
  }

  // J c = sum_i c_i 1_Bi.
  CVec embed(const FiniteMeasureSpace& space, const Eigen::VectorXcd& c) const {
    require_space(space);
    if (c.size() != count())
      throw std::invalid_argument("Partition: coefficient count does not match block count");
    return CVec(space, embed_matrix() * c);
  }

  // J* as a matrix: row i averages over B_i, (J* f)_i = mu(B_i)^(-1)
  // sum_{j in B_i} mu_j f_j. J* J = identity on the quotient.
  Eigen::MatrixXcd average_matrix(const FiniteMeasureSpace& space) const {
    const Eigen::VectorXd d = block_measures(space);
    Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(count(), n_);
    for (Eigen::Index i = 0; i < count(); ++i)
      for (const Eigen::Index atom : block(i)) avg(i, atom) = space.weight(atom) / d[i];
    return avg;
  }

 private:
  void require_space(const FiniteMeasureSpace& space) const {
    if (space.size() != n_)
      throw std::invalid_argument("Partition: space size does not match the ground set");
  }

  std::vector<std::vector<Eigen::Index>> blocks_;
  Eigen::Index n_;
};

// All quantities of the decomposition, at the raw scale of f = J c.
struct Certificate {
  double t = 0.0;
  double p = 2.0;
  Eigen::VectorXcd c;
  Eigen::VectorXd d;        // block measures
  Eigen::MatrixXcd a;       // a(k, j) = <T 1_Bj, 1_Bk>
  Eigen::MatrixXcd lambda;  // unimodular phases of a
  double first_sum = 0.0;   // sum_j (d_j - sum_k |a_kj|) |c_j|^p
  Eigen::MatrixXcd terms;   // terms(j, k) = (1/2)|a_kj| lp_form(c_k, lambda_kj c_j, p)
  Complex total = 0.0;      // first_sum + sum of terms
  Complex direct_value = 0.0;  // <(I - T) f, F_p(f)> computed directly
  double residual = 0.0;       // |total - direct_value|
};

inline Certificate build_certificate(const Generator& gen, double t, const Partition& partition,
                                     const Eigen::VectorXcd& c, Exponent p) {
  const double pv = detail::interior_exponent(p, "build_certificate");
  if (!(t > 0.0)) throw std::domain_error("build_certificate: t must be positive");
  if (partition.ground_size() != gen.size())
    throw std::invalid_argument("build_certificate: partition does not match the generator");
  if (c.size() != partition.count())
    throw std::invalid_argument("build_certificate: coefficient count does not match blocks");
  for (Eigen::Index j = 0; j < c.size(); ++j)
    if (std::abs(c[j]) == 0.0)
      throw std::domain_error("build_certificate: block coefficients must be nonzero");

  const Eigen::Index m = partition.count();
  Certificate cert;
  cert.t = t;
  cert.p = pv;
  cert.c = c;
  cert.d = partition.block_measures(gen.space());

  const Eigen::MatrixXcd semigroup = semigroup_at(gen, Complex(t, 0.0)).matrix;
  const Eigen::MatrixXcd images = semigroup * partition.embed_matrix();  // T 1_Bj in column j
  cert.a.resize(m, m);
  for (Eigen::Index k = 0; k < m; ++k)
    for (Eigen::Index j = 0; j < m; ++j) {
      detail::KahanComplexSum s;
      for (const Eigen::Index atom : partition.block(k))
        s.add(images(atom, j) * gen.space().weight(atom));
      cert.a(k, j) = s.value();
    }

  cert.lambda.resize(m, m);
  for (Eigen::Index k = 0; k < m; ++k)
    for (Eigen::Index j = 0; j < m; ++j) {
      const double mod = std::abs(cert.a(k, j));
      cert.lambda(k, j) = mod == 0.0 ? Complex(1.0, 0.0) : cert.a(k, j) / mod;
    }

  detail::KahanSum first;
  for (Eigen::Index j = 0; j < m; ++j) {
    detail::KahanSum mass;
    for (Eigen::Index k = 0; k < m; ++k) mass.add(std::abs(cert.a(k, j)));
    first.add((cert.d[j] - mass.value()) * std::pow(std::abs(c[j]), pv));
  }
  cert.first_sum = first.value();

  cert.terms.resize(m, m);
  detail::KahanComplexSum total;
  total.add(Complex(cert.first_sum, 0.0));
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index k = 0; k < m; ++k) {
      cert.terms(j, k) =
          0.5 * std::abs(cert.a(k, j)) * lp_form(c[k], cert.lambda(k, j) * c[j], pv);
      total.add(cert.terms(j, k));
    }
  cert.total = total.value();

  const CVec f = partition.embed(gen.space(), c);
  cert.direct_value = detail::difference_form_raw(gen, t, f, pv);
  cert.residual = std::abs(cert.total - cert.direct_value);
  return cert;
}

// Pass/fail record for every property a certificate asserts.
struct CertificateChecks {
  bool a_hermitian = false;
  bool first_sum_nonnegative = false;
  bool column_mass_dominated = false;  // sum_k |a_kj| <= d_j
  bool terms_in_sector = false;
  bool total_in_sector = false;
  bool identity_holds = false;

  double hermitian_defect = 0.0;
  double first_sum = 0.0;
  double worst_column_excess = 0.0;   // max_j (sum_k |a_kj| - d_j)
  double worst_term_arg = 0.0;        // max |arg| over terms of modulus > 1e-12
  double total_arg = 0.0;
  double identity_residual = 0.0;     // relative to max(1, |direct_value|)

  bool all_passed() const {
    return a_hermitian && first_sum_nonnegative && column_mass_dominated && terms_in_sector &&
           total_in_sector && identity_holds;
  }
};

inline CertificateChecks check_certificate(const Certificate& cert) {
  const Eigen::Index m = cert.a.rows();
  const Sector sector = sector_for_exponent(Exponent(cert.p));
  CertificateChecks checks;

  for (Eigen::Index k = 0; k < m; ++k)
    for (Eigen::Index j = 0; j < m; ++j)
      checks.hermitian_defect =
          std::max(checks.hermitian_defect, std::abs(cert.a(k, j) - std::conj(cert.a(j, k))));
  checks.a_hermitian = checks.hermitian_defect <= 1e-12;

  checks.first_sum = cert.first_sum;
  checks.first_sum_nonnegative = cert.first_sum >= -1e-12;

  checks.worst_column_excess = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < m; ++j) {
    detail::KahanSum mass;
    for (Eigen::Index k = 0; k < m; ++k) mass.add(std::abs(cert.a(k, j)));
    checks.worst_column_excess = std::max(checks.worst_column_excess, mass.value() - cert.d[j]);
  }
  checks.column_mass_dominated = checks.worst_column_excess <= 1e-12;

  checks.terms_in_sector = true;
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index k = 0; k < m; ++k) {
      const Complex term = cert.terms(j, k);
      if (!in_sector(term, sector)) checks.terms_in_sector = false;
      if (std::abs(term) > 1e-12)
        checks.worst_term_arg = std::max(checks.worst_term_arg, std::abs(std::arg(term)));
    }

  checks.total_arg = std::abs(cert.total) > 1e-12 ? std::abs(std::arg(cert.total)) : 0.0;
  checks.total_in_sector = in_sector(cert.total, sector);

  checks.identity_residual = cert.residual / std::max(1.0, std::abs(cert.direct_value));
  checks.identity_holds = checks.identity_residual <= 1e-10;
  return checks;
}

// Compression S = J* T(t) J to the quotient space: S_jk = a_jk / d_j. S
// satisfies the same L^1 and L^oo contraction bounds as T(t).
inline OperatorMatrix compress(const Generator& gen, double t, const Partition& partition) {
  if (!(t > 0.0)) throw std::domain_error("compress: t must be positive");
  if (partition.ground_size() != gen.size())
    throw std::invalid_argument("compress: partition does not match the generator");
  const Eigen::Index m = partition.count();
  const Eigen::VectorXd d = partition.block_measures(gen.space());
  const Eigen::MatrixXcd semigroup = semigroup_at(gen, Complex(t, 0.0)).matrix;
  const Eigen::MatrixXcd images = semigroup * partition.embed_matrix();
  Eigen::MatrixXcd s(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index k = 0; k < m; ++k) {
      detail::KahanComplexSum sum;
      for (const Eigen::Index atom : partition.block(j))
        sum.add(images(atom, k) * gen.space().weight(atom));
      s(j, k) = sum.value() / d[j];
    }
  return OperatorMatrix(std::move(s), partition.quotient_space(gen.space()));
}

// | <(I - S) c, F_p(c)>_quotient - <(I - T) J c, F_p(J c)> |, both sides at
// raw scale. Zero in exact arithmetic.
inline double verify_reduction_identity(const Generator& gen, double t,
                                        const Partition& partition, const Eigen::VectorXcd& c,
                                        Exponent p) {
  const double pv = detail::interior_exponent(p, "verify_reduction_identity");
  if (c.size() != partition.count())
    throw std::invalid_argument("verify_reduction_identity: coefficient count mismatch");

  const OperatorMatrix s = compress(gen, t, partition);
  const CVec cq(s.space, c);
  const CVec image(s.space, c - s.matrix * c);
  const Complex quotient_side = pairing(image, duality_map(cq, Exponent(pv)));

  const CVec f = partition.embed(gen.space(), c);
  const Complex full_side = detail::difference_form_raw(gen, t, f, pv);
  return std::abs(quotient_side - full_side);
}

}  // namespace nrsector
