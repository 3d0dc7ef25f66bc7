/*
 * serialize.hpp: JSON and CSV views of the result types.
 *
 * Conventions: complex numbers serialize as [re, im]; matrices as arrays
 * of rows; keys keep insertion order (nlohmann::ordered_json) so equal
 * inputs produce byte-identical files. CSV numbers are printed with %.17g
 * (round-trip exact). Files are written atomically: the content goes to a
 * sibling temporary which is then renamed over the target.
 */

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "analytic_sector.hpp"
#include "certificate.hpp"
#include "core.hpp"
#include "numerical_range.hpp"
#include "operators.hpp"
#include "scalar_forms.hpp"

namespace nrsector {

using Json = nlohmann::ordered_json;

inline Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json to_json(const Eigen::VectorXcd& v) {
  Json arr = Json::array();
  for (Eigen::Index j = 0; j < v.size(); ++j) arr.push_back(to_json(v[j]));
  return arr;
}

inline Json to_json(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index j = 0; j < v.size(); ++j) arr.push_back(v[j]);
  return arr;
}

inline Json to_json(const Eigen::MatrixXcd& m) {
  Json rows = Json::array();
  for (Eigen::Index j = 0; j < m.rows(); ++j) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(to_json(m(j, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index j = 0; j < m.rows(); ++j) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(j, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json to_json(const ValidationReport& report) {
  return Json{{"self_adjoint_ok", report.self_adjoint_ok},
              {"psd_ok", report.psd_ok},
              {"linf_contractive_ok", report.linf_contractive_ok},
              {"l1_contractive_ok", report.l1_contractive_ok},
              {"valid", report.valid()},
              {"self_adjoint_defect", report.self_adjoint_defect},
              {"min_eigenvalue", report.min_eigenvalue},
              {"worst_linf_norm", report.worst_linf_norm},
              {"worst_linf_t", report.worst_linf_t},
              {"worst_l1_norm", report.worst_l1_norm},
              {"worst_l1_t", report.worst_l1_t}};
}

inline Json to_json(const AngleReport& report) {
  Json witness = Json::array();
  for (const Complex w : report.witness) witness.push_back(to_json(w));
  return Json{{"best_angle", report.best_angle},
              {"best_value", to_json(report.best_value)},
              {"witness", std::move(witness)},
              {"target", report.target},
              {"gap", report.gap()}};
}

inline Json to_json(const ScalarSharpness& sharpness) {
  return Json{{"increment", to_json(sharpness.increment)},
              {"derivative", to_json(sharpness.derivative)},
              {"best_angle", sharpness.best().best_angle}};
}

inline Json to_json(const QuadFormSweep& sweep) {
  Json j = to_json(sweep.report);
  j["max_sine_identity_defect"] = sweep.max_sine_identity_defect;
  return j;
}

inline Json to_json(const DualityJacobian& jac) {
  return Json{{"matrix", Json::array({Json::array({jac.matrix(0, 0), jac.matrix(0, 1)}),
                                      Json::array({jac.matrix(1, 0), jac.matrix(1, 1)})})},
              {"radial_eigenvalue", jac.radial_eigenvalue},
              {"tangential_eigenvalue", jac.tangential_eigenvalue},
              {"radial_direction", Json::array({jac.radial_direction[0], jac.radial_direction[1]})},
              {"tangential_direction",
               Json::array({jac.tangential_direction[0], jac.tangential_direction[1]})}};
}

inline Json to_json(const RangeSample& sample, bool include_values = true) {
  Json j{{"p", sample.p},
         {"generator_id", sample.generator_id},
         {"seed", sample.seed},
         {"sample_count", sample.sample_count},
         {"max_abs_arg", sample.max_abs_arg}};
  if (include_values) {
    Json values = Json::array();
    for (const Complex v : sample.values) values.push_back(to_json(v));
    j["values"] = std::move(values);
  }
  return j;
}

inline Json to_json(const Certificate& cert) {
  return Json{{"t", cert.t},
              {"p", cert.p},
              {"c", to_json(cert.c)},
              {"d", to_json(cert.d)},
              {"a", to_json(cert.a)},
              {"lambda", to_json(cert.lambda)},
              {"first_sum", cert.first_sum},
              {"terms", to_json(cert.terms)},
              {"total", to_json(cert.total)},
              {"direct_value", to_json(cert.direct_value)},
              {"residual", cert.residual}};
}

inline Json to_json(const CertificateChecks& checks) {
  return Json{{"a_hermitian", checks.a_hermitian},
              {"first_sum_nonnegative", checks.first_sum_nonnegative},
              {"column_mass_dominated", checks.column_mass_dominated},
              {"terms_in_sector", checks.terms_in_sector},
              {"total_in_sector", checks.total_in_sector},
              {"identity_holds", checks.identity_holds},
              {"all_passed", checks.all_passed()},
              {"hermitian_defect", checks.hermitian_defect},
              {"first_sum", checks.first_sum},
              {"worst_column_excess", checks.worst_column_excess},
              {"worst_term_arg", checks.worst_term_arg},
              {"total_arg", checks.total_arg},
              {"identity_residual", checks.identity_residual}};
}

inline Json to_json(const RaySweep& sweep) {
  Json thetas = Json::array();
  for (const double t : sweep.theta_grid) thetas.push_back(t);
  Json radii = Json::array();
  for (const double r : sweep.radius_grid) radii.push_back(r);
  return Json{{"p", std::isinf(sweep.p) ? Json("inf") : Json(sweep.p)},
              {"critical_angle", sweep.critical_angle},
              {"theta_grid", std::move(thetas)},
              {"radius_grid", std::move(radii)},
              {"norm_estimates", to_json(sweep.norm_estimates)}};
}

namespace detail {

inline std::string g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace detail

// CSV with columns re,im,abs,arg, one row per sampled form value.
inline std::string to_csv(const RangeSample& sample) {
  std::string out = "re,im,abs,arg\n";
  for (const Complex v : sample.values) {
    out += detail::g17(v.real());
    out += ',';
    out += detail::g17(v.imag());
    out += ',';
    out += detail::g17(std::abs(v));
    out += ',';
    out += detail::g17(std::arg(v));
    out += '\n';
  }
  return out;
}

// CSV with columns theta,radius,norm_estimate,inside_sector; inside_sector
// is 1 when theta <= critical_angle.
inline std::string to_csv(const RaySweep& sweep) {
  std::string out = "theta,radius,norm_estimate,inside_sector\n";
  for (std::size_t ti = 0; ti < sweep.theta_grid.size(); ++ti)
    for (std::size_t ri = 0; ri < sweep.radius_grid.size(); ++ri) {
      out += detail::g17(sweep.theta_grid[ti]);
      out += ',';
      out += detail::g17(sweep.radius_grid[ri]);
      out += ',';
      out += detail::g17(
          sweep.norm_estimates(static_cast<Eigen::Index>(ti), static_cast<Eigen::Index>(ri)));
      out += ',';
      out += sweep.inside(ti) ? '1' : '0';
      out += '\n';
    }
  return out;
}

// Writes content to path through a sibling temporary plus rename, so a
// crash never leaves a half-written file at the target.
inline void atomic_write_text(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream stream(tmp, std::ios::binary | std::ios::trunc);
    if (!stream) throw std::runtime_error("atomic_write_text: cannot open " + tmp.string());
    stream.write(content.data(), static_cast<std::streamsize>(content.size()));
    stream.flush();
    if (!stream) throw std::runtime_error("atomic_write_text: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace nrsector
