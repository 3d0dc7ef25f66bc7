// nrsector CLI: runs the verification suites and emits JSON/CSV reports.
//
// Exit status: 0 when every check passed, 1 when a check failed, 2 on
// usage or input errors. Reports are written atomically and contain no
// timing data, so identical (config, seed, version) produce byte-identical
// files; wall time goes to stderr only.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <nrsector/nrsector.hpp>

namespace {

using nrsector::Complex;
using nrsector::Json;

struct CheckResult {
  std::string name;
  bool passed = false;
  double defect = 0.0;
  std::string detail;
};

Json checks_to_json(const std::vector<CheckResult>& checks) {
  Json arr = Json::array();
  for (const CheckResult& c : checks)
    arr.push_back(Json{{"name", c.name}, {"passed", c.passed}, {"defect", c.defect},
                       {"detail", c.detail}});
  return arr;
}

bool all_passed(const std::vector<CheckResult>& checks) {
  for (const CheckResult& c : checks)
    if (!c.passed) return false;
  return true;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

// A generator source before validation, so `validate` can report failures
// instead of throwing.
struct RawGenerator {
  Eigen::MatrixXcd matrix;
  nrsector::FiniteMeasureSpace space;
  std::string label;
};

Complex json_to_complex(const Json& j) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Complex(j[0].get<double>(), j[1].get<double>());
  throw std::runtime_error("matrix entries must be numbers or [re, im] pairs");
}

Json load_json_file(const std::string& path) {
  std::ifstream stream(path);
  if (!stream) throw std::runtime_error("cannot open " + path);
  Json j;
  stream >> j;
  return j;
}

RawGenerator parse_generator_spec(const std::string& spec, std::uint64_t seed) {
  if (spec == "paper2x2") {
    Eigen::MatrixXcd a(2, 2);
    a << 1.0, -1.0, -1.0, 1.0;
    return {a, nrsector::FiniteMeasureSpace::uniform(2), "paper2x2"};
  }
  if (spec.rfind("lambda:", 0) == 0) {
    double re = 0.0, im = 0.0;
    if (std::sscanf(spec.c_str() + 7, "%lf,%lf", &re, &im) != 2)
      throw std::runtime_error("expected lambda:<re>,<im>");
    const Complex lambda(re, im);
    if (std::abs(std::abs(lambda) - 1.0) > 1e-12)
      throw std::runtime_error("lambda must be unimodular");
    Eigen::MatrixXcd a(2, 2);
    a << 1.0, -std::conj(lambda), -lambda, 1.0;
    return {a, nrsector::FiniteMeasureSpace::uniform(2), spec};
  }
  if (spec.rfind("laplacian:", 0) == 0) {
    const std::string path = spec.substr(10);
    const Json j = load_json_file(path);
    if (!j.contains("weights") || !j.contains("coupling") || !j.contains("degrees"))
      throw std::runtime_error("laplacian file needs weights, coupling, degrees");
    const auto weights = j["weights"].get<std::vector<double>>();
    const auto degrees = j["degrees"].get<std::vector<double>>();
    const Eigen::Index n = static_cast<Eigen::Index>(weights.size());
    if (static_cast<Eigen::Index>(degrees.size()) != n || j["coupling"].size() != weights.size())
      throw std::runtime_error("laplacian file shapes disagree");
    Eigen::MatrixXcd a(n, n);
    for (Eigen::Index row = 0; row < n; ++row) {
      const Json& r = j["coupling"][static_cast<std::size_t>(row)];
      if (r.size() != weights.size()) throw std::runtime_error("laplacian coupling is not square");
      for (Eigen::Index col = 0; col < n; ++col)
        a(row, col) = row == col ? Complex(degrees[static_cast<std::size_t>(row)], 0.0)
                                 : -json_to_complex(r[static_cast<std::size_t>(col)]);
    }
    return {a, nrsector::FiniteMeasureSpace(Eigen::Map<const Eigen::VectorXd>(
                   weights.data(), static_cast<Eigen::Index>(weights.size()))),
            spec};
  }
  if (spec.rfind("random:", 0) == 0) {
    const long n = std::strtol(spec.c_str() + 7, nullptr, 10);
    if (n < 1) throw std::runtime_error("expected random:<n> with n >= 1");
    const nrsector::Generator gen = nrsector::random_generator(n, seed, false);
    return {gen.matrix(), gen.space(), gen.label()};
  }
  const Json j = load_json_file(spec);
  if (!j.contains("weights") || !j.contains("matrix"))
    throw std::runtime_error("matrix file needs weights and matrix");
  const auto weights = j["weights"].get<std::vector<double>>();
  const Eigen::Index n = static_cast<Eigen::Index>(weights.size());
  if (j["matrix"].size() != weights.size())
    throw std::runtime_error("matrix row count does not match weights");
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index row = 0; row < n; ++row) {
    const Json& r = j["matrix"][static_cast<std::size_t>(row)];
    if (r.size() != weights.size()) throw std::runtime_error("matrix is not square");
    for (Eigen::Index col = 0; col < n; ++col)
      a(row, col) = json_to_complex(r[static_cast<std::size_t>(col)]);
  }
  return {a, nrsector::FiniteMeasureSpace(Eigen::Map<const Eigen::VectorXd>(
                 weights.data(), static_cast<Eigen::Index>(weights.size()))),
          spec};
}

// Random block coefficients with modulus in [0.3, 1] and uniform phase:
// away from 0 (where the certificate rejects) and from large moduli (where
// |c|^p amplifies rounding).
Eigen::VectorXcd random_coefficients(Eigen::Index m, std::uint64_t seed) {
  std::mt19937_64 rng = nrsector::substream(seed, 271828);
  std::uniform_real_distribution<double> modulus(0.3, 1.0);
  std::uniform_real_distribution<double> phase(-std::acos(-1.0), std::acos(-1.0));
  Eigen::VectorXcd c(m);
  for (Eigen::Index j = 0; j < m; ++j) c[j] = std::polar(modulus(rng), phase(rng));
  return c;
}

// Random partition of n atoms into m nonempty blocks: a shuffle dealt
// round-robin.
nrsector::Partition random_partition(Eigen::Index n, Eigen::Index m, std::uint64_t seed) {
  if (m < 1 || m > n) throw std::runtime_error("block count must lie in [1, n]");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) order[static_cast<std::size_t>(j)] = j;
  std::mt19937_64 rng = nrsector::substream(seed, 314159);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<Eigen::Index>> blocks(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < n; ++j)
    blocks[static_cast<std::size_t>(j % m)].push_back(order[static_cast<std::size_t>(j)]);
  return nrsector::Partition(std::move(blocks), n);
}

struct Options {
  std::string gen = "paper2x2";
  std::string p_text;
  long n = 0;
  std::uint64_t seed = 0;
  long samples = 0;
  int restarts = 0;
  double t = 0.5;
  double lambda = 1.0;
  std::string out;
  std::string format = "json";
};

nrsector::Exponent parse_exponent(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "INF") return nrsector::Exponent::inf();
  std::size_t used = 0;
  const double v = std::stod(text, &used);
  if (used != text.size()) throw std::runtime_error("cannot parse exponent '" + text + "'");
  return nrsector::Exponent(v);
}

double interior_p(const Options& opt) {
  const nrsector::Exponent p = parse_exponent(opt.p_text);
  if (p.is_inf() || p.value() <= 1.0)
    throw std::runtime_error("this command needs a finite exponent p > 1");
  return p.value();
}

Json config_json(const std::string& command, const Options& opt) {
  Json config{{"command", command}};
  if (!opt.p_text.empty()) {
    const nrsector::Exponent p = parse_exponent(opt.p_text);
    config["p"] = p.is_inf() ? Json("inf") : Json(p.value());
  }
  config["gen"] = opt.gen;
  config["n"] = opt.n;
  config["seed"] = opt.seed;
  config["samples"] = opt.samples;
  config["restarts"] = opt.restarts;
  config["t"] = opt.t;
  config["lambda"] = opt.lambda;
  config["format"] = opt.format;
  config["out"] = opt.out;
  return config;
}

int emit_report(const std::string& command, const Options& opt,
                const std::vector<CheckResult>& checks, Json data, double wall_seconds,
                const std::string* csv = nullptr) {
  const bool passed = all_passed(checks);

  if (opt.format == "csv") {
    if (csv == nullptr) throw std::runtime_error("csv format is not available for " + command);
    if (opt.out.empty())
      std::cout << *csv;
    else
      nrsector::atomic_write_text(opt.out, *csv);
  } else {
    Json report{{"schema_version", nrsector::kSchemaVersion},
                {"tool", "nrsector"},
                {"version", nrsector::kVersion},
                {"command", command},
                {"config", config_json(command, opt)},
                {"seed", opt.seed},
                {"checks", checks_to_json(checks)},
                {"passed", passed},
                {"data", std::move(data)}};
    const std::string text = report.dump(2) + "\n";
    if (opt.out.empty())
      std::cout << text;
    else
      nrsector::atomic_write_text(opt.out, text);
  }

  for (const CheckResult& c : checks)
    std::cerr << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << " (defect "
              << format_double(c.defect) << (c.detail.empty() ? "" : "; " + c.detail) << ")\n";
  std::cerr << command << ": " << (passed ? "PASS" : "FAIL") << " in "
            << format_double(wall_seconds) << " s\n";
  return passed ? 0 : 1;
}

int run_lemma2(const Options& opt) {
  const auto start = std::chrono::steady_clock::now();
  const double pv = interior_p(opt);
  const double phi = nrsector::sector_angle(pv);
  const nrsector::Sector sector(phi);
  const long samples = opt.samples > 0 ? opt.samples : 100000;

  std::vector<double> angles(static_cast<std::size_t>(samples), 0.0);
  std::vector<char> ok(static_cast<std::size_t>(samples), 1);
  const double pi = std::acos(-1.0);
  nrsector::parallel_for(samples, [&](std::int64_t i) {
    std::mt19937_64 rng = nrsector::substream(opt.seed, static_cast<std::uint64_t>(i));
    Complex z = nrsector::complex_gaussian(rng);
    Complex w = nrsector::complex_gaussian(rng);
    if (i % 10 == 9) {
      // Heavy tails probe extreme modulus ratios.
      std::uniform_real_distribution<double> u01(0.0, 1.0);
      z = std::polar(std::tan(0.5 * pi * u01(rng)), 2.0 * pi * u01(rng) - pi);
      w = std::polar(std::tan(0.5 * pi * u01(rng)), 2.0 * pi * u01(rng) - pi);
    } else if (i % 7 == 3) {
      // Close pairs probe the w -> z limit where the sup angle lives.
      w = z + 1e-3 * nrsector::complex_gaussian(rng);
    }
    const Complex v = nrsector::lp_form(z, w, pv);
    if (std::abs(v) > 1e-12) angles[static_cast<std::size_t>(i)] = std::abs(std::arg(v));
    ok[static_cast<std::size_t>(i)] = nrsector::in_sector(v, sector) ? 1 : 0;
  });

  double max_angle = 0.0;
  long violations = 0;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    max_angle = std::max(max_angle, angles[i]);
    if (!ok[i]) ++violations;
  }

  const int restarts = opt.restarts > 0 ? opt.restarts : 64;
  const nrsector::ScalarSharpness sharp = nrsector::scalar_sharpness_search(pv, restarts, opt.seed);

  std::vector<CheckResult> checks;
  checks.push_back({"inclusion", violations == 0, std::max(0.0, max_angle - phi),
                    std::to_string(violations) + " of " + std::to_string(samples) +
                        " pairs outside the sector"});
  const double sharp_gap = phi - sharp.best().best_angle;
  checks.push_back({"sharpness", std::abs(sharp_gap) <= 1e-3 && sharp.best().best_angle <= phi + 1e-9,
                    std::abs(sharp_gap), "best angle " + format_double(sharp.best().best_angle) +
                        " vs phi_p " + format_double(phi)});

  Json data{{"phi_p", phi},
            {"pairs", samples},
            {"max_angle", max_angle},
            {"violations", violations},
            {"sharpness", nrsector::to_json(sharp)}};
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return emit_report("lemma2", opt, checks, std::move(data), wall);
}

int run_lemma3(const Options& opt) {
  const auto start = std::chrono::steady_clock::now();
  if (!(opt.lambda > 0.0)) throw std::runtime_error("lemma3 needs --lambda > 0");
  const int grid = opt.n > 0 ? static_cast<int>(opt.n) : 10000;
  const nrsector::QuadFormSweep sweep = nrsector::quad_form_sup_angle(opt.lambda, grid);

  std::vector<CheckResult> checks;
  checks.push_back({"sup_angle", std::abs(sweep.report.gap()) <= 1e-6, std::abs(sweep.report.gap()),
                    "sup " + format_double(sweep.report.best_angle) + " vs arcsin(|l-1|/(l+1)) = " +
                        format_double(sweep.report.target)});
  checks.push_back({"sine_identity", sweep.max_sine_identity_defect <= 1e-12,
                    sweep.max_sine_identity_defect,
                    "pointwise product formula on " + std::to_string(grid) + " grid points"});

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return emit_report("lemma3", opt, checks, nrsector::to_json(sweep), wall);
}

int run_jacobian(const Options& opt) {
  const auto start = std::chrono::steady_clock::now();
  const long count = opt.n > 0 ? opt.n : 1000;

  std::vector<double> fd_errors(static_cast<std::size_t>(count));
  std::vector<double> eigen_residuals(static_cast<std::size_t>(count));
  nrsector::parallel_for(count, [&](std::int64_t i) {
    std::mt19937_64 rng = nrsector::substream(opt.seed, static_cast<std::uint64_t>(i));
    std::uniform_real_distribution<double> p_dist(1.05, 10.0);
    std::uniform_real_distribution<double> log_r(std::log(0.1), std::log(4.0));
    std::uniform_real_distribution<double> phase(-std::acos(-1.0), std::acos(-1.0));
    const double pv = p_dist(rng);
    const double r = std::exp(log_r(rng));
    const double theta = phase(rng);
    const Eigen::Vector2d y(r * std::cos(theta), r * std::sin(theta));
    const nrsector::DualityJacobian jac = nrsector::duality_map_jacobian(y, pv);

    // Central finite differences of F_p as a map on R^2.
    const double h = 1e-5 * r;
    Eigen::Matrix2d fd;
    for (int col = 0; col < 2; ++col) {
      Eigen::Vector2d e = Eigen::Vector2d::Zero();
      e[col] = h;
      const Complex plus = nrsector::duality_scalar(Complex(y[0] + e[0], y[1] + e[1]), pv);
      const Complex minus = nrsector::duality_scalar(Complex(y[0] - e[0], y[1] - e[1]), pv);
      fd(0, col) = (plus.real() - minus.real()) / (2.0 * h);
      fd(1, col) = (plus.imag() - minus.imag()) / (2.0 * h);
    }
    const double scale = std::max(1.0, jac.matrix.cwiseAbs().maxCoeff());
    fd_errors[static_cast<std::size_t>(i)] = (fd - jac.matrix).cwiseAbs().maxCoeff() / scale;

    const double radial =
        (jac.matrix * jac.radial_direction - jac.radial_eigenvalue * jac.radial_direction)
            .cwiseAbs()
            .maxCoeff();
    const double tangential = (jac.matrix * jac.tangential_direction -
                               jac.tangential_eigenvalue * jac.tangential_direction)
                                  .cwiseAbs()
                                  .maxCoeff();
    eigen_residuals[static_cast<std::size_t>(i)] = std::max(radial, tangential) / scale;
  });

  double worst_fd = 0.0, worst_eig = 0.0;
  for (long i = 0; i < count; ++i) {
    worst_fd = std::max(worst_fd, fd_errors[static_cast<std::size_t>(i)]);
    worst_eig = std::max(worst_eig, eigen_residuals[static_cast<std::size_t>(i)]);
  }

  std::vector<CheckResult> checks;
  checks.push_back({"finite_difference", worst_fd <= 1e-6, worst_fd,
                    "central differences on " + std::to_string(count) + " random (y, p)"});
  checks.push_back({"eigenpairs", worst_eig <= 1e-10, worst_eig,
                    "radial (p-1)|y|^(p-2) and tangential |y|^(p-2) directions"});

  Json data{{"count", count}, {"worst_fd_rel_error", worst_fd}, {"worst_eigen_residual", worst_eig}};
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return emit_report("jacobian", opt, checks, std::move(data), wall);
}

int run_validate(const Options& opt) {
  const auto start = std::chrono::steady_clock::now();
  const RawGenerator raw = parse_generator_spec(opt.gen, opt.seed);
  const nrsector::ValidationReport report = nrsector::validate_generator(raw.matrix, raw.space);

  std::vector<CheckResult> checks;
  checks.push_back({"self_adjoint", report.self_adjoint_ok, report.self_adjoint_defect,
                    "entrywise defect of D A - A^H D"});
  checks.push_back({"positive_semidefinite", report.psd_ok, std::max(0.0, -report.min_eigenvalue),
                    "min eigenvalue " + format_double(report.min_eigenvalue)});
  checks.push_back({"linf_contractive", report.linf_contractive_ok,
                    std::max(0.0, report.worst_linf_norm - 1.0),
                    "worst ||T(t)||_oo = " + format_double(report.worst_linf_norm) + " at t = " +
                        format_double(report.worst_linf_t)});
  checks.push_back({"l1_contractive", report.l1_contractive_ok,
                    std::max(0.0, report.worst_l1_norm - 1.0),
                    "worst ||T(t)||_1 = " + format_double(report.worst_l1_norm) + " at t = " +
                        format_double(report.worst_l1_t)});

  Json data{{"label", raw.label},
            {"size", raw.space.size()},
            {"weights", nrsector::to_json(raw.space.weights())},
            {"report", nrsector::to_json(report)}};
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return emit_report("validate", opt, checks, std::move(data), wall);
}

nrsector::Generator build_generator(const Options& opt) {
  const RawGenerator raw = parse_generator_spec(opt.gen, opt.seed);
  return nrsector::Generator(raw.matrix, raw.space, raw.label);
}

int run_range(const Options& opt) {
  const auto start = std::chrono::steady_clock::now();
  const double pv = interior_p(opt);
  const nrsector::Generator gen = build_generator(opt);
  const long samples = opt.samples > 0 ? opt.samples : 10000;
  const int restarts = opt.restarts > 0 ? opt.restarts : 24;

  const nrsector::RangeSample sample = nrsector::sample_range(gen, pv, samples, opt.seed);
  const nrsector::AngleReport search = nrsector::max_arg_search(gen, pv, restarts, opt.seed);
  const double phi = nrsector::sector_angle(pv);

  std::vector<CheckResult> checks;
  checks.push_back({"samples_in_sector", sample.max_abs_arg <= phi + 1e-9,
                    std::max(0.0, sample.max_abs_arg - phi),
                    "max |arg| " + format_double(sample.max_abs_arg) + " over " +
                        std::to_string(samples) + " samples vs phi_p " + format_double(phi)});
  checks.push_back({"search_in_sector", search.best_angle <= phi + 1e-9,
                    std::max(0.0, search.best_angle - phi),
                    "best |arg| " + format_double(search.best_angle) + " from " +
                        std::to_string(restarts) + " restarts"});

  Json data{{"sample", nrsector::to_json(sample, /*include_values=*/false)},
            {"search", nrsector::to_json(search)},
            {"phi_p", phi}};
  const std::string csv = nrsector::to_csv(sample);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return emit_report("range", opt, checks, std::move(data), wall, &csv);
}

int run_sharpness(const Options& opt) {
  const auto start = std::chrono::steady_clock::now();
  const double pv = interior_p(opt);
  const nrsector::Generator gen = build_generator(opt);
  const int restarts = opt.restarts > 0 ? opt.restarts : 64;

  const nrsector::AngleReport search = nrsector::max_arg_search(gen, pv, restarts, opt.seed);
  const double phi = nrsector::sector_angle(pv);

  std::vector<CheckResult> checks;
  checks.push_back({"reaches_phi_p", std::abs(search.gap()) <= 1e-3, std::abs(search.gap()),
                    "best angle " + format_double(search.best_angle) + " vs phi_p " +
                        format_double(phi)});
  checks.push_back({"inside_sector", search.best_angle <= phi + 1e-9,
                    std::max(0.0, search.best_angle - phi), ""});

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return emit_report("sharpness", opt, checks, nrsector::to_json(search), wall);
}

int run_certificate(const Options& opt) {
  const auto start = std::chrono::steady_clock::now();
  const double pv = interior_p(opt);
  if (!(opt.t > 0.0)) throw std::runtime_error("certificate needs --t > 0");
  const nrsector::Generator gen = build_generator(opt);
  const Eigen::Index blocks = opt.n > 0 ? static_cast<Eigen::Index>(opt.n) : gen.size();
  const nrsector::Partition partition = random_partition(gen.size(), blocks, opt.seed);
  const Eigen::VectorXcd c = random_coefficients(partition.count(), opt.seed);

  const nrsector::Certificate cert = nrsector::build_certificate(gen, opt.t, partition, c, pv);
  const nrsector::CertificateChecks cc = nrsector::check_certificate(cert);

  std::vector<CheckResult> checks;
  checks.push_back({"a_hermitian", cc.a_hermitian, cc.hermitian_defect, ""});
  checks.push_back({"first_sum_nonnegative", cc.first_sum_nonnegative,
                    std::max(0.0, -cc.first_sum), "first_sum " + format_double(cc.first_sum)});
  checks.push_back({"column_mass_dominated", cc.column_mass_dominated,
                    std::max(0.0, cc.worst_column_excess), "sum_k |a_kj| vs d_j"});
  checks.push_back({"terms_in_sector", cc.terms_in_sector,
                    std::max(0.0, cc.worst_term_arg - nrsector::sector_angle(pv)), ""});
  checks.push_back({"total_in_sector", cc.total_in_sector,
                    std::max(0.0, cc.total_arg - nrsector::sector_angle(pv)), ""});
  checks.push_back({"identity", cc.identity_holds, cc.identity_residual,
                    "decomposition vs direct difference form, relative"});

  Json data{{"certificate", nrsector::to_json(cert)}, {"checks", nrsector::to_json(cc)}};
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return emit_report("certificate", opt, checks, std::move(data), wall);
}

int run_compress(const Options& opt) {
  const auto start = std::chrono::steady_clock::now();
  const double pv = opt.p_text.empty() ? 4.0 : interior_p(opt);  // identity check exponent
  if (!(opt.t > 0.0)) throw std::runtime_error("compress needs --t > 0");
  const nrsector::Generator gen = build_generator(opt);
  const Eigen::Index blocks = opt.n > 0 ? static_cast<Eigen::Index>(opt.n) : gen.size();
  const nrsector::Partition partition = random_partition(gen.size(), blocks, opt.seed);
  const Eigen::VectorXcd c = random_coefficients(partition.count(), opt.seed);

  const nrsector::OperatorMatrix s = nrsector::compress(gen, opt.t, partition);
  const double linf = nrsector::linf_operator_norm(s);
  const double l1 = nrsector::l1_operator_norm(s);
  const double residual = nrsector::verify_reduction_identity(gen, opt.t, partition, c, pv);
  const nrsector::CVec f = partition.embed(gen.space(), c);
  const Complex direct = nrsector::detail::difference_form_raw(gen, opt.t, f, pv);
  const double rel_residual = residual / std::max(1.0, std::abs(direct));

  std::vector<CheckResult> checks;
  checks.push_back({"linf_contractive", linf <= 1.0 + 1e-10, std::max(0.0, linf - 1.0),
                    "||S||_oo = " + format_double(linf)});
  checks.push_back({"l1_contractive", l1 <= 1.0 + 1e-10, std::max(0.0, l1 - 1.0),
                    "||S||_1 = " + format_double(l1)});
  checks.push_back({"reduction_identity", rel_residual <= 1e-12, rel_residual,
                    "quotient form vs full form, relative"});

  Json data{{"s", nrsector::to_json(s.matrix)},
            {"quotient_weights", nrsector::to_json(s.space.weights())},
            {"linf_norm", linf},
            {"l1_norm", l1},
            {"reduction_residual", residual},
            {"c", nrsector::to_json(c)}};
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return emit_report("compress", opt, checks, std::move(data), wall);
}

int run_sweep(const Options& opt) {
  const auto start = std::chrono::steady_clock::now();
  const nrsector::Exponent p = parse_exponent(opt.p_text);
  const nrsector::Generator gen = build_generator(opt);
  const int restarts = opt.restarts > 0 ? opt.restarts : 8;

  std::vector<double> thetas;
  if (opt.n > 0) {
    const double hi = std::asin(1.0) - 1e-3;
    for (long k = 0; k < opt.n; ++k)
      thetas.push_back(opt.n == 1 ? 0.0 : hi * static_cast<double>(k) / (opt.n - 1));
  } else {
    thetas = nrsector::default_sweep_angles();
  }

  const nrsector::RaySweep sweep =
      nrsector::contraction_sweep(gen, p, thetas, {0.1, 1.0, 10.0}, restarts, opt.seed);

  double worst_inside = 0.0;
  for (std::size_t ti = 0; ti < sweep.theta_grid.size(); ++ti) {
    if (sweep.theta_grid[ti] > sweep.critical_angle - 1e-6) continue;
    for (std::size_t ri = 0; ri < sweep.radius_grid.size(); ++ri)
      worst_inside = std::max(worst_inside,
                              sweep.norm_estimates(static_cast<Eigen::Index>(ti),
                                                   static_cast<Eigen::Index>(ri)));
  }

  std::vector<CheckResult> checks;
  checks.push_back({"contractive_inside_critical_angle", worst_inside <= 1.0 + 1e-8,
                    std::max(0.0, worst_inside - 1.0),
                    "worst estimate " + format_double(worst_inside) + " for theta <= " +
                        format_double(sweep.critical_angle) + " - 1e-6"});

  const std::string csv = nrsector::to_csv(sweep);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return emit_report("sweep", opt, checks, nrsector::to_json(sweep), wall, &csv);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical verification of L^p numerical-range sector containment"};
  app.require_subcommand(1);

  Options opt;
  const auto add_common = [&](CLI::App* sub, bool needs_p) {
    auto* p_option = sub->add_option("--p", opt.p_text, "exponent p (a real > 1, or 'inf' for sweep)");
    if (needs_p) p_option->required();
    sub->add_option("--seed", opt.seed, "RNG seed");
    sub->add_option("--out", opt.out, "report path (stdout when absent)");
  };

  CLI::App* lemma2 = app.add_subcommand("lemma2", "two-point form inclusion and sharpness");
  add_common(lemma2, true);
  lemma2->add_option("--samples", opt.samples, "number of (z, w) pairs (default 100000)");
  lemma2->add_option("--restarts", opt.restarts, "sharpness search restarts (default 64)");

  CLI::App* lemma3 = app.add_subcommand("lemma3", "quadratic-form angle sweep and product formula");
  add_common(lemma3, false);
  lemma3->add_option("--lambda", opt.lambda, "eigenvalue ratio of the symmetric matrix")->required();
  lemma3->add_option("--n", opt.n, "grid size (default 10000)");

  CLI::App* jacobian = app.add_subcommand("jacobian", "duality-map Jacobian vs finite differences");
  add_common(jacobian, false);
  jacobian->add_option("--n", opt.n, "number of random (y, p) draws (default 1000)");

  CLI::App* validate = app.add_subcommand("validate", "generator validity report");
  add_common(validate, false);
  validate->add_option("--gen", opt.gen, "generator spec")->required();

  CLI::App* range = app.add_subcommand("range", "sample the numerical range and search its angle");
  add_common(range, true);
  range->add_option("--gen", opt.gen, "generator spec")->required();
  range->add_option("--samples", opt.samples, "random functions to sample (default 10000)");
  range->add_option("--restarts", opt.restarts, "search restarts (default 24)");
  range->add_option("--format", opt.format, "json or csv (csv: re,im,abs,arg rows)")
      ->check(CLI::IsMember({"json", "csv"}));

  CLI::App* sharpness = app.add_subcommand("sharpness", "how close the range angle gets to phi_p");
  add_common(sharpness, true);
  sharpness->add_option("--gen", opt.gen, "generator spec (default paper2x2)");
  sharpness->add_option("--restarts", opt.restarts, "search restarts (default 64)");

  CLI::App* certificate = app.add_subcommand("certificate", "build and check a difference-form decomposition");
  add_common(certificate, true);
  certificate->add_option("--gen", opt.gen, "generator spec")->required();
  certificate->add_option("--t", opt.t, "semigroup time (default 0.5)");
  certificate->add_option("--n", opt.n, "number of partition blocks (default: one per atom)");

  CLI::App* compress = app.add_subcommand("compress", "compress T(t) to a partition quotient");
  add_common(compress, false);
  compress->add_option("--gen", opt.gen, "generator spec")->required();
  compress->add_option("--t", opt.t, "semigroup time (default 0.5)");
  compress->add_option("--n", opt.n, "number of partition blocks (default: one per atom)");

  CLI::App* sweep = app.add_subcommand("sweep", "semigroup norm estimates along complex rays");
  add_common(sweep, true);
  sweep->add_option("--gen", opt.gen, "generator spec")->required();
  sweep->add_option("--restarts", opt.restarts, "norm estimate restarts (default 8)");
  sweep->add_option("--n", opt.n, "number of angles (default 32)");
  sweep->add_option("--format", opt.format, "json or csv (csv: theta,radius,norm_estimate,inside_sector)")
      ->check(CLI::IsMember({"json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(lemma2)) return run_lemma2(opt);
    if (app.got_subcommand(lemma3)) return run_lemma3(opt);
    if (app.got_subcommand(jacobian)) return run_jacobian(opt);
    if (app.got_subcommand(validate)) return run_validate(opt);
    if (app.got_subcommand(range)) return run_range(opt);
    if (app.got_subcommand(sharpness)) return run_sharpness(opt);
    if (app.got_subcommand(certificate)) return run_certificate(opt);
    if (app.got_subcommand(compress)) return run_compress(opt);
    if (app.got_subcommand(sweep)) return run_sweep(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
