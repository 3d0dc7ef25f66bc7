/*
 * optim.hpp: derivative-free maximizers used by the search routines.
 *
 * The objectives here (argument of a sesquilinear form over the unit
 * sphere) are continuous but not smooth at sign changes, so the workhorse
 * is Nelder-Mead restarted from many initial points, plus golden-section
 * refinement for one-dimensional profiles. Both are deterministic given
 * their inputs.
 */

#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace nrsector {

struct NelderMeadOptions {
  int max_iterations = 400;
  double initial_step = 0.5;
  // Stop when the simplex's value spread falls below this.
  double value_tolerance = 1e-13;
};

struct NelderMeadResult {
  Eigen::VectorXd point;
  double value = 0.0;
  int iterations = 0;
};

// Minimizes f over R^n starting from `start` (standard reflection /
// expansion / contraction / shrink coefficients 1, 2, 1/2, 1/2).
inline NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                                    const Eigen::VectorXd& start,
                                    const NelderMeadOptions& options = {}) {
  const Eigen::Index n = start.size();
  if (n < 1) throw std::invalid_argument("nelder_mead: empty start point");

  std::vector<Eigen::VectorXd> pts(n + 1, start);
  std::vector<double> vals(n + 1);
  for (Eigen::Index j = 0; j < n; ++j) pts[j + 1][j] += options.initial_step;
  for (Eigen::Index j = 0; j <= n; ++j) vals[j] = f(pts[j]);

  std::vector<Eigen::Index> order(n + 1);
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    for (Eigen::Index j = 0; j <= n; ++j) order[j] = j;
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return vals[a] < vals[b]; });
    const Eigen::Index best = order[0], worst = order[n], second = order[n - 1];
    if (vals[worst] - vals[best] < options.value_tolerance) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (Eigen::Index j = 0; j <= n; ++j)
      if (j != worst) centroid += pts[j];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = centroid + (centroid - pts[worst]);
    const double fr = f(reflected);
    if (fr < vals[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = f(expanded);
      if (fe < fr) {
        pts[worst] = expanded;
        vals[worst] = fe;
      } else {
        pts[worst] = reflected;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = reflected;
      vals[worst] = fr;
      continue;
    }
    const Eigen::VectorXd contracted =
        fr < vals[worst] ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                         : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
    const double fc = f(contracted);
    if (fc < std::min(fr, vals[worst])) {
      pts[worst] = contracted;
      vals[worst] = fc;
      continue;
    }
    for (Eigen::Index j = 0; j <= n; ++j) {  // shrink towards the best vertex
      if (j == best) continue;
      pts[j] = pts[best] + 0.5 * (pts[j] - pts[best]);
      vals[j] = f(pts[j]);
    }
  }

  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j <= n; ++j)
    if (vals[j] < vals[best]) best = j;
  return {pts[best], vals[best], iter};
}

// Maximizes f on [lo, hi] by golden-section search; f is assumed unimodal
// on the bracket. Returns the abscissa of the maximum.
inline double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                                 double x_tolerance = 1e-12) {
  if (!(lo < hi)) throw std::invalid_argument("golden_section_max: need lo < hi");
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > x_tolerance) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace nrsector
