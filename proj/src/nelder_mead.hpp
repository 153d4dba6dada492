#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace qregion::detail {

struct NmResult {
  Eigen::VectorXd x;
  double value = 0;
  bool converged = false;
  int evaluations = 0;
};

/// Plain Nelder-Mead direct search. Terminates when the simplex value
/// spread falls below `tol` (or the vertex spread does), else at max_iters.
inline NmResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                            double step, double tol, int max_iters) {
  const int n = static_cast<int>(x0.size());
  const double alpha = 1.0, gamma = 2.0, beta = 0.5, delta = 0.5;

  std::vector<Eigen::VectorXd> xs(n + 1, x0);
  std::vector<double> fs(n + 1);
  NmResult res;
  for (int i = 1; i <= n; ++i) xs[i][i - 1] += step;
  for (int i = 0; i <= n; ++i) {
    fs[i] = f(xs[i]);
    ++res.evaluations;
  }

  std::vector<int> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });
  };

  for (int iter = 0; iter < max_iters; ++iter) {
    sort_simplex();
    int best = order[0], worst = order[n], second_worst = order[n - 1];

    double spread = fs[worst] - fs[best];
    double width = 0;
    for (int i = 1; i <= n; ++i) width = std::max(width, (xs[order[i]] - xs[best]).cwiseAbs().maxCoeff());
    if (spread <= tol || width <= tol) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != worst) centroid += xs[i];
    centroid /= n;

    Eigen::VectorXd xr = centroid + alpha * (centroid - xs[worst]);
    double fr = f(xr);
    ++res.evaluations;
    if (fr < fs[best]) {
      Eigen::VectorXd xe = centroid + gamma * (xr - centroid);
      double fe = f(xe);
      ++res.evaluations;
      if (fe < fr) {
        xs[worst] = xe;
        fs[worst] = fe;
      } else {
        xs[worst] = xr;
        fs[worst] = fr;
      }
    } else if (fr < fs[second_worst]) {
      xs[worst] = xr;
      fs[worst] = fr;
    } else {
      Eigen::VectorXd xc = centroid + beta * (xs[worst] - centroid);
      double fc = f(xc);
      ++res.evaluations;
      if (fc < fs[worst]) {
        xs[worst] = xc;
        fs[worst] = fc;
      } else {
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          xs[i] = xs[best] + delta * (xs[i] - xs[best]);
          fs[i] = f(xs[i]);
          ++res.evaluations;
        }
      }
    }
  }

  sort_simplex();
  res.x = xs[order[0]];
  res.value = fs[order[0]];
  return res;
}

}  // namespace qregion::detail
