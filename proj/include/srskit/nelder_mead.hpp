#pragma once

#include "srskit/core.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <optional>
#include <vector>

namespace srskit {

struct NelderMeadOptions {
  int max_iters = 1000;
  /// Stop once the spread of simplex values drops below this.
  double f_tol = 1e-10;
  /// Dimension-dependent coefficients (Gao & Han); classic 1, 2, 0.5, 0.5 otherwise.
  bool adaptive = true;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct NelderMeadResult {
  VectorXd x;
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool timed_out = false;
  /// Best value after each iteration (non-increasing).
  std::vector<double> trace;
};

/// Minimizes `objective` from an axis-aligned simplex x0 + step_i e_i.
///
/// Throws BudgetExhausted when the deadline passes before the initial simplex
/// has been evaluated.
template <typename Objective>
NelderMeadResult nelder_mead(Objective&& objective, const VectorXd& x0, const VectorXd& step,
                             const NelderMeadOptions& options = {}) {
  const Index n = x0.size();
  if (step.size() != n) throw std::invalid_argument("simplex step has wrong dimension");
  const double dim = static_cast<double>(n);
  const double alpha = 1.0;
  const double gamma = options.adaptive ? 1.0 + 2.0 / dim : 2.0;
  const double rho = options.adaptive ? 0.75 - 0.5 / dim : 0.5;
  const double sigma = options.adaptive ? 1.0 - 1.0 / dim : 0.5;

  NelderMeadResult result;
  auto expired = [&] {
    return options.deadline && std::chrono::steady_clock::now() >= *options.deadline;
  };
  auto eval = [&](const VectorXd& x) {
    ++result.evaluations;
    return static_cast<double>(objective(x));
  };

  std::vector<VectorXd> pts(static_cast<std::size_t>(n + 1), x0);
  std::vector<double> vals(static_cast<std::size_t>(n + 1));
  vals[0] = eval(x0);
  for (Index i = 0; i < n; ++i) {
    if (expired()) throw BudgetExhausted("time budget exhausted while building the initial simplex");
    pts[static_cast<std::size_t>(i + 1)](i) += step(i);
    vals[static_cast<std::size_t>(i + 1)] = eval(pts[static_cast<std::size_t>(i + 1)]);
  }

  std::vector<std::size_t> order(pts.size());
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    std::vector<VectorXd> p2(pts.size());
    std::vector<double> v2(vals.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
      p2[k] = std::move(pts[order[k]]);
      v2[k] = vals[order[k]];
    }
    pts.swap(p2);
    vals.swap(v2);
  };

  sort_simplex();
  const auto worst = static_cast<std::size_t>(n);
  for (int it = 0; it < options.max_iters; ++it) {
    if (vals[worst] - vals[0] <= options.f_tol) break;
    if (expired()) {
      result.timed_out = true;
      break;
    }
    VectorXd centroid = VectorXd::Zero(n);
    for (std::size_t k = 0; k < worst; ++k) centroid += pts[k];
    centroid /= dim;

    const VectorXd reflected = centroid + alpha * (centroid - pts[worst]);
    const double fr = eval(reflected);
    if (fr < vals[0]) {
      const VectorXd expanded = centroid + gamma * (reflected - centroid);
      const double fe = eval(expanded);
      if (fe < fr) {
        pts[worst] = expanded;
        vals[worst] = fe;
      } else {
        pts[worst] = reflected;
        vals[worst] = fr;
      }
    } else if (fr < vals[worst - 1]) {
      pts[worst] = reflected;
      vals[worst] = fr;
    } else {
      const bool outside = fr < vals[worst];
      const VectorXd contracted = outside ? VectorXd(centroid + rho * (reflected - centroid))
                                          : VectorXd(centroid - rho * (centroid - pts[worst]));
      const double fc = eval(contracted);
      if (fc < (outside ? fr : vals[worst])) {
        pts[worst] = contracted;
        vals[worst] = fc;
      } else {
        for (std::size_t k = 1; k < pts.size(); ++k) {
          pts[k] = pts[0] + sigma * (pts[k] - pts[0]);
          vals[k] = eval(pts[k]);
        }
      }
    }
    sort_simplex();
    ++result.iterations;
    result.trace.push_back(vals[0]);
  }
  result.x = pts[0];
  result.f = vals[0];
  return result;
}

}  // namespace srskit
