#pragma once

#include "srskit/srs.hpp"
#include "srskit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace test {

using namespace srskit;

inline std::vector<Signal> random_shocks(int count, std::uint64_t seed) {
  GenParams params;
  params.seed = seed;
  std::vector<Signal> out;
  for (int i = 0; i < count; ++i) out.push_back(generate_shock(params, static_cast<std::uint64_t>(i)).signal);
  return out;
}

inline Signal half_sine(double duration_s, double amplitude, Index n, double fs) {
  VectorXd x = VectorXd::Zero(n);
  for (Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    if (t <= duration_s) x(i) = amplitude * std::sin(std::numbers::pi * t / duration_s);
  }
  return Signal(x, fs);
}

inline Signal white_noise(Index n, double fs, double variance, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, std::sqrt(variance));
  VectorXd x(n);
  for (Index i = 0; i < n; ++i) x(i) = g(rng);
  return Signal(x, fs);
}

/// Direct O(n^2) trapezoidal Duhamel sum.
inline VectorXd literal_duhamel(const VectorXd& x, double dt, double f, double zeta) {
  const double w = 2.0 * std::numbers::pi * f;
  const double wd = w * std::sqrt(1.0 - zeta * zeta);
  VectorXd z = VectorXd::Zero(x.size());
  for (Index m = 1; m < x.size(); ++m) {
    double sum = 0.0;
    for (Index k = 0; k <= m; ++k) {
      const double tau = static_cast<double>(m - k) * dt;
      const double weight = (k == 0 || k == m) ? 0.5 : 1.0;
      sum += weight * x(k) * std::exp(-zeta * w * tau) * std::sin(wd * tau);
    }
    z(m) = -sum * dt / wd;
  }
  return z;
}

/// Max |a-b|/|b| over the grid frequencies at or below `f_limit`.
inline double max_rel_error(const Spectrum& a, const Spectrum& b, double f_limit) {
  double worst = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    if (a.grid().freqs_hz()(i) > f_limit) continue;
    worst = std::max(worst, std::abs(a.values()(i) - b.values()(i)) / b.values()(i));
  }
  return worst;
}

/// Kolmogorov-Smirnov statistic against U(lo, hi).
inline double ks_uniform(std::vector<double> v, double lo, double hi) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double cdf = std::clamp((v[i] - lo) / (hi - lo), 0.0, 1.0);
    d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  return d;
}

/// Asymptotic critical value at alpha = 0.001.
inline double ks_critical(std::size_t n) { return 1.9495 / std::sqrt(static_cast<double>(n)); }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("srskit_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace test
