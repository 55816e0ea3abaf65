#pragma once

// Forward shock response spectrum: a bank of base-excited single-degree-of-
// freedom oscillators, each reduced to its peak absolute acceleration
// ("maximax") over the zero-padded record.
//
// Two independent realizations are provided:
//   * srs_filterbank   - ramp-invariant recursive filters (fast path)
//   * srs_analytical   - Duhamel convolution + numerical differentiation
//                        (slow reference path)

#include "srskit/core.hpp"

#include <cstddef>

namespace srskit {

/// Number of trailing zeros appended before the peak search:
/// ceil(ceil(fs / (2 f_min sqrt(1 - zeta^2))) / scale_p).
std::size_t padding_length(double sample_rate_hz, double f_min_hz, double damping_ratio,
                           double scale_p = kDefaultPadScale);

/// Worst-case percentage error of the sampled peak for an undamped sinusoidal
/// response: 100 (1 - cos(pi f_max / fs)).
double sampling_error_bound(double sample_rate_hz, double f_max_hz);

/// Geometric progression of `count` frequencies with exact endpoints.
FrequencyGrid log_frequency_grid(double f_min_hz, double f_max_hz, Index count,
                                 double damping_ratio = kDefaultDamping);

/// Coefficients of the absolute-acceleration recursion
///   y[n] = b0 x[n] + b1 x[n-1] + b2 x[n-2] + a1 y[n-1] + a2 y[n-2].
struct SdofFilter {
  double b0 = 0, b1 = 0, b2 = 0;
  double a1 = 0, a2 = 0;
};

/// Smallwood ramp-invariant filter for an oscillator at natural_hz (m = 1).
SdofFilter absolute_acceleration_filter(double natural_hz, double damping_ratio,
                                        double sample_rate_hz);

/// Throws unless every grid frequency is at or below Nyquist.
void require_below_nyquist(const FrequencyGrid& grid, double sample_rate_hz);

namespace detail {

struct FilterBank {
  ArrayXd b0, b1, b2, a1, a2;
};

FilterBank make_filter_bank(const FrequencyGrid& grid, double sample_rate_hz);

}  // namespace detail

/// Peak |absolute acceleration| of every oscillator in the grid.
///
/// Accepts any real Eigen vector expression; float inputs are promoted to
/// double before filtering.
template <typename Derived>
VectorXd maximax(const Eigen::MatrixBase<Derived>& samples, double sample_rate_hz,
                 const FrequencyGrid& grid, double scale_p = kDefaultPadScale) {
  require_below_nyquist(grid, sample_rate_hz);
  const auto bank = detail::make_filter_bank(grid, sample_rate_hz);
  const Index n = samples.size();
  const Index total =
      n + static_cast<Index>(
              padding_length(sample_rate_hz, grid.min_hz(), grid.damping_ratio(), scale_p));
  const Index f = grid.size();

  ArrayXd y1 = ArrayXd::Zero(f), y2 = ArrayXd::Zero(f), y(f);
  ArrayXd peak = ArrayXd::Zero(f);
  double x1 = 0.0, x2 = 0.0;
  for (Index i = 0; i < total; ++i) {
    const double x0 = i < n ? static_cast<double>(samples(i)) : 0.0;
    y = bank.b0 * x0 + bank.b1 * x1 + bank.b2 * x2 + bank.a1 * y1 + bank.a2 * y2;
    peak = peak.max(y.abs());
    y2.swap(y1);
    y1.swap(y);
    x2 = x1;
    x1 = x0;
  }
  if (!peak.allFinite()) throw DataError("non-finite oscillator response");
  return peak.matrix();
}

template <typename Scalar>
Spectrum srs_filterbank(const BasicSignal<Scalar>& signal, const FrequencyGrid& grid,
                        double scale_p = kDefaultPadScale) {
  return Spectrum(maximax(signal.samples(), signal.sample_rate_hz(), grid, scale_p), grid);
}

/// Time histories of every oscillator over the padded record.
struct SdofResponse {
  /// Rows are time samples (signal + padding), columns follow the grid.
  Eigen::MatrixXd absolute_accel;
  /// Per column, the first row index attaining max |absolute_accel|.
  Eigen::VectorXi peak_index;
};

SdofResponse sdof_response(const Signal& signal, const FrequencyGrid& grid,
                           double scale_p = kDefaultPadScale);

/// Reference spectrum from the convolution solution for the relative
/// displacement.
///
/// The input is zero before the record and linearly interpolated between
/// samples onto a grid `refine` times finer. The Duhamel integral is evaluated
/// there by the trapezoidal rule, and the relative acceleration comes from
/// second-order central differences (one-sided at the ends). Peaks are taken
/// at the original sample instants.
Spectrum srs_analytical(const Signal& signal, const FrequencyGrid& grid,
                        double scale_p = kDefaultPadScale, int refine = 8);

/// Trapezoidal Duhamel integral of `input` (spacing dt) for one oscillator:
/// z(t_m) = -(1/wd) int_0^t_m x(tau) e^{-zeta w (t_m - tau)} sin(wd (t_m - tau)) dtau.
///
/// The sum is evaluated through the exponential factorization of the kernel,
/// which is algebraically identical to the direct O(n^2) sum.
VectorXd relative_displacement(const VectorXd& input, double dt, double natural_hz,
                               double damping_ratio);

}  // namespace srskit
