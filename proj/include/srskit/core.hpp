#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace srskit {

using Eigen::Index;
using VectorXd = Eigen::VectorXd;
using ArrayXd = Eigen::ArrayXd;

/// Floor applied to spectrum values before taking logarithms.
inline constexpr double kLogFloor = 1e-12;

/// Default damping ratio of the oscillator bank.
inline constexpr double kDefaultDamping = 0.03;

/// Default padding scale factor.
inline constexpr double kDefaultPadScale = 3.0;

// Error categories. The CLI maps these onto exit codes.

/// Malformed or inconsistent input data (bad files, mismatched grids, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A compute budget ran out before any usable result existed.
class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniformly sampled acceleration time series.
///
/// The sample period is derived from the rate and never stored.
template <typename Scalar>
class BasicSignal {
 public:
  using Samples = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  BasicSignal() = default;

  BasicSignal(Samples samples, double sample_rate_hz)
      : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
    if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_)) {
      throw std::invalid_argument("signal sample rate must be positive and finite");
    }
    if (samples_.size() == 0) {
      throw std::invalid_argument("signal must contain at least one sample");
    }
    if (!samples_.allFinite()) {
      throw std::invalid_argument("signal samples must be finite");
    }
  }

  const Samples& samples() const noexcept { return samples_; }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  double sample_period_s() const noexcept { return 1.0 / sample_rate_hz_; }
  Index size() const noexcept { return samples_.size(); }

  template <typename Other>
  BasicSignal<Other> cast() const {
    return BasicSignal<Other>(samples_.template cast<Other>(), sample_rate_hz_);
  }

 private:
  Samples samples_;
  double sample_rate_hz_ = 1.0;
};

using Signal = BasicSignal<double>;
using SignalF = BasicSignal<float>;

/// Oscillator natural frequencies (strictly increasing, Hz) plus the shared
/// damping ratio.
class FrequencyGrid {
 public:
  FrequencyGrid() = default;
  FrequencyGrid(VectorXd freqs_hz, double damping_ratio = kDefaultDamping);

  const VectorXd& freqs_hz() const noexcept { return freqs_hz_; }
  double damping_ratio() const noexcept { return damping_ratio_; }
  Index size() const noexcept { return freqs_hz_.size(); }
  double min_hz() const { return freqs_hz_(0); }
  double max_hz() const { return freqs_hz_(freqs_hz_.size() - 1); }

  friend bool operator==(const FrequencyGrid& a, const FrequencyGrid& b) {
    return a.damping_ratio_ == b.damping_ratio_ && a.freqs_hz_.size() == b.freqs_hz_.size() &&
           a.freqs_hz_ == b.freqs_hz_;
  }

 private:
  VectorXd freqs_hz_;
  double damping_ratio_ = kDefaultDamping;
};

/// Non-negative response magnitudes aligned to a FrequencyGrid.
class Spectrum {
 public:
  Spectrum() = default;
  Spectrum(VectorXd values, FrequencyGrid grid);

  const VectorXd& values() const noexcept { return values_; }
  const FrequencyGrid& grid() const noexcept { return grid_; }
  Index size() const noexcept { return values_.size(); }
  double max() const { return values_.maxCoeff(); }

  /// Elementwise positive rescaling; keeps the grid.
  Spectrum scaled(double factor) const { return Spectrum(values_ * factor, grid_); }

 private:
  VectorXd values_;
  FrequencyGrid grid_;
};

/// Throws DataError unless both spectra live on the same grid.
void require_same_grid(const Spectrum& a, const Spectrum& b);

}  // namespace srskit
