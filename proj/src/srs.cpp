#include "srskit/srs.hpp"

#include <complex>
#include <numbers>

#include "srskit/parallel.hpp"

namespace srskit {

std::size_t padding_length(double sample_rate_hz, double f_min_hz, double damping_ratio,
                           double scale_p) {
  if (!(damping_ratio > 0.0 && damping_ratio < 1.0)) {
    throw std::domain_error("damping ratio must lie in (0, 1)");
  }
  if (!(sample_rate_hz > 0.0) || !(f_min_hz > 0.0)) {
    throw std::invalid_argument("sample rate and minimum frequency must be positive");
  }
  if (!(scale_p >= 1.0)) throw std::invalid_argument("padding scale must be >= 1");
  const double full =
      std::ceil(sample_rate_hz / (2.0 * f_min_hz * std::sqrt(1.0 - damping_ratio * damping_ratio)));
  return static_cast<std::size_t>(std::ceil(full / scale_p));
}

double sampling_error_bound(double sample_rate_hz, double f_max_hz) {
  if (!(f_max_hz > 0.0) || !(sample_rate_hz > 0.0)) {
    throw std::invalid_argument("sample rate and maximum frequency must be positive");
  }
  const double ratio = sample_rate_hz / f_max_hz;
  return 100.0 * (1.0 - std::cos(std::numbers::pi / ratio));
}

FrequencyGrid log_frequency_grid(double f_min_hz, double f_max_hz, Index count,
                                 double damping_ratio) {
  if (count < 2) throw std::invalid_argument("a log grid needs at least two points");
  if (!(f_min_hz > 0.0) || !(f_min_hz < f_max_hz)) {
    throw std::invalid_argument("log grid needs 0 < f_min < f_max");
  }
  VectorXd freqs(count);
  const double lo = std::log10(f_min_hz);
  const double step = (std::log10(f_max_hz) - lo) / static_cast<double>(count - 1);
  for (Index k = 0; k < count; ++k) freqs(k) = std::pow(10.0, lo + step * static_cast<double>(k));
  freqs(0) = f_min_hz;
  freqs(count - 1) = f_max_hz;
  return FrequencyGrid(std::move(freqs), damping_ratio);
}

SdofFilter absolute_acceleration_filter(double natural_hz, double damping_ratio,
                                        double sample_rate_hz) {
  const double dt = 1.0 / sample_rate_hz;
  const double omega = 2.0 * std::numbers::pi * natural_hz;
  const double omega_d = omega * std::sqrt(1.0 - damping_ratio * damping_ratio);
  const double decay = std::exp(-damping_ratio * omega * dt);
  const double phase = omega_d * dt;
  const double c = decay * std::cos(phase);
  const double s_over_phase = decay * std::sin(phase) / phase;

  SdofFilter f;
  f.b0 = 1.0 - s_over_phase;
  f.b1 = 2.0 * (s_over_phase - c);
  f.b2 = decay * decay - s_over_phase;
  f.a1 = 2.0 * c;
  f.a2 = -decay * decay;
  return f;
}

void require_below_nyquist(const FrequencyGrid& grid, double sample_rate_hz) {
  if (grid.size() == 0) throw std::invalid_argument("frequency grid is empty");
  if (grid.max_hz() > 0.5 * sample_rate_hz) {
    throw DataError("grid maximum " + std::to_string(grid.max_hz()) +
                    " Hz exceeds the Nyquist frequency " + std::to_string(0.5 * sample_rate_hz));
  }
}

namespace detail {

FilterBank make_filter_bank(const FrequencyGrid& grid, double sample_rate_hz) {
  const Index f = grid.size();
  FilterBank bank{ArrayXd(f), ArrayXd(f), ArrayXd(f), ArrayXd(f), ArrayXd(f)};
  for (Index i = 0; i < f; ++i) {
    const auto c = absolute_acceleration_filter(grid.freqs_hz()(i), grid.damping_ratio(),
                                                sample_rate_hz);
    bank.b0(i) = c.b0;
    bank.b1(i) = c.b1;
    bank.b2(i) = c.b2;
    bank.a1(i) = c.a1;
    bank.a2(i) = c.a2;
  }
  return bank;
}

}  // namespace detail

SdofResponse sdof_response(const Signal& signal, const FrequencyGrid& grid, double scale_p) {
  const double fs = signal.sample_rate_hz();
  require_below_nyquist(grid, fs);
  const auto& x = signal.samples();
  const Index n = x.size();
  const Index total =
      n + static_cast<Index>(padding_length(fs, grid.min_hz(), grid.damping_ratio(), scale_p));

  SdofResponse out{Eigen::MatrixXd(total, grid.size()), Eigen::VectorXi(grid.size())};
  parallel_for(grid.size(), [&](Index col) {
    const auto c = absolute_acceleration_filter(grid.freqs_hz()(col), grid.damping_ratio(), fs);
    double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
    double best = -1.0;
    Index best_at = 0;
    for (Index i = 0; i < total; ++i) {
      const double x0 = i < n ? x(i) : 0.0;
      const double y = c.b0 * x0 + c.b1 * x1 + c.b2 * x2 + c.a1 * y1 + c.a2 * y2;
      out.absolute_accel(i, col) = y;
      if (std::abs(y) > best) {
        best = std::abs(y);
        best_at = i;
      }
      y2 = y1;
      y1 = y;
      x2 = x1;
      x1 = x0;
    }
    out.peak_index(col) = static_cast<int>(best_at);
  });
  return out;
}

VectorXd relative_displacement(const VectorXd& input, double dt, double natural_hz,
                               double damping_ratio) {
  using Complex = std::complex<double>;
  const double omega = 2.0 * std::numbers::pi * natural_hz;
  const double omega_d = omega * std::sqrt(1.0 - damping_ratio * damping_ratio);
  const Complex pole(-damping_ratio * omega, omega_d);
  const Complex step = std::exp(pole * dt);

  // running(m) = sum_{k<=m} x_k e^{pole (m-k) dt}; trapezoid halves both ends.
  const Index n = input.size();
  VectorXd z(n);
  Complex running = 0.0;
  Complex first_decay = 1.0;
  for (Index m = 0; m < n; ++m) {
    running = running * step + input(m);
    if (m > 0) first_decay *= step;
    const Complex integral = dt * (running - 0.5 * input(0) * first_decay - 0.5 * input(m));
    z(m) = -integral.imag() / omega_d;
  }
  return z;
}

Spectrum srs_analytical(const Signal& signal, const FrequencyGrid& grid, double scale_p,
                        int refine) {
  const double fs = signal.sample_rate_hz();
  require_below_nyquist(grid, fs);
  if (refine < 1) throw std::invalid_argument("refinement factor must be >= 1");

  const auto& x = signal.samples();
  const Index n = x.size();
  const Index total =
      n + static_cast<Index>(padding_length(fs, grid.min_hz(), grid.damping_ratio(), scale_p));

  // The oscillator is at rest before the record, so the input ramps up from
  // zero at t = -Ts; sample k of the signal sits at coarse index k + 1.
  auto coarse = [&](Index i) { return i >= 1 && i <= n ? x(i - 1) : 0.0; };
  const Index points = total + 1;

  // Piecewise-linear input on the refined grid.
  const Index fine = (points - 1) * refine + 1;
  VectorXd xf = VectorXd::Zero(fine);
  for (Index i = 0; i + 1 < points; ++i) {
    const double a = coarse(i);
    const double b = coarse(i + 1);
    for (int r = 0; r < refine; ++r) {
      xf(i * refine + r) = a + (b - a) * static_cast<double>(r) / refine;
    }
  }
  xf(fine - 1) = coarse(points - 1);

  const double h = 1.0 / (fs * refine);
  const double inv_h2 = 1.0 / (h * h);
  VectorXd peaks(grid.size());
  parallel_for(grid.size(), [&](Index col) {
    const VectorXd z = relative_displacement(xf, h, grid.freqs_hz()(col), grid.damping_ratio());
    auto second_derivative = [&](Index m) {
      if (fine < 4) return 0.0;
      if (m == 0) return (2 * z(0) - 5 * z(1) + 4 * z(2) - z(3)) * inv_h2;
      if (m == fine - 1) {
        return (2 * z(m) - 5 * z(m - 1) + 4 * z(m - 2) - z(m - 3)) * inv_h2;
      }
      return (z(m + 1) - 2 * z(m) + z(m - 1)) * inv_h2;
    };
    double peak = 0.0;
    for (Index i = 1; i < points; ++i) {
      const Index m = i * refine;
      peak = std::max(peak, std::abs(second_derivative(m) + xf(m)));
    }
    peaks(col) = peak;
  });
  if (!peaks.allFinite()) throw DataError("non-finite oscillator response");
  return Spectrum(std::move(peaks), grid);
}

}  // namespace srskit
