#include <doctest.h>

#include "support.hpp"

using namespace srskit;

TEST_CASE("sampling error bound") {
  CHECK(std::abs(sampling_error_bound(32768, 4096) - 7.61) <= 0.01);
  CHECK(sampling_error_bound(1e6, 1.0) < 1e-9);
  CHECK(sampling_error_bound(32768, 16384) == doctest::Approx(100.0));
}

TEST_CASE("padding length") {
  CHECK(padding_length(32768, 10, 0.03, 1.0) == 1640);
  CHECK(padding_length(32768, 10, 0.03, 3.0) == 547);
  // fs / (2 fmin) = 1638.4 rounds up to 1639 as zeta -> 0
  CHECK(padding_length(32768, 10, 1e-12, 1.0) == 1639);
  CHECK_THROWS_AS(padding_length(32768, 10, 0.03, 0.5), std::invalid_argument);
}

TEST_CASE("log frequency grid") {
  const auto g = log_frequency_grid(10, 4096, 100);
  CHECK(g.size() == 100);
  CHECK(g.min_hz() == 10.0);
  CHECK(g.max_hz() == 4096.0);

  const auto h = log_frequency_grid(10, 1000, 4);
  for (int k = 0; k < 4; ++k) CHECK(h.freqs_hz()(k) == doctest::Approx(std::pow(10.0, 1.0 + k * 2.0 / 3.0)).epsilon(1e-9));
  CHECK(std::abs(h.freqs_hz()(1) - 46.4159) < 1e-3);
  CHECK(std::abs(h.freqs_hz()(2) - 215.443) < 1e-3);

  CHECK_THROWS_AS(log_frequency_grid(50, 50, 2), std::invalid_argument);
  CHECK_THROWS_AS(log_frequency_grid(10, 100, 1), std::invalid_argument);
}

TEST_CASE("zero input gives a zero spectrum") {
  const auto grid = log_frequency_grid(10, 4096, 100);
  for (Index n : {1, 17, 9000}) {
    const Signal z(VectorXd::Zero(n), 32768);
    CHECK(srs_filterbank(z, grid).values().isZero(0.0));
  }
  const Signal z(VectorXd::Zero(300), 32768);
  CHECK(srs_analytical(z, grid).values().isZero(0.0));
}

TEST_CASE("positive homogeneity") {
  const auto grid = log_frequency_grid(10, 4096, 100);
  const auto shocks = test::random_shocks(3, 11);
  for (const auto& s : shocks) {
    const auto base = srs_filterbank(s, grid);
    const auto scaled = srs_filterbank(Signal(2.5 * s.samples(), s.sample_rate_hz()), grid);
    CHECK((scaled.values() - 2.5 * base.values()).cwiseAbs().maxCoeff() <= 1e-12 * scaled.max());
  }
  const auto a = srs_analytical(shocks[0], grid);
  const auto b = srs_analytical(Signal(3.0 * shocks[0].samples(), 32768), grid);
  CHECK((b.values() - 3.0 * a.values()).cwiseAbs().maxCoeff() <= 1e-10 * b.max());
}

TEST_CASE("half-sine pulse matches the analytical oracle") {
  const auto grid = log_frequency_grid(10, 4096, 100);
  const auto pulse = test::half_sine(0.011, 1.0, 9000, 32768);
  const auto fb = srs_filterbank(pulse, grid);
  const auto an = srs_analytical(pulse, grid);
  const double err = test::max_rel_error(fb, an, 4096);
  MESSAGE("half-sine max relative deviation " << err);
  CHECK(err < 0.01);
}

TEST_CASE("resonant sine reaches the steady-state transmissibility") {
  // |H| at r = 1 for absolute acceleration: sqrt(1 + 4 zeta^2) / (2 zeta)
  const double zeta = 0.03, f = 200.0, fs = 32768.0;
  const Index n = 32768;
  VectorXd x(n);
  for (Index i = 0; i < n; ++i) x(i) = std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) / fs);
  FrequencyGrid grid(VectorXd::Constant(1, f), zeta);
  const double expected = std::sqrt(1.0 + 4.0 * zeta * zeta) / (2.0 * zeta);
  CHECK(srs_filterbank(Signal(x, fs), grid).values()(0) == doctest::Approx(expected).epsilon(5e-3));
}

TEST_CASE("relative displacement equals the literal convolution sum") {
  const auto shock = test::random_shocks(1, 5)[0];
  const VectorXd x = shock.samples().head(600);
  const double dt = 1.0 / 32768.0;
  for (double f : {10.0, 437.0, 4096.0}) {
    const VectorXd fast = relative_displacement(x, dt, f, 0.03);
    const VectorXd slow = test::literal_duhamel(x, dt, f, 0.03);
    CHECK((fast - slow).cwiseAbs().maxCoeff() <= 1e-9 * slow.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("filterbank agrees with the analytical oracle on synthetic shocks") {
  const auto grid = log_frequency_grid(10, 4096, 100);
  double worst = 0.0;
  for (const auto& s : test::random_shocks(10, 21)) {
    worst = std::max(worst, test::max_rel_error(srs_filterbank(s, grid), srs_analytical(s, grid), 32768.0 / 8));
  }
  MESSAGE("max relative deviation at f <= fs/8: " << worst);
  CHECK(worst < 0.01);
}

TEST_CASE("float signals are promoted") {
  const auto grid = log_frequency_grid(10, 4096, 50);
  const auto s = test::random_shocks(1, 3)[0];
  const SignalF f = s.cast<float>();
  const auto a = srs_filterbank(f, grid);
  const auto b = srs_filterbank(f.cast<double>(), grid);
  CHECK(a.values() == b.values());
}

TEST_CASE("sdof response peaks reproduce the spectrum") {
  const auto grid = log_frequency_grid(10, 4096, 30);
  const auto s = test::random_shocks(1, 9)[0];
  const auto r = sdof_response(s, grid);
  const auto spec = srs_filterbank(s, grid);
  CHECK(r.absolute_accel.rows() == s.size() + static_cast<Index>(padding_length(32768, 10, 0.03)));
  for (Index c = 0; c < grid.size(); ++c) {
    CHECK(std::abs(r.absolute_accel(r.peak_index(c), c)) == doctest::Approx(spec.values()(c)).epsilon(1e-12));
  }
}

TEST_CASE("grid above Nyquist is rejected") {
  const auto grid = log_frequency_grid(10, 20000, 10);
  const Signal s(VectorXd::Ones(100), 32768);
  CHECK_THROWS_AS(srs_filterbank(s, grid), DataError);
}

TEST_CASE("grid and spectrum validation") {
  CHECK_THROWS_AS(FrequencyGrid(VectorXd::LinSpaced(3, 30, 10)), std::invalid_argument);
  CHECK_THROWS_AS(FrequencyGrid(VectorXd::LinSpaced(3, 10, 30), 1.0), std::domain_error);
  const auto g = log_frequency_grid(10, 100, 3);
  CHECK_THROWS_AS(Spectrum(VectorXd::Constant(2, 1.0), g), std::invalid_argument);
  CHECK_THROWS_AS(Spectrum(VectorXd::Constant(3, -1.0), g), std::invalid_argument);
  CHECK_THROWS_AS(Signal(VectorXd(), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Signal(VectorXd::Ones(3), 0.0), std::invalid_argument);
}
