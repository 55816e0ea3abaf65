#include <doctest.h>

#include "support.hpp"

#include "srskit/dataset.hpp"
#include "srskit/generate.hpp"
#include "srskit/metrics.hpp"

#include <numeric>

using namespace srskit;

namespace {

Spectrum spectrum_of(std::initializer_list<double> v) {
  VectorXd values(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) values(i++) = x;
  return Spectrum(values, log_frequency_grid(10, 100, values.size()));
}

}  // namespace

TEST_CASE("rmsle") {
  const auto t = test::random_shocks(1, 1)[0];
  const auto s = srs_filterbank(t, log_frequency_grid(10, 4096, 100));
  CHECK(rmsle(s, s) == 0.0);
  CHECK(rmsle(s, s.scaled(10.0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rmsle(spectrum_of({1, 100}), spectrum_of({10, 100})) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
  CHECK(std::isfinite(rmsle(spectrum_of({1, 1}), spectrum_of({0, 1}))));
  CHECK_THROWS_AS(rmsle(spectrum_of({1, 1}), spectrum_of({1, 1, 1})), DataError);
}

TEST_CASE("dB error") {
  const auto s = spectrum_of({1, 2, 30, 0.5});
  CHECK(db_error(s, s).isZero(0.0));
  const VectorXd up = db_error(s, s.scaled(2.0));
  for (Index i = 0; i < up.size(); ++i) CHECK(up(i) == doctest::Approx(6.0206).epsilon(1e-6 / 6.0206));
  const VectorXd down = db_error(s, s.scaled(1.0 / std::sqrt(10.0)));
  for (Index i = 0; i < down.size(); ++i) CHECK(down(i) == doctest::Approx(-10.0).epsilon(1e-12));
}

TEST_CASE("rmsle and dB error agree") {
  const auto shocks = test::random_shocks(4, 8);
  const auto grid = log_frequency_grid(10, 4096, 100);
  for (std::size_t i = 0; i + 1 < shocks.size(); ++i) {
    const auto a = srs_filterbank(shocks[i], grid);
    const auto b = srs_filterbank(shocks[i + 1], grid);
    const VectorXd db = db_error(a, b);
    CHECK(std::sqrt(db.squaredNorm() / db.size()) == doctest::Approx(20.0 * rmsle(a, b)).epsilon(1e-9));
  }
}

TEST_CASE("win rate") {
  const std::vector<double> lo{0.1, 0.2}, hi{0.3, 0.4};
  CHECK(win_rate(lo, hi) == 1.0);
  CHECK(win_rate(lo, lo) == 0.0);
  const std::vector<double> a{0.1, 0.3, 0.2}, b{0.2, 0.2, 0.25};
  CHECK(win_rate(a, b) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS(win_rate(a, lo));
}

TEST_CASE("mean aggregation") {
  const std::vector<Spectrum> one{spectrum_of({1, 5, 2})};
  CHECK(aggregate_mean(SpectrumEnsemble::from(one)).values() == one[0].values());
  const std::vector<Spectrum> two{spectrum_of({1, 3}), spectrum_of({3, 1})};
  CHECK(aggregate_mean(SpectrumEnsemble::from(two)).values() == VectorXd::Constant(2, 2.0));

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.1, 50.0);
  std::vector<Spectrum> many;
  for (int j = 0; j < 100; ++j) {
    VectorXd v(20);
    for (auto& x : v) x = u(rng);
    many.emplace_back(v, log_frequency_grid(10, 100, 20));
  }
  const auto mean = aggregate_mean(SpectrumEnsemble::from(many));
  for (Index f = 0; f < 20; ++f) {
    double sum = 0.0;
    for (const auto& s : many) sum += s.values()(f);
    CHECK(std::abs(mean.values()(f) - sum / 100.0) <= 1e-12 * mean.values()(f));
  }
  std::vector<Spectrum> scaled;
  for (const auto& s : many) scaled.push_back(s.scaled(3.5));
  CHECK(aggregate_mean(SpectrumEnsemble::from(scaled)).values().isApprox(3.5 * mean.values(), 1e-12));

  const std::vector<Spectrum> mixed{spectrum_of({1, 2}), spectrum_of({1, 2, 3})};
  CHECK_THROWS(SpectrumEnsemble::from(mixed));
}

TEST_CASE("upper tolerance aggregation") {
  const std::vector<Spectrum> same{spectrum_of({2, 7}), spectrum_of({2, 7}), spectrum_of({2, 7})};
  for (double k : {0.0, 1.0, 2.5}) {
    CHECK(aggregate_upper_tol(SpectrumEnsemble::from(same), k).values().isApprox(same[0].values(), 1e-12));
  }
  const std::vector<Spectrum> pair{spectrum_of({1, 1}), spectrum_of({100, 100})};
  const auto u = aggregate_upper_tol(SpectrumEnsemble::from(pair), 1.0);
  CHECK(u.values()(0) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(u.values()(1) == doctest::Approx(100.0).epsilon(1e-12));
  const auto g = aggregate_upper_tol(SpectrumEnsemble::from(pair), 0.0);
  CHECK(g.values()(0) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("summary statistics") {
  std::mt19937_64 rng(3);
  std::lognormal_distribution<double> d(0.0, 0.5);
  std::vector<double> v(257);
  for (auto& x : v) x = d(rng);
  const auto s = summarize(v);

  // Welford recomputation
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double delta = v[i] - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v[i] - mean);
  }
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  CHECK(s.mean == doctest::Approx(mean).epsilon(1e-9));
  CHECK(s.std == doctest::Approx(std::sqrt(m2 / (v.size() - 1))).epsilon(1e-9));
  CHECK(s.median == sorted[128]);
  CHECK(s.min == sorted.front());
  CHECK(s.max == sorted.back());
  // linear interpolation: position q (n - 1)
  CHECK(s.q025 == doctest::Approx(sorted[6] + 0.4 * (sorted[7] - sorted[6])).epsilon(1e-12));
  CHECK(s.q975 == doctest::Approx(sorted[249] + 0.6 * (sorted[250] - sorted[249])).epsilon(1e-12));

  const std::vector<double> four{4, 1, 3, 2};
  CHECK(summarize(four).median == 2.5);
}

TEST_CASE("evaluation report identities") {
  const auto grid = log_frequency_grid(10, 4096, 100);
  std::vector<Spectrum> targets, doubled;
  for (const auto& s : test::random_shocks(20, 31)) {
    targets.push_back(srs_filterbank(s, grid));
    doubled.push_back(srs_filterbank(Signal(2.0 * s.samples(), s.sample_rate_hz()), grid));
  }
  const auto same = evaluate_spectra(targets, targets);
  CHECK(same.summary.max == 0.0);
  CHECK(same.db_within_1 == 1.0);

  const auto twice = evaluate_spectra(targets, doubled);
  for (double r : twice.per_sample_rmsle) CHECK(r == doctest::Approx(std::log10(2.0)).epsilon(1e-9));
  for (double d : twice.db_errors) CHECK(d == doctest::Approx(6.0206).epsilon(1e-5));
  CHECK(twice.db_within_3 == 0.0);
  CHECK(twice.db_within_3 >= twice.db_within_1);

  const auto vs = evaluate_spectra(targets, targets, doubled);
  REQUIRE(vs.win_rate_vs_baseline);
  CHECK(*vs.win_rate_vs_baseline == 1.0);
}

TEST_CASE("hold-out evaluation on datasets") {
  GenParams p;
  p.seed = 12;
  const auto a = test::scratch_dir("holdout_a");
  const auto b = test::scratch_dir("holdout_b");
  generate_dataset(p, 8, {}, a);
  p.seed = 13;
  generate_dataset(p, 8, {}, b);
  DatasetReader ta(a), tb(b);
  const auto self = evaluate_holdout(ta, ta, &tb, ta.grid(), 3.0);
  CHECK(self.summary.max == 0.0);
  CHECK(self.db_within_1 == 1.0);
  CHECK(*self.win_rate_vs_baseline == 1.0);
  const auto other = evaluate_holdout(ta, tb, nullptr, ta.grid(), 3.0);
  CHECK(other.summary.median > 0.0);
  CHECK(other.db_within_3 >= other.db_within_1);
  const auto j = to_json(other);
  CHECK(j["summary"]["median"].get<double>() == other.summary.median);
}

TEST_CASE("histogram and ecdf") {
  const std::vector<double> v{-1.2, -0.1, 0.2, 0.3, 2.9};
  const auto h = histogram(v, 1.0);
  Index total = 0;
  for (const auto& b : h) total += b.count;
  CHECK(total == 5);
  CHECK(h.front().lo == -2.0);
  CHECK(h.back().hi == 3.0);
  const auto e = ecdf(v);
  REQUIRE(e.size() == 5);
  CHECK(e.front().first == -1.2);
  CHECK(e.back().second == 1.0);
}
