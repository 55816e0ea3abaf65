#include <doctest.h>

#include "support.hpp"

#include "srskit/genetic.hpp"
#include "srskit/metrics.hpp"
#include "srskit/nelder_mead.hpp"
#include "srskit/sds.hpp"

using namespace srskit;

namespace {

FitConfig quick_config() {
  FitConfig c;
  c.m_atoms = 4;
  c.restarts = 2;
  c.max_iters = 60;
  c.seed = 5;
  return c;
}

Spectrum shock_target(std::uint64_t seed) {
  return srs_filterbank(test::random_shocks(1, seed)[0], log_frequency_grid(10, 4096, 100));
}

}  // namespace

TEST_CASE("Nelder-Mead minimizes Rosenbrock") {
  auto rosen = [](const VectorXd& x) {
    return 100.0 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1.0 - x(0), 2);
  };
  NelderMeadOptions opts;
  opts.max_iters = 5000;
  opts.f_tol = 1e-16;
  const auto r = nelder_mead(rosen, (VectorXd(2) << -1.2, 1.0).finished(), VectorXd::Constant(2, 0.5), opts);
  CHECK(r.f < 1e-10);
  CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(r.x(1) == doctest::Approx(1.0).epsilon(1e-4));
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1]);

  // 8-D quadratic with the adaptive coefficients
  auto bowl = [](const VectorXd& x) { return (x.array() - 2.0).square().sum(); };
  const auto q = nelder_mead(bowl, VectorXd::Zero(8), VectorXd::Ones(8), opts);
  CHECK(q.f < 1e-8);

  NelderMeadOptions late;
  late.deadline = std::chrono::steady_clock::now() - std::chrono::seconds(1);
  CHECK_THROWS_AS(nelder_mead(bowl, VectorXd::Zero(8), VectorXd::Ones(8), late), BudgetExhausted);
}

TEST_CASE("genetic refinement never loses ground") {
  auto bowl = [](const VectorXd& x) { return (x.array() - 1.0).square().sum(); };
  std::mt19937_64 rng(9);
  const VectorXd start = VectorXd::Zero(6);
  GeneticOptions opts;
  opts.generations = 60;
  const auto r = genetic_refine(bowl, start, bowl(start), VectorXd::Constant(6, 0.3), rng, opts);
  CHECK(r.f <= bowl(start));
  CHECK(r.f < 0.5 * bowl(start));
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1]);

  // Started at the optimum, it must stay there.
  const VectorXd best = VectorXd::Ones(6);
  std::mt19937_64 rng2(10);
  const auto s = genetic_refine(bowl, best, 0.0, VectorXd::Constant(6, 0.3), rng2, opts);
  CHECK(s.f == 0.0);
  CHECK(s.x == best);
}

TEST_CASE("render_sds") {
  const double fs = 32768;
  SdsModel quarter{{{1.0, 0.0, fs / 4, 0.0}}, 16, fs};
  const VectorXd x = render_sds(quarter).samples();
  const double cycle[4] = {0, 1, 0, -1};
  for (Index n = 0; n < 16; ++n) CHECK(x(n) == doctest::Approx(cycle[n % 4]).scale(1.0).epsilon(1e-12));

  SdsModel a{{{1.0, 0.0, 440.0, 0.3}}, 9000, fs};
  SdsModel b{{{0.7, 0.0, 1234.5, 2.0}}, 9000, fs};
  SdsModel both{{a.atoms[0], b.atoms[0]}, 9000, fs};
  CHECK(render_sds(both).samples().isApprox(render_sds(a).samples() + render_sds(b).samples(), 1e-12));

  // e^{-lambda Ts N} = 1/2: the envelope over the last period is about A/2.
  const Index n = 9000;
  const double f = 1000.0;
  SdsModel decay{{{2.0, std::log(2.0) * fs / n, f, 0.0}}, n, fs};
  const VectorXd y = render_sds(decay).samples();
  const Index period = static_cast<Index>(std::ceil(fs / f));
  CHECK(y.tail(period).cwiseAbs().maxCoeff() == doctest::Approx(1.0).epsilon(5e-3));

  SdsModel bad{{{1.0, 0.0, fs, 0.0}}, 10, fs};
  CHECK_THROWS_AS(render_sds(bad), std::invalid_argument);
}

TEST_CASE("rmsle objective") {
  const auto grid = log_frequency_grid(10, 100, 2);
  const Spectrum t((VectorXd(2) << 1, 100).finished(), grid);
  const Spectrum c((VectorXd(2) << 10, 100).finished(), grid);
  CHECK(rmsle_loss(t, t) == 0.0);
  CHECK(rmsle_loss(t, t.scaled(10.0)) == doctest::Approx(1.0));
  CHECK(rmsle_loss(t, c) == doctest::Approx(0.70710678).epsilon(1e-9));
}

TEST_CASE("initial model") {
  const auto target = shock_target(3);
  FitConfig c;
  const auto m = initial_sds_model(target, c);
  REQUIRE(m.atoms.size() == 12);
  for (const auto& a : m.atoms) {
    CHECK(a.phase == 0.0);
    CHECK(a.decay == doctest::Approx(0.05 * 2 * std::numbers::pi * a.freq_hz));
    CHECK(a.freq_hz >= target.grid().min_hz());
    CHECK(a.freq_hz <= target.grid().max_hz());
  }
}

TEST_CASE("single-atom target is recovered") {
  const auto grid = log_frequency_grid(10, 4096, 100);
  SdsModel truth{{{3.0, 60.0, 350.0, 0.4}}, 9000, 32768};
  const auto target = srs_filterbank(render_sds(truth), grid);
  FitConfig c;
  c.m_atoms = 1;
  c.restarts = 4;
  c.max_iters = 400;
  const auto r = fit_sds(target, c);
  MESSAGE("M=1 self-consistency loss " << r.final_loss);
  CHECK(r.final_loss < 0.05);
}

TEST_CASE("constant target: trace contract") {
  const auto grid = log_frequency_grid(10, 4096, 100);
  const Spectrum flat(VectorXd::Constant(100, 5.0), grid);
  const auto r = fit_sds(flat, quick_config());
  REQUIRE(!r.trace.empty());
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1]);
  CHECK(r.trace.back() == r.final_loss);
  const auto candidate = srs_filterbank(render_sds(r.model), grid);
  CHECK(rmsle_loss(flat, candidate) == doctest::Approx(r.final_loss).epsilon(1e-12));
  CHECK(r.restart_losses.size() == 2);
  CHECK(r.final_loss == *std::min_element(r.restart_losses.begin(), r.restart_losses.end()));
}

TEST_CASE("fits are deterministic and thread-count independent") {
  const auto target = shock_target(8);
  auto c = quick_config();
  c.ga = GaConfig{.population = 16, .generations = 10};
  set_thread_count(1);
  const auto a = fit_sds(target, c);
  set_thread_count(3);
  const auto b = fit_sds(target, c);
  set_thread_count(0);
  CHECK(to_json(a).dump() == to_json(b).dump());
  REQUIRE(a.loss_before_ga);
  CHECK(a.final_loss <= *a.loss_before_ga);

  c.seed = 6;
  CHECK(to_json(fit_sds(target, c)).dump() != to_json(a).dump());
}

TEST_CASE("fits are scale equivariant") {
  const auto target = shock_target(12);
  const auto c = quick_config();
  const auto base = fit_sds(target, c);
  for (double a : {4.0, 0.125}) {
    const auto scaled = fit_sds(target.scaled(a), c);
    CHECK(scaled.final_loss == doctest::Approx(base.final_loss).epsilon(1e-12));
    const auto grid = target.grid();
    const auto s0 = srs_filterbank(render_sds(base.model), grid);
    const auto s1 = srs_filterbank(Signal(render_sds(scaled.model).samples() / a, 32768), grid);
    CHECK((s1.values() - s0.values()).cwiseAbs().maxCoeff() <= 1e-6 * s0.max());
  }
}

TEST_CASE("budget exhaustion and bad input") {
  auto c = quick_config();
  c.time_budget_s = 1e-9;
  CHECK_THROWS_AS(fit_sds(shock_target(1), c), BudgetExhausted);
  const auto grid = log_frequency_grid(10, 4096, 100);
  CHECK_THROWS_AS(fit_sds(Spectrum(VectorXd::Zero(100), grid), quick_config()), DataError);
  c = quick_config();
  c.restarts = 0;
  CHECK_THROWS_AS(fit_sds(shock_target(1), c), std::invalid_argument);
}

TEST_CASE("model json round trip") {
  SdsModel m{{{1.5, 20.0, 100.0, 0.1}, {0.5, 3.0, 2000.0, -1.0}}, 9000, 32768};
  const auto back = sds_model_from_json(to_json(m));
  REQUIRE(back.atoms.size() == 2);
  CHECK(back.atoms[1].freq_hz == 2000.0);
  CHECK(render_sds(back).samples() == render_sds(m).samples());
}
