#include "srskit/sds.hpp"

#include <chrono>
#include <complex>
#include <numbers>

#include "srskit/metrics.hpp"
#include "srskit/nelder_mead.hpp"
#include "srskit/parallel.hpp"
#include "srskit/srs.hpp"
#include "srskit/synth.hpp"

namespace srskit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kParamsPerAtom = 4;

// Optimizer coordinates per atom: log(A / amplitude_ref), log(lambda),
// log(f), phase. Decoding clamps into the feasible box.
struct Codec {
  double amplitude_ref = 1.0;
  double f_lo = 0.0;
  double f_hi = 0.0;
  Index n_samples = 0;
  double sample_rate_hz = 0.0;

  VectorXd encode(const SdsModel& m) const {
    VectorXd x(static_cast<Index>(m.atoms.size()) * kParamsPerAtom);
    for (std::size_t i = 0; i < m.atoms.size(); ++i) {
      const auto& a = m.atoms[i];
      const Index k = static_cast<Index>(i) * kParamsPerAtom;
      x(k) = std::log(a.amplitude / amplitude_ref);
      x(k + 1) = std::log(std::max(a.decay, 1e-9));
      x(k + 2) = std::log(a.freq_hz);
      x(k + 3) = a.phase;
    }
    return x;
  }

  SdsModel decode(const VectorXd& x) const {
    SdsModel m;
    m.n_samples = n_samples;
    m.sample_rate_hz = sample_rate_hz;
    m.atoms.resize(static_cast<std::size_t>(x.size() / kParamsPerAtom));
    for (std::size_t i = 0; i < m.atoms.size(); ++i) {
      const Index k = static_cast<Index>(i) * kParamsPerAtom;
      auto& a = m.atoms[i];
      a.amplitude = amplitude_ref * std::exp(std::clamp(x(k), -700.0, 700.0));
      a.decay = std::clamp(std::exp(std::min(x(k + 1), 700.0)), 0.0, sample_rate_hz);
      a.freq_hz = std::clamp(std::exp(std::min(x(k + 2), 700.0)), f_lo, f_hi);
      a.phase = x(k + 3) - kTwoPi * std::floor(x(k + 3) / kTwoPi);
    }
    return m;
  }
};

// Each atom advances as a complex rotation z_n = A e^{(-lambda + i w) n Ts + i phi},
// re-anchored to the closed form every kAnchor samples to bound drift.
VectorXd render_samples(const SdsModel& model) {
  constexpr Index kAnchor = 256;
  const Index n = model.n_samples;
  const double ts = 1.0 / model.sample_rate_hz;
  VectorXd x = VectorXd::Zero(n);
  for (const auto& a : model.atoms) {
    const double omega = kTwoPi * a.freq_hz;
    const std::complex<double> rotation = std::exp(std::complex<double>(-a.decay * ts, omega * ts));
    std::complex<double> z;
    for (Index i = 0; i < n; ++i) {
      if (i % kAnchor == 0) {
        const double t = static_cast<double>(i) * ts;
        const double theta = omega * t + a.phase;
        z = a.amplitude * std::exp(-a.decay * t) * std::complex<double>(std::cos(theta), std::sin(theta));
      } else {
        z *= rotation;
      }
      x(i) += z.imag();
    }
  }
  return x;
}

std::vector<Index> local_maxima(const VectorXd& v) {
  std::vector<Index> idx;
  const Index n = v.size();
  for (Index i = 0; i < n; ++i) {
    const bool left = i == 0 || v(i) > v(i - 1);
    const bool right = i == n - 1 || v(i) >= v(i + 1);
    if (left && right) idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return v(a) > v(b); });
  return idx;
}

}  // namespace

void SdsModel::validate() const {
  if (atoms.empty()) throw std::invalid_argument("SDS model needs at least one atom");
  if (n_samples < 1 || !(sample_rate_hz > 0.0)) {
    throw std::invalid_argument("SDS model needs a positive length and sample rate");
  }
  for (const auto& a : atoms) {
    if (!(a.freq_hz > 0.0 && a.freq_hz < 0.5 * sample_rate_hz)) {
      throw std::invalid_argument("SDS atom frequency outside (0, Nyquist)");
    }
    if (!(a.decay >= 0.0) || !std::isfinite(a.amplitude) || !std::isfinite(a.phase)) {
      throw std::invalid_argument("SDS atom has invalid decay, amplitude or phase");
    }
  }
}

Signal render_sds(const SdsModel& model) {
  model.validate();
  return Signal(render_samples(model), model.sample_rate_hz);
}

double rmsle_loss(const Spectrum& target, const Spectrum& candidate) {
  return rmsle(target, candidate);
}

void FitConfig::validate() const {
  if (m_atoms < 1 || max_iters < 1 || restarts < 1) {
    throw std::invalid_argument("fit counts (atoms, iterations, restarts) must be >= 1");
  }
  if (!(time_budget_s > 0.0)) throw std::invalid_argument("time budget must be positive");
  if (n_samples < 1 || !(sample_rate_hz > 0.0)) {
    throw std::invalid_argument("fit needs a positive signal length and sample rate");
  }
  if (ga) {
    if (ga->population < 1 || ga->generations < 1 || ga->elitism < 1 || ga->tournament < 1) {
      throw std::invalid_argument("GA counts must be >= 1");
    }
    for (double r : {ga->mutation_rate, ga->crossover_rate}) {
      if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("GA rates must lie in [0, 1]");
    }
  }
}

SdsModel initial_sds_model(const Spectrum& target, const FitConfig& config) {
  const auto& freqs = target.grid().freqs_hz();
  const auto& values = target.values();
  const double zeta = target.grid().damping_ratio();
  const double f_hi = 0.49 * config.sample_rate_hz;

  std::vector<double> chosen;
  for (Index i : local_maxima(values)) {
    if (static_cast<int>(chosen.size()) == config.m_atoms) break;
    chosen.push_back(freqs(i));
  }
  // Top up with log-spaced frequencies across the grid.
  const int missing = config.m_atoms - static_cast<int>(chosen.size());
  for (int k = 0; k < missing; ++k) {
    const double u = (k + 0.5) / missing;
    chosen.push_back(std::exp(std::log(target.grid().min_hz()) +
                              u * (std::log(target.grid().max_hz()) - std::log(target.grid().min_hz()))));
  }

  SdsModel model;
  model.n_samples = config.n_samples;
  model.sample_rate_hz = config.sample_rate_hz;
  for (double f : chosen) {
    f = std::min(f, f_hi);
    // Spectrum value at the nearest grid point.
    Index nearest = 0;
    (freqs.array().log() - std::log(f)).abs().minCoeff(&nearest);
    SdsAtom a;
    a.freq_hz = f;
    a.amplitude = std::max(values(nearest), kLogFloor) * 2.0 * zeta;
    a.decay = 0.05 * kTwoPi * f;
    a.phase = 0.0;
    model.atoms.push_back(a);
  }
  return model;
}

FitResult fit_sds(const Spectrum& target, const FitConfig& config) {
  config.validate();
  if (!(target.max() > 0.0)) throw DataError("cannot fit an all-zero target spectrum");
  require_below_nyquist(target.grid(), config.sample_rate_hz);

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const auto deadline =
      start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(config.time_budget_s));

  const FrequencyGrid& grid = target.grid();
  const VectorXd target_values = target.values();

  Codec codec;
  codec.amplitude_ref = target.max();
  codec.f_lo = 0.1 * grid.min_hz();
  codec.f_hi = 0.49 * config.sample_rate_hz;
  codec.n_samples = config.n_samples;
  codec.sample_rate_hz = config.sample_rate_hz;

  auto spectrum_of = [&](const SdsModel& m) {
    return maximax(render_samples(m), config.sample_rate_hz, grid, config.pad_scale);
  };
  auto objective = [&](const VectorXd& x) { return rmsle(target_values, spectrum_of(codec.decode(x))); };

  const SdsModel init = initial_sds_model(target, config);
  const VectorXd x0 = codec.encode(init);
  const Index dim = x0.size();
  VectorXd step(dim);
  for (Index k = 0; k < dim; k += kParamsPerAtom) {
    step(k) = 0.5;
    step(k + 1) = 0.5;
    step(k + 2) = 0.05;
    step(k + 3) = 1.0;
  }

  struct RestartOutcome {
    std::optional<NelderMeadResult> result;
  };
  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(config.restarts));
  parallel_for(config.restarts, [&](Index r) {
    auto rng = make_stream_engine(config.seed, static_cast<std::uint64_t>(r));
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    VectorXd x = x0;
    if (r > 0) {
      for (Index k = 3; k < dim; k += kParamsPerAtom) x(k) = phase(rng);
    }
    NelderMeadOptions opts;
    opts.max_iters = config.max_iters;
    opts.deadline = deadline;
    try {
      outcomes[static_cast<std::size_t>(r)].result = nelder_mead(objective, x, step, opts);
    } catch (const BudgetExhausted&) {
    }
  });

  FitResult fit;
  int best = -1;
  double running = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    const auto& o = outcomes[r].result;
    if (!o) {
      fit.restart_losses.push_back(std::numeric_limits<double>::quiet_NaN());
      fit.timed_out = true;
      continue;
    }
    fit.evaluations += o->evaluations;
    fit.timed_out = fit.timed_out || o->timed_out;
    fit.restart_losses.push_back(o->f);
    for (double v : o->trace) {
      running = std::min(running, v);
      fit.trace.push_back(running);
    }
    if (best < 0 || o->f < outcomes[static_cast<std::size_t>(best)].result->f) best = static_cast<int>(r);
  }
  if (best < 0) throw BudgetExhausted("time budget exhausted before any complete evaluation");

  VectorXd x_best = outcomes[static_cast<std::size_t>(best)].result->x;
  double f_best = outcomes[static_cast<std::size_t>(best)].result->f;
  fit.best_restart = best;
  if (fit.trace.empty()) fit.trace.push_back(f_best);

  if (config.ga) {
    fit.loss_before_ga = f_best;
    GeneticOptions go;
    go.population = config.ga->population;
    go.generations = config.ga->generations;
    go.mutation_rate = config.ga->mutation_rate;
    go.crossover_rate = config.ga->crossover_rate;
    go.elitism = config.ga->elitism;
    go.tournament = config.ga->tournament;
    go.deadline = deadline;
    auto rng = make_stream_engine(config.seed, static_cast<std::uint64_t>(config.restarts) + 0x6a0000u);
    const auto ga = genetic_refine(objective, x_best, f_best, VectorXd(step * 0.25), rng, go);
    fit.evaluations += ga.evaluations;
    running = fit.trace.back();
    for (double v : ga.trace) {
      running = std::min(running, v);
      fit.trace.push_back(running);
    }
    x_best = ga.x;
    f_best = ga.f;
  }

  fit.model = codec.decode(x_best);
  fit.final_loss = f_best;
  fit.elapsed_s = std::chrono::duration<double>(Clock::now() - start).count();
  return fit;
}

nlohmann::json to_json(const SdsModel& model) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : model.atoms) {
    atoms.push_back({{"amplitude", a.amplitude}, {"decay", a.decay}, {"freq_hz", a.freq_hz}, {"phase", a.phase}});
  }
  return {{"n_samples", model.n_samples}, {"sample_rate_hz", model.sample_rate_hz}, {"atoms", atoms}};
}

SdsModel sds_model_from_json(const nlohmann::json& j) {
  SdsModel m;
  try {
    m.n_samples = j.at("n_samples").get<Index>();
    m.sample_rate_hz = j.at("sample_rate_hz").get<double>();
    for (const auto& a : j.at("atoms")) {
      m.atoms.push_back({a.at("amplitude").get<double>(), a.at("decay").get<double>(),
                         a.at("freq_hz").get<double>(), a.at("phase").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed SDS model: ") + e.what());
  }
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  return m;
}

nlohmann::json to_json(const FitConfig& c) {
  nlohmann::json j{{"m_atoms", c.m_atoms},           {"max_iters", c.max_iters},
                   {"restarts", c.restarts},         {"time_budget_s", c.time_budget_s},
                   {"seed", c.seed},                 {"n_samples", c.n_samples},
                   {"sample_rate_hz", c.sample_rate_hz}, {"pad_scale", c.pad_scale},
                   {"optimizer", "nelder_mead_adaptive"}, {"ga", nullptr}};
  if (c.ga) {
    j["ga"] = {{"population", c.ga->population},       {"generations", c.ga->generations},
               {"mutation_rate", c.ga->mutation_rate}, {"crossover_rate", c.ga->crossover_rate},
               {"elitism", c.ga->elitism},             {"tournament", c.ga->tournament},
               {"selection", "tournament"},            {"mutation", "gaussian_transformed"}};
  }
  return j;
}

nlohmann::json to_json(const FitResult& r, bool include_trace) {
  nlohmann::json restart = nlohmann::json::array();
  for (double v : r.restart_losses) restart.push_back(std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v));
  nlohmann::json j{{"model", to_json(r.model)},
                   {"final_loss", r.final_loss},
                   {"restart_losses", restart},
                   {"best_restart", r.best_restart},
                   {"evaluations", r.evaluations},
                   {"timed_out", r.timed_out},
                   {"loss_before_ga", r.loss_before_ga ? nlohmann::json(*r.loss_before_ga) : nlohmann::json(nullptr)}};
  if (include_trace) j["trace"] = r.trace;
  return j;
}

}  // namespace srskit
