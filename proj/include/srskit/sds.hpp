#pragma once

// Sum-of-decayed-sinusoids inverse solver.

#include "srskit/core.hpp"
#include "srskit/genetic.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace srskit {

struct SdsAtom {
  double amplitude = 0.0;
  double decay = 0.0;  // lambda, 1/s
  double freq_hz = 0.0;
  double phase = 0.0;
};

struct SdsModel {
  std::vector<SdsAtom> atoms;
  Index n_samples = 0;
  double sample_rate_hz = 0.0;

  void validate() const;
};

/// x[n] = sum_i A_i exp(-lambda_i n Ts) sin(2 pi f_i n Ts + phi_i), n < N.
Signal render_sds(const SdsModel& model);

/// The base-10 RMSLE objective (shared with the metrics module).
double rmsle_loss(const Spectrum& target, const Spectrum& candidate);

struct GaConfig {
  int population = 64;
  int generations = 200;
  double mutation_rate = 0.1;
  double crossover_rate = 0.8;
  int elitism = 2;
  int tournament = 3;
};

struct FitConfig {
  int m_atoms = 12;
  /// Nelder-Mead iterations per restart.
  int max_iters = 1500;
  int restarts = 8;
  double time_budget_s = 600.0;
  std::optional<GaConfig> ga;
  std::uint64_t seed = 0;
  /// Rendering length/rate of the candidate signal.
  Index n_samples = 9000;
  double sample_rate_hz = 32768.0;
  double pad_scale = kDefaultPadScale;

  void validate() const;
};

struct FitResult {
  SdsModel model;
  double final_loss = 0.0;
  /// Best-so-far loss after every optimizer iteration and GA generation.
  std::vector<double> trace;
  /// Final loss of each Nelder-Mead restart.
  std::vector<double> restart_losses;
  int best_restart = 0;
  int evaluations = 0;
  std::optional<double> loss_before_ga;
  bool timed_out = false;
  double elapsed_s = 0.0;
};

/// Starting model: atoms at the largest local maxima of the target (topped up
/// with log-spaced frequencies), amplitude = 2 zeta target(f), lambda =
/// 0.05 * 2 pi f, zero phases.
SdsModel initial_sds_model(const Spectrum& target, const FitConfig& config);

FitResult fit_sds(const Spectrum& target, const FitConfig& config);

nlohmann::json to_json(const SdsModel& model);
SdsModel sds_model_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FitConfig& config);
nlohmann::json to_json(const FitResult& result, bool include_trace = true);

}  // namespace srskit
