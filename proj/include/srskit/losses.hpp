#pragma once

// Reference implementations of the training-loss terms. These are plain
// numeric functions (no autodiff) and serve as the golden values the
// trainer must reproduce.

#include "srskit/core.hpp"

#include <json.hpp>

#include <optional>

namespace srskit {

enum class LogBase { Natural, Ten };

/// Mean squared difference of log(x + epsilon).
struct MsleConfig {
  LogBase base = LogBase::Natural;
  double epsilon = kLogFloor;
};

template <typename A, typename B>
double msle(const Eigen::MatrixBase<A>& target, const Eigen::MatrixBase<B>& pred,
            const MsleConfig& config = {}) {
  if (target.size() != pred.size()) throw DataError("msle needs equal-length inputs");
  auto lt = (target.array() + config.epsilon).log();
  auto lp = (pred.array() + config.epsilon).log();
  const double scale = config.base == LogBase::Ten ? 1.0 / std::log(10.0) : 1.0;
  return ((lp - lt) * scale).square().mean();
}

/// Welch estimator: Hann-windowed segments, averaged periodograms, one-sided
/// density in units^2 / Hz. No detrending.
struct WelchConfig {
  Index segment = 1024;
  Index overlap = 512;
};

VectorXd welch_psd(const VectorXd& samples, double sample_rate_hz, const WelchConfig& config = {});

/// Shape-loss weighting. The Gaussian window has standard deviation
/// sigma_periods * fs / f samples; sigma_periods == 0 degenerates to a unit
/// weight on the aligned peak only.
struct ShapeConfig {
  double sigma_periods = 1.0;
  double pad_scale = kDefaultPadScale;
};

struct LatentStats {
  VectorXd mu;
  VectorXd log_var;
};

struct LossWeights {
  double shape = 0.282;
  double ts = 0.062;
  double psd = 0.0147;
  double srs = 0.237;
  double kl = 0.404;

  void validate() const;
};

struct LossParts {
  double shape = 0.0;
  double ts = 0.0;
  double psd = 0.0;
  double srs = 0.0;
  double kl = 0.0;
};

/// Root-mean-square error between the time series.
double loss_ts(const Signal& target, const Signal& pred);

double loss_srs(const Spectrum& target, const Spectrum& pred, const MsleConfig& config = {});

double loss_psd(const Signal& target, const Signal& pred, const WelchConfig& welch = {},
                const MsleConfig& config = {});

/// Per-frequency weighted MSE between peak-centred (circularly shifted)
/// oscillator responses; divided by the padded record length.
VectorXd shape_terms(const Signal& target, const Signal& pred, const FrequencyGrid& grid,
                     const ShapeConfig& config = {});

double loss_shape(const Signal& target, const Signal& pred, const FrequencyGrid& grid,
                  const ShapeConfig& config = {});

/// Closed-form KL(N(mu, sigma^2) || N(0, I)), summed over latent dimensions.
double kl_divergence(const LatentStats& stats);

double loss_total(const LossParts& parts, const LossWeights& weights);

struct LossEvalConfig {
  MsleConfig srs_msle;
  MsleConfig psd_msle;
  WelchConfig welch;
  ShapeConfig shape;
  LossWeights weights;
};

/// All five parts for a (target, pred) pair. Without latent stats the KL part
/// is zero.
LossParts evaluate_losses(const Signal& target, const Signal& pred, const FrequencyGrid& grid,
                          const std::optional<LatentStats>& latent, const LossEvalConfig& config);

nlohmann::json to_json(const LossParts& parts);
nlohmann::json to_json(const LossWeights& weights);
nlohmann::json to_json(const LossEvalConfig& config);

}  // namespace srskit
