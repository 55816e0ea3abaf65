#include "srskit/losses.hpp"

#include <complex>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "srskit/parallel.hpp"
#include "srskit/srs.hpp"

namespace srskit {

void LossWeights::validate() const {
  for (double w : {shape, ts, psd, srs, kl}) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("loss weights must be >= 0");
  }
  if (shape + ts + psd + srs + kl <= 0.0) {
    throw std::invalid_argument("at least one loss weight must be positive");
  }
}

double loss_ts(const Signal& target, const Signal& pred) {
  if (target.size() != pred.size()) throw DataError("time-series loss needs equal lengths");
  return std::sqrt((pred.samples() - target.samples()).squaredNorm() /
                   static_cast<double>(target.size()));
}

double loss_srs(const Spectrum& target, const Spectrum& pred, const MsleConfig& config) {
  require_same_grid(target, pred);
  return msle(target.values(), pred.values(), config);
}

VectorXd welch_psd(const VectorXd& samples, double sample_rate_hz, const WelchConfig& config) {
  const Index seg = config.segment;
  if (seg < 2 || config.overlap < 0 || config.overlap >= seg) {
    throw std::invalid_argument("invalid Welch segment/overlap");
  }
  if (samples.size() < seg) throw DataError("signal shorter than one Welch segment");

  // Periodic Hann window.
  const ArrayXd window = 0.5 - 0.5 * (ArrayXd::LinSpaced(seg, 0.0, static_cast<double>(seg - 1)) *
                                      (2.0 * std::numbers::pi / static_cast<double>(seg)))
                                         .cos();
  const double norm = 1.0 / (sample_rate_hz * window.square().sum());
  const Index step = seg - config.overlap;
  const Index segments = (samples.size() - seg) / step + 1;
  const Index bins = seg / 2 + 1;

  Eigen::FFT<double> fft;
  std::vector<double> frame(static_cast<std::size_t>(seg));
  std::vector<std::complex<double>> spectrum;
  ArrayXd acc = ArrayXd::Zero(bins);
  for (Index s = 0; s < segments; ++s) {
    for (Index i = 0; i < seg; ++i) {
      frame[static_cast<std::size_t>(i)] = samples(s * step + i) * window(i);
    }
    fft.fwd(spectrum, frame);
    for (Index k = 0; k < bins; ++k) acc(k) += std::norm(spectrum[static_cast<std::size_t>(k)]);
  }
  acc *= norm / static_cast<double>(segments);
  // One-sided: fold negative frequencies except DC (and Nyquist for even seg).
  const Index last = seg % 2 == 0 ? bins - 1 : bins;
  acc.segment(1, last - 1) *= 2.0;
  return acc.matrix();
}

double loss_psd(const Signal& target, const Signal& pred, const WelchConfig& welch,
                const MsleConfig& config) {
  if (target.size() != pred.size()) throw DataError("PSD loss needs equal lengths");
  return msle(welch_psd(target.samples(), target.sample_rate_hz(), welch),
              welch_psd(pred.samples(), pred.sample_rate_hz(), welch), config);
}

VectorXd shape_terms(const Signal& target, const Signal& pred, const FrequencyGrid& grid,
                     const ShapeConfig& config) {
  if (target.size() != pred.size()) throw DataError("shape loss needs equal lengths");
  if (!(config.sigma_periods >= 0.0)) throw std::invalid_argument("sigma_periods must be >= 0");
  const auto rt = sdof_response(target, grid, config.pad_scale);
  const auto rp = sdof_response(pred, grid, config.pad_scale);
  const Index len = rt.absolute_accel.rows();
  const Index center = len / 2;
  const double fs = target.sample_rate_hz();

  VectorXd terms(grid.size());
  parallel_for(grid.size(), [&](Index col) {
    const double sigma = config.sigma_periods * fs / grid.freqs_hz()(col);
    const Index shift_t = center - rt.peak_index(col);
    const Index shift_p = center - rp.peak_index(col);
    auto aligned = [len](const Eigen::MatrixXd& r, Index c, Index shift, Index n) {
      Index src = (n - shift) % len;
      if (src < 0) src += len;
      return r(src, c);
    };
    double sum = 0.0;
    for (Index n = 0; n < len; ++n) {
      double w;
      if (sigma == 0.0) {
        w = n == center ? 1.0 : 0.0;
      } else {
        const double d = static_cast<double>(n - center) / sigma;
        w = std::exp(-0.5 * d * d);
      }
      if (w == 0.0) continue;
      const double diff = aligned(rt.absolute_accel, col, shift_t, n) -
                          aligned(rp.absolute_accel, col, shift_p, n);
      sum += w * diff * diff;
    }
    terms(col) = sum / static_cast<double>(len);
  });
  return terms;
}

double loss_shape(const Signal& target, const Signal& pred, const FrequencyGrid& grid,
                  const ShapeConfig& config) {
  return shape_terms(target, pred, grid, config).mean();
}

double kl_divergence(const LatentStats& stats) {
  if (stats.mu.size() != stats.log_var.size()) throw DataError("latent mu/log_var length mismatch");
  if (!stats.mu.allFinite() || !stats.log_var.allFinite()) {
    throw DataError("latent statistics must be finite");
  }
  const ArrayXd var = stats.log_var.array().exp();
  return 0.5 * (stats.mu.array().square() + var - stats.log_var.array() - 1.0).sum();
}

double loss_total(const LossParts& p, const LossWeights& w) {
  return w.shape * p.shape + w.ts * p.ts + w.psd * p.psd + w.srs * p.srs + w.kl * p.kl;
}

LossParts evaluate_losses(const Signal& target, const Signal& pred, const FrequencyGrid& grid,
                          const std::optional<LatentStats>& latent, const LossEvalConfig& config) {
  LossParts parts;
  parts.ts = loss_ts(target, pred);
  parts.srs = loss_srs(srs_filterbank(target, grid, config.shape.pad_scale),
                       srs_filterbank(pred, grid, config.shape.pad_scale), config.srs_msle);
  parts.psd = loss_psd(target, pred, config.welch, config.psd_msle);
  parts.shape = loss_shape(target, pred, grid, config.shape);
  parts.kl = latent ? kl_divergence(*latent) : 0.0;
  return parts;
}

nlohmann::json to_json(const LossParts& p) {
  return {{"shape", p.shape}, {"ts", p.ts}, {"psd", p.psd}, {"srs", p.srs}, {"kl", p.kl}};
}

nlohmann::json to_json(const LossWeights& w) {
  return {{"shape", w.shape}, {"ts", w.ts}, {"psd", w.psd}, {"srs", w.srs}, {"kl", w.kl}};
}

nlohmann::json to_json(const LossEvalConfig& c) {
  auto msle_json = [](const MsleConfig& m) {
    return nlohmann::json{{"log_base", m.base == LogBase::Ten ? "10" : "e"}, {"epsilon", m.epsilon}};
  };
  return {{"srs_msle", msle_json(c.srs_msle)},
          {"psd_msle", msle_json(c.psd_msle)},
          {"welch",
           {{"segment", c.welch.segment},
            {"overlap", c.welch.overlap},
            {"window", "hann_periodic"},
            {"detrend", "none"},
            {"scaling", "density_one_sided"}}},
          {"shape",
           {{"sigma_periods", c.shape.sigma_periods},
            {"pad_scale", c.shape.pad_scale},
            {"alignment", "circular_peak_center"}}},
          {"weights", to_json(c.weights)}};
}

}  // namespace srskit
