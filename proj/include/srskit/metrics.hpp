#pragma once

#include "srskit/core.hpp"

#include <json.hpp>

#include <optional>
#include <span>
#include <vector>

namespace srskit {

class DatasetReader;

/// Root-mean-square of base-10 log ratios; both sides floored at kLogFloor.
double rmsle(const Spectrum& target, const Spectrum& pred);

/// Same measure on raw value vectors of equal length.
template <typename A, typename B>
double rmsle(const Eigen::MatrixBase<A>& target, const Eigen::MatrixBase<B>& pred) {
  if (target.size() != pred.size()) throw DataError("rmsle needs equal-length spectra");
  // The ratio form keeps the value exactly invariant under power-of-two rescaling of both sides.
  const auto ratio = target.array().max(kLogFloor) / pred.array().max(kLogFloor);
  return std::sqrt(ratio.log10().square().mean());
}

/// Signed per-frequency error 20 log10(pred / target), in dB.
VectorXd db_error(const Spectrum& target, const Spectrum& pred);

/// Fraction of pairs with a[j] < b[j] (strict).
double win_rate(std::span<const double> a, std::span<const double> b);

/// J spectra on one grid, stacked as the rows of a J x F matrix.
struct SpectrumEnsemble {
  Eigen::MatrixXd values;
  FrequencyGrid grid;

  static SpectrumEnsemble from(std::span<const Spectrum> spectra);
  Index size() const { return values.rows(); }
};

Spectrum aggregate_mean(const SpectrumEnsemble& ensemble);

/// Log-normal one-sided bound 10^(mean + k std) of log10 values per frequency,
/// with population (1/J) standard deviation.
Spectrum aggregate_upper_tol(const SpectrumEnsemble& ensemble, double k_factor);

struct SummaryStats {
  double mean = 0, median = 0, std = 0, min = 0, max = 0, q025 = 0, q975 = 0;
};

/// Quantile with linear interpolation between order statistics; `sorted`
/// must be ascending.
double quantile_sorted(std::span<const double> sorted, double q);

/// std uses the n-1 (sample) convention.
SummaryStats summarize(std::span<const double> values);

struct EvalReport {
  std::vector<double> per_sample_rmsle;
  SummaryStats summary;
  std::optional<double> win_rate_vs_baseline;
  std::vector<double> baseline_rmsle;
  /// Row-major over (sample, frequency).
  std::vector<double> db_errors;
  double db_within_1 = 0.0;
  double db_within_3 = 0.0;
};

/// Builds the report from aligned target and candidate spectra.
EvalReport evaluate_spectra(std::span<const Spectrum> targets, std::span<const Spectrum> candidates,
                            std::span<const Spectrum> baseline = {});

/// Recomputes the SRS of every target and candidate signal on `grid` and
/// scores the candidates; with a baseline, also the win rate of the
/// candidates over it.
EvalReport evaluate_holdout(const DatasetReader& targets, const DatasetReader& candidates,
                            const DatasetReader* baseline, const FrequencyGrid& grid,
                            double pad_scale = kDefaultPadScale);

nlohmann::json to_json(const SummaryStats& stats);
/// Omits the flat dB array unless `include_db` is set.
nlohmann::json to_json(const EvalReport& report, bool include_db = false);

struct HistogramBin {
  double lo = 0, hi = 0;
  Index count = 0;
};

/// Fixed-width histogram spanning [floor(min), ceil(max)] of the data; the
/// last bin is closed on the right.
std::vector<HistogramBin> histogram(std::span<const double> values, double bin_width);

/// (value, cumulative fraction) pairs of the empirical CDF, one per sample.
std::vector<std::pair<double, double>> ecdf(std::span<const double> values);

}  // namespace srskit
