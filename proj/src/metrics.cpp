#include "srskit/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "srskit/dataset.hpp"
#include "srskit/parallel.hpp"
#include "srskit/srs.hpp"

namespace srskit {

double rmsle(const Spectrum& target, const Spectrum& pred) {
  require_same_grid(target, pred);
  return rmsle(target.values(), pred.values());
}

VectorXd db_error(const Spectrum& target, const Spectrum& pred) {
  require_same_grid(target, pred);
  const ArrayXd t = target.values().array().max(kLogFloor);
  const ArrayXd p = pred.values().array().max(kLogFloor);
  return (20.0 * (p.log10() - t.log10())).matrix();
}

double win_rate(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DataError("win_rate needs sequences of equal length");
  if (a.empty()) throw std::invalid_argument("win_rate needs at least one pair");
  std::size_t wins = 0;
  for (std::size_t j = 0; j < a.size(); ++j) wins += a[j] < b[j] ? 1 : 0;
  return static_cast<double>(wins) / static_cast<double>(a.size());
}

SpectrumEnsemble SpectrumEnsemble::from(std::span<const Spectrum> spectra) {
  if (spectra.empty()) throw std::invalid_argument("ensemble needs at least one spectrum");
  SpectrumEnsemble e{Eigen::MatrixXd(static_cast<Index>(spectra.size()), spectra[0].size()),
                     spectra[0].grid()};
  for (std::size_t j = 0; j < spectra.size(); ++j) {
    require_same_grid(spectra[0], spectra[j]);
    e.values.row(static_cast<Index>(j)) = spectra[j].values().transpose();
  }
  return e;
}

Spectrum aggregate_mean(const SpectrumEnsemble& ensemble) {
  if (ensemble.size() < 1) throw std::invalid_argument("ensemble is empty");
  return Spectrum(ensemble.values.colwise().mean().transpose(), ensemble.grid);
}

Spectrum aggregate_upper_tol(const SpectrumEnsemble& ensemble, double k_factor) {
  if (ensemble.size() < 2) throw std::invalid_argument("upper tolerance needs at least two spectra");
  if (!(k_factor >= 0.0) || !std::isfinite(k_factor)) {
    throw std::invalid_argument("k factor must be finite and non-negative");
  }
  const Eigen::ArrayXXd logs = ensemble.values.array().max(kLogFloor).log10();
  const Eigen::ArrayXd mean = logs.colwise().mean().transpose();
  const Eigen::ArrayXd var =
      (logs.rowwise() - mean.transpose()).square().colwise().mean().transpose();
  const Eigen::ArrayXd bound = mean + k_factor * var.sqrt();
  return Spectrum(Eigen::pow(10.0, bound).matrix(), ensemble.grid);
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty sequence");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

SummaryStats summarize(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("cannot summarize an empty sequence");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  SummaryStats s;
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : sorted) ss += (v - s.mean) * (v - s.mean);
  s.std = sorted.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  s.min = sorted.front();
  s.max = sorted.back();
  s.median = quantile_sorted(sorted, 0.5);
  s.q025 = quantile_sorted(sorted, 0.025);
  s.q975 = quantile_sorted(sorted, 0.975);
  return s;
}

EvalReport evaluate_spectra(std::span<const Spectrum> targets, std::span<const Spectrum> candidates,
                            std::span<const Spectrum> baseline) {
  if (targets.size() != candidates.size()) throw DataError("target and candidate counts differ");
  if (!baseline.empty() && baseline.size() != targets.size()) {
    throw DataError("baseline count differs from targets");
  }
  if (targets.empty()) throw DataError("nothing to evaluate");

  EvalReport report;
  const std::size_t j_count = targets.size();
  const auto f = static_cast<std::size_t>(targets[0].size());
  report.per_sample_rmsle.resize(j_count);
  report.db_errors.resize(j_count * f);
  std::size_t within1 = 0, within3 = 0;
  for (std::size_t j = 0; j < j_count; ++j) {
    if (static_cast<std::size_t>(targets[j].size()) != f) throw DataError("ragged target spectra");
    report.per_sample_rmsle[j] = rmsle(targets[j], candidates[j]);
    const VectorXd db = db_error(targets[j], candidates[j]);
    for (std::size_t i = 0; i < f; ++i) {
      const double e = db(static_cast<Index>(i));
      report.db_errors[j * f + i] = e;
      within1 += std::abs(e) <= 1.0 ? 1 : 0;
      within3 += std::abs(e) <= 3.0 ? 1 : 0;
    }
  }
  const double total = static_cast<double>(report.db_errors.size());
  report.db_within_1 = static_cast<double>(within1) / total;
  report.db_within_3 = static_cast<double>(within3) / total;
  report.summary = summarize(report.per_sample_rmsle);

  if (!baseline.empty()) {
    report.baseline_rmsle.resize(j_count);
    for (std::size_t j = 0; j < j_count; ++j) report.baseline_rmsle[j] = rmsle(targets[j], baseline[j]);
    report.win_rate_vs_baseline = win_rate(report.per_sample_rmsle, report.baseline_rmsle);
  }
  return report;
}

namespace {

std::vector<Spectrum> recompute(const DatasetReader& reader, const FrequencyGrid& grid,
                                double pad_scale) {
  std::vector<Spectrum> out(static_cast<std::size_t>(reader.size()));
  parallel_for(reader.size(), [&](Index i) {
    out[static_cast<std::size_t>(i)] = srs_filterbank(reader.read(i).signal, grid, pad_scale);
  });
  return out;
}

}  // namespace

EvalReport evaluate_holdout(const DatasetReader& targets, const DatasetReader& candidates,
                            const DatasetReader* baseline, const FrequencyGrid& grid,
                            double pad_scale) {
  if (targets.size() != candidates.size()) throw DataError("target and candidate counts differ");
  if (baseline && baseline->size() != targets.size()) {
    throw DataError("baseline count differs from targets");
  }
  for (const DatasetReader* r : {&targets, &candidates, baseline}) {
    if (r && r->manifest().sample_rate_hz != targets.manifest().sample_rate_hz) {
      throw DataError("datasets disagree on sample rate");
    }
  }
  const auto t = recompute(targets, grid, pad_scale);
  const auto c = recompute(candidates, grid, pad_scale);
  std::vector<Spectrum> b;
  if (baseline) b = recompute(*baseline, grid, pad_scale);
  return evaluate_spectra(t, c, b);
}

nlohmann::json to_json(const SummaryStats& s) {
  return {{"mean", s.mean}, {"median", s.median}, {"std", s.std}, {"min", s.min},
          {"max", s.max},   {"q025", s.q025},     {"q975", s.q975}};
}

nlohmann::json to_json(const EvalReport& r, bool include_db) {
  nlohmann::json j{{"count", r.per_sample_rmsle.size()},
                   {"per_sample_rmsle", r.per_sample_rmsle},
                   {"summary", to_json(r.summary)},
                   {"db_within_1", r.db_within_1},
                   {"db_within_3", r.db_within_3},
                   {"win_rate_vs_baseline", nullptr}};
  if (r.win_rate_vs_baseline) {
    j["win_rate_vs_baseline"] = *r.win_rate_vs_baseline;
    j["baseline_rmsle"] = r.baseline_rmsle;
    j["baseline_summary"] = to_json(summarize(r.baseline_rmsle));
  }
  if (include_db) j["db_errors"] = r.db_errors;
  return j;
}

std::vector<HistogramBin> histogram(std::span<const double> values, double bin_width) {
  if (!(bin_width > 0.0)) throw std::invalid_argument("bin width must be positive");
  if (values.empty()) return {};
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  const double lo = std::floor(*mn / bin_width) * bin_width;
  const auto bins = std::max<Index>(1, static_cast<Index>(std::ceil((*mx - lo) / bin_width)));
  std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
  for (Index b = 0; b < bins; ++b) {
    out[static_cast<std::size_t>(b)].lo = lo + static_cast<double>(b) * bin_width;
    out[static_cast<std::size_t>(b)].hi = lo + static_cast<double>(b + 1) * bin_width;
  }
  for (double v : values) {
    const auto b = std::min<Index>(bins - 1, static_cast<Index>(std::floor((v - lo) / bin_width)));
    ++out[static_cast<std::size_t>(b)].count;
  }
  return out;
}

std::vector<std::pair<double, double>> ecdf(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<double, double>> out;
  out.reserve(sorted.size());
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    out.emplace_back(sorted[i], static_cast<double>(i + 1) / n);
  }
  return out;
}

}  // namespace srskit
