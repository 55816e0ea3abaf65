#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "srskit/dataset.hpp"
#include "srskit/generate.hpp"
#include "srskit/losses.hpp"
#include "srskit/metrics.hpp"
#include "srskit/parallel.hpp"
#include "srskit/sds.hpp"
#include "srskit/srs.hpp"
#include "srskit/synth.hpp"

namespace srskit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridOptions {
  std::string spec;  // "fmin,fmax,F"
  double zeta = kDefaultDamping;
  double pad_scale = kDefaultPadScale;

  void add_to(CLI::App* app) {
    app->add_option("--grid", spec, "Log grid as fmin,fmax,F (default 10,4096,100)");
    app->add_option("--zeta", zeta, "Oscillator damping ratio")->capture_default_str();
    app->add_option("--pad-scale", pad_scale, "Padding scale factor p >= 1")->capture_default_str();
  }

  bool given() const { return !spec.empty(); }

  GridSpec grid_spec() const {
    GridSpec g;
    g.damping_ratio = zeta;
    if (spec.empty()) return g;
    std::stringstream ss(spec);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c)) {
      throw UsageError("--grid expects fmin,fmax,F");
    }
    try {
      g.f_min_hz = std::stod(a);
      g.f_max_hz = std::stod(b);
      g.count = std::stol(c);
    } catch (const std::exception&) {
      throw UsageError("--grid expects numeric fmin,fmax,F");
    }
    return g;
  }
};

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  out << text;
  if (!out) throw DataError("cannot write " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

bool is_dataset(const fs::path& path) { return fs::is_directory(path); }

/// One value per line; with several comma-separated columns the last is used.
Signal read_signal_csv(const fs::path& path, double fs_hz) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find_last_of(',');
    const std::string cell = comma == std::string::npos ? line : line.substr(comma + 1);
    try {
      values.push_back(std::stod(cell));
    } catch (const std::exception&) {
      if (values.empty()) continue;  // header row
      throw DataError("non-numeric sample in " + path.string() + ": '" + cell + "'");
    }
  }
  if (!(fs_hz > 0.0)) throw UsageError("CSV signals need --fs");
  try {
    return Signal(Eigen::Map<VectorXd>(values.data(), static_cast<Index>(values.size())), fs_hz);
  } catch (const std::invalid_argument& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

Signal load_signal(const fs::path& path, Index index, double fs_hz) {
  if (is_dataset(path)) {
    DatasetReader reader(path);
    if (index < 0 || index >= reader.size()) throw DataError("record index out of range");
    return reader.read(index).signal;
  }
  return read_signal_csv(path, fs_hz);
}

json spectrum_json(const Spectrum& s) {
  std::vector<double> f(s.grid().freqs_hz().data(), s.grid().freqs_hz().data() + s.size());
  std::vector<double> v(s.values().data(), s.values().data() + s.size());
  return {{"damping_ratio", s.grid().damping_ratio()}, {"freqs_hz", f}, {"values", v}};
}

Spectrum spectrum_from_json(const json& j) {
  try {
    const auto f = j.at("freqs_hz").get<std::vector<double>>();
    const auto v = j.at("values").get<std::vector<double>>();
    FrequencyGrid grid(Eigen::Map<const VectorXd>(f.data(), static_cast<Index>(f.size())),
                       j.value("damping_ratio", kDefaultDamping));
    return Spectrum(Eigen::Map<const VectorXd>(v.data(), static_cast<Index>(v.size())), grid);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed spectrum JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("invalid spectrum: ") + e.what());
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// --- subcommands ---------------------------------------------------------

struct GenArgs {
  Index count = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string params;
  bool normalize = false;
  bool no_provenance = false;
  GridOptions grid;
};

int run_gen(const GenArgs& a, std::ostream& out) {
  GenParams params;
  if (!a.params.empty()) params = gen_params_from_json(read_json(a.params));
  params.seed = a.seed;
  DatasetGenOptions opts;
  opts.grid = a.grid.grid_spec();
  opts.pad_scale = a.grid.pad_scale;
  opts.normalize = a.normalize;
  opts.provenance = !a.no_provenance;
  const auto manifest = generate_dataset(params, a.count, opts, a.out);
  out << json{{"dataset", a.out}, {"count", manifest.count}, {"noise_var", manifest.noise_var}}.dump()
      << "\n";
  return kOk;
}

struct SrsArgs {
  std::string in;
  std::string out;
  double fs = 0.0;
  std::string method = "filterbank";
  GridOptions grid;
};

int run_srs(const SrsArgs& a, std::ostream& out) {
  auto compute = [&](const Signal& s, const FrequencyGrid& g, double pad) {
    return a.method == "analytical" ? srs_analytical(s, g, pad) : srs_filterbank(s, g, pad);
  };
  if (is_dataset(a.in)) {
    DatasetReader reader(a.in);
    DatasetManifest header = reader.manifest();
    if (a.grid.given()) header.grid = a.grid.grid_spec();
    header.pad_scale = a.grid.pad_scale;
    header.paired = true;
    const FrequencyGrid grid = header.grid.make();
    std::vector<Spectrum> spectra(static_cast<std::size_t>(reader.size()));
    std::vector<DatasetRecord> records = reader.read_all();
    parallel_for(reader.size(), [&](Index i) {
      spectra[static_cast<std::size_t>(i)] = compute(records[static_cast<std::size_t>(i)].signal, grid, header.pad_scale);
    });
    DatasetWriter writer(a.out, header);
    for (std::size_t i = 0; i < records.size(); ++i) {
      writer.append(records[i].signal, spectra[i], records[i].scale);
    }
    writer.finish();
    out << json{{"dataset", a.out}, {"count", writer.count()}}.dump() << "\n";
    return kOk;
  }
  const Signal signal = read_signal_csv(a.in, a.fs);
  const Spectrum s = compute(signal, a.grid.grid_spec().make(), a.grid.pad_scale);
  write_json(a.out, spectrum_json(s));
  out << json{{"spectrum", a.out}, {"count", s.size()}}.dump() << "\n";
  return kOk;
}

struct FitArgs {
  std::string target;
  std::string out;
  std::string candidates;
  std::vector<Index> indices;
  int atoms = 12;
  int restarts = 8;
  int iters = FitConfig{}.max_iters;
  bool ga = false;
  std::uint64_t seed = 0;
  double budget_s = FitConfig{}.time_budget_s;
  Index n_samples = 0;
  double fs = 0.0;
  double pad_scale = kDefaultPadScale;
};

int run_sds_fit(const FitArgs& a, std::ostream& out) {
  FitConfig config;
  config.m_atoms = a.atoms;
  config.restarts = a.restarts;
  config.max_iters = a.iters;
  config.seed = a.seed;
  config.time_budget_s = a.budget_s;
  config.pad_scale = a.pad_scale;
  if (a.ga) config.ga = GaConfig{};

  std::vector<std::pair<Index, Spectrum>> targets;
  std::optional<DatasetManifest> source;
  if (is_dataset(a.target)) {
    DatasetReader reader(a.target);
    source = reader.manifest();
    config.n_samples = reader.manifest().n_samples;
    config.sample_rate_hz = reader.manifest().sample_rate_hz;
    std::vector<Index> idx = a.indices;
    if (idx.empty()) {
      for (Index i = 0; i < reader.size(); ++i) idx.push_back(i);
    }
    for (Index i : idx) {
      if (i < 0 || i >= reader.size()) throw DataError("record index out of range");
      targets.emplace_back(i, reader.read(i).spectrum);
    }
  } else {
    targets.emplace_back(0, spectrum_from_json(read_json(a.target)));
  }
  if (a.n_samples > 0) config.n_samples = a.n_samples;
  if (a.fs > 0.0) config.sample_rate_hz = a.fs;

  json fits = json::array();
  std::vector<Signal> rendered;
  for (const auto& [index, spectrum] : targets) {
    const FitResult r = fit_sds(spectrum, config);
    json j = to_json(r);
    j["index"] = index;
    fits.push_back(std::move(j));
    rendered.push_back(render_sds(r.model));
  }
  write_json(a.out, {{"config", to_json(config)}, {"target", a.target}, {"fits", fits}});

  if (!a.candidates.empty()) {
    DatasetManifest header;
    header.n_samples = config.n_samples;
    header.sample_rate_hz = config.sample_rate_hz;
    header.grid = source ? source->grid : GridSpec{};
    if (!source) {
      const auto& g = targets.front().second.grid();
      header.grid = {g.min_hz(), g.max_hz(), g.size(), g.damping_ratio()};
      if (!(header.grid.make() == g)) throw DataError("target grid is not log-spaced; cannot write candidates");
    }
    header.pad_scale = config.pad_scale;
    header.source = "sds-fit";
    header.seed = config.seed;
    const FrequencyGrid grid = header.grid.make();
    DatasetWriter writer(a.candidates, header);
    for (const auto& s : rendered) writer.append(s, srs_filterbank(s, grid, config.pad_scale));
    writer.finish();
  }

  double worst = 0.0;
  for (const auto& f : fits) worst = std::max(worst, f.at("final_loss").get<double>());
  out << json{{"fits", fits.size()}, {"max_final_loss", worst}, {"out", a.out}}.dump() << "\n";
  return kOk;
}

struct LossArgs {
  std::string target;
  std::string pred;
  Index target_index = 0;
  Index pred_index = 0;
  double fs = 0.0;
  std::string latent;
  std::string out;
  std::vector<double> weights;
  double sigma_periods = ShapeConfig{}.sigma_periods;
  std::string srs_log_base = "e";
  std::string psd_log_base = "e";
  Index welch_segment = WelchConfig{}.segment;
  Index welch_overlap = WelchConfig{}.overlap;
  GridOptions grid;
};

int run_losses_eval(const LossArgs& a, std::ostream& out) {
  const Signal target = load_signal(a.target, a.target_index, a.fs);
  const Signal pred = load_signal(a.pred, a.pred_index, a.fs);
  if (target.sample_rate_hz() != pred.sample_rate_hz()) throw DataError("signals differ in sample rate");

  LossEvalConfig config;
  config.shape.sigma_periods = a.sigma_periods;
  config.shape.pad_scale = a.grid.pad_scale;
  config.welch = {a.welch_segment, a.welch_overlap};
  config.srs_msle.base = a.srs_log_base == "10" ? LogBase::Ten : LogBase::Natural;
  config.psd_msle.base = a.psd_log_base == "10" ? LogBase::Ten : LogBase::Natural;
  if (!a.weights.empty()) {
    if (a.weights.size() != 5) throw UsageError("--weights expects shape,ts,psd,srs,kl");
    config.weights = {a.weights[0], a.weights[1], a.weights[2], a.weights[3], a.weights[4]};
    config.weights.validate();
  }
  std::optional<LatentStats> latent;
  if (!a.latent.empty()) {
    const json j = read_json(a.latent);
    try {
      const auto mu = j.at("mu").get<std::vector<double>>();
      const auto lv = j.at("log_var").get<std::vector<double>>();
      latent = LatentStats{Eigen::Map<const VectorXd>(mu.data(), static_cast<Index>(mu.size())),
                           Eigen::Map<const VectorXd>(lv.data(), static_cast<Index>(lv.size()))};
    } catch (const json::exception& e) {
      throw DataError(std::string("malformed latent JSON: ") + e.what());
    }
  }
  const FrequencyGrid grid = a.grid.grid_spec().make();
  const LossParts parts = evaluate_losses(target, pred, grid, latent, config);
  const json result{{"parts", to_json(parts)},
                    {"total", loss_total(parts, config.weights)},
                    {"config", to_json(config)},
                    {"grid", {{"f_min", grid.min_hz()}, {"f_max", grid.max_hz()}, {"count", grid.size()}, {"damping_ratio", grid.damping_ratio()}}},
                    {"n_samples", target.size()},
                    {"sample_rate_hz", target.sample_rate_hz()},
                    {"has_latent", latent.has_value()}};
  if (a.out.empty()) {
    out << result.dump(2) << "\n";
  } else {
    write_json(a.out, result);
    out << json{{"out", a.out}, {"total", result["total"]}}.dump() << "\n";
  }
  return kOk;
}

struct EvalArgs {
  std::string targets;
  std::string candidates;
  std::string baseline;
  std::string report;
  std::string csv;
  double hist_bin_db = 0.5;
  GridOptions grid;
};

int run_eval(const EvalArgs& a, std::ostream& out) {
  DatasetReader targets(a.targets);
  DatasetReader candidates(a.candidates);
  std::optional<DatasetReader> baseline;
  if (!a.baseline.empty()) baseline.emplace(a.baseline);
  GridSpec spec = targets.manifest().grid;
  if (a.grid.given()) spec = a.grid.grid_spec();
  const FrequencyGrid grid = spec.make();

  const EvalReport report =
      evaluate_holdout(targets, candidates, baseline ? &*baseline : nullptr, grid, a.grid.pad_scale);
  json j = to_json(report);
  j["targets"] = a.targets;
  j["candidates"] = a.candidates;
  if (baseline) j["baseline"] = a.baseline;
  write_json(a.report, j);

  if (!a.csv.empty()) {
    const fs::path dir(a.csv);
    fs::create_directories(dir);
    std::ostringstream hist;
    hist << "db_lo,db_hi,count,fraction\n";
    const double total = static_cast<double>(report.db_errors.size());
    for (const auto& b : histogram(report.db_errors, a.hist_bin_db)) {
      hist << fmt(b.lo) << ',' << fmt(b.hi) << ',' << b.count << ',' << fmt(static_cast<double>(b.count) / total) << '\n';
    }
    write_text(dir / "db_histogram.csv", hist.str());

    std::vector<double> abs_db(report.db_errors.size());
    std::transform(report.db_errors.begin(), report.db_errors.end(), abs_db.begin(),
                   [](double v) { return std::abs(v); });
    std::ostringstream db_ecdf;
    db_ecdf << "abs_db,fraction\n";
    for (const auto& [v, p] : ecdf(abs_db)) db_ecdf << fmt(v) << ',' << fmt(p) << '\n';
    write_text(dir / "db_ecdf.csv", db_ecdf.str());

    std::ostringstream r_ecdf;
    r_ecdf << "rmsle,fraction\n";
    for (const auto& [v, p] : ecdf(report.per_sample_rmsle)) r_ecdf << fmt(v) << ',' << fmt(p) << '\n';
    write_text(dir / "rmsle_ecdf.csv", r_ecdf.str());

    std::ostringstream per_sample;
    per_sample << "index,rmsle" << (baseline ? ",baseline_rmsle" : "") << '\n';
    for (std::size_t i = 0; i < report.per_sample_rmsle.size(); ++i) {
      per_sample << i << ',' << fmt(report.per_sample_rmsle[i]);
      if (baseline) per_sample << ',' << fmt(report.baseline_rmsle[i]);
      per_sample << '\n';
    }
    write_text(dir / "per_sample.csv", per_sample.str());
  }
  out << json{{"report", a.report},
              {"median_rmsle", report.summary.median},
              {"db_within_3", report.db_within_3},
              {"win_rate_vs_baseline", j["win_rate_vs_baseline"]}}
             .dump()
      << "\n";
  return kOk;
}

struct AggregateArgs {
  std::string in;
  std::string mode = "mean";
  double k = 0.0;
  std::string out;
  bool normalized = false;
};

int run_aggregate(const AggregateArgs& a, std::ostream& out) {
  DatasetReader reader(a.in);
  std::vector<Spectrum> spectra;
  for (const auto& rec : reader.read_all()) {
    spectra.push_back(a.normalized ? rec.spectrum : rec.spectrum.scaled(rec.scale));
  }
  const auto ensemble = SpectrumEnsemble::from(spectra);
  const Spectrum result = a.mode == "mean" ? aggregate_mean(ensemble) : aggregate_upper_tol(ensemble, a.k);
  json j = spectrum_json(result);
  j["mode"] = a.mode;
  j["k_factor"] = a.mode == "mean" ? json(nullptr) : json(a.k);
  j["ensemble_size"] = ensemble.size();
  if (a.out.empty()) {
    out << j.dump(2) << "\n";
  } else {
    write_json(a.out, j);
    out << json{{"out", a.out}, {"ensemble_size", ensemble.size()}}.dump() << "\n";
  }
  return kOk;
}

struct ExportArgs {
  std::string in;
  std::string out;
  std::vector<Index> indices;
  bool signals = false;
};

int run_export_csv(const ExportArgs& a, std::ostream& out) {
  DatasetReader reader(a.in);
  std::vector<Index> idx = a.indices;
  if (idx.empty()) {
    for (Index i = 0; i < reader.size(); ++i) idx.push_back(i);
  }
  const fs::path dir(a.out);
  fs::create_directories(dir);
  for (Index i : idx) {
    if (i < 0 || i >= reader.size()) throw DataError("record index out of range");
    const auto rec = reader.read(i);
    std::ostringstream s;
    s << "freq_hz,value\n";
    for (Index k = 0; k < rec.spectrum.size(); ++k) {
      s << fmt(rec.spectrum.grid().freqs_hz()(k)) << ',' << fmt(rec.spectrum.values()(k)) << '\n';
    }
    write_text(dir / ("spectrum_" + std::to_string(i) + ".csv"), s.str());
    if (a.signals) {
      std::ostringstream t;
      t << "time_s,value\n";
      for (Index k = 0; k < rec.signal.size(); ++k) {
        t << fmt(static_cast<double>(k) * rec.signal.sample_period_s()) << ',' << fmt(rec.signal.samples()(k)) << '\n';
      }
      write_text(dir / ("signal_" + std::to_string(i) + ".csv"), t.str());
    }
  }
  out << json{{"out", a.out}, {"records", idx.size()}}.dump() << "\n";
  return kOk;
}

struct BenchArgs {
  Index count = 20;
  int fit_iters = 100;
  int fit_restarts = 1;
  std::uint64_t seed = 0;
};

int run_bench(const BenchArgs& a, std::ostream& out) {
  using Clock = std::chrono::steady_clock;
  auto seconds_since = [](Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); };
  GenParams params;
  params.seed = a.seed;
  const FrequencyGrid grid = log_frequency_grid(10.0, 4096.0, 100);
  std::vector<Signal> shocks;
  auto t = Clock::now();
  for (Index i = 0; i < a.count; ++i) shocks.push_back(generate_shock(params, static_cast<std::uint64_t>(i)).signal);
  const double gen_s = seconds_since(t);

  t = Clock::now();
  std::vector<Spectrum> spectra(shocks.size());
  for (std::size_t i = 0; i < shocks.size(); ++i) spectra[i] = srs_filterbank(shocks[i], grid);
  const double srs_s = seconds_since(t);

  t = Clock::now();
  (void)srs_analytical(shocks.front(), grid);
  const double analytical_s = seconds_since(t);

  FitConfig config;
  config.max_iters = a.fit_iters;
  config.restarts = a.fit_restarts;
  config.seed = a.seed;
  t = Clock::now();
  const FitResult fit = fit_sds(spectra.front(), config);
  const double fit_s = seconds_since(t);

  const double n = static_cast<double>(a.count);
  out << json{{"signals", a.count},
              {"n_samples", params.n_samples},
              {"grid_size", grid.size()},
              {"threads", thread_count()},
              {"generate_ms_per_signal", 1e3 * gen_s / n},
              {"srs_filterbank_ms_per_signal", 1e3 * srs_s / n},
              {"srs_filterbank_signals_per_s", n / srs_s},
              {"srs_analytical_ms_per_signal", 1e3 * analytical_s},
              {"sds_fit_s", fit_s},
              {"sds_fit_evaluations", fit.evaluations},
              {"sds_fit_ms_per_evaluation", 1e3 * fit_s / fit.evaluations},
              {"sds_fit_final_loss", fit.final_loss},
              {"sds_fit_config", to_json(config)}}
             .dump(2)
      << "\n";
  return kOk;
}

void report_error(std::ostream& err, const char* kind, const std::string& message, int code) {
  err << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shock response spectrum toolkit: synthesis, SRS, SDS inversion, losses and metrics",
               "srskit"};
  app.set_help_all_flag("--help-all", "Print help for every subcommand");
  app.require_subcommand(1, 1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: SRSKIT_THREADS or all cores)");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic shock dataset");
  gen_cmd->add_option("--count", gen.count, "Number of shocks")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed, "Dataset seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output dataset directory")->required();
  gen_cmd->add_option("--params", gen.params, "JSON file overriding generator parameters");
  gen_cmd->add_flag("--normalize", gen.normalize, "Store max-normalized pairs with their scales");
  gen_cmd->add_flag("--no-provenance", gen.no_provenance, "Skip provenance.jsonl");
  gen.grid.add_to(gen_cmd);

  SrsArgs srs;
  auto* srs_cmd = app.add_subcommand("srs", "Compute spectra for a dataset or a CSV signal");
  srs_cmd->add_option("--in", srs.in, "Dataset directory or CSV signal")->required();
  srs_cmd->add_option("--out", srs.out, "Output dataset directory (dataset input) or spectrum JSON")->required();
  srs_cmd->add_option("--fs", srs.fs, "Sample rate of a CSV signal (Hz)");
  srs_cmd->add_option("--method", srs.method, "filterbank | analytical")
      ->check(CLI::IsMember({"filterbank", "analytical"}))
      ->capture_default_str();
  srs.grid.add_to(srs_cmd);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("sds-fit", "Fit sum-of-decayed-sinusoids models to target spectra");
  fit_cmd->add_option("--target", fit.target, "Dataset directory or spectrum JSON")->required();
  fit_cmd->add_option("--out", fit.out, "Output JSON with fitted models")->required();
  fit_cmd->add_option("--index", fit.indices, "Dataset record indices (default: all)");
  fit_cmd->add_option("--candidates", fit.candidates, "Also write rendered fits as a dataset");
  fit_cmd->add_option("--atoms", fit.atoms, "Number of decayed sinusoids M")->capture_default_str();
  fit_cmd->add_option("--restarts", fit.restarts, "Nelder-Mead restarts")->capture_default_str();
  fit_cmd->add_option("--iters", fit.iters, "Nelder-Mead iterations per restart")->capture_default_str();
  fit_cmd->add_flag("--ga", fit.ga, "Refine with the genetic algorithm stage");
  fit_cmd->add_option("--seed", fit.seed, "Fit seed")->capture_default_str();
  fit_cmd->add_option("--budget-s", fit.budget_s, "Wall-clock budget per target (s)")->capture_default_str();
  fit_cmd->add_option("--n-samples", fit.n_samples, "Rendered length (default: from target dataset or 9000)");
  fit_cmd->add_option("--fs", fit.fs, "Rendered sample rate (default: from target dataset or 32768)");
  fit_cmd->add_option("--pad-scale", fit.pad_scale, "Padding scale factor p >= 1")->capture_default_str();

  LossArgs loss;
  auto* loss_cmd = app.add_subcommand("losses-eval", "Evaluate the five loss terms for a (target, pred) pair");
  loss_cmd->add_option("--target", loss.target, "Target signal (dataset directory or CSV)")->required();
  loss_cmd->add_option("--pred", loss.pred, "Predicted signal (dataset directory or CSV)")->required();
  loss_cmd->add_option("--target-index", loss.target_index, "Record index in a target dataset")->capture_default_str();
  loss_cmd->add_option("--pred-index", loss.pred_index, "Record index in a pred dataset")->capture_default_str();
  loss_cmd->add_option("--fs", loss.fs, "Sample rate of CSV signals (Hz)");
  loss_cmd->add_option("--latent", loss.latent, "JSON with mu and log_var arrays for the KL term");
  loss_cmd->add_option("--weights", loss.weights, "Weights shape,ts,psd,srs,kl")->delimiter(',');
  loss_cmd->add_option("--sigma-periods", loss.sigma_periods, "Shape-loss Gaussian width in natural periods (0 = peak only)")
      ->capture_default_str();
  loss_cmd->add_option("--srs-log-base", loss.srs_log_base, "Log base of the SRS MSLE (e | 10)")
      ->check(CLI::IsMember({"e", "10"}))
      ->capture_default_str();
  loss_cmd->add_option("--psd-log-base", loss.psd_log_base, "Log base of the PSD MSLE (e | 10)")
      ->check(CLI::IsMember({"e", "10"}))
      ->capture_default_str();
  loss_cmd->add_option("--welch-segment", loss.welch_segment, "Welch segment length")->capture_default_str();
  loss_cmd->add_option("--welch-overlap", loss.welch_overlap, "Welch segment overlap")->capture_default_str();
  loss_cmd->add_option("--out", loss.out, "Output JSON (default: stdout)");
  loss.grid.add_to(loss_cmd);

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score candidate signals against hold-out targets");
  eval_cmd->add_option("--targets", ev.targets, "Target dataset directory")->required();
  eval_cmd->add_option("--candidates", ev.candidates, "Candidate dataset directory")->required();
  eval_cmd->add_option("--baseline", ev.baseline, "Baseline candidate dataset for the win rate");
  eval_cmd->add_option("--report", ev.report, "Output report JSON")->required();
  eval_cmd->add_option("--csv", ev.csv, "Directory for histogram / ECDF CSV files");
  eval_cmd->add_option("--hist-bin-db", ev.hist_bin_db, "dB histogram bin width")->capture_default_str();
  ev.grid.add_to(eval_cmd);

  AggregateArgs agg;
  auto* agg_cmd = app.add_subcommand("aggregate", "Combine a dataset's spectra into one target spectrum");
  agg_cmd->add_option("--in", agg.in, "Dataset directory")->required();
  agg_cmd->add_option("--mode", agg.mode, "mean | upper-tol")
      ->check(CLI::IsMember({"mean", "upper-tol"}))
      ->capture_default_str();
  agg_cmd->add_option("--k", agg.k, "k factor for upper-tol")->capture_default_str();
  agg_cmd->add_option("--out", agg.out, "Output spectrum JSON (default: stdout)");
  agg_cmd->add_flag("--normalized", agg.normalized, "Aggregate stored (normalized) spectra without rescaling");

  ExportArgs exp;
  auto* exp_cmd = app.add_subcommand("export-csv", "Dump dataset spectra (and signals) as CSV");
  exp_cmd->add_option("--in", exp.in, "Dataset directory")->required();
  exp_cmd->add_option("--out", exp.out, "Output directory")->required();
  exp_cmd->add_option("--index", exp.indices, "Record indices (default: all)");
  exp_cmd->add_flag("--signals", exp.signals, "Also write time series");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time generation, SRS and SDS fitting");
  bench_cmd->add_option("--count", bench.count, "Signals to time")->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd->add_option("--fit-iters", bench.fit_iters, "Nelder-Mead iterations for the timed fit")->capture_default_str();
  bench_cmd->add_option("--fit-restarts", bench.fit_restarts, "Restarts for the timed fit")->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed, "Seed")->capture_default_str();

  std::vector<const char*> raw;
  raw.reserve(argv.size());
  for (const auto& s : argv) raw.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what(), kUsageError);
    return kUsageError;
  }

  try {
    if (threads > 0) set_thread_count(threads);
    if (*gen_cmd) return run_gen(gen, out);
    if (*srs_cmd) return run_srs(srs, out);
    if (*fit_cmd) return run_sds_fit(fit, out);
    if (*loss_cmd) return run_losses_eval(loss, out);
    if (*eval_cmd) return run_eval(ev, out);
    if (*agg_cmd) return run_aggregate(agg, out);
    if (*exp_cmd) return run_export_csv(exp, out);
    if (*bench_cmd) return run_bench(bench, out);
  } catch (const UsageError& e) {
    report_error(err, "usage", e.what(), kUsageError);
    return kUsageError;
  } catch (const BudgetExhausted& e) {
    report_error(err, "budget", e.what(), kBudgetExhausted);
    return kBudgetExhausted;
  } catch (const std::exception& e) {
    report_error(err, "data", e.what(), kDataError);
    return kDataError;
  }
  report_error(err, "usage", "no subcommand given", kUsageError);
  return kUsageError;
}

}  // namespace srskit::cli
