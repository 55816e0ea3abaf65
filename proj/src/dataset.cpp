#include "srskit/dataset.hpp"

#include <bit>
#include <cstring>

#include "srskit/parallel.hpp"
#include "srskit/srs.hpp"

namespace srskit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifestName = "manifest.json";
constexpr const char* kPayloadName = "payload.f32";
constexpr const char* kProvenanceName = "provenance.jsonl";

std::uint32_t to_little(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
}

void write_floats(std::ofstream& out, const std::vector<float>& values) {
  std::vector<std::uint32_t> words(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    words[i] = to_little(std::bit_cast<std::uint32_t>(values[i]));
  }
  out.write(reinterpret_cast<const char*>(words.data()),
            static_cast<std::streamsize>(words.size() * sizeof(std::uint32_t)));
}

json range_json(const Range& r) { return json::array({r.lo, r.hi}); }

Range range_from(const json& j, const char* key, Range fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2) throw DataError(std::string("range '") + key + "' must be [lo, hi]");
  return {v.at(0).get<double>(), v.at(1).get<double>()};
}

}  // namespace

FrequencyGrid GridSpec::make() const {
  // log_frequency_grid needs two points; a single-frequency grid is just f_min.
  if (count == 1) return FrequencyGrid(VectorXd::Constant(1, f_min_hz), damping_ratio);
  return log_frequency_grid(f_min_hz, f_max_hz, count, damping_ratio);
}

json to_json(const GenParams& p) {
  json kinds = json::array();
  for (auto k : p.basis_kinds) kinds.push_back(std::string(to_string(k)));
  return json{
      {"n_basis", json::array({p.n_basis.lo, p.n_basis.hi})},
      {"amplitude", range_json(p.amplitude)},
      {"phase", range_json(p.phase)},
      {"freq_hz", range_json(p.freq_hz)},
      {"decay_factor", range_json(p.decay_factor)},
      {"wavelet_eta", range_json(p.wavelet_eta)},
      {"offset_fraction", range_json(p.offset_fraction)},
      {"adoption_prob", p.adoption_prob},
      {"noise_var", range_json(p.noise_var)},
      {"basis_kinds", kinds},
      {"n_samples", p.n_samples},
      {"sample_rate_hz", p.sample_rate_hz},
      {"seed", p.seed},
  };
}

GenParams gen_params_from_json(const json& j) {
  if (!j.is_object()) throw DataError("generator params must be a JSON object");
  GenParams p;
  try {
    if (j.contains("n_basis")) {
      const auto& v = j.at("n_basis");
      p.n_basis = {v.at(0).get<int>(), v.at(1).get<int>()};
    }
    p.amplitude = range_from(j, "amplitude", p.amplitude);
    p.phase = range_from(j, "phase", p.phase);
    p.freq_hz = range_from(j, "freq_hz", p.freq_hz);
    p.decay_factor = range_from(j, "decay_factor", p.decay_factor);
    p.wavelet_eta = range_from(j, "wavelet_eta", p.wavelet_eta);
    p.offset_fraction = range_from(j, "offset_fraction", p.offset_fraction);
    p.noise_var = range_from(j, "noise_var", p.noise_var);
    p.adoption_prob = j.value("adoption_prob", p.adoption_prob);
    if (j.contains("basis_kinds")) {
      p.basis_kinds.clear();
      for (const auto& k : j.at("basis_kinds")) {
        p.basis_kinds.push_back(basis_kind_from_string(k.get<std::string>()));
      }
    }
    p.n_samples = j.value("n_samples", p.n_samples);
    p.sample_rate_hz = j.value("sample_rate_hz", p.sample_rate_hz);
    p.seed = j.value("seed", p.seed);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed generator params: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  return p;
}

json to_json(const ShockProvenance& prov) {
  json atoms = json::array();
  for (const auto& a : prov.atoms) {
    atoms.push_back({{"kind", std::string(to_string(a.kind))},
                     {"amplitude", a.amplitude},
                     {"freq_hz", a.freq_hz},
                     {"phase", a.phase},
                     {"decay", a.decay},
                     {"offset_index", a.offset_index}});
  }
  return json{{"stream_index", prov.stream_index},
              {"noise_var", prov.noise_var},
              {"offset_fractions", prov.offset_fractions},
              {"atoms", atoms}};
}

json to_json(const DatasetManifest& m) {
  return json{
      {"format_version", m.format_version},
      {"count", m.count},
      {"n_samples", m.n_samples},
      {"sample_rate_hz", m.sample_rate_hz},
      {"grid",
       {{"f_min", m.grid.f_min_hz},
        {"f_max", m.grid.f_max_hz},
        {"count", m.grid.count},
        {"damping_ratio", m.grid.damping_ratio},
        {"spacing", "log"}}},
      {"pad_scale", m.pad_scale},
      {"noise_var", m.noise_var},
      {"seed", m.seed},
      {"source", m.source},
      {"generator_params", m.generator_params},
      {"experimental_bases", m.experimental_bases},
      {"paired", m.paired},
      {"endianness", "little"},
      {"dtype", "float32"},
      {"record_layout", "signal_then_spectrum"},
      {"normalization", {{"normalized", m.normalized}, {"scales", m.scales}}},
  };
}

DatasetManifest manifest_from_json(const json& j) {
  DatasetManifest m;
  try {
    if (!j.contains("format_version")) throw DataError("manifest lacks format_version");
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != kDatasetFormatVersion) {
      throw DataError("unsupported dataset format_version " + std::to_string(m.format_version));
    }
    if (j.value("endianness", std::string("little")) != "little") {
      throw DataError("only little-endian payloads are supported");
    }
    m.count = j.at("count").get<Index>();
    if (m.count < 0) throw DataError("manifest count must be non-negative");
    m.n_samples = j.at("n_samples").get<Index>();
    m.sample_rate_hz = j.at("sample_rate_hz").get<double>();
    const auto& g = j.at("grid");
    m.grid.f_min_hz = g.at("f_min").get<double>();
    m.grid.f_max_hz = g.at("f_max").get<double>();
    m.grid.count = g.at("count").get<Index>();
    m.grid.damping_ratio = g.at("damping_ratio").get<double>();
    m.pad_scale = j.value("pad_scale", kDefaultPadScale);
    m.noise_var = j.value("noise_var", 0.0);
    m.seed = j.value("seed", std::uint64_t{0});
    m.source = j.value("source", std::string());
    m.generator_params = j.value("generator_params", json());
    m.experimental_bases = j.value("experimental_bases", false);
    m.paired = j.value("paired", true);
    if (j.contains("normalization")) {
      const auto& n = j.at("normalization");
      m.normalized = n.value("normalized", false);
      m.scales = n.value("scales", std::vector<double>{});
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  }
  if (m.n_samples < 1 || m.grid.count < 1 || !(m.sample_rate_hz > 0.0)) {
    throw DataError("manifest has non-positive dimensions");
  }
  if (!m.scales.empty() && static_cast<Index>(m.scales.size()) != m.count) {
    throw DataError("manifest scale list does not match count");
  }
  return m;
}

// --- writer --------------------------------------------------------------

DatasetWriter::DatasetWriter(fs::path dir, DatasetManifest header)
    : dir_(std::move(dir)), manifest_(std::move(header)) {
  if (manifest_.n_samples < 1 || !(manifest_.sample_rate_hz > 0.0)) {
    throw std::invalid_argument("dataset header needs n_samples and sample_rate_hz");
  }
  grid_ = manifest_.grid.make();
  manifest_.format_version = kDatasetFormatVersion;
  manifest_.count = 0;
  manifest_.scales.clear();
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw DataError("cannot create dataset directory " + dir_.string() + ": " + ec.message());
  fs::remove(dir_ / kProvenanceName, ec);
  payload_.open(dir_ / kPayloadName, std::ios::binary | std::ios::trunc);
  if (!payload_) throw DataError("cannot open payload for writing in " + dir_.string());
}

DatasetWriter::~DatasetWriter() {
  try {
    finish();
  } catch (...) {
  }
}

void DatasetWriter::append(const Signal& signal, const Spectrum& spectrum, double scale) {
  if (finished_) throw std::logic_error("dataset writer already finished");
  if (signal.size() != manifest_.n_samples) throw DataError("record signal length mismatch");
  if (!(spectrum.grid() == grid_)) throw DataError("record spectrum is not on the dataset grid");
  if (!(scale > 0.0)) throw DataError("record scale must be positive");
  std::vector<float> buffer(static_cast<std::size_t>(manifest_.record_floats()));
  std::size_t k = 0;
  for (Index i = 0; i < signal.size(); ++i) buffer[k++] = static_cast<float>(signal.samples()(i));
  for (Index i = 0; i < spectrum.size(); ++i) buffer[k++] = static_cast<float>(spectrum.values()(i));
  write_floats(payload_, buffer);
  if (!payload_) throw DataError("failed writing dataset payload");
  manifest_.scales.push_back(scale);
  ++manifest_.count;
}

void DatasetWriter::append_provenance(const ShockProvenance& provenance) {
  if (!provenance_.is_open()) {
    provenance_.open(dir_ / kProvenanceName, std::ios::trunc);
    if (!provenance_) throw DataError("cannot open provenance log");
  }
  provenance_ << to_json(provenance).dump() << '\n';
}

void DatasetWriter::finish() {
  if (finished_) return;
  finished_ = true;
  payload_.close();
  if (provenance_.is_open()) provenance_.close();
  if (!manifest_.normalized &&
      std::all_of(manifest_.scales.begin(), manifest_.scales.end(), [](double s) { return s == 1.0; })) {
    manifest_.scales.clear();
  }
  std::ofstream out(dir_ / kManifestName, std::ios::trunc);
  out << to_json(manifest_).dump(2) << '\n';
  if (!out) throw DataError("failed writing dataset manifest");
}

// --- reader --------------------------------------------------------------

DatasetReader::DatasetReader(fs::path dir) : dir_(std::move(dir)) {
  std::ifstream in(dir_ / kManifestName);
  if (!in) throw DataError("cannot open dataset manifest in " + dir_.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  }
  manifest_ = manifest_from_json(j);
  try {
    grid_ = manifest_.grid.make();
  } catch (const std::exception& e) {
    throw DataError(std::string("invalid manifest grid: ") + e.what());
  }

  std::error_code ec;
  const auto bytes = fs::file_size(dir_ / kPayloadName, ec);
  if (ec) throw DataError("cannot stat dataset payload in " + dir_.string());
  const auto expected = static_cast<std::uintmax_t>(manifest_.count) *
                        static_cast<std::uintmax_t>(manifest_.record_floats()) * 4u;
  if (bytes != expected) {
    throw DataError("dataset payload is corrupt: expected " + std::to_string(expected) +
                    " bytes, found " + std::to_string(bytes));
  }
}

DatasetRecord DatasetReader::read(Index index) const {
  if (index < 0 || index >= manifest_.count) throw std::out_of_range("record index out of range");
  const Index floats = manifest_.record_floats();
  std::vector<std::uint32_t> words(static_cast<std::size_t>(floats));
  std::ifstream in(dir_ / kPayloadName, std::ios::binary);
  in.seekg(static_cast<std::streamoff>(index) * floats * 4);
  in.read(reinterpret_cast<char*>(words.data()), static_cast<std::streamsize>(floats * 4));
  if (!in) throw DataError("truncated read from dataset payload");

  auto value = [&](Index k) { return static_cast<double>(std::bit_cast<float>(to_little(words[k]))); };
  VectorXd signal(manifest_.n_samples);
  for (Index i = 0; i < manifest_.n_samples; ++i) signal(i) = value(i);
  VectorXd spectrum(manifest_.grid.count);
  for (Index i = 0; i < manifest_.grid.count; ++i) spectrum(i) = value(manifest_.n_samples + i);
  const double scale = manifest_.scales.empty() ? 1.0 : manifest_.scales[static_cast<std::size_t>(index)];
  try {
    return {Signal(std::move(signal), manifest_.sample_rate_hz), Spectrum(std::move(spectrum), grid_),
            scale};
  } catch (const std::invalid_argument& e) {
    throw DataError("record " + std::to_string(index) + ": " + e.what());
  }
}

std::vector<DatasetRecord> DatasetReader::read_all() const {
  std::vector<DatasetRecord> out(static_cast<std::size_t>(size()));
  parallel_for(size(), [&](Index i) { out[static_cast<std::size_t>(i)] = read(i); });
  return out;
}

double max_pairing_deviation(const DatasetReader& reader) {
  std::vector<double> worst(static_cast<std::size_t>(reader.size()), 0.0);
  const double pad = reader.manifest().pad_scale;
  parallel_for(reader.size(), [&](Index i) {
    const auto rec = reader.read(i);
    const auto fresh = srs_filterbank(rec.signal, reader.grid(), pad);
    const ArrayXd ref = rec.spectrum.values().array();
    const ArrayXd denom = ref.abs().max(kLogFloor);
    worst[static_cast<std::size_t>(i)] = ((fresh.values().array() - ref).abs() / denom).maxCoeff();
  });
  return worst.empty() ? 0.0 : *std::max_element(worst.begin(), worst.end());
}

// --- normalization -------------------------------------------------------

NormalizedPair normalize_pair(const Signal& signal, const Spectrum& spectrum) {
  const double scale = spectrum.size() > 0 ? spectrum.max() : 0.0;
  if (!(scale > 0.0)) throw DataError("cannot normalize an all-zero spectrum");
  return {Signal(signal.samples() / scale, signal.sample_rate_hz()),
          Spectrum(spectrum.values() / scale, spectrum.grid()), scale};
}

Signal denormalize_signal(const Signal& signal, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("denormalization scale must be positive");
  return Signal(signal.samples() * scale, signal.sample_rate_hz());
}

VectorXd encode_condition(const Spectrum& spectrum) {
  return (spectrum.values().array() * spectrum.grid().freqs_hz().array())
      .max(kLogFloor)
      .log10()
      .matrix();
}

}  // namespace srskit
