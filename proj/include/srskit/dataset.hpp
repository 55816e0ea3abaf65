#pragma once

// On-disk shock datasets.
//
// A dataset is a directory holding
//   manifest.json     generation metadata, grid, per-record scales
//   payload.f32       little-endian float32 records, each laid out as
//                     n_samples signal values followed by F spectrum values
//   provenance.jsonl  optional, one generator record per line
//
// Normalization helpers and the conditioning encoding live here as well
// because the trainer consumes exactly these conventions.

#include "srskit/core.hpp"
#include "srskit/synth.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace srskit {

inline constexpr int kDatasetFormatVersion = 1;

struct GridSpec {
  double f_min_hz = 10.0;
  double f_max_hz = 4096.0;
  Index count = 100;
  double damping_ratio = kDefaultDamping;

  FrequencyGrid make() const;
};

struct DatasetManifest {
  int format_version = kDatasetFormatVersion;
  Index count = 0;
  Index n_samples = 0;
  double sample_rate_hz = 0.0;
  GridSpec grid;
  double pad_scale = kDefaultPadScale;
  double noise_var = 0.0;
  std::uint64_t seed = 0;
  /// Free-form description of where the records came from ("synthetic",
  /// "sds-fit", ...).
  std::string source;
  nlohmann::json generator_params;  // null when not generated
  bool experimental_bases = false;
  /// Spectra were computed from the stored signals on `grid`.
  bool paired = true;
  bool normalized = false;
  /// One factor per record (empty means every scale is 1).
  std::vector<double> scales;

  Index spectrum_size() const { return grid.count; }
  Index record_floats() const { return n_samples + grid.count; }
};

nlohmann::json to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GenParams& params);
GenParams gen_params_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ShockProvenance& provenance);

struct DatasetRecord {
  Signal signal;
  Spectrum spectrum;
  double scale = 1.0;
};

/// Streams records to disk; the manifest is written by finish().
class DatasetWriter {
 public:
  /// `header` supplies everything except count and scales.
  DatasetWriter(std::filesystem::path dir, DatasetManifest header);
  DatasetWriter(const DatasetWriter&) = delete;
  DatasetWriter& operator=(const DatasetWriter&) = delete;
  ~DatasetWriter();

  void append(const Signal& signal, const Spectrum& spectrum, double scale = 1.0);
  void append_provenance(const ShockProvenance& provenance);
  /// Flushes payload and writes manifest.json. Idempotent.
  void finish();

  Index count() const noexcept { return manifest_.count; }

 private:
  std::filesystem::path dir_;
  DatasetManifest manifest_;
  FrequencyGrid grid_;
  std::ofstream payload_;
  std::ofstream provenance_;
  bool finished_ = false;
};

/// Random-access reader. read() may be called concurrently.
class DatasetReader {
 public:
  explicit DatasetReader(std::filesystem::path dir);

  const DatasetManifest& manifest() const noexcept { return manifest_; }
  const FrequencyGrid& grid() const noexcept { return grid_; }
  Index size() const noexcept { return manifest_.count; }

  DatasetRecord read(Index index) const;
  std::vector<DatasetRecord> read_all() const;

 private:
  std::filesystem::path dir_;
  DatasetManifest manifest_;
  FrequencyGrid grid_;
};

/// Largest relative deviation between stored spectra and the SRS of the
/// stored signals.
double max_pairing_deviation(const DatasetReader& reader);

// --- normalization -------------------------------------------------------

struct NormalizedPair {
  Signal signal;
  Spectrum spectrum;
  double scale = 1.0;
};

/// Divides both members by max(spectrum) so the spectrum peaks at exactly 1.
NormalizedPair normalize_pair(const Signal& signal, const Spectrum& spectrum);

Signal denormalize_signal(const Signal& signal, double scale);

/// log10(spectrum * freq), floored at kLogFloor before the log.
VectorXd encode_condition(const Spectrum& spectrum);

}  // namespace srskit
