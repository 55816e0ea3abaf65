#pragma once

#include "srskit/dataset.hpp"
#include "srskit/synth.hpp"

#include <filesystem>

namespace srskit {

struct DatasetGenOptions {
  GridSpec grid;
  double pad_scale = kDefaultPadScale;
  /// Store max-normalized pairs and their scale factors.
  bool normalize = false;
  /// Write one provenance line per record.
  bool provenance = true;
};

/// Generates `count` shocks (stream indices 0..count-1), computes their
/// spectra and streams them to `dir`. Output bytes depend only on the
/// arguments, never on the worker count.
DatasetManifest generate_dataset(const GenParams& params, Index count,
                                 const DatasetGenOptions& options,
                                 const std::filesystem::path& dir);

}  // namespace srskit
