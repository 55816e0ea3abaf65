#include "srskit/generate.hpp"

#include "srskit/parallel.hpp"
#include "srskit/srs.hpp"

namespace srskit {

DatasetManifest generate_dataset(const GenParams& params, Index count,
                                 const DatasetGenOptions& options,
                                 const std::filesystem::path& dir) {
  if (count < 1) throw std::invalid_argument("dataset count must be >= 1");
  params.validate();
  const FrequencyGrid grid = options.grid.make();
  require_below_nyquist(grid, params.sample_rate_hz);

  DatasetManifest header;
  header.n_samples = params.n_samples;
  header.sample_rate_hz = params.sample_rate_hz;
  header.grid = options.grid;
  header.pad_scale = options.pad_scale;
  header.seed = params.seed;
  header.source = "synthetic";
  header.generator_params = to_json(params);
  header.experimental_bases = params.uses_experimental_kinds();
  header.paired = true;
  header.normalized = options.normalize;
  header.noise_var = dataset_noise_variance(params);

  DatasetWriter writer(dir, header);

  // Generate in parallel batches, write strictly in index order.
  constexpr Index kBatch = 64;
  struct Item {
    GeneratedShock shock;
    Spectrum spectrum;
    double scale = 1.0;
  };
  for (Index begin = 0; begin < count; begin += kBatch) {
    const Index end = std::min(count, begin + kBatch);
    std::vector<Item> batch(static_cast<std::size_t>(end - begin));
    parallel_for(end - begin, [&](Index k) {
      auto& item = batch[static_cast<std::size_t>(k)];
      item.shock = generate_shock(params, static_cast<std::uint64_t>(begin + k), header.noise_var);
      item.spectrum = srs_filterbank(item.shock.signal, grid, options.pad_scale);
      if (options.normalize) {
        auto norm = normalize_pair(item.shock.signal, item.spectrum);
        item.shock.signal = std::move(norm.signal);
        item.spectrum = std::move(norm.spectrum);
        item.scale = norm.scale;
      }
    });
    for (auto& item : batch) {
      writer.append(item.shock.signal, item.spectrum, item.scale);
      if (options.provenance) writer.append_provenance(item.shock.provenance);
    }
  }
  writer.finish();
  return DatasetReader(dir).manifest();
}

}  // namespace srskit
