#pragma once

#include "srskit/core.hpp"

#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace srskit {

enum class BasisKind { DecayedSine, MorletPulse, Rbf, Sawtooth };

std::string_view to_string(BasisKind kind);
BasisKind basis_kind_from_string(std::string_view name);

/// Closed interval [lo, hi]; lo == hi makes the draw deterministic.
struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct IntRange {
  int lo = 1;
  int hi = 1;
};

/// Sampling rules for synthetic shocks. Defaults reproduce the published
/// generator table.
struct GenParams {
  IntRange n_basis{1, 10};
  Range amplitude{0.25, 10.0};
  Range phase{0.0, 2.0 * std::numbers::pi};
  Range freq_hz{10.0, 4096.0};
  /// Decay constant range as multiples of the atom frequency (lambda / f).
  Range decay_factor{0.004 * std::numbers::pi, 0.2 * std::numbers::pi};
  Range wavelet_eta{0.01, 10.0};
  Range offset_fraction{0.0, 0.75};
  double adoption_prob = 0.5;
  Range noise_var{0.005, 0.05};
  std::vector<BasisKind> basis_kinds{BasisKind::DecayedSine, BasisKind::MorletPulse};
  Index n_samples = 9000;
  double sample_rate_hz = 32768.0;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on inverted ranges, bad probabilities or an
  /// empty kind list.
  void validate() const;

  /// True when rbf or sawtooth atoms are enabled.
  bool uses_experimental_kinds() const;
};

/// One placed basis function. `decay` is lambda for decayed_sine/sawtooth,
/// eta for morlet_pulse, unused for rbf.
struct BasisAtom {
  BasisKind kind = BasisKind::DecayedSine;
  double amplitude = 1.0;
  double freq_hz = 100.0;
  double phase = 0.0;
  double decay = 0.0;
  Index offset_index = 0;
};

/// Adds the atom into `out` (zero before offset_index, local time afterwards).
void accumulate_atom(const BasisAtom& atom, double sample_rate_hz, Eigen::Ref<VectorXd> out);

Signal render_atom(const BasisAtom& atom, Index n_samples, double sample_rate_hz);

struct ShockProvenance {
  std::uint64_t stream_index = 0;
  double noise_var = 0.0;
  std::vector<double> offset_fractions;
  std::vector<BasisAtom> atoms;
};

struct GeneratedShock {
  Signal signal;
  ShockProvenance provenance;
};

/// Random engine for (seed, stream); streams are independent of draw order.
std::mt19937_64 make_stream_engine(std::uint64_t seed, std::uint64_t stream_index);

/// Noise variance shared by every shock generated from these params.
double dataset_noise_variance(const GenParams& params);

GeneratedShock generate_shock(const GenParams& params, std::uint64_t stream_index);
GeneratedShock generate_shock(const GenParams& params, std::uint64_t stream_index,
                              double noise_var);

}  // namespace srskit
