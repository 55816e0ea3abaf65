#include "srskit/synth.hpp"

#include <algorithm>
#include <array>

namespace srskit {

namespace {

constexpr std::array<std::pair<BasisKind, std::string_view>, 4> kKindNames{{
    {BasisKind::DecayedSine, "decayed_sine"},
    {BasisKind::MorletPulse, "morlet_pulse"},
    {BasisKind::Rbf, "rbf"},
    {BasisKind::Sawtooth, "sawtooth"},
}};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Reserved stream for dataset-level draws.
constexpr std::uint64_t kDatasetStream = ~std::uint64_t{0};

double draw(std::mt19937_64& rng, const Range& r) {
  if (r.lo == r.hi) {
    rng.discard(1);
    return r.lo;
  }
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

void check_range(const Range& r, const char* name) {
  if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
    throw std::invalid_argument(std::string("invalid range for ") + name);
  }
}

}  // namespace

std::string_view to_string(BasisKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

BasisKind basis_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw std::invalid_argument("unknown basis kind '" + std::string(name) + "'");
}

void GenParams::validate() const {
  if (n_basis.lo < 1 || n_basis.lo > n_basis.hi) throw std::invalid_argument("invalid n_basis range");
  check_range(amplitude, "amplitude");
  check_range(phase, "phase");
  check_range(freq_hz, "freq_hz");
  check_range(decay_factor, "decay_factor");
  check_range(wavelet_eta, "wavelet_eta");
  check_range(offset_fraction, "offset_fraction");
  check_range(noise_var, "noise_var");
  if (freq_hz.lo <= 0.0) throw std::invalid_argument("atom frequencies must be positive");
  if (decay_factor.lo < 0.0) throw std::invalid_argument("decay factors must be non-negative");
  if (noise_var.lo < 0.0) throw std::invalid_argument("noise variance must be non-negative");
  if (offset_fraction.lo < 0.0 || offset_fraction.hi >= 1.0) {
    throw std::invalid_argument("offset fractions must lie in [0, 1)");
  }
  if (!(adoption_prob >= 0.0 && adoption_prob <= 1.0)) {
    throw std::invalid_argument("adoption probability must lie in [0, 1]");
  }
  if (basis_kinds.empty()) throw std::invalid_argument("basis_kinds must not be empty");
  if (n_samples < 1) throw std::invalid_argument("n_samples must be positive");
  if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("sample rate must be positive");
}

bool GenParams::uses_experimental_kinds() const {
  return std::any_of(basis_kinds.begin(), basis_kinds.end(), [](BasisKind k) {
    return k == BasisKind::Rbf || k == BasisKind::Sawtooth;
  });
}

void accumulate_atom(const BasisAtom& atom, double sample_rate_hz, Eigen::Ref<VectorXd> out) {
  const double ts = 1.0 / sample_rate_hz;
  const double omega = 2.0 * std::numbers::pi * atom.freq_hz;
  for (Index n = std::max<Index>(atom.offset_index, 0); n < out.size(); ++n) {
    const double t = static_cast<double>(n - atom.offset_index) * ts;
    double v = 0.0;
    switch (atom.kind) {
      case BasisKind::DecayedSine:
        v = std::exp(-atom.decay * t) * std::sin(omega * t + atom.phase);
        break;
      case BasisKind::MorletPulse:
        v = std::exp(atom.decay * omega * (std::log1p(t) - t)) * std::cos(omega * t + atom.phase);
        break;
      case BasisKind::Rbf: {
        const double u = t * atom.freq_hz;
        v = std::exp(-0.5 * u * u) * std::cos(omega * t + atom.phase);
        break;
      }
      case BasisKind::Sawtooth: {
        const double u = atom.freq_hz * t + atom.phase / (2.0 * std::numbers::pi);
        v = std::exp(-atom.decay * t) * 2.0 * (u - std::floor(u + 0.5));
        break;
      }
    }
    out(n) += atom.amplitude * v;
  }
}

Signal render_atom(const BasisAtom& atom, Index n_samples, double sample_rate_hz) {
  VectorXd x = VectorXd::Zero(n_samples);
  accumulate_atom(atom, sample_rate_hz, x);
  return Signal(std::move(x), sample_rate_hz);
}

std::mt19937_64 make_stream_engine(std::uint64_t seed, std::uint64_t stream_index) {
  const std::uint64_t a = splitmix64(seed);
  const std::uint64_t b = splitmix64(a ^ splitmix64(stream_index + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

double dataset_noise_variance(const GenParams& params) {
  auto rng = make_stream_engine(params.seed, kDatasetStream);
  return draw(rng, params.noise_var);
}

GeneratedShock generate_shock(const GenParams& params, std::uint64_t stream_index) {
  return generate_shock(params, stream_index, dataset_noise_variance(params));
}

GeneratedShock generate_shock(const GenParams& params, std::uint64_t stream_index,
                              double noise_var) {
  params.validate();
  auto rng = make_stream_engine(params.seed, stream_index);
  const Index n = params.n_samples;
  const double fs = params.sample_rate_hz;

  ShockProvenance prov;
  prov.stream_index = stream_index;
  prov.noise_var = noise_var;

  const int count =
      std::uniform_int_distribution<int>(params.n_basis.lo, params.n_basis.hi)(rng);
  std::uniform_int_distribution<std::size_t> pick_kind(0, params.basis_kinds.size() - 1);
  std::bernoulli_distribution adopt(params.adoption_prob);

  VectorXd x = VectorXd::Zero(n);
  double xi = 0.0;
  for (int i = 0; i < count; ++i) {
    BasisAtom atom;
    atom.kind = params.basis_kinds[pick_kind(rng)];
    atom.amplitude = draw(rng, params.amplitude);
    atom.phase = draw(rng, params.phase);
    atom.freq_hz = draw(rng, params.freq_hz);
    switch (atom.kind) {
      case BasisKind::DecayedSine:
      case BasisKind::Sawtooth: {
        const Range lambda{params.decay_factor.lo * atom.freq_hz,
                           params.decay_factor.hi * atom.freq_hz};
        atom.decay = draw(rng, lambda);
        break;
      }
      case BasisKind::MorletPulse:
        atom.decay = draw(rng, params.wavelet_eta);
        break;
      case BasisKind::Rbf:
        atom.decay = 0.0;
        break;
    }
    const double fresh = draw(rng, params.offset_fraction);
    const bool keep_previous = i > 0 && adopt(rng);
    xi = keep_previous ? xi : fresh;
    atom.offset_index =
        std::min<Index>(static_cast<Index>(std::ceil(xi * static_cast<double>(n))), n - 1);
    accumulate_atom(atom, fs, x);
    prov.offset_fractions.push_back(xi);
    prov.atoms.push_back(atom);
  }

  if (noise_var > 0.0) {
    std::normal_distribution<double> noise(0.0, std::sqrt(noise_var));
    for (Index k = 0; k < n; ++k) x(k) += noise(rng);
  }
  return {Signal(std::move(x), fs), std::move(prov)};
}

}  // namespace srskit
