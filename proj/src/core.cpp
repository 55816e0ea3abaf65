#include "srskit/core.hpp"

#include <cstdlib>
#include <thread>

#include "srskit/parallel.hpp"

namespace srskit {

FrequencyGrid::FrequencyGrid(VectorXd freqs_hz, double damping_ratio)
    : freqs_hz_(std::move(freqs_hz)), damping_ratio_(damping_ratio) {
  if (!(damping_ratio_ > 0.0 && damping_ratio_ < 1.0)) {
    throw std::domain_error("damping ratio must lie in (0, 1)");
  }
  if (freqs_hz_.size() == 0) throw std::invalid_argument("frequency grid is empty");
  if (!freqs_hz_.allFinite() || freqs_hz_.minCoeff() <= 0.0) {
    throw std::invalid_argument("grid frequencies must be positive and finite");
  }
  for (Index i = 1; i < freqs_hz_.size(); ++i) {
    if (!(freqs_hz_(i) > freqs_hz_(i - 1))) {
      throw std::invalid_argument("grid frequencies must be strictly increasing");
    }
  }
}

Spectrum::Spectrum(VectorXd values, FrequencyGrid grid)
    : values_(std::move(values)), grid_(std::move(grid)) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("spectrum length does not match its grid");
  }
  if (!values_.allFinite() || (values_.size() > 0 && values_.minCoeff() < 0.0)) {
    throw std::invalid_argument("spectrum values must be finite and non-negative");
  }
}

void require_same_grid(const Spectrum& a, const Spectrum& b) {
  if (!(a.grid() == b.grid())) throw DataError("spectra are on different frequency grids");
}

namespace {

int hardware_default() {
  if (const char* env = std::getenv("SRSKIT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::atomic<int> g_threads{0};

}  // namespace

int thread_count() {
  int n = g_threads.load();
  if (n < 1) {
    n = hardware_default();
    g_threads.store(n);
  }
  return n;
}

void set_thread_count(int threads) { g_threads.store(threads < 1 ? hardware_default() : threads); }

}  // namespace srskit
