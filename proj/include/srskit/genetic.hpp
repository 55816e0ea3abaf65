#pragma once

#include "srskit/core.hpp"
#include "srskit/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

namespace srskit {

struct GeneticOptions {
  int population = 64;
  int generations = 200;
  /// Per-gene probability of a Gaussian perturbation.
  double mutation_rate = 0.1;
  /// Probability that a child is a uniform crossover of two parents.
  double crossover_rate = 0.8;
  int elitism = 2;
  int tournament = 3;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct GeneticResult {
  VectorXd x;
  double f = 0.0;
  int generations = 0;
  int evaluations = 0;
  /// Best value after each generation.
  std::vector<double> trace;
};

/// Elitist real-coded GA seeded around `start` (whose value is `start_f`).
/// The returned value is never worse than start_f. Fitness evaluations run
/// through parallel_for; all random decisions are drawn serially from `rng`.
template <typename Objective>
GeneticResult genetic_refine(Objective&& objective, const VectorXd& start, double start_f,
                             const VectorXd& mutation_sigma, std::mt19937_64& rng,
                             const GeneticOptions& options = {}) {
  const Index dim = start.size();
  const int pop = std::max(options.population, options.elitism + 1);
  if (mutation_sigma.size() != dim) throw std::invalid_argument("mutation sigma has wrong dimension");

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, pop - 1);

  GeneticResult result;
  std::vector<VectorXd> genes(static_cast<std::size_t>(pop), start);
  std::vector<double> fitness(static_cast<std::size_t>(pop), start_f);

  auto evaluate = [&](std::size_t from) {
    parallel_for(static_cast<Index>(genes.size() - from), [&](Index k) {
      const auto i = from + static_cast<std::size_t>(k);
      fitness[i] = static_cast<double>(objective(genes[i]));
    });
    result.evaluations += static_cast<int>(genes.size() - from);
  };

  // Initial population: the seed plus fully mutated copies.
  for (std::size_t i = 1; i < genes.size(); ++i) {
    for (Index d = 0; d < dim; ++d) genes[i](d) += mutation_sigma(d) * gauss(rng);
  }
  evaluate(1);

  auto expired = [&] {
    return options.deadline && std::chrono::steady_clock::now() >= *options.deadline;
  };
  auto tournament = [&] {
    int best = pick(rng);
    for (int t = 1; t < options.tournament; ++t) {
      const int c = pick(rng);
      if (fitness[static_cast<std::size_t>(c)] < fitness[static_cast<std::size_t>(best)]) best = c;
    }
    return static_cast<std::size_t>(best);
  };

  std::vector<std::size_t> order(genes.size());
  auto rank = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fitness[a] < fitness[b]; });
  };

  for (int g = 0; g < options.generations && !expired(); ++g) {
    rank();
    std::vector<VectorXd> next;
    std::vector<double> next_fit;
    next.reserve(genes.size());
    for (int e = 0; e < options.elitism; ++e) {
      next.push_back(genes[order[static_cast<std::size_t>(e)]]);
      next_fit.push_back(fitness[order[static_cast<std::size_t>(e)]]);
    }
    while (static_cast<int>(next.size()) < pop) {
      VectorXd child = genes[tournament()];
      if (unit(rng) < options.crossover_rate) {
        const VectorXd& other = genes[tournament()];
        for (Index d = 0; d < dim; ++d) {
          if (unit(rng) < 0.5) child(d) = other(d);
        }
      }
      for (Index d = 0; d < dim; ++d) {
        if (unit(rng) < options.mutation_rate) child(d) += mutation_sigma(d) * gauss(rng);
      }
      next.push_back(std::move(child));
      next_fit.push_back(0.0);
    }
    genes.swap(next);
    fitness.swap(next_fit);
    evaluate(static_cast<std::size_t>(options.elitism));
    ++result.generations;
    result.trace.push_back(*std::min_element(fitness.begin(), fitness.end()));
  }

  rank();
  result.x = genes[order[0]];
  result.f = fitness[order[0]];
  if (!(result.f <= start_f)) {
    result.x = start;
    result.f = start_f;
  }
  return result;
}

}  // namespace srskit
