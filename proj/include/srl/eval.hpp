#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "srl/dataset.hpp"
#include "srl/metric.hpp"
#include "srl/templates.hpp"

namespace srl {

// Configuration of an episodic N-way K-shot evaluation run. Results are a
// pure function of (dataset provenance, this config): per-episode randomness
// derives only from (seed, episode index), and aggregation is in index
// order, so the worker count never changes the outcome.
struct EvalConfig {
  int ways = 5;
  int shots = 5;
  int queries_per_class = 15;
  int episodes = 1000;
  int basis_size = 5;
  DistanceKind metric = DistanceKind::kWsd;
  TemplateStrategy strategy = TemplateStrategy::kDiscriminative;
  // <= 0 picks the strategy default (0.1 for PS, 0.01 for DS).
  double alpha = 0.0;
  int iterations = 50;
  double gradient_floor = 1e-8;
  std::uint64_t seed = 0;
  int workers = 1;

  double resolved_alpha() const;
  double resolved_gradient_floor() const;
  StiefelOptConfig optimizer_config() const;
};

struct GridRef {
  int class_index = 0;
  int grid_index = 0;
};

struct QueryRef {
  GridRef grid;
  int label = 0;  // position of the class within the episode, in [0, N)
};

struct Episode {
  std::uint64_t index = 0;
  int ways = 0;
  int shots = 0;
  int queries_per_class = 0;
  std::vector<std::vector<GridRef>> support;  // [episode class][shot]
  std::vector<QueryRef> queries;              // class-major order
};

// Draws N classes without replacement, then K support + Q query grids per
// class without replacement, from the stream keyed by (seed, index).
// Support and query sets never overlap.
Episode sample_episode(const Dataset& dataset, const EvalConfig& config, std::uint64_t index);

struct QueryRecord {
  int true_label = 0;
  int predicted_label = 0;
};

struct EpisodeResult {
  double accuracy = 0.0;
  std::vector<QueryRecord> queries;
};

// Extracts all support and query subspaces at the configured basis size,
// builds templates per strategy, scores each query independently.
EpisodeResult run_episode(const Dataset& dataset, const Episode& episode,
                          const EvalConfig& config);

struct EvalReport {
  double mean_accuracy = 0.0;
  double ci95_half_width = 0.0;
  std::vector<double> episode_accuracies;
  EvalConfig config;
  std::string dataset_provenance;
  int dataset_classes = 0;
  int dataset_total_grids = 0;
  int dataset_height = 0, dataset_width = 0, dataset_depth = 0;
  double wall_clock_seconds = 0.0;
};

// 1.96 * sample stddev / sqrt(n); a single sample has half-width 0.
double ci95_half_width(const std::vector<double>& values);

EvalReport evaluate(const Dataset& dataset, const EvalConfig& config);

struct SweepReport {
  std::vector<int> sizes;
  std::vector<EvalReport> runs;
};

// One evaluate per basis size, same seed and all other settings shared.
// Sizes must be strictly increasing and within [1, d].
SweepReport sweep_basis_size(const Dataset& dataset, const std::vector<int>& sizes,
                             const EvalConfig& config);

// Serialization. The "runtime" block (wall clock, workers) is the only part
// allowed to differ between reruns of the same configuration.
nlohmann::ordered_json report_to_json(const EvalReport& report);
nlohmann::ordered_json sweep_to_json(const SweepReport& sweep);
std::string sweep_to_csv(const SweepReport& sweep);

}  // namespace srl
