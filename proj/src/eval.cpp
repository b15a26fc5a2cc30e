#include "srl/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "srl/errors.hpp"
#include "srl/rng.hpp"
#include "srl/version.hpp"

namespace srl {

namespace {

constexpr std::uint64_t kEpisodeTag = 0xE5;

void check_config(const Dataset& dataset, const EvalConfig& cfg) {
  validate_dataset(dataset);
  if (cfg.ways < 2) throw ArgumentError("eval: ways must be >= 2");
  if (cfg.shots < 1) throw ArgumentError("eval: shots must be >= 1");
  if (cfg.queries_per_class < 1) throw ArgumentError("eval: queries must be >= 1");
  if (cfg.episodes < 1) throw ArgumentError("eval: episodes must be >= 1");
  if (cfg.iterations < 1) throw ArgumentError("eval: iterations must be >= 1");
  if (cfg.workers < 1) throw ArgumentError("eval: workers must be >= 1");
  if (cfg.ways > dataset.num_classes()) {
    throw ArgumentError("eval: ways " + std::to_string(cfg.ways) + " exceeds the " +
                        std::to_string(dataset.num_classes()) + " dataset classes");
  }
  if (cfg.shots + cfg.queries_per_class > dataset.min_grids_per_class()) {
    throw ArgumentError("eval: shots + queries (" +
                        std::to_string(cfg.shots + cfg.queries_per_class) +
                        ") exceeds the smallest class size (" +
                        std::to_string(dataset.min_grids_per_class()) + ")");
  }
  if (cfg.basis_size < 1 || cfg.basis_size > dataset.depth()) {
    throw ArgumentError("eval: basis size " + std::to_string(cfg.basis_size) +
                        " outside [1, " + std::to_string(dataset.depth()) + "]");
  }
}

// First `take` entries of a partial Fisher-Yates shuffle of 0..n-1.
std::vector<int> draw_without_replacement(Rng& rng, int n, int take) {
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  for (int i = 0; i < take; ++i) {
    const int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - i)));
    std::swap(order[i], order[j]);
  }
  order.resize(take);
  return order;
}

}  // namespace

double EvalConfig::resolved_alpha() const {
  if (alpha > 0.0) return alpha;
  switch (strategy) {
    case TemplateStrategy::kPrototypical: return 0.1;
    case TemplateStrategy::kDiscriminative: return 0.01;
    default: return 0.0;  // no optimizer involved
  }
}

double EvalConfig::resolved_gradient_floor() const {
  return gradient_floor > 0.0 ? gradient_floor : 1e-8;
}

StiefelOptConfig EvalConfig::optimizer_config() const {
  StiefelOptConfig opt;
  opt.step_size = resolved_alpha();
  opt.iterations = iterations;
  opt.gradient_floor = resolved_gradient_floor();
  return opt;
}

Episode sample_episode(const Dataset& dataset, const EvalConfig& cfg, std::uint64_t index) {
  check_config(dataset, cfg);
  Rng rng = Rng(cfg.seed).fold_in(kEpisodeTag).fold_in(index);

  Episode episode;
  episode.index = index;
  episode.ways = cfg.ways;
  episode.shots = cfg.shots;
  episode.queries_per_class = cfg.queries_per_class;

  const std::vector<int> classes = draw_without_replacement(rng, dataset.num_classes(), cfg.ways);
  episode.support.resize(cfg.ways);
  for (int c = 0; c < cfg.ways; ++c) {
    const int class_index = classes[c];
    const int available = static_cast<int>(dataset.classes[class_index].grids.size());
    const std::vector<int> picks =
        draw_without_replacement(rng, available, cfg.shots + cfg.queries_per_class);
    for (int k = 0; k < cfg.shots; ++k) {
      episode.support[c].push_back(GridRef{class_index, picks[k]});
    }
    for (int q = 0; q < cfg.queries_per_class; ++q) {
      episode.queries.push_back(QueryRef{GridRef{class_index, picks[cfg.shots + q]}, c});
    }
  }
  return episode;
}

EpisodeResult run_episode(const Dataset& dataset, const Episode& episode,
                          const EvalConfig& cfg) {
  const int s = cfg.basis_size;

  std::vector<std::vector<FeatureMatrix>> features(episode.support.size());
  for (std::size_t c = 0; c < episode.support.size(); ++c) {
    for (const GridRef& ref : episode.support[c]) {
      features[c].push_back(flatten(dataset.classes[ref.class_index].grids[ref.grid_index]));
    }
  }
  const SupportSet support = make_support_set(std::move(features), s);

  TemplateSet templates;
  switch (cfg.strategy) {
    case TemplateStrategy::kUnion:
      templates = union_templates(support, s);
      break;
    case TemplateStrategy::kPrototypical:
      templates = prototypical_templates(support, s, cfg.optimizer_config());
      break;
    case TemplateStrategy::kDiscriminative:
      templates = discriminative_subspaces(support, s, cfg.optimizer_config());
      break;
    case TemplateStrategy::kNearestNeighbor:
      break;  // classifies straight against the support
  }

  EpisodeResult result;
  int correct = 0;
  for (const QueryRef& query : episode.queries) {
    const Subspace query_subspace =
        extract_subspace(flatten(dataset.classes[query.grid.class_index].grids[query.grid.grid_index]), s);
    int predicted;
    if (cfg.strategy == TemplateStrategy::kNearestNeighbor) {
      predicted = nn_classify(query_subspace, support, cfg.metric);
    } else {
      predicted = argmax_class(softmax_classify(query_subspace, templates.templates, cfg.metric));
    }
    result.queries.push_back(QueryRecord{query.label, predicted});
    if (predicted == query.label) ++correct;
  }
  result.accuracy = static_cast<double>(correct) / static_cast<double>(episode.queries.size());
  return result;
}

double ci95_half_width(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double stddev = std::sqrt(ss / static_cast<double>(n - 1));
  return 1.96 * stddev / std::sqrt(static_cast<double>(n));
}

EvalReport evaluate(const Dataset& dataset, const EvalConfig& cfg) {
  check_config(dataset, cfg);
  const auto start = std::chrono::steady_clock::now();

  std::vector<double> accuracies(static_cast<std::size_t>(cfg.episodes));
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const int worker_count = std::min(cfg.workers, cfg.episodes);
  auto work = [&]() {
    while (true) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= static_cast<std::uint64_t>(cfg.episodes)) break;
      try {
        const Episode episode = sample_episode(dataset, cfg, i);
        accuracies[i] = run_episode(dataset, episode, cfg).accuracy;
      } catch (...) {
        std::scoped_lock lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(static_cast<std::uint64_t>(cfg.episodes));
        break;
      }
    }
  };

  if (worker_count == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(worker_count));
    for (int t = 0; t < worker_count; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  EvalReport report;
  report.episode_accuracies = std::move(accuracies);
  double mean = 0.0;
  for (double a : report.episode_accuracies) mean += a;
  report.mean_accuracy = mean / static_cast<double>(report.episode_accuracies.size());
  report.ci95_half_width = ci95_half_width(report.episode_accuracies);
  report.config = cfg;
  report.dataset_provenance = dataset.provenance;
  report.dataset_classes = dataset.num_classes();
  report.dataset_total_grids = dataset.total_grids();
  report.dataset_height = dataset.height();
  report.dataset_width = dataset.width();
  report.dataset_depth = dataset.depth();
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

SweepReport sweep_basis_size(const Dataset& dataset, const std::vector<int>& sizes,
                             const EvalConfig& cfg) {
  if (sizes.empty()) throw ArgumentError("sweep: no basis sizes given");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1 || sizes[i] > dataset.depth()) {
      throw ArgumentError("sweep: basis size " + std::to_string(sizes[i]) + " outside [1, " +
                          std::to_string(dataset.depth()) + "]");
    }
    if (i > 0 && sizes[i] <= sizes[i - 1]) {
      throw ArgumentError("sweep: basis sizes must be strictly increasing");
    }
  }
  SweepReport sweep;
  sweep.sizes = sizes;
  for (int s : sizes) {
    EvalConfig run_cfg = cfg;
    run_cfg.basis_size = s;
    sweep.runs.push_back(evaluate(dataset, run_cfg));
  }
  return sweep;
}

namespace {

nlohmann::ordered_json dataset_block(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["provenance"] = report.dataset_provenance;
  j["classes"] = report.dataset_classes;
  j["total_grids"] = report.dataset_total_grids;
  j["height"] = report.dataset_height;
  j["width"] = report.dataset_width;
  j["depth"] = report.dataset_depth;
  return j;
}

nlohmann::ordered_json config_block(const EvalConfig& cfg) {
  nlohmann::ordered_json j;
  j["ways"] = cfg.ways;
  j["shots"] = cfg.shots;
  j["queries_per_class"] = cfg.queries_per_class;
  j["episodes"] = cfg.episodes;
  j["basis_size"] = cfg.basis_size;
  j["metric"] = to_string(cfg.metric);
  j["template"] = to_string(cfg.strategy);
  j["alpha"] = cfg.resolved_alpha();
  j["iterations"] = cfg.iterations;
  j["gradient_floor"] = cfg.resolved_gradient_floor();
  j["seed"] = cfg.seed;
  return j;
}

}  // namespace

nlohmann::ordered_json report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["format_version"] = kFormatVersion;
  j["tool"] = std::string("srl ") + kVersion;
  j["dataset"] = dataset_block(report);
  j["config"] = config_block(report.config);
  j["results"]["mean_accuracy"] = report.mean_accuracy;
  j["results"]["ci95_half_width"] = report.ci95_half_width;
  j["results"]["episode_accuracies"] = report.episode_accuracies;
  j["runtime"]["workers"] = report.config.workers;
  j["runtime"]["wall_clock_seconds"] = report.wall_clock_seconds;
  return j;
}

nlohmann::ordered_json sweep_to_json(const SweepReport& sweep) {
  nlohmann::ordered_json j;
  j["format_version"] = kFormatVersion;
  j["tool"] = std::string("srl ") + kVersion;
  if (!sweep.runs.empty()) {
    j["dataset"] = dataset_block(sweep.runs.front());
    auto cfg = config_block(sweep.runs.front().config);
    cfg.erase("basis_size");
    j["config"] = cfg;
  }
  auto& runs = j["runs"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < sweep.runs.size(); ++i) {
    nlohmann::ordered_json r;
    r["basis_size"] = sweep.sizes[i];
    r["mean_accuracy"] = sweep.runs[i].mean_accuracy;
    r["ci95_half_width"] = sweep.runs[i].ci95_half_width;
    r["episodes"] = sweep.runs[i].config.episodes;
    runs.push_back(std::move(r));
  }
  return j;
}

std::string sweep_to_csv(const SweepReport& sweep) {
  std::string csv = "basis_size,mean_accuracy,ci95_half_width,episodes\n";
  char buf[128];
  for (std::size_t i = 0; i < sweep.runs.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%d\n", sweep.sizes[i],
                  sweep.runs[i].mean_accuracy, sweep.runs[i].ci95_half_width,
                  sweep.runs[i].config.episodes);
    csv += buf;
  }
  return csv;
}

}  // namespace srl
