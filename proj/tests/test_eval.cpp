#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "srl/errors.hpp"
#include "srl/eval.hpp"
#include "srl/synthetic.hpp"

using namespace srl;

namespace {

SyntheticConfig small_config() {
  SyntheticConfig config;
  config.num_classes = 6;
  config.grids_per_class = 10;
  config.height = 4;
  config.width = 4;
  config.depth = 12;
  config.class_signal_rank = 2;
  config.background_rank = 1;
  config.noise_sigma = 0.08;
  config.foreground_fraction = 0.75;
  config.seed = 900;
  return config;
}

EvalConfig small_eval() {
  EvalConfig cfg;
  cfg.ways = 3;
  cfg.shots = 2;
  cfg.queries_per_class = 3;
  cfg.episodes = 10;
  cfg.basis_size = 3;
  cfg.strategy = TemplateStrategy::kUnion;
  cfg.seed = 7;
  return cfg;
}

}  // namespace

TEST_CASE("episode sampling uses every grid when sizes match exactly") {
  SyntheticConfig data_cfg = small_config();
  data_cfg.num_classes = 3;
  data_cfg.grids_per_class = 5;
  const Dataset dataset = generate_synthetic_dataset(data_cfg);

  EvalConfig cfg = small_eval();
  cfg.ways = 3;
  cfg.shots = 2;
  cfg.queries_per_class = 3;
  const Episode episode = sample_episode(dataset, cfg, 0);

  std::set<std::pair<int, int>> used;
  for (const auto& cls : episode.support) {
    for (const auto& ref : cls) used.insert({ref.class_index, ref.grid_index});
  }
  for (const auto& q : episode.queries) used.insert({q.grid.class_index, q.grid.grid_index});
  CHECK(used.size() == 15);  // 3 classes x 5 grids, no overlap
}

TEST_CASE("episode sampling is deterministic in (seed, index)") {
  const Dataset dataset = generate_synthetic_dataset(small_config());
  const EvalConfig cfg = small_eval();
  const Episode a = sample_episode(dataset, cfg, 3);
  const Episode b = sample_episode(dataset, cfg, 3);
  REQUIRE(a.support.size() == b.support.size());
  for (std::size_t c = 0; c < a.support.size(); ++c) {
    for (std::size_t k = 0; k < a.support[c].size(); ++k) {
      CHECK(a.support[c][k].class_index == b.support[c][k].class_index);
      CHECK(a.support[c][k].grid_index == b.support[c][k].grid_index);
    }
  }
  const Episode c = sample_episode(dataset, cfg, 4);
  bool same = true;
  for (std::size_t i = 0; i < a.support.size() && same; ++i) {
    same = a.support[i][0].class_index == c.support[i][0].class_index &&
           a.support[i][0].grid_index == c.support[i][0].grid_index;
  }
  CHECK_FALSE(same);
}

TEST_CASE("support and queries never overlap within an episode") {
  const Dataset dataset = generate_synthetic_dataset(small_config());
  const EvalConfig cfg = small_eval();
  for (std::uint64_t index = 0; index < 50; ++index) {
    const Episode episode = sample_episode(dataset, cfg, index);
    std::set<std::pair<int, int>> support;
    for (const auto& cls : episode.support) {
      for (const auto& ref : cls) support.insert({ref.class_index, ref.grid_index});
    }
    for (const auto& q : episode.queries) {
      CHECK(support.count({q.grid.class_index, q.grid.grid_index}) == 0);
    }
  }
}

TEST_CASE("class selection frequencies stay within 3 sigma of 0.5") {
  SyntheticConfig data_cfg = small_config();
  data_cfg.num_classes = 10;
  data_cfg.grids_per_class = 6;
  const Dataset dataset = generate_synthetic_dataset(data_cfg);

  EvalConfig cfg = small_eval();
  cfg.ways = 5;
  cfg.shots = 2;
  cfg.queries_per_class = 2;

  const int episodes = 1000;
  std::vector<int> counts(10, 0);
  for (int i = 0; i < episodes; ++i) {
    const Episode episode = sample_episode(dataset, cfg, static_cast<std::uint64_t>(i));
    for (const auto& cls : episode.support) ++counts[cls[0].class_index];
  }
  const double expected = 0.5;
  const double sigma = std::sqrt(expected * (1.0 - expected) / episodes);
  for (int c = 0; c < 10; ++c) {
    const double freq = static_cast<double>(counts[c]) / episodes;
    CHECK(std::abs(freq - expected) <= 3.0 * sigma);
  }
}

TEST_CASE("noiseless orthogonal classes evaluate to perfect accuracy") {
  SyntheticConfig data_cfg;
  data_cfg.num_classes = 4;
  data_cfg.grids_per_class = 8;
  data_cfg.height = 4;
  data_cfg.width = 4;
  data_cfg.depth = 20;
  data_cfg.class_signal_rank = 2;
  data_cfg.background_rank = 0;
  data_cfg.noise_sigma = 0.0;
  data_cfg.foreground_fraction = 1.0;
  data_cfg.seed = 12;
  // Classes share no background and d is large: random class planes are
  // distinct enough that the noiseless task is trivially separable.
  const Dataset dataset = generate_synthetic_dataset(data_cfg);

  EvalConfig cfg;
  cfg.ways = 4;
  cfg.shots = 2;
  cfg.queries_per_class = 4;
  cfg.episodes = 10;
  cfg.basis_size = 2;
  cfg.strategy = TemplateStrategy::kUnion;
  const EvalReport report = evaluate(dataset, cfg);
  CHECK(report.mean_accuracy == 1.0);
}

TEST_CASE("episodes hold exactly Q queries per class, so a constant classifier scores 1/N") {
  const Dataset dataset = generate_synthetic_dataset(small_config());
  const EvalConfig cfg = small_eval();
  for (std::uint64_t index = 0; index < 20; ++index) {
    const Episode episode = sample_episode(dataset, cfg, index);
    std::vector<int> per_label(static_cast<std::size_t>(cfg.ways), 0);
    int stub_correct = 0;
    for (const auto& q : episode.queries) {
      ++per_label[static_cast<std::size_t>(q.label)];
      if (q.label == 0) ++stub_correct;  // the constant "class 0" classifier
    }
    for (int count : per_label) CHECK(count == cfg.queries_per_class);
    const double stub_accuracy =
        static_cast<double>(stub_correct) / static_cast<double>(episode.queries.size());
    CHECK(stub_accuracy == doctest::Approx(1.0 / cfg.ways));
  }
}

TEST_CASE("nn and ps agree on one-shot episodes") {
  SyntheticConfig data_cfg = small_config();
  const Dataset dataset = generate_synthetic_dataset(data_cfg);

  EvalConfig nn_cfg = small_eval();
  nn_cfg.shots = 1;
  nn_cfg.strategy = TemplateStrategy::kNearestNeighbor;
  EvalConfig ps_cfg = nn_cfg;
  ps_cfg.strategy = TemplateStrategy::kPrototypical;

  for (std::uint64_t index = 0; index < 50; ++index) {
    const Episode episode = sample_episode(dataset, nn_cfg, index);
    const EpisodeResult nn = run_episode(dataset, episode, nn_cfg);
    const EpisodeResult ps = run_episode(dataset, episode, ps_cfg);
    REQUIRE(nn.queries.size() == ps.queries.size());
    for (std::size_t q = 0; q < nn.queries.size(); ++q) {
      CHECK(nn.queries[q].predicted_label == ps.queries[q].predicted_label);
    }
  }
}

TEST_CASE("ci half-width formula") {
  CHECK(ci95_half_width({0.7}) == 0.0);
  CHECK(ci95_half_width({0.8, 1.0, 0.9, 0.9}) == doctest::Approx(0.080017).epsilon(1e-5));
}

TEST_CASE("single-episode evaluation has zero ci") {
  const Dataset dataset = generate_synthetic_dataset(small_config());
  EvalConfig cfg = small_eval();
  cfg.episodes = 1;
  const EvalReport report = evaluate(dataset, cfg);
  CHECK(report.ci95_half_width == 0.0);
  CHECK(report.episode_accuracies.size() == 1);
}

TEST_CASE("worker count does not change the report") {
  const Dataset dataset = generate_synthetic_dataset(small_config());
  EvalConfig cfg = small_eval();
  cfg.episodes = 16;
  cfg.workers = 1;
  const EvalReport serial = evaluate(dataset, cfg);
  cfg.workers = 8;
  const EvalReport parallel = evaluate(dataset, cfg);

  CHECK(serial.mean_accuracy == parallel.mean_accuracy);
  CHECK(serial.ci95_half_width == parallel.ci95_half_width);
  REQUIRE(serial.episode_accuracies.size() == parallel.episode_accuracies.size());
  for (std::size_t i = 0; i < serial.episode_accuracies.size(); ++i) {
    CHECK(serial.episode_accuracies[i] == parallel.episode_accuracies[i]);
  }

  auto a = report_to_json(serial);
  auto b = report_to_json(parallel);
  a.erase("runtime");
  b.erase("runtime");
  CHECK(a.dump() == b.dump());
}

TEST_CASE("strategies route through the right classifier") {
  const Dataset dataset = generate_synthetic_dataset(small_config());
  for (TemplateStrategy strategy :
       {TemplateStrategy::kUnion, TemplateStrategy::kPrototypical,
        TemplateStrategy::kDiscriminative, TemplateStrategy::kNearestNeighbor}) {
    EvalConfig cfg = small_eval();
    cfg.episodes = 2;
    cfg.strategy = strategy;
    const EvalReport report = evaluate(dataset, cfg);
    CHECK(report.episode_accuracies.size() == 2);
    for (double acc : report.episode_accuracies) {
      CHECK(acc >= 0.0);
      CHECK(acc <= 1.0);
    }
  }
}

TEST_CASE("evaluation validates the protocol against the dataset") {
  const Dataset dataset = generate_synthetic_dataset(small_config());
  EvalConfig cfg = small_eval();

  SUBCASE("too many ways") {
    cfg.ways = 7;
    CHECK_THROWS_AS(evaluate(dataset, cfg), ArgumentError);
  }
  SUBCASE("too many grids requested") {
    cfg.shots = 6;
    cfg.queries_per_class = 5;
    CHECK_THROWS_AS(evaluate(dataset, cfg), ArgumentError);
  }
  SUBCASE("basis size beyond depth") {
    cfg.basis_size = 13;
    CHECK_THROWS_AS(evaluate(dataset, cfg), ArgumentError);
  }
}

TEST_CASE("sweep of a single size equals a plain evaluation") {
  const Dataset dataset = generate_synthetic_dataset(small_config());
  EvalConfig cfg = small_eval();
  const SweepReport sweep = sweep_basis_size(dataset, {3}, cfg);
  REQUIRE(sweep.runs.size() == 1);
  cfg.basis_size = 3;
  const EvalReport direct = evaluate(dataset, cfg);
  CHECK(sweep.runs[0].mean_accuracy == direct.mean_accuracy);
  CHECK(sweep.runs[0].ci95_half_width == direct.ci95_half_width);
}

TEST_CASE("sweep rejects duplicate or out-of-range sizes") {
  const Dataset dataset = generate_synthetic_dataset(small_config());
  const EvalConfig cfg = small_eval();
  CHECK_THROWS_AS(sweep_basis_size(dataset, {2, 2, 3}, cfg), ArgumentError);
  CHECK_THROWS_AS(sweep_basis_size(dataset, {3, 2}, cfg), ArgumentError);
  CHECK_THROWS_AS(sweep_basis_size(dataset, {2, 20}, cfg), ArgumentError);
  CHECK_THROWS_AS(sweep_basis_size(dataset, {}, cfg), ArgumentError);
}

TEST_CASE("sweep csv has one row per size") {
  const Dataset dataset = generate_synthetic_dataset(small_config());
  EvalConfig cfg = small_eval();
  cfg.episodes = 4;
  const SweepReport sweep = sweep_basis_size(dataset, {2, 3}, cfg);
  const std::string csv = sweep_to_csv(sweep);
  CHECK(csv.rfind("basis_size,mean_accuracy,ci95_half_width,episodes\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("report json carries the config echo and results") {
  const Dataset dataset = generate_synthetic_dataset(small_config());
  EvalConfig cfg = small_eval();
  cfg.episodes = 3;
  const EvalReport report = evaluate(dataset, cfg);
  const auto j = report_to_json(report);
  CHECK(j["config"]["ways"] == 3);
  CHECK(j["config"]["template"] == "union");
  CHECK(j["config"]["metric"] == "wsd");
  CHECK(j["dataset"]["classes"] == 6);
  CHECK(j["results"]["episode_accuracies"].size() == 3);
  CHECK(j["runtime"].contains("wall_clock_seconds"));
}
