#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "srl/dataset.hpp"
#include "srl/errors.hpp"
#include "srl/feature_grid.hpp"
#include "srl/metric.hpp"
#include "srl/rng.hpp"
#include "srl/srlf.hpp"
#include "srl/subspace.hpp"
#include "srl/synthetic.hpp"
#include "test_support.hpp"

using namespace srl;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir() {
  static int counter = 0;
  fs::path dir = fs::temp_directory_path() / ("srl_test_" + std::to_string(::getpid()) + "_" +
                                              std::to_string(counter++));
  fs::create_directories(dir);
  return dir;
}

// Random grid whose values are exactly float32-representable, matching the
// payload precision.
FeatureGrid random_grid(Rng& rng, int h, int w, int d) {
  FeatureGrid grid;
  grid.height = h;
  grid.width = w;
  grid.depth = d;
  grid.values.resize(static_cast<std::size_t>(h) * w * d);
  for (auto& v : grid.values) {
    v = static_cast<double>(static_cast<float>(4.0 * rng.next_unit() - 2.0));
  }
  return grid;
}

std::vector<unsigned char> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("flatten maps a single cell to a single column") {
  FeatureGrid grid{1, 1, 3, {1.0, 2.0, 3.0}};
  const FeatureMatrix m = flatten(grid);
  REQUIRE(m.rows() == 3);
  REQUIRE(m.cols() == 1);
  CHECK(m(0, 0) == 1.0);
  CHECK(m(1, 0) == 2.0);
  CHECK(m(2, 0) == 3.0);
}

TEST_CASE("flatten lays out cells row-major") {
  FeatureGrid grid{2, 2, 1, {10.0, 11.0, 12.0, 13.0}};
  const FeatureMatrix m = flatten(grid);
  REQUIRE(m.rows() == 1);
  REQUIRE(m.cols() == 4);
  for (int j = 0; j < 4; ++j) CHECK(m(0, j) == 10.0 + j);
}

TEST_CASE("flatten/unflatten round-trips bit-exactly") {
  Rng rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    const int h = 1 + static_cast<int>(rng.next_below(4));
    const int w = 1 + static_cast<int>(rng.next_below(4));
    const int d = 1 + static_cast<int>(rng.next_below(8));
    const FeatureGrid grid = random_grid(rng, h, w, d);
    const FeatureGrid back = unflatten(flatten(grid), h, w);
    REQUIRE(back.values.size() == grid.values.size());
    for (std::size_t i = 0; i < grid.values.size(); ++i) {
      REQUIRE(back.values[i] == grid.values[i]);
    }
  }
}

TEST_CASE("grid validation rejects bad shapes and non-finite values") {
  CHECK_THROWS_AS(validate_grid(FeatureGrid{0, 1, 1, {}}), ArgumentError);
  CHECK_THROWS_AS(validate_grid(FeatureGrid{1, 1, 2, {1.0}}), ArgumentError);
  CHECK_THROWS_AS(validate_grid(FeatureGrid{1, 1, 1, {std::nan("")}}), ArgumentError);
}

TEST_CASE("srlf: minimal file loads bit-exactly") {
  const auto dir = temp_dir();
  const auto path = dir / "minimal.srlf";
  // header (h=1, w=1, d=2) + payload (0.5, -1.25), all little-endian
  const unsigned char bytes[] = {
      'S', 'R', 'L', 'F', 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0,
      0x00, 0x00, 0x00, 0x3F,   // 0.5f
      0x00, 0x00, 0xA0, 0xBF};  // -1.25f
  std::ofstream(path, std::ios::binary).write(reinterpret_cast<const char*>(bytes), sizeof(bytes));

  const FeatureGrid grid = load_feature_grid(path);
  CHECK(grid.height == 1);
  CHECK(grid.width == 1);
  CHECK(grid.depth == 2);
  REQUIRE(grid.values.size() == 2);
  CHECK(grid.values[0] == 0.5);
  CHECK(grid.values[1] == -1.25);
}

TEST_CASE("srlf: zero grid writes header plus four zero bytes") {
  const auto dir = temp_dir();
  const auto path = dir / "zero.srlf";
  save_feature_grid(FeatureGrid{1, 1, 1, {0.0}}, path);
  const auto bytes = read_bytes(path);
  REQUIRE(bytes.size() == 24);
  for (int i = 20; i < 24; ++i) CHECK(bytes[i] == 0);
}

TEST_CASE("srlf: saving twice is byte-identical") {
  Rng rng(77);
  const auto dir = temp_dir();
  const FeatureGrid grid = random_grid(rng, 3, 2, 5);
  save_feature_grid(grid, dir / "a.srlf");
  save_feature_grid(grid, dir / "b.srlf");
  CHECK(read_bytes(dir / "a.srlf") == read_bytes(dir / "b.srlf"));
}

TEST_CASE("srlf: save/load round-trips 100 random grids") {
  Rng rng(202);
  const auto dir = temp_dir();
  for (int trial = 0; trial < 100; ++trial) {
    const int h = 1 + static_cast<int>(rng.next_below(4));
    const int w = 1 + static_cast<int>(rng.next_below(4));
    const int d = 1 + static_cast<int>(rng.next_below(8));
    const FeatureGrid grid = random_grid(rng, h, w, d);
    const auto path = dir / ("grid_" + std::to_string(trial) + ".srlf");
    save_feature_grid(grid, path);
    const FeatureGrid back = load_feature_grid(path);
    REQUIRE(back.height == grid.height);
    REQUIRE(back.width == grid.width);
    REQUIRE(back.depth == grid.depth);
    for (std::size_t i = 0; i < grid.values.size(); ++i) {
      REQUIRE(back.values[i] == grid.values[i]);
    }
  }
}

TEST_CASE("srlf: corrupt files are rejected with offset context") {
  const auto dir = temp_dir();

  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_feature_grid(dir / "absent.srlf"), DataError);
  }
  SUBCASE("bad magic") {
    const auto path = dir / "magic.srlf";
    save_feature_grid(FeatureGrid{1, 1, 1, {0.0}}, path);
    auto bytes = read_bytes(path);
    bytes[0] = 'X'; bytes[1] = 'X'; bytes[2] = 'X'; bytes[3] = 'X';
    std::ofstream(path, std::ios::binary)
        .write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    CHECK_THROWS_WITH_AS(load_feature_grid(path), doctest::Contains("bad magic"), DataError);
  }
  SUBCASE("version mismatch") {
    const auto path = dir / "version.srlf";
    save_feature_grid(FeatureGrid{1, 1, 1, {0.0}}, path);
    auto bytes = read_bytes(path);
    bytes[4] = 9;
    std::ofstream(path, std::ios::binary)
        .write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    CHECK_THROWS_WITH_AS(load_feature_grid(path), doctest::Contains("version"), DataError);
  }
  SUBCASE("truncated payload") {
    const auto path = dir / "short.srlf";
    save_feature_grid(FeatureGrid{1, 1, 2, {1.0, 2.0}}, path);
    auto bytes = read_bytes(path);
    bytes.resize(bytes.size() - 3);
    std::ofstream(path, std::ios::binary)
        .write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    CHECK_THROWS_WITH_AS(load_feature_grid(path), doctest::Contains("truncated"), DataError);
  }
  SUBCASE("non-finite payload") {
    const auto path = dir / "nan.srlf";
    save_feature_grid(FeatureGrid{1, 1, 1, {1.0}}, path);
    auto bytes = read_bytes(path);
    bytes[20] = 0x00; bytes[21] = 0x00; bytes[22] = 0xC0; bytes[23] = 0x7F;  // NaN
    std::ofstream(path, std::ios::binary)
        .write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    CHECK_THROWS_WITH_AS(load_feature_grid(path), doctest::Contains("non-finite"), DataError);
  }
}

TEST_CASE("dataset manifest round-trip") {
  SyntheticConfig config;
  config.num_classes = 3;
  config.grids_per_class = 4;
  config.depth = 8;
  config.seed = 5;
  const Dataset dataset = generate_synthetic_dataset(config);

  const auto dir = temp_dir();
  save_dataset(dataset, dir);
  const Dataset loaded = load_dataset(dir);
  REQUIRE(loaded.num_classes() == dataset.num_classes());
  for (int c = 0; c < dataset.num_classes(); ++c) {
    CHECK(loaded.classes[c].name == dataset.classes[c].name);
    REQUIRE(loaded.classes[c].grids.size() == dataset.classes[c].grids.size());
    for (std::size_t g = 0; g < dataset.classes[c].grids.size(); ++g) {
      // float32 quantization at generation makes this exact
      REQUIRE(loaded.classes[c].grids[g].values == dataset.classes[c].grids[g].values);
    }
  }
}

TEST_CASE("dataset: missing manifest is a data error") {
  CHECK_THROWS_AS(load_dataset(temp_dir()), DataError);
}

TEST_CASE("synthetic: identical configs give identical datasets") {
  SyntheticConfig config;
  config.num_classes = 4;
  config.grids_per_class = 3;
  config.depth = 12;
  config.seed = 99;
  const Dataset a = generate_synthetic_dataset(config);
  const Dataset b = generate_synthetic_dataset(config);
  REQUIRE(a.num_classes() == b.num_classes());
  for (int c = 0; c < a.num_classes(); ++c) {
    for (std::size_t g = 0; g < a.classes[c].grids.size(); ++g) {
      REQUIRE(a.classes[c].grids[g].values == b.classes[c].grids[g].values);
    }
  }
}

TEST_CASE("synthetic: noiseless rank-1 classes produce rank-1 grids") {
  SyntheticConfig config;
  config.num_classes = 3;
  config.grids_per_class = 2;
  config.depth = 10;
  config.class_signal_rank = 1;
  config.background_rank = 0;
  config.noise_sigma = 0.0;
  config.foreground_fraction = 1.0;
  config.seed = 7;
  const Dataset dataset = generate_synthetic_dataset(config);
  for (const auto& cls : dataset.classes) {
    for (const auto& grid : cls.grids) {
      const FeatureMatrix m = flatten(grid);
      Eigen::JacobiSVD<Matrix> svd(m);
      REQUIRE(svd.singularValues()[0] > 1e-3);
      CHECK(svd.singularValues()[1] <= 1e-6 * svd.singularValues()[0]);
    }
  }
}

TEST_CASE("synthetic: noiseless rank is bounded by signal + background rank") {
  SyntheticConfig config;
  config.num_classes = 3;
  config.grids_per_class = 3;
  config.depth = 12;
  config.class_signal_rank = 2;
  config.background_rank = 2;
  config.noise_sigma = 0.0;
  config.foreground_fraction = 0.6;
  config.seed = 11;
  const Dataset dataset = generate_synthetic_dataset(config);
  for (const auto& cls : dataset.classes) {
    for (const auto& grid : cls.grids) {
      Eigen::JacobiSVD<Matrix> svd(flatten(grid));
      const auto& sv = svd.singularValues();
      for (int i = 4; i < sv.size(); ++i) CHECK(sv[i] <= 1e-6 * sv[0]);
    }
  }
}

TEST_CASE("synthetic: leading subspace of noisy grids stays near the class plane") {
  // Reference run: d = 32, rank 2, sigma = 0.05, full foreground.
  SyntheticConfig config;
  config.num_classes = 4;
  config.grids_per_class = 6;
  config.height = 5;
  config.width = 5;
  config.depth = 32;
  config.class_signal_rank = 2;
  config.background_rank = 0;
  config.noise_sigma = 0.05;
  config.foreground_fraction = 1.0;
  config.contrast_sigma = 0.0;  // pure regime: no per-grid contrast or style
  config.style_sigma = 0.0;
  config.seed = 31;
  const Dataset dataset = generate_synthetic_dataset(config);

  // Noiseless reference: same config minus the noise.
  SyntheticConfig clean = config;
  clean.noise_sigma = 0.0;
  const Dataset reference = generate_synthetic_dataset(clean);

  for (int c = 0; c < dataset.num_classes(); ++c) {
    // The class plane, recovered from the union of noiseless grids.
    std::vector<FeatureMatrix> clean_mats;
    for (const auto& grid : reference.classes[c].grids) clean_mats.push_back(flatten(grid));
    Matrix stacked(clean_mats[0].rows(), clean_mats[0].cols() * clean_mats.size());
    for (std::size_t i = 0; i < clean_mats.size(); ++i) {
      stacked.middleCols(static_cast<Eigen::Index>(i) * clean_mats[i].cols(),
                         clean_mats[i].cols()) = clean_mats[i];
    }
    const Subspace plane = extract_subspace(stacked, 2);

    for (const auto& grid : dataset.classes[c].grids) {
      const Subspace leading = extract_subspace(flatten(grid), 2);
      CHECK(wsd(leading, plane) < 0.2);
    }
  }
}

TEST_CASE("synthetic: rank overflow is rejected") {
  SyntheticConfig config;
  config.depth = 4;
  config.class_signal_rank = 3;
  config.background_rank = 2;
  CHECK_THROWS_AS(generate_synthetic_dataset(config), ArgumentError);
}

TEST_CASE("label shuffle keeps class sizes and provenance") {
  SyntheticConfig config;
  config.num_classes = 3;
  config.grids_per_class = 5;
  config.depth = 8;
  const Dataset dataset = generate_synthetic_dataset(config);
  const Dataset shuffled = shuffle_labels(dataset, 42);
  REQUIRE(shuffled.num_classes() == 3);
  for (const auto& cls : shuffled.classes) CHECK(cls.grids.size() == 5);
  CHECK(shuffled.provenance.find("label_shuffle") != std::string::npos);
}
