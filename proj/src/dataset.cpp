#include "srl/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "json.hpp"
#include "srl/errors.hpp"
#include "srl/rng.hpp"
#include "srl/srlf.hpp"

namespace srl {

int Dataset::min_grids_per_class() const {
  int m = static_cast<int>(classes.front().grids.size());
  for (const auto& c : classes) m = std::min(m, static_cast<int>(c.grids.size()));
  return m;
}

int Dataset::total_grids() const {
  int n = 0;
  for (const auto& c : classes) n += static_cast<int>(c.grids.size());
  return n;
}

void validate_dataset(const Dataset& dataset) {
  if (dataset.classes.empty()) throw ArgumentError("dataset has no classes");
  std::set<std::string> names;
  for (const auto& c : dataset.classes) {
    if (c.grids.empty()) throw ArgumentError("class '" + c.name + "' has no grids");
    if (!names.insert(c.name).second) throw ArgumentError("duplicate class name '" + c.name + "'");
  }
  const int h = dataset.height(), w = dataset.width(), d = dataset.depth();
  for (const auto& c : dataset.classes) {
    for (const auto& g : c.grids) {
      validate_grid(g);
      if (g.height != h || g.width != w || g.depth != d) {
        throw ArgumentError("class '" + c.name + "' holds a grid of shape " +
                            std::to_string(g.height) + "x" + std::to_string(g.width) + "x" +
                            std::to_string(g.depth) + ", expected " + std::to_string(h) + "x" +
                            std::to_string(w) + "x" + std::to_string(d));
      }
    }
  }
}

Dataset load_dataset(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw DataError(manifest_path.string() + ": cannot open manifest");

  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(manifest_path.string() + ": " + e.what());
  }

  Dataset dataset;
  dataset.provenance = "manifest:" + dir.string();
  try {
    for (const auto& jc : manifest.at("classes")) {
      DatasetClass cls;
      cls.name = jc.at("name").get<std::string>();
      for (const auto& jg : jc.at("grids")) {
        cls.grids.push_back(load_feature_grid(dir / jg.get<std::string>()));
      }
      dataset.classes.push_back(std::move(cls));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(manifest_path.string() + ": " + e.what());
  }

  try {
    validate_dataset(dataset);
  } catch (const ArgumentError& e) {
    throw DataError(manifest_path.string() + ": " + e.what());
  }
  return dataset;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  validate_dataset(dataset);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError(dir.string() + ": cannot create directory: " + ec.message());

  nlohmann::ordered_json manifest;
  manifest["classes"] = nlohmann::ordered_json::array();
  for (std::size_t ci = 0; ci < dataset.classes.size(); ++ci) {
    const auto& cls = dataset.classes[ci];
    const std::string cls_dir = cls.name;
    std::filesystem::create_directories(dir / cls_dir, ec);
    if (ec) throw DataError((dir / cls_dir).string() + ": cannot create directory");

    nlohmann::ordered_json jc;
    jc["name"] = cls.name;
    auto& jgrids = jc["grids"] = nlohmann::ordered_json::array();
    for (std::size_t gi = 0; gi < cls.grids.size(); ++gi) {
      char name[32];
      std::snprintf(name, sizeof(name), "grid_%05zu.srlf", gi);
      const std::string rel = cls_dir + "/" + name;
      save_feature_grid(cls.grids[gi], dir / rel);
      jgrids.push_back(rel);
    }
    manifest["classes"].push_back(std::move(jc));
  }

  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw DataError((dir / "manifest.json").string() + ": cannot open for writing");
  out << manifest.dump(2) << "\n";
  if (!out) throw DataError((dir / "manifest.json").string() + ": write failed");
}

Dataset shuffle_labels(const Dataset& dataset, std::uint64_t seed) {
  validate_dataset(dataset);
  std::vector<const FeatureGrid*> pool;
  for (const auto& c : dataset.classes) {
    for (const auto& g : c.grids) pool.push_back(&g);
  }
  Rng rng = Rng(seed).fold_in(0x5348464C);  // label-shuffle stream
  for (std::size_t i = pool.size(); i > 1; --i) {
    std::swap(pool[i - 1], pool[rng.next_below(i)]);
  }

  Dataset shuffled;
  shuffled.provenance = dataset.provenance + "+label_shuffle(seed=" + std::to_string(seed) + ")";
  std::size_t next = 0;
  for (const auto& c : dataset.classes) {
    DatasetClass cls;
    cls.name = c.name;
    for (std::size_t gi = 0; gi < c.grids.size(); ++gi) cls.grids.push_back(*pool[next++]);
    shuffled.classes.push_back(std::move(cls));
  }
  return shuffled;
}

}  // namespace srl
