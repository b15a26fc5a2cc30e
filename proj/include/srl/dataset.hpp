#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "srl/feature_grid.hpp"

namespace srl {

struct DatasetClass {
  std::string name;
  std::vector<FeatureGrid> grids;
};

// A labeled collection of feature grids. All grids share one (h, w, d);
// class names are unique and every class holds at least one grid.
// Immutable after construction and safe to share across threads.
struct Dataset {
  std::vector<DatasetClass> classes;
  std::string provenance;

  int num_classes() const { return static_cast<int>(classes.size()); }
  int height() const { return classes.front().grids.front().height; }
  int width() const { return classes.front().grids.front().width; }
  int depth() const { return classes.front().grids.front().depth; }
  int min_grids_per_class() const;
  int total_grids() const;
};

void validate_dataset(const Dataset& dataset);

// Directory layout: <dir>/manifest.json with
//   { "classes": [ { "name": "...", "grids": ["relative/path.srlf", ...] } ] }
// plus the referenced SRLF files.
Dataset load_dataset(const std::filesystem::path& dir);
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);

// Reassigns all grids to classes uniformly at random (class sizes are kept).
// Destroys any feature/label association; used for chance calibration.
Dataset shuffle_labels(const Dataset& dataset, std::uint64_t seed);

}  // namespace srl
