#include "srl/feature_grid.hpp"

#include <cmath>
#include <string>

#include "srl/errors.hpp"

namespace srl {

void validate_grid(const FeatureGrid& grid) {
  if (grid.height < 1 || grid.width < 1 || grid.depth < 1) {
    throw ArgumentError("feature grid dimensions must be positive, got " +
                        std::to_string(grid.height) + "x" + std::to_string(grid.width) +
                        "x" + std::to_string(grid.depth));
  }
  const std::size_t expected = static_cast<std::size_t>(grid.height) * grid.width * grid.depth;
  if (grid.values.size() != expected) {
    throw ArgumentError("feature grid holds " + std::to_string(grid.values.size()) +
                        " values, expected " + std::to_string(expected));
  }
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    if (!std::isfinite(grid.values[i])) {
      throw ArgumentError("feature grid value " + std::to_string(i) + " is not finite");
    }
  }
}

FeatureMatrix flatten(const FeatureGrid& grid) {
  validate_grid(grid);
  // Channel-innermost layout makes each column contiguous already.
  return Eigen::Map<const Matrix>(grid.values.data(), grid.depth, grid.cells());
}

FeatureGrid unflatten(const FeatureMatrix& features, int height, int width) {
  if (height < 1 || width < 1) {
    throw ArgumentError("unflatten: grid dimensions must be positive");
  }
  if (features.cols() != static_cast<Eigen::Index>(height) * width) {
    throw ArgumentError("unflatten: matrix has " + std::to_string(features.cols()) +
                        " columns, expected " + std::to_string(height * width));
  }
  FeatureGrid grid;
  grid.height = height;
  grid.width = width;
  grid.depth = static_cast<int>(features.rows());
  grid.values.resize(static_cast<std::size_t>(features.size()));
  Eigen::Map<Matrix>(grid.values.data(), features.rows(), features.cols()) = features;
  validate_grid(grid);
  return grid;
}

}  // namespace srl
