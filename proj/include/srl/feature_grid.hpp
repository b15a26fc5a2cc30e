#pragma once

#include <Eigen/Dense>
#include <vector>

namespace srl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// A feature matrix is d x m: one column per spatial cell, m = h * w.
using FeatureMatrix = Eigen::MatrixXd;

// An h x w grid of d-dimensional local feature vectors. Values are stored
// spatial-row-major with the channel innermost: value(row, col, channel)
// lives at (row * width + col) * depth + channel.
struct FeatureGrid {
  int height = 0;
  int width = 0;
  int depth = 0;
  std::vector<double> values;

  int cells() const { return height * width; }

  double at(int row, int col, int channel) const {
    return values[static_cast<std::size_t>((row * width + col) * depth + channel)];
  }
};

// Throws ArgumentError unless dimensions are positive, the value count
// matches, and every value is finite.
void validate_grid(const FeatureGrid& grid);

// Reshapes a grid into its d x (h*w) feature matrix. Column j holds the
// feature vector of spatial cell (j div w, j mod w); values are copied
// unchanged.
FeatureMatrix flatten(const FeatureGrid& grid);

// Inverse of flatten for a matrix whose column count equals h * w.
FeatureGrid unflatten(const FeatureMatrix& features, int height, int width);

}  // namespace srl
