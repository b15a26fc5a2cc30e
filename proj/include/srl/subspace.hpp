#pragma once

#include <vector>

#include "srl/feature_grid.hpp"

namespace srl {

// An s-dimensional subspace of R^d: orthonormal basis columns plus the
// normalized singular-value weights of the features it was extracted from.
// Weights are nonnegative, sorted non-increasing and sum to 1.
struct Subspace {
  Matrix basis;    // d x s, orthonormal columns
  Vector weights;  // s entries
  // Set when every singular value fell below the rank cutoff (all-zero
  // features); the weights are then uniform by convention.
  bool degenerate = false;

  int ambient_dim() const { return static_cast<int>(basis.rows()); }
  int basis_size() const { return static_cast<int>(basis.cols()); }
};

// Throws ArgumentError if the basis is not orthonormal (max deviation
// 1e-10) or the weights violate their invariants.
void validate_subspace(const Subspace& subspace);

// Best-fit basis_size-dimensional subspace of the feature columns: the
// leading left-singular vectors of the d x m matrix, which minimize
// ||H - U U^T H||_F over orthonormal U. Weights are the leading singular
// values normalized to sum 1. Deterministic: singular vectors get a fixed
// sign convention (largest-magnitude entry positive, ties to the lowest
// index), singular values below 1e-10 * sigma_max count as rank-deficient
// and contribute weight 0, and missing directions are filled with an
// orthonormal completion seeded from identity columns.
Subspace extract_subspace(const FeatureMatrix& features, int basis_size);

// Per-cell cosine similarities between one basis column and the grid's
// local features. Zero-norm features map to 0.
struct ActivationMap {
  int height = 0;
  int width = 0;
  std::vector<double> values;  // h * w, row-major, each in [-1, 1]
};

ActivationMap basis_activation_map(const FeatureGrid& grid, const Subspace& subspace,
                                   int component);

std::string activation_map_csv(const ActivationMap& map);

}  // namespace srl
