#include "srl/subspace.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "srl/errors.hpp"

namespace srl {

namespace {

constexpr double kRankTolerance = 1e-10;  // relative to sigma_max

// Largest-magnitude entry positive, ties broken by the lowest index.
void apply_sign_convention(Matrix& basis) {
  for (int j = 0; j < basis.cols(); ++j) {
    int pivot = 0;
    double best = -1.0;
    for (int i = 0; i < basis.rows(); ++i) {
      const double mag = std::abs(basis(i, j));
      if (mag > best) {
        best = mag;
        pivot = i;
      }
    }
    if (basis(pivot, j) < 0.0) basis.col(j) = -basis.col(j);
  }
}

// Extends `basis` (d x k, orthonormal) to d x s by Gram-Schmidt over
// identity candidates, taking the candidate with the largest residual each
// time (ties to the lowest index). The largest residual is at least
// sqrt((d - j) / d), so this always succeeds.
void complete_basis(Matrix& basis, int k, int s) {
  const int d = static_cast<int>(basis.rows());
  for (int j = k; j < s; ++j) {
    Vector best_residual;
    double best_norm = -1.0;
    for (int candidate = 0; candidate < d; ++candidate) {
      Vector v = Vector::Unit(d, candidate);
      for (int sweep = 0; sweep < 2; ++sweep) {
        for (int l = 0; l < j; ++l) v -= basis.col(l).dot(v) * basis.col(l);
      }
      const double norm = v.norm();
      if (norm > best_norm + 1e-12) {
        best_norm = norm;
        best_residual = v;
      }
    }
    if (best_norm < 1e-6) {
      throw NumericError("extract_subspace: failed to complete an orthonormal basis");
    }
    basis.col(j) = best_residual / best_norm;
  }
}

}  // namespace

void validate_subspace(const Subspace& subspace) {
  const int d = subspace.ambient_dim();
  const int s = subspace.basis_size();
  if (s < 1 || s > d) throw ArgumentError("subspace: need 1 <= basis_size <= ambient_dim");
  if (static_cast<int>(subspace.weights.size()) != s) {
    throw ArgumentError("subspace: weight count != basis_size");
  }
  const double ortho_err =
      (subspace.basis.transpose() * subspace.basis - Matrix::Identity(s, s)).cwiseAbs().maxCoeff();
  if (!(ortho_err <= 1e-10)) {
    throw ArgumentError("subspace: basis not orthonormal (deviation " + std::to_string(ortho_err) +
                        ")");
  }
  double sum = 0.0;
  for (int i = 0; i < s; ++i) {
    const double wi = subspace.weights[i];
    if (!(wi >= 0.0) || !std::isfinite(wi)) throw ArgumentError("subspace: weights must be >= 0");
    if (i > 0 && wi > subspace.weights[i - 1]) {
      throw ArgumentError("subspace: weights must be sorted non-increasing");
    }
    sum += wi;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw ArgumentError("subspace: weights sum to " + std::to_string(sum) + ", expected 1");
  }
}

Subspace extract_subspace(const FeatureMatrix& features, int basis_size) {
  const int d = static_cast<int>(features.rows());
  const int m = static_cast<int>(features.cols());
  if (d < 1 || m < 1) throw ArgumentError("extract_subspace: empty feature matrix");
  if (basis_size < 1) throw ArgumentError("extract_subspace: basis_size must be >= 1");
  if (basis_size > d) {
    throw ArgumentError("extract_subspace: basis_size " + std::to_string(basis_size) +
                        " exceeds feature dimension " + std::to_string(d));
  }
  if (!features.allFinite()) throw ArgumentError("extract_subspace: features must be finite");

  Eigen::JacobiSVD<Matrix> svd(features, Eigen::ComputeThinU);
  const Vector& sigma = svd.singularValues();
  const int available = static_cast<int>(sigma.size());
  const double sigma_max = available > 0 ? sigma[0] : 0.0;
  const double cutoff = kRankTolerance * sigma_max;

  const int s = basis_size;
  const int from_svd = std::min(s, available);

  Subspace out;
  out.basis = Matrix::Zero(d, s);
  out.basis.leftCols(from_svd) = svd.matrixU().leftCols(from_svd);
  complete_basis(out.basis, from_svd, s);

  out.weights = Vector::Zero(s);
  double total = 0.0;
  for (int i = 0; i < from_svd; ++i) {
    if (sigma[i] > cutoff && sigma[i] > 0.0) {
      out.weights[i] = sigma[i];
      total += sigma[i];
    }
  }
  if (total > 0.0) {
    out.weights /= total;
  } else {
    // All-zero features: normalization is undefined, fall back to uniform.
    out.weights.setConstant(1.0 / s);
    out.degenerate = true;
  }

  apply_sign_convention(out.basis);
  return out;
}

ActivationMap basis_activation_map(const FeatureGrid& grid, const Subspace& subspace,
                                   int component) {
  validate_grid(grid);
  if (component < 0 || component >= subspace.basis_size()) {
    throw ArgumentError("basis_activation_map: component " + std::to_string(component) +
                        " out of range for basis size " + std::to_string(subspace.basis_size()));
  }
  if (grid.depth != subspace.ambient_dim()) {
    throw ArgumentError("basis_activation_map: grid depth " + std::to_string(grid.depth) +
                        " != subspace ambient dimension " +
                        std::to_string(subspace.ambient_dim()));
  }

  const FeatureMatrix features = flatten(grid);
  const Vector direction = subspace.basis.col(component);

  ActivationMap map;
  map.height = grid.height;
  map.width = grid.width;
  map.values.resize(static_cast<std::size_t>(grid.cells()));
  for (int j = 0; j < grid.cells(); ++j) {
    const double norm = features.col(j).norm();
    if (norm == 0.0) {
      map.values[j] = 0.0;
    } else {
      const double cosine = features.col(j).dot(direction) / norm;
      map.values[j] = std::clamp(cosine, -1.0, 1.0);
    }
  }
  return map;
}

std::string activation_map_csv(const ActivationMap& map) {
  std::string csv;
  char buf[64];
  for (int r = 0; r < map.height; ++r) {
    for (int c = 0; c < map.width; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", map.values[static_cast<std::size_t>(r) * map.width + c]);
      csv += buf;
      csv += (c + 1 < map.width) ? "," : "\n";
    }
  }
  return csv;
}

}  // namespace srl
