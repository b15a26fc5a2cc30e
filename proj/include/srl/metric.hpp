#pragma once

#include <string>
#include <vector>

#include "srl/subspace.hpp"

namespace srl {

enum class DistanceKind { kWsd, kProjectionFnorm };

const char* to_string(DistanceKind kind);
DistanceKind distance_kind_from_string(const std::string& name);

// Weighted subspace distance in [0, 1]:
//   D = sqrt(1 - sum_ij sqrt(w_a,i * w_b,j) (u_a,i . u_b,j)^2)
// Symmetric bit-for-bit (terms are accumulated in a swap-invariant order).
// The inner sum is clamped to [0, 1] before the square root; drifting
// outside by more than 1e-9 raises NumericError. Requires equal ambient
// dimensions and equal basis sizes.
double wsd(const Subspace& a, const Subspace& b);

// Projection F-norm distance ||UaUa^T - UbUb^T||_F^2 = 2s - 2||Ua^T Ub||_F^2.
// Ignores the weights entirely; range [0, 2s].
double projection_fnorm(const Subspace& a, const Subspace& b);

double subspace_distance(const Subspace& a, const Subspace& b, DistanceKind kind);

// Softmax over negated distances, with per-class distances kept alongside.
// Probability order is the reverse of distance order.
struct ClassScores {
  std::vector<double> probabilities;
  std::vector<double> distances;

  int num_classes() const { return static_cast<int>(probabilities.size()); }
};

ClassScores softmax_classify(const Subspace& query, const std::vector<Subspace>& templates,
                             DistanceKind kind);

// Max-shifted softmax of -distances; shared by the classifier and the
// discriminative template objective.
std::vector<double> softmax_from_distances(const std::vector<double>& distances);

// Cross-entropy of the true class: -log p_label.
double nll_loss(const ClassScores& scores, int label);

// Lowest index among maximal probabilities (equivalently minimal distances).
int argmax_class(const ClassScores& scores);

}  // namespace srl
