#include "srl/metric.hpp"

#include <algorithm>
#include <cmath>

#include "srl/errors.hpp"

namespace srl {

namespace {

void check_comparable(const Subspace& a, const Subspace& b, const char* op) {
  if (a.ambient_dim() != b.ambient_dim()) {
    throw ArgumentError(std::string(op) + ": ambient dimensions differ (" +
                        std::to_string(a.ambient_dim()) + " vs " +
                        std::to_string(b.ambient_dim()) + ")");
  }
  if (a.basis_size() != b.basis_size()) {
    throw ArgumentError(std::string(op) + ": basis sizes differ (" +
                        std::to_string(a.basis_size()) + " vs " + std::to_string(b.basis_size()) +
                        ")");
  }
}

}  // namespace

const char* to_string(DistanceKind kind) {
  return kind == DistanceKind::kWsd ? "wsd" : "projfn";
}

DistanceKind distance_kind_from_string(const std::string& name) {
  if (name == "wsd") return DistanceKind::kWsd;
  if (name == "projfn") return DistanceKind::kProjectionFnorm;
  throw ArgumentError("unknown distance kind '" + name + "' (expected wsd or projfn)");
}

double wsd(const Subspace& a, const Subspace& b) {
  check_comparable(a, b, "wsd");
  const int s = a.basis_size();
  // M_ij = u_a,i . u_b,j, via dot products so that M_ab(i,j) and M_ba(j,i)
  // are the same reduction bit for bit.
  Matrix alignment(s, s);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) alignment(i, j) = a.basis.col(i).dot(b.basis.col(j));
  }

  const auto term = [&](int i, int j) {
    const double m = alignment(i, j);
    return std::sqrt(a.weights[i] * b.weights[j]) * m * m;
  };

  // Diagonal first, then (i,j)+(j,i) pairs: the accumulation order is
  // invariant under swapping the arguments, so wsd(a,b) == wsd(b,a) exactly.
  double overlap = 0.0;
  for (int i = 0; i < s; ++i) overlap += term(i, i);
  for (int i = 0; i < s; ++i) {
    for (int j = i + 1; j < s; ++j) overlap += term(i, j) + term(j, i);
  }

  if (overlap < -1e-9 || overlap > 1.0 + 1e-9) {
    throw NumericError("wsd: weighted overlap " + std::to_string(overlap) +
                       " escaped [0,1] beyond rounding tolerance");
  }
  return std::sqrt(1.0 - std::clamp(overlap, 0.0, 1.0));
}

double projection_fnorm(const Subspace& a, const Subspace& b) {
  check_comparable(a, b, "projection_fnorm");
  const int s = a.basis_size();
  const double cross = (a.basis.transpose() * b.basis).squaredNorm();
  return std::max(0.0, 2.0 * s - 2.0 * cross);
}

double subspace_distance(const Subspace& a, const Subspace& b, DistanceKind kind) {
  return kind == DistanceKind::kWsd ? wsd(a, b) : projection_fnorm(a, b);
}

std::vector<double> softmax_from_distances(const std::vector<double>& distances) {
  const double shift = *std::min_element(distances.begin(), distances.end());
  std::vector<double> probs(distances.size());
  double total = 0.0;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    probs[i] = std::exp(shift - distances[i]);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

ClassScores softmax_classify(const Subspace& query, const std::vector<Subspace>& templates,
                             DistanceKind kind) {
  if (templates.empty()) throw ArgumentError("softmax_classify: empty template set");
  ClassScores scores;
  scores.distances.reserve(templates.size());
  for (const Subspace& t : templates) {
    scores.distances.push_back(subspace_distance(query, t, kind));
  }
  scores.probabilities = softmax_from_distances(scores.distances);
  return scores;
}

double nll_loss(const ClassScores& scores, int label) {
  if (label < 0 || label >= scores.num_classes()) {
    throw ArgumentError("nll_loss: label " + std::to_string(label) + " out of range for " +
                        std::to_string(scores.num_classes()) + " classes");
  }
  return -std::log(scores.probabilities[static_cast<std::size_t>(label)]);
}

int argmax_class(const ClassScores& scores) {
  int best = 0;
  for (int i = 1; i < scores.num_classes(); ++i) {
    if (scores.probabilities[i] > scores.probabilities[best]) best = i;
  }
  return best;
}

}  // namespace srl
