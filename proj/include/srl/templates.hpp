#pragma once

#include <string>
#include <vector>

#include "srl/metric.hpp"
#include "srl/stiefel.hpp"
#include "srl/subspace.hpp"

namespace srl {

// K-shot aggregation strategies: optimized prototypical (PS) and
// discriminative (DS) templates, the union-of-features baseline, and the
// nearest-neighbor baseline that skips templates entirely.
enum class TemplateStrategy { kPrototypical, kDiscriminative, kUnion, kNearestNeighbor };

const char* to_string(TemplateStrategy strategy);
TemplateStrategy template_strategy_from_string(const std::string& name);

// Support set of an N-way K-shot task: per class, the K shot feature
// matrices and their extracted subspaces, rectangular across classes.
struct SupportSet {
  std::vector<std::vector<FeatureMatrix>> features;  // [class][shot]
  std::vector<std::vector<Subspace>> subspaces;      // [class][shot]

  int ways() const { return static_cast<int>(subspaces.size()); }
  int shots() const { return subspaces.empty() ? 0 : static_cast<int>(subspaces[0].size()); }
};

SupportSet make_support_set(std::vector<std::vector<FeatureMatrix>> features, int basis_size);
void validate_support(const SupportSet& support);

struct TemplateSet {
  std::vector<Subspace> templates;  // one per class, class order
  TemplateStrategy strategy = TemplateStrategy::kUnion;
  // DS: joint loss per iteration. PS: one trace per class.
  std::vector<double> joint_loss_trace;
  std::vector<std::vector<double>> class_loss_traces;
};

// Subspace of the column-concatenation of the K shot matrices. Also the
// initializer for PS and DS.
Subspace union_subspace(const std::vector<FeatureMatrix>& shots, int basis_size);

// PS objective (sum of WSDs to the K shot subspaces) and its Euclidean
// basis gradient, template weights held fixed.
double prototype_loss(const Subspace& temp, const std::vector<Subspace>& shots);
Matrix prototype_gradient(const Subspace& temp, const std::vector<Subspace>& shots,
                          double floor_eps);

struct PrototypeResult {
  Subspace subspace;
  std::vector<double> loss_trace;
};

// Minimizes the PS objective from the given initialization (weights are
// taken from it and frozen).
PrototypeResult optimize_prototype(const std::vector<Subspace>& shots, const Subspace& init,
                                   const StiefelOptConfig& cfg);

// Full PS pipeline: shot extraction, union initialization, optimization.
PrototypeResult prototypical_subspace(const std::vector<FeatureMatrix>& shots, int basis_size,
                                      const StiefelOptConfig& cfg);

// DS objective: WSD-softmax cross-entropy over all N*K support subspaces,
// and its per-template Euclidean basis gradients.
double discriminative_loss(const std::vector<Subspace>& templates, const SupportSet& support);
std::vector<Matrix> discriminative_gradient(const std::vector<Subspace>& templates,
                                            const SupportSet& support, double floor_eps);

// Jointly optimizes all N templates from union initializations, one
// simultaneous Cayley sweep per iteration.
TemplateSet discriminative_subspaces(const SupportSet& support, int basis_size,
                                     const StiefelOptConfig& cfg);

TemplateSet union_templates(const SupportSet& support, int basis_size);
TemplateSet prototypical_templates(const SupportSet& support, int basis_size,
                                   const StiefelOptConfig& cfg);

// Class of the support subspace nearest to the query; ties broken by the
// lowest (class, shot) pair.
int nn_classify(const Subspace& query, const SupportSet& support, DistanceKind kind);

// Paper-default optimizer settings: 50 iterations, step 0.1 for PS and
// 0.01 for DS.
StiefelOptConfig ps_default_config();
StiefelOptConfig ds_default_config();

}  // namespace srl
