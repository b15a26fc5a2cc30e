#include "srl/templates.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "srl/errors.hpp"

namespace srl {

const char* to_string(TemplateStrategy strategy) {
  switch (strategy) {
    case TemplateStrategy::kPrototypical: return "ps";
    case TemplateStrategy::kDiscriminative: return "ds";
    case TemplateStrategy::kUnion: return "union";
    case TemplateStrategy::kNearestNeighbor: return "nn";
  }
  throw ArgumentError("unknown template strategy");
}

TemplateStrategy template_strategy_from_string(const std::string& name) {
  if (name == "ps") return TemplateStrategy::kPrototypical;
  if (name == "ds") return TemplateStrategy::kDiscriminative;
  if (name == "union") return TemplateStrategy::kUnion;
  if (name == "nn") return TemplateStrategy::kNearestNeighbor;
  throw ArgumentError("unknown template strategy '" + name + "' (expected ps, ds, union or nn)");
}

void validate_support(const SupportSet& support) {
  if (support.subspaces.empty()) throw ArgumentError("support set is empty");
  if (support.features.size() != support.subspaces.size()) {
    throw ArgumentError("support set: feature/subspace class counts differ");
  }
  const int shots = support.shots();
  if (shots < 1) throw ArgumentError("support set: a class has no shots");
  const int d = support.subspaces[0][0].ambient_dim();
  const int s = support.subspaces[0][0].basis_size();
  for (std::size_t c = 0; c < support.subspaces.size(); ++c) {
    if (static_cast<int>(support.subspaces[c].size()) != shots ||
        static_cast<int>(support.features[c].size()) != shots) {
      throw ArgumentError("support set: class " + std::to_string(c) + " is not rectangular");
    }
    for (const auto& sub : support.subspaces[c]) {
      if (sub.ambient_dim() != d || sub.basis_size() != s) {
        throw ArgumentError("support set: inconsistent subspace shapes");
      }
    }
  }
}

SupportSet make_support_set(std::vector<std::vector<FeatureMatrix>> features, int basis_size) {
  SupportSet support;
  support.features = std::move(features);
  support.subspaces.resize(support.features.size());
  for (std::size_t c = 0; c < support.features.size(); ++c) {
    for (const auto& mat : support.features[c]) {
      support.subspaces[c].push_back(extract_subspace(mat, basis_size));
    }
  }
  validate_support(support);
  return support;
}

Subspace union_subspace(const std::vector<FeatureMatrix>& shots, int basis_size) {
  if (shots.empty()) throw ArgumentError("union_subspace: no shots");
  const Eigen::Index rows = shots[0].rows();
  Eigen::Index cols = 0;
  for (const auto& m : shots) {
    if (m.rows() != rows) throw ArgumentError("union_subspace: inconsistent feature dimensions");
    cols += m.cols();
  }
  Matrix stacked(rows, cols);
  Eigen::Index offset = 0;
  for (const auto& m : shots) {
    stacked.middleCols(offset, m.cols()) = m;
    offset += m.cols();
  }
  return extract_subspace(stacked, basis_size);
}

double prototype_loss(const Subspace& temp, const std::vector<Subspace>& shots) {
  double loss = 0.0;
  for (const auto& shot : shots) loss += wsd(temp, shot);
  return loss;
}

Matrix prototype_gradient(const Subspace& temp, const std::vector<Subspace>& shots,
                          double floor_eps) {
  Matrix grad = Matrix::Zero(temp.ambient_dim(), temp.basis_size());
  for (const auto& shot : shots) grad += wsd_grad_basis(temp, shot, floor_eps);
  return grad;
}

PrototypeResult optimize_prototype(const std::vector<Subspace>& shots, const Subspace& init,
                                   const StiefelOptConfig& cfg) {
  if (shots.empty()) throw ArgumentError("optimize_prototype: no shots");
  for (const auto& shot : shots) {
    if (shot.ambient_dim() != init.ambient_dim() || shot.basis_size() != init.basis_size()) {
      throw ArgumentError("optimize_prototype: shot/init shapes differ");
    }
  }
  const Vector weights = init.weights;  // frozen at initialization
  const auto as_template = [&](const Matrix& basis) {
    Subspace t;
    t.basis = basis;
    t.weights = weights;
    t.degenerate = init.degenerate;
    return t;
  };

  StiefelOptResult opt = optimize_on_stiefel(
      [&](const Matrix& basis) { return prototype_gradient(as_template(basis), shots,
                                                           cfg.gradient_floor); },
      init.basis, cfg,
      [&](const Matrix& basis) { return prototype_loss(as_template(basis), shots); });

  PrototypeResult result;
  result.subspace = as_template(opt.basis);
  result.loss_trace = std::move(opt.loss_trace);
  return result;
}

PrototypeResult prototypical_subspace(const std::vector<FeatureMatrix>& shots, int basis_size,
                                      const StiefelOptConfig& cfg) {
  std::vector<Subspace> shot_subspaces;
  shot_subspaces.reserve(shots.size());
  for (const auto& m : shots) shot_subspaces.push_back(extract_subspace(m, basis_size));
  return optimize_prototype(shot_subspaces, union_subspace(shots, basis_size), cfg);
}

double discriminative_loss(const std::vector<Subspace>& templates, const SupportSet& support) {
  double loss = 0.0;
  for (int c = 0; c < support.ways(); ++c) {
    for (const auto& shot : support.subspaces[c]) {
      std::vector<double> distances(templates.size());
      for (std::size_t t = 0; t < templates.size(); ++t) distances[t] = wsd(shot, templates[t]);
      const std::vector<double> probs = softmax_from_distances(distances);
      loss -= std::log(probs[static_cast<std::size_t>(c)]);
    }
  }
  return loss;
}

std::vector<Matrix> discriminative_gradient(const std::vector<Subspace>& templates,
                                            const SupportSet& support, double floor_eps) {
  std::vector<Matrix> grads(templates.size());
  for (std::size_t t = 0; t < templates.size(); ++t) {
    grads[t] = Matrix::Zero(templates[t].ambient_dim(), templates[t].basis_size());
  }
  for (int c = 0; c < support.ways(); ++c) {
    for (const auto& shot : support.subspaces[c]) {
      std::vector<double> distances(templates.size());
      for (std::size_t t = 0; t < templates.size(); ++t) distances[t] = wsd(shot, templates[t]);
      const std::vector<double> probs = softmax_from_distances(distances);
      // d(-log p_c)/dD_t = (t == c) - p_t
      for (std::size_t t = 0; t < templates.size(); ++t) {
        const double coeff = (static_cast<int>(t) == c ? 1.0 : 0.0) - probs[t];
        if (coeff != 0.0) {
          grads[t] += coeff * wsd_grad_basis(templates[t], shot, floor_eps);
        }
      }
    }
  }
  return grads;
}

TemplateSet discriminative_subspaces(const SupportSet& support, int basis_size,
                                     const StiefelOptConfig& cfg) {
  validate_support(support);
  if (support.ways() < 2) throw ArgumentError("discriminative_subspaces: need at least 2 classes");

  std::vector<Subspace> inits;
  std::vector<Matrix> bases;
  for (int c = 0; c < support.ways(); ++c) {
    inits.push_back(union_subspace(support.features[c], basis_size));
    bases.push_back(inits.back().basis);
  }
  const auto as_templates = [&](const std::vector<Matrix>& current) {
    std::vector<Subspace> result = inits;  // weights frozen at initialization
    for (std::size_t c = 0; c < current.size(); ++c) result[c].basis = current[c];
    return result;
  };

  JointStiefelOptResult opt = optimize_joint_on_stiefel(
      [&](const std::vector<Matrix>& current) {
        return discriminative_gradient(as_templates(current), support, cfg.gradient_floor);
      },
      std::move(bases), cfg,
      [&](const std::vector<Matrix>& current) {
        return discriminative_loss(as_templates(current), support);
      });

  TemplateSet set;
  set.templates = as_templates(opt.bases);
  set.strategy = TemplateStrategy::kDiscriminative;
  set.joint_loss_trace = std::move(opt.loss_trace);
  return set;
}

TemplateSet union_templates(const SupportSet& support, int basis_size) {
  validate_support(support);
  TemplateSet set;
  set.strategy = TemplateStrategy::kUnion;
  for (int c = 0; c < support.ways(); ++c) {
    set.templates.push_back(union_subspace(support.features[c], basis_size));
  }
  return set;
}

TemplateSet prototypical_templates(const SupportSet& support, int basis_size,
                                   const StiefelOptConfig& cfg) {
  validate_support(support);
  TemplateSet set;
  set.strategy = TemplateStrategy::kPrototypical;
  for (int c = 0; c < support.ways(); ++c) {
    PrototypeResult ps = prototypical_subspace(support.features[c], basis_size, cfg);
    set.templates.push_back(std::move(ps.subspace));
    set.class_loss_traces.push_back(std::move(ps.loss_trace));
  }
  return set;
}

int nn_classify(const Subspace& query, const SupportSet& support, DistanceKind kind) {
  validate_support(support);
  int best_class = 0;
  double best_distance = std::numeric_limits<double>::infinity();
  for (int c = 0; c < support.ways(); ++c) {
    for (const auto& shot : support.subspaces[c]) {
      const double dist = subspace_distance(query, shot, kind);
      if (dist < best_distance) {  // strict: earliest (class, shot) wins ties
        best_distance = dist;
        best_class = c;
      }
    }
  }
  return best_class;
}

StiefelOptConfig ps_default_config() { return StiefelOptConfig{0.1, 50, 1e-8}; }
StiefelOptConfig ds_default_config() { return StiefelOptConfig{0.01, 50, 1e-8}; }

}  // namespace srl
