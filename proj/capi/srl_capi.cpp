#include "srl.h"

#include <cstring>
#include <new>
#include <string>

#include "srl/dataset.hpp"
#include "srl/errors.hpp"
#include "srl/eval.hpp"
#include "srl/metric.hpp"
#include "srl/srlf.hpp"
#include "srl/subspace.hpp"
#include "srl/synthetic.hpp"
#include "srl/templates.hpp"
#include "srl/version.hpp"

struct srl_grid {
  srl::FeatureGrid grid;
};

struct srl_subspace {
  srl::Subspace subspace;
};

struct srl_dataset {
  srl::Dataset dataset;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

// Runs the body, translating exceptions into status codes.
template <typename Fn>
srl_status guarded(Fn&& fn) {
  try {
    fn();
    return SRL_OK;
  } catch (const srl::ArgumentError& e) {
    set_error(e.what());
    return SRL_ERROR_ARGUMENT;
  } catch (const srl::DataError& e) {
    set_error(e.what());
    return SRL_ERROR_DATA;
  } catch (const srl::NumericError& e) {
    set_error(e.what());
    return SRL_ERROR_NUMERIC;
  } catch (const std::exception& e) {
    set_error(e.what());
    return SRL_ERROR_INTERNAL;
  } catch (...) {
    set_error("unknown error");
    return SRL_ERROR_INTERNAL;
  }
}

srl_status require(bool ok, const char* what) {
  if (!ok) {
    set_error(std::string("null ") + what);
    return SRL_ERROR_ARGUMENT;
  }
  return SRL_OK;
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

srl::DistanceKind to_kind(srl_metric metric) {
  switch (metric) {
    case SRL_METRIC_WSD: return srl::DistanceKind::kWsd;
    case SRL_METRIC_PROJECTION_FNORM: return srl::DistanceKind::kProjectionFnorm;
  }
  throw srl::ArgumentError("unknown metric enum value " + std::to_string(int(metric)));
}

srl::TemplateStrategy to_strategy(srl_template strategy) {
  switch (strategy) {
    case SRL_TEMPLATE_PS: return srl::TemplateStrategy::kPrototypical;
    case SRL_TEMPLATE_DS: return srl::TemplateStrategy::kDiscriminative;
    case SRL_TEMPLATE_UNION: return srl::TemplateStrategy::kUnion;
    case SRL_TEMPLATE_NN: return srl::TemplateStrategy::kNearestNeighbor;
  }
  throw srl::ArgumentError("unknown template enum value " + std::to_string(int(strategy)));
}

srl::EvalConfig to_eval_config(const srl_eval_config& c) {
  srl::EvalConfig cfg;
  cfg.ways = static_cast<int>(c.ways);
  cfg.shots = static_cast<int>(c.shots);
  cfg.queries_per_class = static_cast<int>(c.queries_per_class);
  cfg.episodes = static_cast<int>(c.episodes);
  cfg.basis_size = static_cast<int>(c.basis_size);
  cfg.metric = to_kind(c.metric);
  cfg.strategy = to_strategy(c.template_strategy);
  cfg.alpha = c.alpha;
  cfg.iterations = static_cast<int>(c.iterations);
  cfg.gradient_floor = c.gradient_floor;
  cfg.seed = c.seed;
  cfg.workers = static_cast<int>(c.workers);
  return cfg;
}

}  // namespace

extern "C" {

const char* srl_version(void) { return srl::kVersion; }

const char* srl_last_error(void) { return g_last_error.c_str(); }

void srl_string_free(char* s) { delete[] s; }

/* ---- feature grids ------------------------------------------------ */

srl_status srl_grid_create(uint32_t height, uint32_t width, uint32_t depth,
                           const double* values, srl_grid** out) {
  if (auto rc = require(values && out, "argument")) return rc;
  return guarded([&] {
    srl::FeatureGrid grid;
    grid.height = static_cast<int>(height);
    grid.width = static_cast<int>(width);
    grid.depth = static_cast<int>(depth);
    grid.values.assign(values, values + static_cast<std::size_t>(height) * width * depth);
    srl::validate_grid(grid);
    *out = new srl_grid{std::move(grid)};
  });
}

srl_status srl_grid_load(const char* path, srl_grid** out) {
  if (auto rc = require(path && out, "argument")) return rc;
  return guarded([&] { *out = new srl_grid{srl::load_feature_grid(path)}; });
}

srl_status srl_grid_save(const srl_grid* grid, const char* path) {
  if (auto rc = require(grid && path, "argument")) return rc;
  return guarded([&] { srl::save_feature_grid(grid->grid, path); });
}

srl_status srl_grid_dims(const srl_grid* grid, uint32_t* height, uint32_t* width,
                         uint32_t* depth) {
  if (auto rc = require(grid && height && width && depth, "argument")) return rc;
  *height = static_cast<uint32_t>(grid->grid.height);
  *width = static_cast<uint32_t>(grid->grid.width);
  *depth = static_cast<uint32_t>(grid->grid.depth);
  return SRL_OK;
}

srl_status srl_grid_values(const srl_grid* grid, double* out) {
  if (auto rc = require(grid && out, "argument")) return rc;
  std::memcpy(out, grid->grid.values.data(), grid->grid.values.size() * sizeof(double));
  return SRL_OK;
}

void srl_grid_free(srl_grid* grid) { delete grid; }

/* ---- subspaces ----------------------------------------------------- */

srl_status srl_subspace_extract(const srl_grid* grid, uint32_t basis_size, srl_subspace** out) {
  if (auto rc = require(grid && out, "argument")) return rc;
  return guarded([&] {
    *out = new srl_subspace{
        srl::extract_subspace(srl::flatten(grid->grid), static_cast<int>(basis_size))};
  });
}

srl_status srl_subspace_shape(const srl_subspace* sub, uint32_t* ambient_dim,
                              uint32_t* basis_size) {
  if (auto rc = require(sub && ambient_dim && basis_size, "argument")) return rc;
  *ambient_dim = static_cast<uint32_t>(sub->subspace.ambient_dim());
  *basis_size = static_cast<uint32_t>(sub->subspace.basis_size());
  return SRL_OK;
}

srl_status srl_subspace_basis(const srl_subspace* sub, double* out) {
  if (auto rc = require(sub && out, "argument")) return rc;
  const srl::Matrix& basis = sub->subspace.basis;
  for (Eigen::Index i = 0; i < basis.rows(); ++i) {
    for (Eigen::Index j = 0; j < basis.cols(); ++j) *out++ = basis(i, j);
  }
  return SRL_OK;
}

srl_status srl_subspace_weights(const srl_subspace* sub, double* out) {
  if (auto rc = require(sub && out, "argument")) return rc;
  for (Eigen::Index i = 0; i < sub->subspace.weights.size(); ++i) {
    out[i] = sub->subspace.weights[i];
  }
  return SRL_OK;
}

srl_status srl_subspace_to_json(const srl_subspace* sub, char** json_out) {
  if (auto rc = require(sub && json_out, "argument")) return rc;
  return guarded([&] {
    const srl::Subspace& s = sub->subspace;
    nlohmann::ordered_json j;
    auto& rows = j["basis"] = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < s.basis.rows(); ++i) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (Eigen::Index k = 0; k < s.basis.cols(); ++k) row.push_back(s.basis(i, k));
      rows.push_back(std::move(row));
    }
    auto& weights = j["weights"] = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < s.weights.size(); ++i) weights.push_back(s.weights[i]);
    j["d"] = s.ambient_dim();
    j["s"] = s.basis_size();
    *json_out = copy_string(j.dump(2));
  });
}

void srl_subspace_free(srl_subspace* sub) { delete sub; }

srl_status srl_distance(const srl_subspace* a, const srl_subspace* b, srl_metric metric,
                        double* out) {
  if (auto rc = require(a && b && out, "argument")) return rc;
  return guarded([&] { *out = srl::subspace_distance(a->subspace, b->subspace, to_kind(metric)); });
}

srl_status srl_activation_map_csv(const srl_grid* grid, const srl_subspace* sub,
                                  uint32_t component, char** csv_out) {
  if (auto rc = require(grid && sub && csv_out, "argument")) return rc;
  return guarded([&] {
    const srl::ActivationMap map =
        srl::basis_activation_map(grid->grid, sub->subspace, static_cast<int>(component));
    *csv_out = copy_string(srl::activation_map_csv(map));
  });
}

/* ---- datasets ------------------------------------------------------ */

srl_status srl_dataset_generate(const srl_synthetic_config* config, srl_dataset** out) {
  if (auto rc = require(config && out, "argument")) return rc;
  return guarded([&] {
    srl::SyntheticConfig cfg;
    cfg.num_classes = static_cast<int>(config->num_classes);
    cfg.grids_per_class = static_cast<int>(config->grids_per_class);
    cfg.height = static_cast<int>(config->height);
    cfg.width = static_cast<int>(config->width);
    cfg.depth = static_cast<int>(config->depth);
    cfg.class_signal_rank = static_cast<int>(config->class_signal_rank);
    cfg.background_rank = static_cast<int>(config->background_rank);
    cfg.noise_sigma = config->noise_sigma;
    cfg.foreground_fraction = config->foreground_fraction;
    cfg.contrast_sigma = config->contrast_sigma;
    cfg.style_sigma = config->style_sigma;
    cfg.signal_decay = config->signal_decay;
    cfg.class_dispersion = config->class_dispersion;
    cfg.seed = config->seed;
    *out = new srl_dataset{srl::generate_synthetic_dataset(cfg)};
  });
}

srl_status srl_dataset_load(const char* dir, srl_dataset** out) {
  if (auto rc = require(dir && out, "argument")) return rc;
  return guarded([&] { *out = new srl_dataset{srl::load_dataset(dir)}; });
}

srl_status srl_dataset_save(const srl_dataset* dataset, const char* dir) {
  if (auto rc = require(dataset && dir, "argument")) return rc;
  return guarded([&] { srl::save_dataset(dataset->dataset, dir); });
}

srl_status srl_dataset_info(const srl_dataset* dataset, uint32_t* num_classes, uint32_t* height,
                            uint32_t* width, uint32_t* depth) {
  if (auto rc = require(dataset && num_classes && height && width && depth, "argument")) return rc;
  *num_classes = static_cast<uint32_t>(dataset->dataset.num_classes());
  *height = static_cast<uint32_t>(dataset->dataset.height());
  *width = static_cast<uint32_t>(dataset->dataset.width());
  *depth = static_cast<uint32_t>(dataset->dataset.depth());
  return SRL_OK;
}

void srl_dataset_free(srl_dataset* dataset) { delete dataset; }

/* ---- episodic evaluation ------------------------------------------- */

void srl_eval_config_init(srl_eval_config* config) {
  if (!config) return;
  config->ways = 5;
  config->shots = 5;
  config->queries_per_class = 15;
  config->episodes = 1000;
  config->basis_size = 5;
  config->metric = SRL_METRIC_WSD;
  config->template_strategy = SRL_TEMPLATE_DS;
  config->alpha = 0.0;
  config->iterations = 50;
  config->gradient_floor = 0.0;
  config->seed = 0;
  config->workers = 1;
}

srl_status srl_evaluate_json(const srl_dataset* dataset, const srl_eval_config* config,
                             char** json_out) {
  if (auto rc = require(dataset && config && json_out, "argument")) return rc;
  return guarded([&] {
    const srl::EvalReport report = srl::evaluate(dataset->dataset, to_eval_config(*config));
    *json_out = copy_string(srl::report_to_json(report).dump(2));
  });
}

srl_status srl_sweep(const srl_dataset* dataset, const uint32_t* sizes, size_t num_sizes,
                     const srl_eval_config* config, char** csv_out, char** json_out) {
  if (auto rc = require(dataset && sizes && config, "argument")) return rc;
  return guarded([&] {
    std::vector<int> s(num_sizes);
    for (size_t i = 0; i < num_sizes; ++i) s[i] = static_cast<int>(sizes[i]);
    const srl::SweepReport sweep =
        srl::sweep_basis_size(dataset->dataset, s, to_eval_config(*config));
    if (csv_out) *csv_out = copy_string(srl::sweep_to_csv(sweep));
    if (json_out) *json_out = copy_string(srl::sweep_to_json(sweep).dump(2));
  });
}

}  // extern "C"
