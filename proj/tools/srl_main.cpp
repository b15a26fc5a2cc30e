// Command-line front end for the subspace representation library. Talks to
// libsrl through the C API only.
//
// Exit codes: 0 success, 2 usage error, 3 data/format error, 4 numerical
// failure.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "srl.h"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

int exit_code_for(srl_status status) {
  switch (status) {
    case SRL_OK: return 0;
    case SRL_ERROR_ARGUMENT: return kExitUsage;
    case SRL_ERROR_DATA: return kExitData;
    case SRL_ERROR_NUMERIC: return kExitNumeric;
    case SRL_ERROR_INTERNAL: return 1;
  }
  return 1;
}

// Raised by command bodies when a C API call or file write fails.
struct CliError {
  int exit_code;
  std::string message;
};

void check(srl_status status) {
  if (status != SRL_OK) throw CliError{exit_code_for(status), srl_last_error()};
}

struct StringDeleter {
  void operator()(char* s) const { srl_string_free(s); }
};
using ApiString = std::unique_ptr<char, StringDeleter>;

struct GridDeleter {
  void operator()(srl_grid* g) const { srl_grid_free(g); }
};
using GridHandle = std::unique_ptr<srl_grid, GridDeleter>;

struct SubspaceDeleter {
  void operator()(srl_subspace* s) const { srl_subspace_free(s); }
};
using SubspaceHandle = std::unique_ptr<srl_subspace, SubspaceDeleter>;

struct DatasetDeleter {
  void operator()(srl_dataset* d) const { srl_dataset_free(d); }
};
using DatasetHandle = std::unique_ptr<srl_dataset, DatasetDeleter>;

GridHandle load_grid(const std::string& path) {
  srl_grid* grid = nullptr;
  check(srl_grid_load(path.c_str(), &grid));
  return GridHandle(grid);
}

SubspaceHandle extract(const srl_grid* grid, uint32_t basis_size) {
  srl_subspace* sub = nullptr;
  check(srl_subspace_extract(grid, basis_size, &sub));
  return SubspaceHandle(sub);
}

srl_metric parse_metric(const std::string& name) {
  if (name == "wsd") return SRL_METRIC_WSD;
  if (name == "projfn") return SRL_METRIC_PROJECTION_FNORM;
  throw CLI::ValidationError("--metric", "expected wsd or projfn, got '" + name + "'");
}

srl_template parse_template(const std::string& name) {
  if (name == "ps") return SRL_TEMPLATE_PS;
  if (name == "ds") return SRL_TEMPLATE_DS;
  if (name == "union") return SRL_TEMPLATE_UNION;
  if (name == "nn") return SRL_TEMPLATE_NN;
  throw CLI::ValidationError("--template", "expected ps, ds, union or nn, got '" + name + "'");
}

void write_file(const std::string& path, const char* contents) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  out << contents;
  if (!out) throw CliError{kExitData, path + ": write failed"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subspace representations for few-shot classification over local feature grids"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("srl ") + srl_version());

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic SRLF dataset with a manifest");
  gen->set_help_flag("--help", "Print help");  // frees -h for the --h dimension flag
  std::string gen_out;
  srl_synthetic_config gen_cfg{10, 40, 5, 5, 16, 3, 1, 0.10, 0.8, 1.2, 0.5, 0.7, 1.0, 0};
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--classes", gen_cfg.num_classes, "Number of classes");
  gen->add_option("--per-class", gen_cfg.grids_per_class, "Grids per class");
  gen->add_option("--h", gen_cfg.height, "Grid height");
  gen->add_option("--w", gen_cfg.width, "Grid width");
  gen->add_option("--d", gen_cfg.depth, "Feature dimension");
  gen->add_option("--rank", gen_cfg.class_signal_rank, "Class-specific directions per class");
  gen->add_option("--background-rank", gen_cfg.background_rank,
                  "Directions shared across classes");
  gen->add_option("--noise", gen_cfg.noise_sigma, "Gaussian noise sigma");
  gen->add_option("--foreground", gen_cfg.foreground_fraction,
                  "Fraction of cells carrying class signal, in (0,1]");
  gen->add_option("--contrast-sigma", gen_cfg.contrast_sigma,
                  "Log-normal spread of per-grid contrast");
  gen->add_option("--style-sigma", gen_cfg.style_sigma,
                  "Log-normal spread of per-grid class-direction gains");
  gen->add_option("--signal-decay", gen_cfg.signal_decay,
                  "Geometric decay of class-direction strengths, in (0,1]");
  gen->add_option("--class-dispersion", gen_cfg.class_dispersion,
                  "Spread of class directions around shared axes, in (0,1]");
  gen->add_option("--seed", gen_cfg.seed, "Generator seed");

  // extract
  auto* ext = app.add_subcommand("extract", "Extract a subspace from an SRLF file to JSON");
  std::string ext_in, ext_out;
  uint32_t ext_s = 5;
  ext->add_option("--in", ext_in, "Input SRLF file")->required();
  ext->add_option("--s", ext_s, "Basis size")->required();
  ext->add_option("--out", ext_out, "Output JSON file (stdout when omitted)");

  // dist
  auto* dist = app.add_subcommand("dist", "Distance between the subspaces of two SRLF files");
  std::string dist_a, dist_b, dist_metric = "wsd";
  uint32_t dist_s = 5;
  dist->add_option("--a", dist_a, "First SRLF file")->required();
  dist->add_option("--b", dist_b, "Second SRLF file")->required();
  dist->add_option("--s", dist_s, "Basis size")->required();
  dist->add_option("--metric", dist_metric, "wsd|projfn");

  // activation
  auto* act = app.add_subcommand("activation", "Per-cell cosine similarity map of one basis component");
  std::string act_in, act_out;
  uint32_t act_s = 5, act_component = 0;
  act->add_option("--in", act_in, "Input SRLF file")->required();
  act->add_option("--s", act_s, "Basis size")->required();
  act->add_option("--component", act_component, "Basis column index")->required();
  act->add_option("--out", act_out, "Output CSV file (stdout when omitted)");

  // eval
  auto* eval = app.add_subcommand("eval", "N-way K-shot episodic evaluation");
  std::string eval_data, eval_metric = "wsd", eval_template = "ds", eval_out;
  srl_eval_config eval_cfg;
  srl_eval_config_init(&eval_cfg);
  eval->add_option("--data", eval_data, "Dataset directory (manifest.json)")->required();
  eval->add_option("--ways", eval_cfg.ways, "Classes per episode");
  eval->add_option("--shots", eval_cfg.shots, "Support grids per class");
  eval->add_option("--queries", eval_cfg.queries_per_class, "Query grids per class");
  eval->add_option("--episodes", eval_cfg.episodes, "Episode count");
  eval->add_option("--s", eval_cfg.basis_size, "Basis size");
  eval->add_option("--metric", eval_metric, "wsd|projfn");
  eval->add_option("--template", eval_template, "ps|ds|union|nn");
  eval->add_option("--alpha", eval_cfg.alpha, "Optimizer step size (<=0: strategy default)");
  eval->add_option("--iters", eval_cfg.iterations, "Optimizer iterations");
  eval->add_option("--seed", eval_cfg.seed, "Master seed");
  eval->add_option("--workers", eval_cfg.workers, "Worker threads");
  eval->add_option("--out", eval_out, "Output JSON file (stdout when omitted)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Evaluate across several basis sizes");
  std::string sweep_data, sweep_metric = "wsd", sweep_template = "ds", sweep_out;
  std::vector<uint32_t> sweep_sizes;
  srl_eval_config sweep_cfg;
  srl_eval_config_init(&sweep_cfg);
  sweep->add_option("--data", sweep_data, "Dataset directory (manifest.json)")->required();
  sweep->add_option("--sizes", sweep_sizes, "Basis sizes, strictly increasing")
      ->required()
      ->delimiter(',');
  sweep->add_option("--ways", sweep_cfg.ways, "Classes per episode");
  sweep->add_option("--shots", sweep_cfg.shots, "Support grids per class");
  sweep->add_option("--queries", sweep_cfg.queries_per_class, "Query grids per class");
  sweep->add_option("--episodes", sweep_cfg.episodes, "Episode count");
  sweep->add_option("--metric", sweep_metric, "wsd|projfn");
  sweep->add_option("--template", sweep_template, "ps|ds|union|nn");
  sweep->add_option("--alpha", sweep_cfg.alpha, "Optimizer step size (<=0: strategy default)");
  sweep->add_option("--iters", sweep_cfg.iterations, "Optimizer iterations");
  sweep->add_option("--seed", sweep_cfg.seed, "Master seed");
  sweep->add_option("--workers", sweep_cfg.workers, "Worker threads");
  sweep->add_option("--out", sweep_out, "Output CSV file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      srl_dataset* raw = nullptr;
      check(srl_dataset_generate(&gen_cfg, &raw));
      DatasetHandle dataset(raw);
      check(srl_dataset_save(dataset.get(), gen_out.c_str()));
      std::cout << "wrote " << gen_cfg.num_classes << " classes x " << gen_cfg.grids_per_class
                << " grids to " << gen_out << "\n";
    } else if (ext->parsed()) {
      GridHandle grid = load_grid(ext_in);
      SubspaceHandle sub = extract(grid.get(), ext_s);
      char* json = nullptr;
      check(srl_subspace_to_json(sub.get(), &json));
      ApiString owned(json);
      if (ext_out.empty()) {
        std::cout << owned.get() << "\n";
      } else {
        write_file(ext_out, owned.get());
      }
    } else if (dist->parsed()) {
      GridHandle ga = load_grid(dist_a);
      GridHandle gb = load_grid(dist_b);
      SubspaceHandle sa = extract(ga.get(), dist_s);
      SubspaceHandle sb = extract(gb.get(), dist_s);
      double value = 0.0;
      check(srl_distance(sa.get(), sb.get(), parse_metric(dist_metric), &value));
      std::printf("%.17g\n", value);
    } else if (act->parsed()) {
      GridHandle grid = load_grid(act_in);
      SubspaceHandle sub = extract(grid.get(), act_s);
      char* csv = nullptr;
      check(srl_activation_map_csv(grid.get(), sub.get(), act_component, &csv));
      ApiString owned(csv);
      if (act_out.empty()) {
        std::cout << owned.get();
      } else {
        write_file(act_out, owned.get());
      }
    } else if (eval->parsed()) {
      eval_cfg.metric = parse_metric(eval_metric);
      eval_cfg.template_strategy = parse_template(eval_template);
      srl_dataset* raw = nullptr;
      check(srl_dataset_load(eval_data.c_str(), &raw));
      DatasetHandle dataset(raw);
      char* json = nullptr;
      check(srl_evaluate_json(dataset.get(), &eval_cfg, &json));
      ApiString owned(json);
      if (eval_out.empty()) {
        std::cout << owned.get() << "\n";
      } else {
        write_file(eval_out, owned.get());
        std::cout << "wrote " << eval_out << "\n";
      }
    } else if (sweep->parsed()) {
      sweep_cfg.metric = parse_metric(sweep_metric);
      sweep_cfg.template_strategy = parse_template(sweep_template);
      srl_dataset* raw = nullptr;
      check(srl_dataset_load(sweep_data.c_str(), &raw));
      DatasetHandle dataset(raw);
      char* csv = nullptr;
      check(srl_sweep(dataset.get(), sweep_sizes.data(), sweep_sizes.size(), &sweep_cfg, &csv,
                      nullptr));
      ApiString owned(csv);
      if (sweep_out.empty()) {
        std::cout << owned.get();
      } else {
        write_file(sweep_out, owned.get());
        std::cout << "wrote " << sweep_out << "\n";
      }
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const CliError& failure) {
    std::cerr << "error: " << failure.message << "\n";
    return failure.exit_code;
  }
  return 0;
}
