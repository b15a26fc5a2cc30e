#pragma once

#include <cstdint>

#include "srl/dataset.hpp"

namespace srl {

// Synthetic labeled feature grids for desk-scale experiments. Each class
// gets class_signal_rank private unit directions; all classes additionally
// share background_rank directions. Within a class the private and shared
// directions are mutually orthonormal. Every grid mixes class directions on
// a foreground subset of its cells and background directions on the rest,
// plus isotropic Gaussian noise.
//
// Generation is a pure function of the config (seed included); values are
// quantized to float32 so an in-memory dataset is bit-identical to one that
// went through SRLF files.
struct SyntheticConfig {
  int num_classes = 10;
  int grids_per_class = 40;
  int height = 5;
  int width = 5;
  int depth = 16;
  int class_signal_rank = 3;
  int background_rank = 1;
  double noise_sigma = 0.10;
  double foreground_fraction = 0.8;
  // Log-normal spread of the per-grid contrast: one scale factor on the
  // entire grid (signal and noise alike). Per-grid subspaces and their
  // weights are scale-invariant, so contrast only affects energy-weighted
  // aggregation across grids, the way image contrast varies in CNN
  // features.
  double contrast_sigma = 1.2;
  // Log-normal spread of per-grid gains on the class directions: each grid
  // emphasizes the class appearance differently without leaving the class
  // plane.
  double style_sigma = 0.5;
  // Geometric decay of the class-direction strengths: direction k carries
  // base strength signal_decay^k, so later directions matter less, like a
  // real feature spectrum. In (0, 1].
  double signal_decay = 0.7;
  // How far class directions scatter around shared anchor axes, in (0, 1].
  // 1 draws them independently per class; smaller values pull direction k
  // of every class toward a common axis k, making classes confusable
  // without any extra noise.
  double class_dispersion = 1.0;
  std::uint64_t seed = 0;
};

Dataset generate_synthetic_dataset(const SyntheticConfig& config);

// Deterministic description used as the dataset provenance string.
std::string synthetic_provenance(const SyntheticConfig& config);

}  // namespace srl
