#include "srl/synthetic.hpp"

#include <cmath>
#include <cstdio>

#include "srl/errors.hpp"
#include "srl/rng.hpp"

namespace srl {

namespace {

// Stream tags; fixed constants, part of the generation contract.
constexpr std::uint64_t kBackgroundTag = 0xB6;
constexpr std::uint64_t kClassTag = 0xC1;
constexpr std::uint64_t kGridTag = 0xD7;
constexpr std::uint64_t kAnchorTag = 0xA3;

void check_config(const SyntheticConfig& c) {
  if (c.num_classes < 2) throw ArgumentError("synthetic: num_classes must be >= 2");
  if (c.grids_per_class < 1) throw ArgumentError("synthetic: grids_per_class must be >= 1");
  if (c.height < 1 || c.width < 1 || c.depth < 1) {
    throw ArgumentError("synthetic: grid dimensions must be positive");
  }
  if (c.class_signal_rank < 1) throw ArgumentError("synthetic: class_signal_rank must be >= 1");
  if (c.background_rank < 0) throw ArgumentError("synthetic: background_rank must be >= 0");
  if (c.class_signal_rank + c.background_rank > c.depth) {
    throw ArgumentError("synthetic: class_signal_rank + background_rank (" +
                        std::to_string(c.class_signal_rank + c.background_rank) +
                        ") exceeds depth " + std::to_string(c.depth));
  }
  if (!(c.noise_sigma >= 0.0) || !std::isfinite(c.noise_sigma)) {
    throw ArgumentError("synthetic: noise_sigma must be a finite nonnegative real");
  }
  if (!(c.foreground_fraction > 0.0) || c.foreground_fraction > 1.0) {
    throw ArgumentError("synthetic: foreground_fraction must lie in (0, 1]");
  }
  if (!(c.contrast_sigma >= 0.0) || !std::isfinite(c.contrast_sigma)) {
    throw ArgumentError("synthetic: contrast_sigma must be a finite nonnegative real");
  }
  if (!(c.style_sigma >= 0.0) || !std::isfinite(c.style_sigma)) {
    throw ArgumentError("synthetic: style_sigma must be a finite nonnegative real");
  }
  if (!(c.signal_decay > 0.0) || c.signal_decay > 1.0) {
    throw ArgumentError("synthetic: signal_decay must lie in (0, 1]");
  }
  if (!(c.class_dispersion > 0.0) || c.class_dispersion > 1.0) {
    throw ArgumentError("synthetic: class_dispersion must lie in (0, 1]");
  }
}

Matrix gaussian_matrix(Rng& rng, int rows, int cols) {
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = rng.next_gaussian();
  }
  return m;
}

// Modified Gram-Schmidt with a second sweep, orthogonalizing `raw` against
// `fixed` (may be empty) and against earlier columns of itself.
Matrix orthonormalize_against(const Matrix& fixed, const Matrix& raw) {
  Matrix out(raw.rows(), raw.cols());
  for (int k = 0; k < raw.cols(); ++k) {
    Vector v = raw.col(k);
    for (int sweep = 0; sweep < 2; ++sweep) {
      for (int l = 0; l < fixed.cols(); ++l) v -= fixed.col(l).dot(v) * fixed.col(l);
      for (int l = 0; l < k; ++l) v -= out.col(l).dot(v) * out.col(l);
    }
    const double norm = v.norm();
    if (norm < 1e-8) {
      throw NumericError("synthetic: drew a near-dependent direction, cannot orthonormalize");
    }
    out.col(k) = v / norm;
  }
  return out;
}

}  // namespace

Dataset generate_synthetic_dataset(const SyntheticConfig& config) {
  check_config(config);
  const int d = config.depth;
  const int cells = config.height * config.width;
  const Rng root(config.seed);

  Matrix background(d, config.background_rank);
  if (config.background_rank > 0) {
    Rng bg_rng = root.fold_in(kBackgroundTag);
    background = orthonormalize_against(Matrix(d, 0),
                                        gaussian_matrix(bg_rng, d, config.background_rank));
  }

  // Anchor axes shared by all classes; direction k of a class scatters
  // around axis k with spread class_dispersion.
  Matrix anchors(d, config.class_signal_rank);
  if (config.class_dispersion < 1.0) {
    Rng anchor_rng = root.fold_in(kAnchorTag);
    anchors = orthonormalize_against(background,
                                     gaussian_matrix(anchor_rng, d, config.class_signal_rank));
  }

  std::vector<Matrix> class_dirs(config.num_classes);
  for (int ci = 0; ci < config.num_classes; ++ci) {
    Rng cls_rng = root.fold_in(kClassTag).fold_in(static_cast<std::uint64_t>(ci));
    Matrix raw = gaussian_matrix(cls_rng, d, config.class_signal_rank);
    if (config.class_dispersion < 1.0) {
      const double tau = config.class_dispersion;
      const double anchor_part = std::sqrt(1.0 - tau * tau);
      // Gaussian entries scaled to unit expected norm before mixing.
      raw = anchor_part * anchors + (tau / std::sqrt(static_cast<double>(d))) * raw;
    }
    class_dirs[ci] = orthonormalize_against(background, raw);
  }

  const int foreground_cells = std::max(
      1, static_cast<int>(std::lround(config.foreground_fraction * cells)));

  Dataset dataset;
  dataset.provenance = synthetic_provenance(config);
  dataset.classes.resize(config.num_classes);
  for (int ci = 0; ci < config.num_classes; ++ci) {
    auto& cls = dataset.classes[ci];
    char name[32];
    std::snprintf(name, sizeof(name), "class_%03d", ci);
    cls.name = name;

    for (int gi = 0; gi < config.grids_per_class; ++gi) {
      Rng rng = root.fold_in(kGridTag)
                    .fold_in(static_cast<std::uint64_t>(ci))
                    .fold_in(static_cast<std::uint64_t>(gi));

      // Partial Fisher-Yates: the first foreground_cells entries are the
      // foreground subset.
      std::vector<int> order(cells);
      for (int i = 0; i < cells; ++i) order[i] = i;
      for (int i = 0; i < foreground_cells; ++i) {
        const int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cells - i)));
        std::swap(order[i], order[j]);
      }
      std::vector<char> is_foreground(cells, 0);
      for (int i = 0; i < foreground_cells; ++i) is_foreground[order[i]] = 1;

      FeatureGrid grid;
      grid.height = config.height;
      grid.width = config.width;
      grid.depth = d;
      grid.values.resize(static_cast<std::size_t>(cells) * d);

      // Per-grid contrast and per-grid direction gains: each grid has its
      // own overall feature scale and emphasizes the class directions
      // differently (both log-normal, unit median), the way distinct
      // images of one class vary in contrast and appearance. Spans are
      // unchanged.
      const double contrast = std::exp(config.contrast_sigma * rng.next_gaussian());
      Vector gains(config.class_signal_rank);
      double strength = 1.0;
      for (int k = 0; k < config.class_signal_rank; ++k) {
        gains[k] = strength * std::exp(config.style_sigma * rng.next_gaussian());
        strength *= config.signal_decay;
      }

      for (int cell = 0; cell < cells; ++cell) {
        Vector x = Vector::Zero(d);
        if (is_foreground[cell]) {
          for (int k = 0; k < config.class_signal_rank; ++k) {
            x += gains[k] * rng.next_gaussian() * class_dirs[ci].col(k);
          }
        } else if (config.background_rank > 0) {
          for (int k = 0; k < config.background_rank; ++k) {
            x += rng.next_gaussian() * background.col(k);
          }
        }
        if (config.noise_sigma > 0.0) {
          for (int c = 0; c < d; ++c) x[c] += config.noise_sigma * rng.next_gaussian();
        }
        for (int c = 0; c < d; ++c) {
          // float32 quantization keeps in-memory and on-disk datasets equal
          grid.values[static_cast<std::size_t>(cell) * d + c] =
              static_cast<double>(static_cast<float>(contrast * x[c]));
        }
      }
      cls.grids.push_back(std::move(grid));
    }
  }
  return dataset;
}

std::string synthetic_provenance(const SyntheticConfig& c) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "synthetic(classes=%d,per_class=%d,h=%d,w=%d,d=%d,rank=%d,background_rank=%d,"
                "noise=%g,foreground=%g,contrast=%g,style=%g,decay=%g,dispersion=%g,seed=%llu)",
                c.num_classes, c.grids_per_class, c.height, c.width, c.depth, c.class_signal_rank,
                c.background_rank, c.noise_sigma, c.foreground_fraction, c.contrast_sigma,
                c.style_sigma, c.signal_decay, c.class_dispersion,
                static_cast<unsigned long long>(c.seed));
  return buf;
}

}  // namespace srl
