#include "srl/stiefel.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <string>

#include "srl/errors.hpp"

namespace srl {

namespace {

void check_opt_config(const StiefelOptConfig& cfg) {
  if (!(cfg.step_size > 0.0)) throw ArgumentError("stiefel: step_size must be positive");
  if (cfg.iterations < 1) throw ArgumentError("stiefel: iterations must be >= 1");
  if (!(cfg.gradient_floor > 0.0)) throw ArgumentError("stiefel: gradient_floor must be positive");
}

}  // namespace

Matrix wsd_grad_basis(const Subspace& temp, const Subspace& other, double floor_eps) {
  if (temp.ambient_dim() != other.ambient_dim()) {
    throw ArgumentError("wsd_grad_basis: ambient dimensions differ");
  }
  if (temp.basis_size() != other.basis_size()) {
    throw ArgumentError("wsd_grad_basis: basis sizes differ");
  }
  if (!(floor_eps > 0.0)) throw ArgumentError("wsd_grad_basis: floor must be positive");

  const int s = temp.basis_size();
  const Matrix alignment = temp.basis.transpose() * other.basis;  // M_ij = u_i . v_j

  double overlap = 0.0;
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      overlap += std::sqrt(temp.weights[i] * other.weights[j]) * alignment(i, j) * alignment(i, j);
    }
  }
  // Coincident subspaces sit at the minimum of D(., other), where zero is a
  // valid subgradient. In exact arithmetic the formula below is purely
  // radial there and the Cayley projection cancels it; returning zero makes
  // that cancellation hold in floating point too, instead of amplifying
  // rounding noise by 1/floor_eps.
  if (overlap >= 1.0 - 1e-12) {
    return Matrix::Zero(temp.ambient_dim(), s);
  }
  const double distance = std::sqrt(1.0 - std::clamp(overlap, 0.0, 1.0));
  const double scale = -1.0 / std::max(distance, floor_eps);

  // Column i: scale * sqrt(w_i) * sum_j sqrt(v_j) M_ij * other_j
  const Vector temp_root = temp.weights.cwiseMax(0.0).cwiseSqrt();
  const Vector other_root = other.weights.cwiseMax(0.0).cwiseSqrt();
  return scale * other.basis * other_root.asDiagonal() * alignment.transpose() *
         temp_root.asDiagonal();
}

Matrix cayley_step(const Matrix& basis, const Matrix& gradient, double step_size) {
  if (!(step_size > 0.0)) throw ArgumentError("cayley_step: step_size must be positive");
  if (gradient.rows() != basis.rows() || gradient.cols() != basis.cols()) {
    throw ArgumentError("cayley_step: gradient shape does not match the iterate");
  }
  if (!gradient.allFinite()) throw ArgumentError("cayley_step: gradient has non-finite entries");
  const int d = static_cast<int>(basis.rows());
  const int s = static_cast<int>(basis.cols());
  const double ortho_err =
      (basis.transpose() * basis - Matrix::Identity(s, s)).cwiseAbs().maxCoeff();
  if (!(ortho_err <= 1e-8)) {
    throw ArgumentError("cayley_step: iterate is off the manifold (deviation " +
                        std::to_string(ortho_err) + ")");
  }

  if (gradient.isZero(0.0)) return basis;  // exact fixed point

  const Matrix what =
      gradient * basis.transpose() -
      0.5 * basis * (basis.transpose() * gradient) * basis.transpose();
  const Matrix skew = what - what.transpose();

  const double half = 0.5 * step_size;
  const Matrix lhs = Matrix::Identity(d, d) + half * skew;
  const Matrix rhs = (Matrix::Identity(d, d) - half * skew) * basis;
  const Matrix next = Eigen::PartialPivLU<Matrix>(lhs).solve(rhs);
  if (!next.allFinite()) {
    throw NumericError("cayley_step: update system is singular; reduce the step size");
  }
  return next;
}

StiefelOptResult optimize_on_stiefel(const GradFn& gradient, Matrix initial,
                                     const StiefelOptConfig& cfg, const ObjectiveFn& objective) {
  check_opt_config(cfg);
  StiefelOptResult result;
  for (int t = 0; t < cfg.iterations; ++t) {
    if (objective) result.loss_trace.push_back(objective(initial));
    const Matrix z = gradient(initial);
    if (!z.allFinite()) {
      throw NumericError("optimize_on_stiefel: non-finite gradient at iterate " +
                         std::to_string(t));
    }
    initial = cayley_step(initial, z, cfg.step_size);
  }
  if (objective) result.loss_trace.push_back(objective(initial));
  result.basis = std::move(initial);
  return result;
}

JointStiefelOptResult optimize_joint_on_stiefel(const JointGradFn& gradient,
                                                std::vector<Matrix> initial,
                                                const StiefelOptConfig& cfg,
                                                const JointObjectiveFn& objective) {
  check_opt_config(cfg);
  if (initial.empty()) throw ArgumentError("optimize_joint_on_stiefel: no iterates");
  JointStiefelOptResult result;
  for (int t = 0; t < cfg.iterations; ++t) {
    if (objective) result.loss_trace.push_back(objective(initial));
    const std::vector<Matrix> grads = gradient(initial);
    if (grads.size() != initial.size()) {
      throw ArgumentError("optimize_joint_on_stiefel: gradient count mismatch");
    }
    for (std::size_t k = 0; k < initial.size(); ++k) {
      if (!grads[k].allFinite()) {
        throw NumericError("optimize_joint_on_stiefel: non-finite gradient at iterate " +
                           std::to_string(t));
      }
    }
    // All updates use the pre-step iterates: one simultaneous sweep.
    for (std::size_t k = 0; k < initial.size(); ++k) {
      initial[k] = cayley_step(initial[k], grads[k], cfg.step_size);
    }
  }
  if (objective) result.loss_trace.push_back(objective(initial));
  result.bases = std::move(initial);
  return result;
}

}  // namespace srl
