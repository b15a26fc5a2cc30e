#pragma once

#include <functional>
#include <vector>

#include "srl/subspace.hpp"

namespace srl {

// Constant-step SGD on the Stiefel manifold via the Cayley transform.
struct StiefelOptConfig {
  double step_size = 0.1;
  int iterations = 50;
  // D = 0 makes the WSD gradient singular; the 1/(2D) factor is clamped
  // with this floor.
  double gradient_floor = 1e-8;
};

// Euclidean gradient of wsd(temp, other) with respect to the template
// basis, holding both weight vectors fixed:
//   dD/du_i = -(1 / (2 max(D, eps))) * sum_j sqrt(w_i v_j) * 2 (u_i . v_j) v_j
// Numerically coincident subspaces (weighted overlap within 1e-12 of 1)
// return the zero subgradient: D is minimal there and the clamped formula
// would only amplify rounding noise.
Matrix wsd_grad_basis(const Subspace& temp, const Subspace& other, double floor_eps = 1e-8);

// One Cayley-transform step from U along the descent direction of the
// Euclidean gradient Z:
//   What = Z U^T - 1/2 U (U^T Z) U^T,  W = What - What^T
//   U' = (I + a/2 W)^(-1) (I - a/2 W) U
// W is skew-symmetric, so the map is orthogonal and U' stays on the
// manifold; U' = U - a * tangent_projection(Z) + O(a^2). Z = 0 returns U
// bit-exactly.
Matrix cayley_step(const Matrix& basis, const Matrix& gradient, double step_size);

using GradFn = std::function<Matrix(const Matrix&)>;
using ObjectiveFn = std::function<double(const Matrix&)>;

struct StiefelOptResult {
  Matrix basis;
  // Objective at every iterate (iterations + 1 values, first = initial,
  // last = final); empty when no objective evaluator was supplied.
  std::vector<double> loss_trace;
};

// Runs cfg.iterations Cayley steps at fixed step size. A non-finite
// gradient aborts with the iterate index in the message.
StiefelOptResult optimize_on_stiefel(const GradFn& gradient, Matrix initial,
                                     const StiefelOptConfig& cfg,
                                     const ObjectiveFn& objective = {});

using JointGradFn = std::function<std::vector<Matrix>(const std::vector<Matrix>&)>;
using JointObjectiveFn = std::function<double(const std::vector<Matrix>&)>;

struct JointStiefelOptResult {
  std::vector<Matrix> bases;
  std::vector<double> loss_trace;
};

// Same loop over a product of Stiefel manifolds: all gradients are
// evaluated at the current iterates, then every basis is updated at once.
JointStiefelOptResult optimize_joint_on_stiefel(const JointGradFn& gradient,
                                                std::vector<Matrix> initial,
                                                const StiefelOptConfig& cfg,
                                                const JointObjectiveFn& objective = {});

}  // namespace srl
