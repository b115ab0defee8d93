#ifndef BATTRAE_GRAD_HPP
#define BATTRAE_GRAD_HPP

#include <Eigen/Core>
#include <span>

#include "battrae/objective.hpp"

namespace battrae {

struct ObjectiveGradient {
  double value = 0.0;
  Eigen::VectorXd gradient;  // flat order, see ModelParams
};

// Joint objective value plus analytic gradients for every parameter group.
// Trees (positive and negative phrases) are rebuilt greedily from the
// current parameters and held fixed during differentiation. Instances may
// be evaluated on `threads` workers; partial gradients are combined in
// block order so the reduction is deterministic for a fixed thread count.
ObjectiveGradient objective_and_gradient(
    std::span<const TrainingInstance> instances, const ModelParams& model,
    const Hyperparams& hp, int threads = 1);

// Central-difference oracle over the same frozen tree structures, so both
// sides differentiate the identical function.
Eigen::VectorXd finite_difference_gradient(
    std::span<const TrainingInstance> instances, const ModelParams& model,
    const Hyperparams& hp, double epsilon = 1e-5);

}  // namespace battrae

#endif
