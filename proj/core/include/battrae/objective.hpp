#ifndef BATTRAE_OBJECTIVE_HPP
#define BATTRAE_OBJECTIVE_HPP

#include <span>
#include <vector>

#include "battrae/model.hpp"
#include "battrae/rng.hpp"

namespace battrae {

/// One positive pair with its frozen single-token-corrupted negatives.
struct TrainingInstance {
  PhrasePair positive;
  std::vector<int> negative_source;  // same length as positive.source
  std::vector<int> negative_target;
};

// Replaces one uniformly chosen token per side with a uniformly random
// different vocabulary token. Source side is sampled first. Throws
// DataError when a side's vocabulary has fewer than 2 tokens.
TrainingInstance sample_negatives(const PhrasePair& pair,
                                  int source_vocab_size,
                                  int target_vocab_size, Rng& rng);

std::vector<TrainingInstance> sample_all_negatives(
    std::span<const PhrasePair> pairs, int source_vocab_size,
    int target_vocab_size, Rng& rng);

// max(0, 1 + s(f,e-) - s(f,e)) + max(0, 1 + s(f-,e) - s(f,e)).
double semantic_error(const TrainingInstance& instance,
                      const ModelParams& model);

// Grouped L2 penalty: sum over groups of lambda_k/2 * ||theta_k||^2.
double regularizer(const ModelParams& model, const Hyperparams& hp);

// Sum over instances of alpha*(E_rec(f)+E_rec(e)) + beta*E_sem, plus the
// regularizer once. Reconstruction error is taken on the positive pair only.
double joint_objective(std::span<const TrainingInstance> instances,
                       const ModelParams& model, const Hyperparams& hp);

}  // namespace battrae

#endif
