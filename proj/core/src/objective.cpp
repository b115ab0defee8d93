#include "battrae/objective.hpp"

#include <algorithm>

#include "battrae/errors.hpp"

namespace battrae {

namespace {

std::vector<int> corrupt_one_token(const std::vector<int>& tokens,
                                   int vocab_size, Rng& rng) {
  if (vocab_size < 2) {
    throw DataError("sample_negatives: vocabulary too small to corrupt");
  }
  std::vector<int> corrupted = tokens;
  auto pos = static_cast<std::size_t>(rng.below(tokens.size()));
  int replacement;
  do {
    replacement = static_cast<int>(rng.below(vocab_size));
  } while (replacement == tokens[pos]);
  corrupted[pos] = replacement;
  return corrupted;
}

}  // namespace

TrainingInstance sample_negatives(const PhrasePair& pair,
                                  int source_vocab_size,
                                  int target_vocab_size, Rng& rng) {
  TrainingInstance instance;
  instance.positive = pair;
  instance.negative_source =
      corrupt_one_token(pair.source, source_vocab_size, rng);
  instance.negative_target =
      corrupt_one_token(pair.target, target_vocab_size, rng);
  return instance;
}

std::vector<TrainingInstance> sample_all_negatives(
    std::span<const PhrasePair> pairs, int source_vocab_size,
    int target_vocab_size, Rng& rng) {
  std::vector<TrainingInstance> instances;
  instances.reserve(pairs.size());
  for (const auto& pair : pairs) {
    instances.push_back(
        sample_negatives(pair, source_vocab_size, target_vocab_size, rng));
  }
  return instances;
}

double semantic_error(const TrainingInstance& instance,
                      const ModelParams& model) {
  const double positive = score_pair(instance.positive, model).score;
  PhrasePair bad_target{instance.positive.source, instance.negative_target};
  PhrasePair bad_source{instance.negative_source, instance.positive.target};
  const double s_bad_target = score_pair(bad_target, model).score;
  const double s_bad_source = score_pair(bad_source, model).score;
  return std::max(0.0, 1.0 + s_bad_target - positive) +
         std::max(0.0, 1.0 + s_bad_source - positive);
}

double regularizer(const ModelParams& model, const Hyperparams& hp) {
  Eigen::VectorXd flat = model.flatten();
  const auto groups = model.group_ranges();
  const double lambdas[4] = {hp.lambda_embed, hp.lambda_rec, hp.lambda_att,
                             hp.lambda_sem};
  double total = 0.0;
  for (int g = 0; g < 4; ++g) {
    total += 0.5 * lambdas[g] *
             flat.segment(groups[g].begin, groups[g].end - groups[g].begin)
                 .squaredNorm();
  }
  return total;
}

double joint_objective(std::span<const TrainingInstance> instances,
                       const ModelParams& model, const Hyperparams& hp) {
  if (instances.empty()) {
    throw DataError("joint_objective: empty instance list");
  }
  double total = 0.0;
  for (const auto& instance : instances) {
    const double rec =
        build_tree(instance.positive.source, model.embed_source,
                   model.rae_source)
            .total_rec_error +
        build_tree(instance.positive.target, model.embed_target,
                   model.rae_target)
            .total_rec_error;
    total += hp.alpha * rec + hp.beta() * semantic_error(instance, model);
  }
  return total + regularizer(model, hp);
}

}  // namespace battrae
