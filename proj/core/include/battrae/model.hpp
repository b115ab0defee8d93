#ifndef BATTRAE_MODEL_HPP
#define BATTRAE_MODEL_HPP

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <string>

#include "battrae/attention.hpp"
#include "battrae/corpus.hpp"
#include "battrae/rae.hpp"
#include "battrae/rng.hpp"
#include "battrae/similarity.hpp"

namespace battrae {

/// Training hyperparameters. beta is derived as 1 - alpha so the balance
/// constraint holds by construction.
struct Hyperparams {
  double alpha = 0.125;
  double lambda_embed = 1e-5;  // lambda_L
  double lambda_rec = 1e-4;
  double lambda_att = 1e-4;
  double lambda_sem = 1e-3;
  int dim_source = 50;
  int dim_target = 50;
  int dim_attention = 50;
  int dim_semantic = 50;
  int max_iterations = 100;
  std::uint64_t seed = 1;

  double beta() const { return 1.0 - alpha; }
};

/// All trainable parameters. The flat view enumerates every scalar in a
/// fixed order (column-major within each matrix):
///   L_s, L_t | W1_s, b1_s, W2_s, b2_s, W1_t, b1_t, W2_t, b2_t |
///   W3, W4, bA | W5, W6, S, bs
/// which also defines the four regularization groups.
struct ModelParams {
  EmbeddingTable embed_source;
  EmbeddingTable embed_target;
  RaeParams rae_source;
  RaeParams rae_target;
  AttentionParams attention;
  SimilarityParams semantic;

  struct GroupRange {
    const char* name;
    Eigen::Index begin;
    Eigen::Index end;  // exclusive
  };

  Eigen::Index flat_size() const;
  // Groups in flat order: theta_L, theta_rec, theta_att, theta_sem.
  std::array<GroupRange, 4> group_ranges() const;

  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::VectorXd& flat);

  // Same shapes, every scalar zero. Gradient accumulators start from this.
  static ModelParams zeros_like(const ModelParams& other);
};

// theta_rec/att/sem from N(0, 0.01); embeddings copied from the pretrained
// tables when given, otherwise drawn from the same distribution.
ModelParams init_model(const Hyperparams& hp, int source_vocab_size,
                       int target_vocab_size,
                       const EmbeddingTable* pretrained_source,
                       const EmbeddingTable* pretrained_target, Rng& rng);

/// Forward-pass output of score_pair, kept for dumping and inspection.
struct ScoreResult {
  double score = 0.0;
  AttentionResult attention;
  PhraseTree source_tree;
  PhraseTree target_tree;
};

// Full pipeline: greedy trees -> granularity matrices -> attention ->
// semantic projection -> bilinear score.
ScoreResult score_pair(const PhrasePair& pair, const ModelParams& model);

}  // namespace battrae

#endif
