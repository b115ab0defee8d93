#ifndef BATTRAE_RAE_HPP
#define BATTRAE_RAE_HPP

#include <Eigen/Core>
#include <span>
#include <string>
#include <vector>

#include "battrae/corpus.hpp"

namespace battrae {

/// Composition / reconstruction parameters for one language.
struct RaeParams {
  Eigen::MatrixXd w1;  // d x 2d
  Eigen::VectorXd b1;  // d
  Eigen::MatrixXd w2;  // 2d x d
  Eigen::VectorXd b2;  // 2d

  int dim() const { return static_cast<int>(b1.size()); }
};

struct TreeNode {
  int left = -1;   // child node index, -1 for leaves
  int right = -1;
  int token = -1;  // vocabulary id, leaves only
  int span_begin = 0;
  int span_end = 0;  // exclusive
  Eigen::VectorXd embedding;
  double rec_error = 0.0;  // internal nodes only

  bool is_leaf() const { return left < 0; }
};

/// Binary tree over a phrase. Leaves occupy indices [0, leaf_count);
/// internal nodes follow in merge order, so the root is the last node.
struct PhraseTree {
  std::vector<TreeNode> nodes;
  int root = 0;
  int leaf_count = 0;
  double total_rec_error = 0.0;
  // Frontier position merged at each greedy step (for oracle comparison).
  std::vector<int> merge_positions;
  // Smallest gap between the best and second-best candidate error over all
  // steps; +inf when no step ever had a competing candidate.
  double min_merge_gap = std::numeric_limits<double>::infinity();

  std::vector<int> postorder() const;
};

Eigen::VectorXd compose(const Eigen::VectorXd& c1, const Eigen::VectorXd& c2,
                        const RaeParams& params);

// Returns the concatenated reconstruction [c1'; c2'] (length 2d).
Eigen::VectorXd reconstruct(const Eigen::VectorXd& y, const RaeParams& params);

double node_rec_error(const Eigen::VectorXd& c1, const Eigen::VectorXd& c2,
                      const RaeParams& params);

// Greedy bottom-up construction: at each step the adjacent frontier pair
// with minimal reconstruction error is merged (leftmost wins ties).
PhraseTree build_tree(std::span<const int> tokens, const EmbeddingTable& table,
                      const RaeParams& params);

// Recomputes every embedding and reconstruction error for a fixed topology.
// Used when differentiating or probing with the structure held constant.
void refresh_tree(PhraseTree& tree, const EmbeddingTable& table,
                  const RaeParams& params);

// Node embeddings as columns in postorder; 2l-1 columns for l leaves.
Eigen::MatrixXd extract_granularities(const PhraseTree& tree);

// Nested parenthesized token groups, e.g. "(dui, (jingji, xuezhe))".
std::string tree_to_string(const PhraseTree& tree, const Vocabulary& vocab);

// Surface string of the tokens covered by one node.
std::string node_label(const PhraseTree& tree, int node,
                       const Vocabulary& vocab);

}  // namespace battrae

#endif
