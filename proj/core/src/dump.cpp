#include "battrae/dump.hpp"

#include <algorithm>
#include <numeric>

#include "json.hpp"

namespace battrae {

namespace {

using Json = nlohmann::ordered_json;

Json node_labels(const PhraseTree& tree, const std::vector<int>& order,
                 const Vocabulary& vocab) {
  Json labels = Json::array();
  for (int node : order) labels.push_back(node_label(tree, node, vocab));
  return labels;
}

// Postorder positions sorted by attention weight, highest first; ties keep
// the lower position.
Json weight_ranking(const Eigen::VectorXd& weights) {
  std::vector<int> order(static_cast<std::size_t>(weights.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return weights[a] > weights[b]; });
  return Json(order);
}

Json vector_json(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace

void write_attention_record(std::ostream& out, const ScoreResult& result,
                            const Vocabulary& source_vocab,
                            const Vocabulary& target_vocab) {
  const auto source_order = result.source_tree.postorder();
  const auto target_order = result.target_tree.postorder();

  Json record;
  record["source"] =
      node_label(result.source_tree, result.source_tree.root, source_vocab);
  record["target"] =
      node_label(result.target_tree, result.target_tree.root, target_vocab);
  record["source_tree"] = tree_to_string(result.source_tree, source_vocab);
  record["target_tree"] = tree_to_string(result.target_tree, target_vocab);
  record["source_nodes"] =
      node_labels(result.source_tree, source_order, source_vocab);
  record["target_nodes"] =
      node_labels(result.target_tree, target_order, target_vocab);

  Json matrix = Json::array();
  for (Eigen::Index i = 0; i < result.attention.matching.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < result.attention.matching.cols(); ++j) {
      row.push_back(result.attention.matching(i, j));
    }
    matrix.push_back(std::move(row));
  }
  record["attention_matrix"] = std::move(matrix);
  record["source_weights"] = vector_json(result.attention.source_weights);
  record["target_weights"] = vector_json(result.attention.target_weights);
  record["source_ranking"] = weight_ranking(result.attention.source_weights);
  record["target_ranking"] = weight_ranking(result.attention.target_weights);
  record["score"] = result.score;

  out << record.dump() << '\n';
}

}  // namespace battrae
