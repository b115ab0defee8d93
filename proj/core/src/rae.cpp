#include "battrae/rae.hpp"

#include <limits>

#include "battrae/errors.hpp"

namespace battrae {

Eigen::VectorXd compose(const Eigen::VectorXd& c1, const Eigen::VectorXd& c2,
                        const RaeParams& params) {
  const int d = params.dim();
  if (c1.size() != d || c2.size() != d || params.w1.rows() != d ||
      params.w1.cols() != 2 * d) {
    throw ShapeError("compose: operand dimensions inconsistent");
  }
  Eigen::VectorXd cat(2 * d);
  cat << c1, c2;
  return (params.w1 * cat + params.b1).array().tanh();
}

Eigen::VectorXd reconstruct(const Eigen::VectorXd& y,
                            const RaeParams& params) {
  const int d = params.dim();
  if (y.size() != d || params.w2.rows() != 2 * d || params.w2.cols() != d) {
    throw ShapeError("reconstruct: operand dimensions inconsistent");
  }
  return (params.w2 * y + params.b2).array().tanh();
}

double node_rec_error(const Eigen::VectorXd& c1, const Eigen::VectorXd& c2,
                      const RaeParams& params) {
  Eigen::VectorXd rec = reconstruct(compose(c1, c2, params), params);
  const int d = params.dim();
  Eigen::VectorXd cat(2 * d);
  cat << c1, c2;
  return 0.5 * (cat - rec).squaredNorm();
}

PhraseTree build_tree(std::span<const int> tokens, const EmbeddingTable& table,
                      const RaeParams& params) {
  if (tokens.empty()) throw ShapeError("build_tree: empty token sequence");
  const int l = static_cast<int>(tokens.size());

  PhraseTree tree;
  tree.leaf_count = l;
  tree.nodes.reserve(2 * l - 1);
  for (int i = 0; i < l; ++i) {
    TreeNode leaf;
    leaf.token = tokens[i];
    leaf.span_begin = i;
    leaf.span_end = i + 1;
    leaf.embedding = table.matrix.col(tokens[i]);
    tree.nodes.push_back(std::move(leaf));
  }
  if (l == 1) {
    tree.root = 0;
    return tree;
  }

  std::vector<int> frontier(l);
  for (int i = 0; i < l; ++i) frontier[i] = i;

  while (frontier.size() > 1) {
    int best = 0;
    double best_err = std::numeric_limits<double>::infinity();
    double second_err = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < frontier.size(); ++i) {
      double err = node_rec_error(tree.nodes[frontier[i]].embedding,
                                  tree.nodes[frontier[i + 1]].embedding,
                                  params);
      if (err < best_err) {
        second_err = best_err;
        best_err = err;
        best = static_cast<int>(i);
      } else if (err < second_err) {
        second_err = err;
      }
    }
    if (std::isfinite(second_err)) {
      tree.min_merge_gap = std::min(tree.min_merge_gap, second_err - best_err);
    }

    const int left = frontier[best];
    const int right = frontier[best + 1];
    TreeNode parent;
    parent.left = left;
    parent.right = right;
    parent.span_begin = tree.nodes[left].span_begin;
    parent.span_end = tree.nodes[right].span_end;
    parent.embedding = compose(tree.nodes[left].embedding,
                               tree.nodes[right].embedding, params);
    parent.rec_error = best_err;
    tree.total_rec_error += best_err;
    tree.merge_positions.push_back(best);

    frontier[best] = static_cast<int>(tree.nodes.size());
    frontier.erase(frontier.begin() + best + 1);
    tree.nodes.push_back(std::move(parent));
  }
  tree.root = static_cast<int>(tree.nodes.size()) - 1;
  return tree;
}

void refresh_tree(PhraseTree& tree, const EmbeddingTable& table,
                  const RaeParams& params) {
  tree.total_rec_error = 0.0;
  const int d = params.dim();
  for (auto& node : tree.nodes) {
    if (node.is_leaf()) {
      node.embedding = table.matrix.col(node.token);
      continue;
    }
    // Internal nodes follow their children in the node array.
    const Eigen::VectorXd& c1 = tree.nodes[node.left].embedding;
    const Eigen::VectorXd& c2 = tree.nodes[node.right].embedding;
    node.embedding = compose(c1, c2, params);
    Eigen::VectorXd rec = reconstruct(node.embedding, params);
    Eigen::VectorXd cat(2 * d);
    cat << c1, c2;
    node.rec_error = 0.5 * (cat - rec).squaredNorm();
    tree.total_rec_error += node.rec_error;
  }
}

std::vector<int> PhraseTree::postorder() const {
  std::vector<int> order;
  order.reserve(nodes.size());
  std::vector<std::pair<int, bool>> stack;  // node, children-visited
  stack.emplace_back(root, false);
  while (!stack.empty()) {
    auto [node, expanded] = stack.back();
    stack.pop_back();
    if (expanded || nodes[node].is_leaf()) {
      order.push_back(node);
      continue;
    }
    stack.emplace_back(node, true);
    stack.emplace_back(nodes[node].right, false);
    stack.emplace_back(nodes[node].left, false);
  }
  return order;
}

Eigen::MatrixXd extract_granularities(const PhraseTree& tree) {
  const auto order = tree.postorder();
  const auto dim = tree.nodes[tree.root].embedding.size();
  Eigen::MatrixXd m(dim, order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    m.col(static_cast<Eigen::Index>(i)) = tree.nodes[order[i]].embedding;
  }
  return m;
}

namespace {

void append_node_string(const PhraseTree& tree, int node,
                        const Vocabulary& vocab, std::string& out) {
  const TreeNode& n = tree.nodes[node];
  if (n.is_leaf()) {
    out += vocab.tokens[n.token];
    return;
  }
  out += '(';
  append_node_string(tree, n.left, vocab, out);
  out += ", ";
  append_node_string(tree, n.right, vocab, out);
  out += ')';
}

}  // namespace

std::string tree_to_string(const PhraseTree& tree, const Vocabulary& vocab) {
  std::string out;
  append_node_string(tree, tree.root, vocab, out);
  return out;
}

std::string node_label(const PhraseTree& tree, int node,
                       const Vocabulary& vocab) {
  std::string out;
  const TreeNode& n = tree.nodes[node];
  for (int i = n.span_begin; i < n.span_end; ++i) {
    // Leaves are stored in surface order, so span positions index them.
    if (i > n.span_begin) out += ' ';
    out += vocab.tokens[tree.nodes[i].token];
  }
  return out;
}

}  // namespace battrae
