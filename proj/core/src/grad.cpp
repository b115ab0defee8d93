#include "battrae/grad.hpp"

#include <cmath>
#include <thread>

#include "battrae/errors.hpp"

namespace battrae {

namespace {

// Cached intermediates of one scored pair, enough to run the backward pass.
struct PairForward {
  const PhraseTree* source_tree = nullptr;
  const PhraseTree* target_tree = nullptr;
  std::vector<int> source_order;  // postorder node indices
  std::vector<int> target_order;
  Eigen::MatrixXd m_s, m_t;  // granularity matrices
  Eigen::MatrixXd a_s, a_t;  // attention-space projections
  Eigen::MatrixXd matching;  // B
  Eigen::VectorXd w_s, w_t;  // attention weights
  Eigen::VectorXd p_s, p_t;  // composed phrase vectors
  Eigen::VectorXd s_s, s_t;  // semantic projections
  double score = 0.0;
};

PairForward forward_pair(const PhraseTree& source_tree,
                         const PhraseTree& target_tree,
                         const ModelParams& model) {
  PairForward f;
  f.source_tree = &source_tree;
  f.target_tree = &target_tree;
  f.source_order = source_tree.postorder();
  f.target_order = target_tree.postorder();
  f.m_s = extract_granularities(source_tree);
  f.m_t = extract_granularities(target_tree);
  f.a_s = project_to_attention(f.m_s, model.attention.w3,
                               model.attention.bias);
  f.a_t = project_to_attention(f.m_t, model.attention.w4,
                               model.attention.bias);
  f.matching = attention_matrix(f.a_s, f.a_t);
  std::tie(f.w_s, f.w_t) = attention_weights(f.matching);
  f.p_s = f.m_s * f.w_s;
  f.p_t = f.m_t * f.w_t;
  f.s_s = project_semantic(f.p_s, model.semantic.w5, model.semantic.bias);
  f.s_t = project_semantic(f.p_t, model.semantic.w6, model.semantic.bias);
  f.score = similarity(f.s_s, f.s_t, model.semantic.bilinear);
  return f;
}

using NodeGrads = std::vector<Eigen::VectorXd>;

NodeGrads zero_node_grads(const PhraseTree& tree, int dim) {
  return NodeGrads(tree.nodes.size(), Eigen::VectorXd::Zero(dim));
}

// Backward through the bilinear head, semantic projections, attention
// composition, softmax, matching scores and attention projections.
// Parameter gradients go into grad; granularity-matrix gradients are
// scattered onto tree node slots via the stored postorder.
void backward_pair(const PairForward& f, double dscore,
                   const ModelParams& model, ModelParams& grad,
                   NodeGrads& source_node_grads, NodeGrads& target_node_grads) {
  const SimilarityParams& sem = model.semantic;

  Eigen::VectorXd ds_s = dscore * (sem.bilinear * f.s_t);
  Eigen::VectorXd ds_t = dscore * (sem.bilinear.transpose() * f.s_s);
  grad.semantic.bilinear.noalias() += dscore * f.s_s * f.s_t.transpose();

  Eigen::VectorXd du_s =
      ds_s.array() * (1.0 - f.s_s.array().square());
  Eigen::VectorXd du_t =
      ds_t.array() * (1.0 - f.s_t.array().square());
  grad.semantic.w5.noalias() += du_s * f.p_s.transpose();
  grad.semantic.w6.noalias() += du_t * f.p_t.transpose();
  grad.semantic.bias += du_s + du_t;

  Eigen::VectorXd dp_s = sem.w5.transpose() * du_s;
  Eigen::VectorXd dp_t = sem.w6.transpose() * du_t;

  // p = M a: gradient splits between the matrix and the weights.
  Eigen::MatrixXd dm_s = dp_s * f.w_s.transpose();
  Eigen::MatrixXd dm_t = dp_t * f.w_t.transpose();
  Eigen::VectorXd dw_s = f.m_s.transpose() * dp_s;
  Eigen::VectorXd dw_t = f.m_t.transpose() * dp_t;

  // Softmax jacobian: da~ = a (x) (dw - a . dw).
  Eigen::VectorXd drow =
      f.w_s.array() * (dw_s.array() - f.w_s.dot(dw_s));
  Eigen::VectorXd dcol =
      f.w_t.array() * (dw_t.array() - f.w_t.dot(dw_t));

  // dB[i,j] = drow[i] + dcol[j], then through the sigmoid.
  Eigen::MatrixXd db = drow.replicate(1, dcol.size());
  db.rowwise() += dcol.transpose();
  Eigen::MatrixXd dz = db.array() * f.matching.array() *
                       (1.0 - f.matching.array());

  Eigen::MatrixXd da_s = f.a_t * dz.transpose();
  Eigen::MatrixXd da_t = f.a_s * dz;
  Eigen::MatrixXd dproj_s =
      da_s.array() * (1.0 - f.a_s.array().square());
  Eigen::MatrixXd dproj_t =
      da_t.array() * (1.0 - f.a_t.array().square());

  grad.attention.w3.noalias() += dproj_s * f.m_s.transpose();
  grad.attention.w4.noalias() += dproj_t * f.m_t.transpose();
  grad.attention.bias += dproj_s.rowwise().sum() + dproj_t.rowwise().sum();

  dm_s.noalias() += model.attention.w3.transpose() * dproj_s;
  dm_t.noalias() += model.attention.w4.transpose() * dproj_t;

  for (Eigen::Index i = 0; i < dm_s.cols(); ++i) {
    source_node_grads[f.source_order[static_cast<std::size_t>(i)]] +=
        dm_s.col(i);
  }
  for (Eigen::Index j = 0; j < dm_t.cols(); ++j) {
    target_node_grads[f.target_order[static_cast<std::size_t>(j)]] +=
        dm_t.col(j);
  }
}

// Backward through the tree: reverse creation order visits every parent
// before its children, so a node's accumulated gradient is complete when
// reached. recon_weight is alpha for positive phrases, 0 for negatives.
void tree_backward(const PhraseTree& tree, const RaeParams& params,
                   double recon_weight, NodeGrads& node_grads,
                   RaeParams& grad_params, Eigen::MatrixXd& embed_grad) {
  const int d = params.dim();
  for (int i = static_cast<int>(tree.nodes.size()) - 1; i >= 0; --i) {
    const TreeNode& node = tree.nodes[i];
    if (node.is_leaf()) {
      embed_grad.col(node.token) += node_grads[i];
      continue;
    }
    const Eigen::VectorXd& c1 = tree.nodes[node.left].embedding;
    const Eigen::VectorXd& c2 = tree.nodes[node.right].embedding;
    Eigen::VectorXd cat(2 * d);
    cat << c1, c2;

    if (recon_weight != 0.0) {
      // E = 1/2 ||cat - r||^2 with r = tanh(W2 y + b2); the children are
      // hit both directly and through y.
      Eigen::VectorXd rec = (params.w2 * node.embedding + params.b2)
                                .array()
                                .tanh();
      Eigen::VectorXd diff = rec - cat;  // dE/dr
      Eigen::VectorXd dpre2 =
          recon_weight * diff.array() * (1.0 - rec.array().square());
      grad_params.w2.noalias() += dpre2 * node.embedding.transpose();
      grad_params.b2 += dpre2;
      node_grads[i].noalias() += params.w2.transpose() * dpre2;
      node_grads[node.left] -= recon_weight * diff.head(d);
      node_grads[node.right] -= recon_weight * diff.tail(d);
    }

    Eigen::VectorXd dpre = node_grads[i].array() *
                           (1.0 - node.embedding.array().square());
    grad_params.w1.noalias() += dpre * cat.transpose();
    grad_params.b1 += dpre;
    Eigen::VectorXd dcat = params.w1.transpose() * dpre;
    node_grads[node.left] += dcat.head(d);
    node_grads[node.right] += dcat.tail(d);
  }
}

struct InstanceTrees {
  PhraseTree source, target;          // positive pair
  PhraseTree neg_source, neg_target;  // corrupted phrases
};

InstanceTrees build_instance_trees(const TrainingInstance& instance,
                                   const ModelParams& model) {
  InstanceTrees t;
  t.source =
      build_tree(instance.positive.source, model.embed_source,
                 model.rae_source);
  t.target =
      build_tree(instance.positive.target, model.embed_target,
                 model.rae_target);
  t.neg_source = build_tree(instance.negative_source, model.embed_source,
                            model.rae_source);
  t.neg_target = build_tree(instance.negative_target, model.embed_target,
                            model.rae_target);
  return t;
}

// Value + gradient contribution of one instance, trees given (frozen).
double instance_backward(const TrainingInstance&, const InstanceTrees& trees,
                         const ModelParams& model, const Hyperparams& hp,
                         ModelParams& grad) {
  const double alpha = hp.alpha;
  const double beta = hp.beta();

  PairForward positive = forward_pair(trees.source, trees.target, model);
  PairForward bad_target =
      forward_pair(trees.source, trees.neg_target, model);
  PairForward bad_source =
      forward_pair(trees.neg_source, trees.target, model);

  const double margin_t = 1.0 + bad_target.score - positive.score;
  const double margin_s = 1.0 + bad_source.score - positive.score;
  const bool active_t = margin_t > 0.0;
  const bool active_s = margin_s > 0.0;
  const double e_sem = (active_t ? margin_t : 0.0) +
                       (active_s ? margin_s : 0.0);
  const double value =
      alpha * (trees.source.total_rec_error + trees.target.total_rec_error) +
      beta * e_sem;

  const int d_s = model.embed_source.dim;
  const int d_t = model.embed_target.dim;
  NodeGrads g_source = zero_node_grads(trees.source, d_s);
  NodeGrads g_target = zero_node_grads(trees.target, d_t);
  NodeGrads g_neg_source = zero_node_grads(trees.neg_source, d_s);
  NodeGrads g_neg_target = zero_node_grads(trees.neg_target, d_t);

  const double d_positive =
      -beta * (static_cast<int>(active_t) + static_cast<int>(active_s));
  if (d_positive != 0.0) {
    backward_pair(positive, d_positive, model, grad, g_source, g_target);
  }
  if (active_t) {
    backward_pair(bad_target, beta, model, grad, g_source, g_neg_target);
  }
  if (active_s) {
    backward_pair(bad_source, beta, model, grad, g_neg_source, g_target);
  }

  tree_backward(trees.source, model.rae_source, alpha, g_source,
                grad.rae_source, grad.embed_source.matrix);
  tree_backward(trees.target, model.rae_target, alpha, g_target,
                grad.rae_target, grad.embed_target.matrix);
  tree_backward(trees.neg_source, model.rae_source, 0.0, g_neg_source,
                grad.rae_source, grad.embed_source.matrix);
  tree_backward(trees.neg_target, model.rae_target, 0.0, g_neg_target,
                grad.rae_target, grad.embed_target.matrix);

  return value;
}

// Objective over one instance with all four tree topologies held fixed.
double frozen_instance_value(const InstanceTrees& trees,
                             const ModelParams& model, const Hyperparams& hp) {
  InstanceTrees t = trees;
  refresh_tree(t.source, model.embed_source, model.rae_source);
  refresh_tree(t.target, model.embed_target, model.rae_target);
  refresh_tree(t.neg_source, model.embed_source, model.rae_source);
  refresh_tree(t.neg_target, model.embed_target, model.rae_target);

  PairForward positive = forward_pair(t.source, t.target, model);
  PairForward bad_target = forward_pair(t.source, t.neg_target, model);
  PairForward bad_source = forward_pair(t.neg_source, t.target, model);

  const double e_sem =
      std::max(0.0, 1.0 + bad_target.score - positive.score) +
      std::max(0.0, 1.0 + bad_source.score - positive.score);
  return hp.alpha * (t.source.total_rec_error + t.target.total_rec_error) +
         hp.beta() * e_sem;
}

void add_regularizer_gradient(const ModelParams& model, const Hyperparams& hp,
                              Eigen::VectorXd& flat_grad) {
  Eigen::VectorXd flat = model.flatten();
  const auto groups = model.group_ranges();
  const double lambdas[4] = {hp.lambda_embed, hp.lambda_rec, hp.lambda_att,
                             hp.lambda_sem};
  for (int g = 0; g < 4; ++g) {
    const auto len = groups[g].end - groups[g].begin;
    flat_grad.segment(groups[g].begin, len) +=
        lambdas[g] * flat.segment(groups[g].begin, len);
  }
}

}  // namespace

ObjectiveGradient objective_and_gradient(
    std::span<const TrainingInstance> instances, const ModelParams& model,
    const Hyperparams& hp, int threads) {
  if (instances.empty()) {
    throw DataError("objective_and_gradient: empty instance list");
  }
  if (threads < 1) threads = 1;
  threads = std::min<int>(threads, static_cast<int>(instances.size()));

  std::vector<ModelParams> partial_grads(threads,
                                         ModelParams::zeros_like(model));
  std::vector<double> partial_values(threads, 0.0);

  auto work = [&](int t) {
    const std::size_t n = instances.size();
    const std::size_t begin = n * t / threads;
    const std::size_t end = n * (t + 1) / threads;
    for (std::size_t i = begin; i < end; ++i) {
      InstanceTrees trees = build_instance_trees(instances[i], model);
      partial_values[t] += instance_backward(instances[i], trees, model, hp,
                                             partial_grads[t]);
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }

  // Ordered reduction: block order matches instance order.
  ObjectiveGradient result;
  result.value = 0.0;
  result.gradient = Eigen::VectorXd::Zero(model.flat_size());
  for (int t = 0; t < threads; ++t) {
    result.value += partial_values[t];
    result.gradient += partial_grads[t].flatten();
  }
  result.value += regularizer(model, hp);
  add_regularizer_gradient(model, hp, result.gradient);

  if (!std::isfinite(result.value) || !result.gradient.allFinite()) {
    throw NumericError("objective_and_gradient: non-finite result");
  }
  return result;
}

Eigen::VectorXd finite_difference_gradient(
    std::span<const TrainingInstance> instances, const ModelParams& model,
    const Hyperparams& hp, double epsilon) {
  std::vector<InstanceTrees> frozen;
  frozen.reserve(instances.size());
  for (const auto& instance : instances) {
    frozen.push_back(build_instance_trees(instance, model));
  }

  auto value_at = [&](const Eigen::VectorXd& flat) {
    ModelParams probe = model;
    probe.unflatten(flat);
    double total = regularizer(probe, hp);
    for (const auto& trees : frozen) {
      total += frozen_instance_value(trees, probe, hp);
    }
    return total;
  };

  Eigen::VectorXd flat = model.flatten();
  Eigen::VectorXd grad(flat.size());
  for (Eigen::Index k = 0; k < flat.size(); ++k) {
    const double saved = flat[k];
    flat[k] = saved + epsilon;
    const double plus = value_at(flat);
    flat[k] = saved - epsilon;
    const double minus = value_at(flat);
    flat[k] = saved;
    grad[k] = (plus - minus) / (2.0 * epsilon);
  }
  return grad;
}

}  // namespace battrae
