#include "battrae/similarity.hpp"

#include "battrae/errors.hpp"
#include "battrae/model.hpp"

namespace battrae {

Eigen::VectorXd project_semantic(const Eigen::VectorXd& phrase,
                                 const Eigen::MatrixXd& w,
                                 const Eigen::VectorXd& bias) {
  if (w.cols() != phrase.size() || w.rows() != bias.size()) {
    throw ShapeError("project_semantic: operand dimensions inconsistent");
  }
  return (w * phrase + bias).array().tanh();
}

double similarity(const Eigen::VectorXd& source_sem,
                  const Eigen::VectorXd& target_sem,
                  const Eigen::MatrixXd& bilinear) {
  if (bilinear.rows() != source_sem.size() ||
      bilinear.cols() != target_sem.size()) {
    throw ShapeError("similarity: bilinear matrix shape inconsistent");
  }
  return source_sem.dot(bilinear * target_sem);
}

ScoreResult score_pair(const PhrasePair& pair, const ModelParams& model) {
  ScoreResult result;
  result.source_tree =
      build_tree(pair.source, model.embed_source, model.rae_source);
  result.target_tree =
      build_tree(pair.target, model.embed_target, model.rae_target);
  Eigen::MatrixXd m_s = extract_granularities(result.source_tree);
  Eigen::MatrixXd m_t = extract_granularities(result.target_tree);
  result.attention = attend(m_s, m_t, model.attention);
  Eigen::VectorXd s_s = project_semantic(result.attention.source_phrase,
                                         model.semantic.w5,
                                         model.semantic.bias);
  Eigen::VectorXd s_t = project_semantic(result.attention.target_phrase,
                                         model.semantic.w6,
                                         model.semantic.bias);
  result.score = similarity(s_s, s_t, model.semantic.bilinear);
  return result;
}

}  // namespace battrae
