#include "battrae/attention.hpp"

#include "battrae/errors.hpp"

namespace battrae {

Eigen::VectorXd softmax(const Eigen::VectorXd& v) {
  const double shift = v.maxCoeff();
  Eigen::VectorXd e = (v.array() - shift).exp();
  return e / e.sum();
}

Eigen::MatrixXd project_to_attention(const Eigen::MatrixXd& granularities,
                                     const Eigen::MatrixXd& w,
                                     const Eigen::VectorXd& bias) {
  if (w.cols() != granularities.rows() || w.rows() != bias.size()) {
    throw ShapeError("project_to_attention: operand dimensions inconsistent");
  }
  return ((w * granularities).colwise() + bias).array().tanh();
}

Eigen::MatrixXd attention_matrix(const Eigen::MatrixXd& a_s,
                                 const Eigen::MatrixXd& a_t) {
  if (a_s.rows() != a_t.rows()) {
    throw ShapeError("attention_matrix: attention-space dims differ");
  }
  Eigen::MatrixXd dots = a_s.transpose() * a_t;
  return dots.unaryExpr([](double x) { return sigmoid(x); });
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> attention_weights(
    const Eigen::MatrixXd& matching) {
  Eigen::VectorXd row_sums = matching.rowwise().sum();
  Eigen::VectorXd col_sums = matching.colwise().sum();
  return {softmax(row_sums), softmax(col_sums)};
}

Eigen::VectorXd compose_phrase(const Eigen::MatrixXd& granularities,
                               const Eigen::VectorXd& weights) {
  if (granularities.cols() != weights.size()) {
    throw ShapeError("compose_phrase: weight count != column count");
  }
  return granularities * weights;
}

AttentionResult attend(const Eigen::MatrixXd& source_granularities,
                       const Eigen::MatrixXd& target_granularities,
                       const AttentionParams& params) {
  AttentionResult result;
  Eigen::MatrixXd a_s =
      project_to_attention(source_granularities, params.w3, params.bias);
  Eigen::MatrixXd a_t =
      project_to_attention(target_granularities, params.w4, params.bias);
  result.matching = attention_matrix(a_s, a_t);
  std::tie(result.source_weights, result.target_weights) =
      attention_weights(result.matching);
  result.source_phrase =
      compose_phrase(source_granularities, result.source_weights);
  result.target_phrase =
      compose_phrase(target_granularities, result.target_weights);
  return result;
}

}  // namespace battrae
