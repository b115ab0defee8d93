#ifndef BATTRAE_ATTENTION_HPP
#define BATTRAE_ATTENTION_HPP

#include <Eigen/Core>
#include <cmath>
#include <utility>

namespace battrae {

/// Projections onto the attention space. The bias is shared between sides.
struct AttentionParams {
  Eigen::MatrixXd w3;    // d_a x d_s
  Eigen::MatrixXd w4;    // d_a x d_t
  Eigen::VectorXd bias;  // d_a

  int attention_dim() const { return static_cast<int>(bias.size()); }
};

struct AttentionResult {
  Eigen::MatrixXd matching;        // B, n_s x n_t, entries in (0, 1)
  Eigen::VectorXd source_weights;  // a_s, sums to 1
  Eigen::VectorXd target_weights;  // a_t, sums to 1
  Eigen::VectorXd source_phrase;   // p_s
  Eigen::VectorXd target_phrase;   // p_t
};

// Numerically stable two-branch sigmoid.
inline double sigmoid(double x) {
  if (x >= 0.0) {
    double z = std::exp(-x);
    return 1.0 / (1.0 + z);
  }
  double z = std::exp(x);
  return z / (1.0 + z);
}

// Max-shifted softmax.
Eigen::VectorXd softmax(const Eigen::VectorXd& v);

// A = tanh(W * M + bias broadcast over columns).
Eigen::MatrixXd project_to_attention(const Eigen::MatrixXd& granularities,
                                     const Eigen::MatrixXd& w,
                                     const Eigen::VectorXd& bias);

// B[i,j] = sigmoid(column i of a_s . column j of a_t).
Eigen::MatrixXd attention_matrix(const Eigen::MatrixXd& a_s,
                                 const Eigen::MatrixXd& a_t);

// Softmaxed row sums and column sums of B.
std::pair<Eigen::VectorXd, Eigen::VectorXd> attention_weights(
    const Eigen::MatrixXd& matching);

// p = sum_i weights[i] * column i.
Eigen::VectorXd compose_phrase(const Eigen::MatrixXd& granularities,
                               const Eigen::VectorXd& weights);

// Full bidimensional attention pass over both granularity matrices.
AttentionResult attend(const Eigen::MatrixXd& source_granularities,
                       const Eigen::MatrixXd& target_granularities,
                       const AttentionParams& params);

}  // namespace battrae

#endif
