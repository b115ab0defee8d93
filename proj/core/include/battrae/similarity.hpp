#ifndef BATTRAE_SIMILARITY_HPP
#define BATTRAE_SIMILARITY_HPP

#include <Eigen/Core>

namespace battrae {

/// Projections into the semantic space plus the bilinear form. The bias is
/// shared between sides.
struct SimilarityParams {
  Eigen::MatrixXd w5;        // d_sem x d_s
  Eigen::MatrixXd w6;        // d_sem x d_t
  Eigen::MatrixXd bilinear;  // S, d_sem x d_sem
  Eigen::VectorXd bias;      // d_sem

  int semantic_dim() const { return static_cast<int>(bias.size()); }
};

// s = tanh(W * p + bias).
Eigen::VectorXd project_semantic(const Eigen::VectorXd& phrase,
                                 const Eigen::MatrixXd& w,
                                 const Eigen::VectorXd& bias);

// s_s^T S s_t.
double similarity(const Eigen::VectorXd& source_sem,
                  const Eigen::VectorXd& target_sem,
                  const Eigen::MatrixXd& bilinear);

}  // namespace battrae

#endif
