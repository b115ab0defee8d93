#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "battrae/attention.hpp"
#include "battrae/rng.hpp"
#include "helpers.hpp"

using namespace battrae;

namespace {

AttentionParams random_attention(int d_a, int d_s, int d_t,
                                 std::uint64_t seed) {
  Rng rng(seed);
  AttentionParams p;
  p.w3.resize(d_a, d_s);
  p.w4.resize(d_a, d_t);
  p.bias.resize(d_a);
  auto fill = [&](auto& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      m.data()[i] = rng.normal(0.0, 0.5);
    }
  };
  fill(p.w3);
  fill(p.w4);
  fill(p.bias);
  return p;
}

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = rng.normal(0.0, 0.5);
  }
  return m;
}

}  // namespace

TEST_CASE("softmax is stable under large inputs and sums to one") {
  Eigen::VectorXd v(3);
  v << 1000.0, 999.0, 998.0;
  Eigen::VectorXd s = softmax(v);
  CHECK(std::abs(s.sum() - 1.0) <= 1e-12);
  CHECK(s[0] > s[1]);
  CHECK(s[1] > s[2]);
  // Shift invariance against the small-value softmax.
  Eigen::VectorXd small(3);
  small << 2.0, 1.0, 0.0;
  Eigen::VectorXd s2 = softmax(small);
  CHECK((s - s2).cwiseAbs().maxCoeff() <= 1e-15);

  Eigen::VectorXd one(1);
  one << -123.0;
  CHECK(softmax(one)[0] == 1.0);
}

TEST_CASE("zero parameters give a flat matching matrix and uniform weights") {
  AttentionParams p;
  p.w3 = Eigen::MatrixXd::Zero(3, 2);
  p.w4 = Eigen::MatrixXd::Zero(3, 2);
  p.bias = Eigen::VectorXd::Zero(3);
  Eigen::MatrixXd m_s = random_matrix(2, 4, 9);
  Eigen::MatrixXd m_t = random_matrix(2, 3, 10);

  AttentionResult res = attend(m_s, m_t, p);
  CHECK((res.matching.array() == 0.5).all());
  CHECK((res.source_weights.array() - 0.25).abs().maxCoeff() <= 1e-15);
  CHECK((res.target_weights.array() - 1.0 / 3.0).abs().maxCoeff() <= 1e-15);
  // Uniform weights average the columns.
  Eigen::VectorXd mean = m_s.rowwise().mean();
  CHECK((res.source_phrase - mean).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("attention weights on a pinned matching matrix") {
  // Row sums (1, 0) -> softmax gives (e/(e+1), 1/(e+1)).
  Eigen::MatrixXd b(2, 2);
  b << 1, 0,
       0, 0;
  auto [w_s, w_t] = attention_weights(b);
  double hi = std::exp(1.0) / (std::exp(1.0) + 1.0);
  CHECK(w_s[0] == doctest::Approx(hi).epsilon(1e-15));
  CHECK(w_s[1] == doctest::Approx(1.0 - hi).epsilon(1e-15));
  CHECK(w_t[0] == doctest::Approx(hi).epsilon(1e-15));
}

TEST_CASE("attend matches the loop-based reference") {
  Rng meta(55);
  for (int trial = 0; trial < 50; ++trial) {
    int d_s = 2 + static_cast<int>(meta.below(3));
    int d_t = 2 + static_cast<int>(meta.below(3));
    int d_a = 1 + static_cast<int>(meta.below(4));
    int n_s = 1 + static_cast<int>(meta.below(15));
    int n_t = 1 + static_cast<int>(meta.below(15));
    auto params = random_attention(d_a, d_s, d_t, 300 + trial);
    Eigen::MatrixXd m_s = random_matrix(d_s, n_s, 400 + trial);
    Eigen::MatrixXd m_t = random_matrix(d_t, n_t, 500 + trial);

    AttentionResult res = attend(m_s, m_t, params);
    auto ref = testutil::ref_attend(m_s, m_t, params);

    REQUIRE(res.matching.rows() == n_s);
    REQUIRE(res.matching.cols() == n_t);
    for (int i = 0; i < n_s; ++i) {
      for (int j = 0; j < n_t; ++j) {
        CHECK(res.matching(i, j) > 0.0);
        CHECK(res.matching(i, j) < 1.0);
        CHECK(std::abs(res.matching(i, j) -
                       ref.matching[static_cast<std::size_t>(i)]
                                   [static_cast<std::size_t>(j)]) <= 1e-12);
      }
    }
    CHECK(std::abs(res.source_weights.sum() - 1.0) <= 1e-12);
    CHECK(std::abs(res.target_weights.sum() - 1.0) <= 1e-12);
    for (int i = 0; i < n_s; ++i) {
      CHECK(std::abs(res.source_weights[i] -
                     ref.w_s[static_cast<std::size_t>(i)]) <= 1e-12);
    }
    for (int j = 0; j < n_t; ++j) {
      CHECK(std::abs(res.target_weights[j] -
                     ref.w_t[static_cast<std::size_t>(j)]) <= 1e-12);
    }
    for (int r = 0; r < d_s; ++r) {
      CHECK(std::abs(res.source_phrase[r] -
                     ref.p_s[static_cast<std::size_t>(r)]) <= 1e-12);
    }
    for (int r = 0; r < d_t; ++r) {
      CHECK(std::abs(res.target_phrase[r] -
                     ref.p_t[static_cast<std::size_t>(r)]) <= 1e-12);
    }
  }
}

TEST_CASE("single-node sides collapse to weight one") {
  auto params = random_attention(3, 2, 2, 71);
  Eigen::MatrixXd m_s = random_matrix(2, 1, 72);
  Eigen::MatrixXd m_t = random_matrix(2, 5, 73);
  AttentionResult res = attend(m_s, m_t, params);
  CHECK(res.source_weights.size() == 1);
  CHECK(res.source_weights[0] == 1.0);
  CHECK((res.source_phrase - m_s.col(0)).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(std::abs(res.target_weights.sum() - 1.0) <= 1e-12);
}

TEST_CASE("sides are handled symmetrically") {
  // Swapping the roles of source and target (and W3/W4) transposes B and
  // swaps the weight vectors.
  auto params = random_attention(3, 2, 2, 81);
  Eigen::MatrixXd m_s = random_matrix(2, 4, 82);
  Eigen::MatrixXd m_t = random_matrix(2, 3, 83);
  AttentionResult fwd = attend(m_s, m_t, params);

  AttentionParams swapped;
  swapped.w3 = params.w4;
  swapped.w4 = params.w3;
  swapped.bias = params.bias;
  AttentionResult rev = attend(m_t, m_s, swapped);

  CHECK((fwd.matching - rev.matching.transpose()).cwiseAbs().maxCoeff() <=
        1e-15);
  CHECK((fwd.source_weights - rev.target_weights).cwiseAbs().maxCoeff() <=
        1e-15);
  CHECK((fwd.target_weights - rev.source_weights).cwiseAbs().maxCoeff() <=
        1e-15);
}
