// Shared test utilities: temp files, randomized models, and the
// independent reference implementations (loop-based, no shared code with
// the library's evaluation paths) used as oracles.
#ifndef BATTRAE_TESTS_HELPERS_HPP
#define BATTRAE_TESTS_HELPERS_HPP

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "battrae/model.hpp"

namespace testutil {

inline std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "battrae_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string write_file(const std::string& name,
                              const std::string& content) {
  auto path = temp_dir() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path.string();
}

// Model with every scalar ~ N(0, scale), shapes from hp.
inline battrae::ModelParams random_model(const battrae::Hyperparams& hp,
                                         int source_vocab, int target_vocab,
                                         std::uint64_t seed,
                                         double scale = 0.1) {
  battrae::Rng rng(seed);
  battrae::ModelParams m = battrae::init_model(hp, source_vocab, target_vocab,
                                               nullptr, nullptr, rng);
  Eigen::VectorXd flat = m.flatten();
  for (Eigen::Index i = 0; i < flat.size(); ++i) {
    flat[i] = rng.normal(0.0, scale);
  }
  m.unflatten(flat);
  return m;
}

// ---- Reference RAE: explicit scalar loops ------------------------------

inline std::vector<double> ref_tanh_affine(const Eigen::MatrixXd& w,
                                           const Eigen::VectorXd& b,
                                           const std::vector<double>& x) {
  std::vector<double> out(static_cast<std::size_t>(w.rows()));
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    double s = b[r];
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      s += w(r, c) * x[static_cast<std::size_t>(c)];
    }
    out[static_cast<std::size_t>(r)] = std::tanh(s);
  }
  return out;
}

struct RefGreedyResult {
  std::vector<int> merge_positions;
  double total_rec_error = 0.0;
};

// Brute-force greedy simulation: at each step every adjacent pair's
// reconstruction error is recomputed from scratch with scalar loops.
inline RefGreedyResult ref_greedy_tree(const std::vector<int>& tokens,
                                       const Eigen::MatrixXd& table,
                                       const battrae::RaeParams& params) {
  const int d = params.dim();
  std::vector<std::vector<double>> frontier;
  for (int tok : tokens) {
    std::vector<double> e(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) e[static_cast<std::size_t>(i)] = table(i, tok);
    frontier.push_back(std::move(e));
  }

  RefGreedyResult result;
  while (frontier.size() > 1) {
    int best = -1;
    double best_err = 0.0;
    std::vector<double> best_parent;
    for (std::size_t i = 0; i + 1 < frontier.size(); ++i) {
      std::vector<double> cat = frontier[i];
      cat.insert(cat.end(), frontier[i + 1].begin(), frontier[i + 1].end());
      std::vector<double> parent = ref_tanh_affine(params.w1, params.b1, cat);
      std::vector<double> rec = ref_tanh_affine(params.w2, params.b2, parent);
      double err = 0.0;
      for (std::size_t k = 0; k < cat.size(); ++k) {
        err += 0.5 * (cat[k] - rec[k]) * (cat[k] - rec[k]);
      }
      if (best < 0 || err < best_err) {
        best = static_cast<int>(i);
        best_err = err;
        best_parent = std::move(parent);
      }
    }
    result.merge_positions.push_back(best);
    result.total_rec_error += best_err;
    frontier[static_cast<std::size_t>(best)] = std::move(best_parent);
    frontier.erase(frontier.begin() + best + 1);
  }
  return result;
}

// ---- Reference attention: explicit scalar loops ------------------------

struct RefAttend {
  std::vector<std::vector<double>> matching;
  std::vector<double> w_s, w_t;
  std::vector<double> p_s, p_t;
};

inline std::vector<double> ref_softmax(const std::vector<double>& v) {
  double shift = v[0];
  for (double x : v) shift = std::max(shift, x);
  std::vector<double> e(v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    e[i] = std::exp(v[i] - shift);
    sum += e[i];
  }
  for (double& x : e) x /= sum;
  return e;
}

inline RefAttend ref_attend(const Eigen::MatrixXd& m_s,
                            const Eigen::MatrixXd& m_t,
                            const battrae::AttentionParams& params) {
  const auto n_s = m_s.cols(), n_t = m_t.cols();
  const auto d_a = params.bias.size();

  auto project = [&](const Eigen::MatrixXd& m, const Eigen::MatrixXd& w) {
    std::vector<std::vector<double>> a(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index col = 0; col < m.cols(); ++col) {
      std::vector<double> x(static_cast<std::size_t>(m.rows()));
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        x[static_cast<std::size_t>(r)] = m(r, col);
      }
      a[static_cast<std::size_t>(col)] = ref_tanh_affine(w, params.bias, x);
    }
    return a;
  };
  auto a_s = project(m_s, params.w3);
  auto a_t = project(m_t, params.w4);

  RefAttend ref;
  ref.matching.assign(static_cast<std::size_t>(n_s),
                      std::vector<double>(static_cast<std::size_t>(n_t)));
  for (Eigen::Index i = 0; i < n_s; ++i) {
    for (Eigen::Index j = 0; j < n_t; ++j) {
      double dot = 0.0;
      for (Eigen::Index k = 0; k < d_a; ++k) {
        dot += a_s[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
               a_t[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
      }
      double sig = dot >= 0.0 ? 1.0 / (1.0 + std::exp(-dot))
                              : std::exp(dot) / (1.0 + std::exp(dot));
      ref.matching[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          sig;
    }
  }

  std::vector<double> row_sums(static_cast<std::size_t>(n_s), 0.0);
  std::vector<double> col_sums(static_cast<std::size_t>(n_t), 0.0);
  for (Eigen::Index i = 0; i < n_s; ++i) {
    for (Eigen::Index j = 0; j < n_t; ++j) {
      row_sums[static_cast<std::size_t>(i)] +=
          ref.matching[static_cast<std::size_t>(i)]
                      [static_cast<std::size_t>(j)];
      col_sums[static_cast<std::size_t>(j)] +=
          ref.matching[static_cast<std::size_t>(i)]
                      [static_cast<std::size_t>(j)];
    }
  }
  ref.w_s = ref_softmax(row_sums);
  ref.w_t = ref_softmax(col_sums);

  auto convolute = [](const Eigen::MatrixXd& m,
                      const std::vector<double>& weights) {
    std::vector<double> p(static_cast<std::size_t>(m.rows()), 0.0);
    for (Eigen::Index col = 0; col < m.cols(); ++col) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        p[static_cast<std::size_t>(r)] +=
            weights[static_cast<std::size_t>(col)] * m(r, col);
      }
    }
    return p;
  };
  ref.p_s = convolute(m_s, ref.w_s);
  ref.p_t = convolute(m_t, ref.w_t);
  return ref;
}

}  // namespace testutil

#endif
