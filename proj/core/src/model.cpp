#include "battrae/model.hpp"

#include "battrae/errors.hpp"

namespace battrae {

namespace {

Eigen::Index rae_size(const RaeParams& p) {
  return p.w1.size() + p.b1.size() + p.w2.size() + p.b2.size();
}

// Column-major scalar copy helpers over a flat vector cursor.
void put(Eigen::VectorXd& flat, Eigen::Index& pos, const Eigen::MatrixXd& m) {
  flat.segment(pos, m.size()) =
      Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
  pos += m.size();
}

void take(const Eigen::VectorXd& flat, Eigen::Index& pos, Eigen::MatrixXd& m) {
  Eigen::Map<Eigen::VectorXd>(m.data(), m.size()) =
      flat.segment(pos, m.size());
  pos += m.size();
}

void put(Eigen::VectorXd& flat, Eigen::Index& pos, const Eigen::VectorXd& v) {
  flat.segment(pos, v.size()) = v;
  pos += v.size();
}

void take(const Eigen::VectorXd& flat, Eigen::Index& pos, Eigen::VectorXd& v) {
  v = flat.segment(pos, v.size());
  pos += v.size();
}

void fill_normal(Eigen::MatrixXd& m, Rng& rng, double stddev) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = rng.normal(0.0, stddev);
  }
}

void fill_normal(Eigen::VectorXd& v, Rng& rng, double stddev) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v[i] = rng.normal(0.0, stddev);
  }
}

}  // namespace

Eigen::Index ModelParams::flat_size() const {
  return embed_source.matrix.size() + embed_target.matrix.size() +
         rae_size(rae_source) + rae_size(rae_target) + attention.w3.size() +
         attention.w4.size() + attention.bias.size() + semantic.w5.size() +
         semantic.w6.size() + semantic.bilinear.size() + semantic.bias.size();
}

std::array<ModelParams::GroupRange, 4> ModelParams::group_ranges() const {
  const Eigen::Index embed_end =
      embed_source.matrix.size() + embed_target.matrix.size();
  const Eigen::Index rec_end =
      embed_end + rae_size(rae_source) + rae_size(rae_target);
  const Eigen::Index att_end = rec_end + attention.w3.size() +
                               attention.w4.size() + attention.bias.size();
  return {GroupRange{"theta_L", 0, embed_end},
          GroupRange{"theta_rec", embed_end, rec_end},
          GroupRange{"theta_att", rec_end, att_end},
          GroupRange{"theta_sem", att_end, flat_size()}};
}

Eigen::VectorXd ModelParams::flatten() const {
  Eigen::VectorXd flat(flat_size());
  Eigen::Index pos = 0;
  put(flat, pos, embed_source.matrix);
  put(flat, pos, embed_target.matrix);
  for (const RaeParams* rae : {&rae_source, &rae_target}) {
    put(flat, pos, rae->w1);
    put(flat, pos, rae->b1);
    put(flat, pos, rae->w2);
    put(flat, pos, rae->b2);
  }
  put(flat, pos, attention.w3);
  put(flat, pos, attention.w4);
  put(flat, pos, attention.bias);
  put(flat, pos, semantic.w5);
  put(flat, pos, semantic.w6);
  put(flat, pos, semantic.bilinear);
  put(flat, pos, semantic.bias);
  return flat;
}

void ModelParams::unflatten(const Eigen::VectorXd& flat) {
  if (flat.size() != flat_size()) {
    throw ShapeError("unflatten: flat vector length mismatch");
  }
  Eigen::Index pos = 0;
  take(flat, pos, embed_source.matrix);
  take(flat, pos, embed_target.matrix);
  for (RaeParams* rae : {&rae_source, &rae_target}) {
    take(flat, pos, rae->w1);
    take(flat, pos, rae->b1);
    take(flat, pos, rae->w2);
    take(flat, pos, rae->b2);
  }
  take(flat, pos, attention.w3);
  take(flat, pos, attention.w4);
  take(flat, pos, attention.bias);
  take(flat, pos, semantic.w5);
  take(flat, pos, semantic.w6);
  take(flat, pos, semantic.bilinear);
  take(flat, pos, semantic.bias);
}

ModelParams ModelParams::zeros_like(const ModelParams& other) {
  ModelParams z = other;
  z.embed_source.matrix.setZero();
  z.embed_target.matrix.setZero();
  for (RaeParams* rae : {&z.rae_source, &z.rae_target}) {
    rae->w1.setZero();
    rae->b1.setZero();
    rae->w2.setZero();
    rae->b2.setZero();
  }
  z.attention.w3.setZero();
  z.attention.w4.setZero();
  z.attention.bias.setZero();
  z.semantic.w5.setZero();
  z.semantic.w6.setZero();
  z.semantic.bilinear.setZero();
  z.semantic.bias.setZero();
  return z;
}

ModelParams init_model(const Hyperparams& hp, int source_vocab_size,
                       int target_vocab_size,
                       const EmbeddingTable* pretrained_source,
                       const EmbeddingTable* pretrained_target, Rng& rng) {
  constexpr double kStddev = 0.01;
  ModelParams m;

  m.embed_source.dim = hp.dim_source;
  m.embed_source.matrix.resize(hp.dim_source, source_vocab_size);
  if (pretrained_source) {
    if (pretrained_source->dim != hp.dim_source ||
        pretrained_source->matrix.cols() != source_vocab_size) {
      throw ShapeError("init_model: pretrained source table shape mismatch");
    }
    m.embed_source.matrix = pretrained_source->matrix;
  } else {
    fill_normal(m.embed_source.matrix, rng, kStddev);
  }

  m.embed_target.dim = hp.dim_target;
  m.embed_target.matrix.resize(hp.dim_target, target_vocab_size);
  if (pretrained_target) {
    if (pretrained_target->dim != hp.dim_target ||
        pretrained_target->matrix.cols() != target_vocab_size) {
      throw ShapeError("init_model: pretrained target table shape mismatch");
    }
    m.embed_target.matrix = pretrained_target->matrix;
  } else {
    fill_normal(m.embed_target.matrix, rng, kStddev);
  }

  auto init_rae = [&](RaeParams& rae, int d) {
    rae.w1.resize(d, 2 * d);
    rae.b1.resize(d);
    rae.w2.resize(2 * d, d);
    rae.b2.resize(2 * d);
    fill_normal(rae.w1, rng, kStddev);
    fill_normal(rae.b1, rng, kStddev);
    fill_normal(rae.w2, rng, kStddev);
    fill_normal(rae.b2, rng, kStddev);
  };
  init_rae(m.rae_source, hp.dim_source);
  init_rae(m.rae_target, hp.dim_target);

  m.attention.w3.resize(hp.dim_attention, hp.dim_source);
  m.attention.w4.resize(hp.dim_attention, hp.dim_target);
  m.attention.bias.resize(hp.dim_attention);
  fill_normal(m.attention.w3, rng, kStddev);
  fill_normal(m.attention.w4, rng, kStddev);
  fill_normal(m.attention.bias, rng, kStddev);

  m.semantic.w5.resize(hp.dim_semantic, hp.dim_source);
  m.semantic.w6.resize(hp.dim_semantic, hp.dim_target);
  m.semantic.bilinear.resize(hp.dim_semantic, hp.dim_semantic);
  m.semantic.bias.resize(hp.dim_semantic);
  fill_normal(m.semantic.w5, rng, kStddev);
  fill_normal(m.semantic.w6, rng, kStddev);
  fill_normal(m.semantic.bilinear, rng, kStddev);
  fill_normal(m.semantic.bias, rng, kStddev);

  return m;
}

}  // namespace battrae
