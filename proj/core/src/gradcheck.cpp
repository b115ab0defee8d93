#include "battrae/gradcheck.hpp"

#include <cmath>

namespace battrae {

const char* const kGradCheckGroupNames[4] = {"theta_L", "theta_rec",
                                             "theta_att", "theta_sem"};

namespace {

std::vector<int> random_phrase(Rng& rng, int max_len, int vocab_size) {
  const int len = 1 + static_cast<int>(rng.below(max_len));
  std::vector<int> tokens(len);
  for (int& t : tokens) t = static_cast<int>(rng.below(vocab_size));
  return tokens;
}

}  // namespace

GradCheckReport run_gradient_check(const GradCheckConfig& cfg) {
  Rng rng(cfg.seed);

  Hyperparams hp;
  hp.alpha = 0.125;
  hp.lambda_embed = hp.lambda_rec = hp.lambda_att = hp.lambda_sem =
      cfg.lambda;
  hp.dim_source = hp.dim_target = hp.dim_attention = hp.dim_semantic =
      cfg.dim;
  hp.seed = cfg.seed;

  ModelParams model =
      init_model(hp, cfg.vocab_size, cfg.vocab_size, nullptr, nullptr, rng);
  // Redraw every scalar with its magnitude bounded away from zero so the
  // finite-difference quotient stays well-conditioned.
  Eigen::VectorXd flat = model.flatten();
  for (Eigen::Index i = 0; i < flat.size(); ++i) {
    const double sign = rng.below(2) ? 1.0 : -1.0;
    flat[i] = sign * (cfg.init_min +
                      (cfg.init_max - cfg.init_min) * rng.uniform());
  }
  model.unflatten(flat);

  std::vector<TrainingInstance> instances;
  for (int i = 0; i < cfg.instance_count; ++i) {
    PhrasePair pair{random_phrase(rng, cfg.max_phrase_len, cfg.vocab_size),
                    random_phrase(rng, cfg.max_phrase_len, cfg.vocab_size)};
    instances.push_back(
        sample_negatives(pair, cfg.vocab_size, cfg.vocab_size, rng));
  }

  GradCheckReport report;

  // Boundary exclusion: hinge margins and greedy tie gaps must clear the
  // non-differentiable points.
  for (const auto& instance : instances) {
    const double positive = score_pair(instance.positive, model).score;
    PhrasePair bad_t{instance.positive.source, instance.negative_target};
    PhrasePair bad_s{instance.negative_source, instance.positive.target};
    for (double margin :
         {1.0 + score_pair(bad_t, model).score - positive,
          1.0 + score_pair(bad_s, model).score - positive}) {
      if (std::abs(margin) < cfg.boundary_tolerance) {
        report.boundary_skip = true;
      }
    }
    for (const auto* tokens :
         {&instance.positive.source, &instance.negative_source}) {
      if (build_tree(*tokens, model.embed_source, model.rae_source)
              .min_merge_gap < cfg.boundary_tolerance) {
        report.boundary_skip = true;
      }
    }
    for (const auto* tokens :
         {&instance.positive.target, &instance.negative_target}) {
      if (build_tree(*tokens, model.embed_target, model.rae_target)
              .min_merge_gap < cfg.boundary_tolerance) {
        report.boundary_skip = true;
      }
    }
  }
  if (report.boundary_skip) return report;

  ObjectiveGradient analytic =
      objective_and_gradient(instances, model, hp);
  if (cfg.perturb != 0.0) analytic.gradient[0] += cfg.perturb;
  Eigen::VectorXd numeric =
      finite_difference_gradient(instances, model, hp, cfg.epsilon);

  const auto groups = model.group_ranges();
  for (int g = 0; g < 4; ++g) {
    for (Eigen::Index k = groups[g].begin; k < groups[g].end; ++k) {
      const double a = analytic.gradient[k];
      const double b = numeric[k];
      const double rel =
          std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
      report.group_max_rel[g] = std::max(report.group_max_rel[g], rel);
      if (rel > report.max_rel) {
        report.max_rel = rel;
        report.worst_index = k;
        report.worst_group = g;
      }
    }
  }
  return report;
}

}  // namespace battrae
