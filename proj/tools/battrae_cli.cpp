// Command-line front end: train, score, attend, gradcheck.
//
// Exit statuses: 0 success, 1 usage error, 2 data error, 3 numeric failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "battrae/dump.hpp"
#include "battrae/errors.hpp"
#include "battrae/grad.hpp"
#include "battrae/gradcheck.hpp"
#include "battrae/lbfgs.hpp"
#include "battrae/model_io.hpp"

namespace {

using namespace battrae;

struct RunConfig {
  std::string corpus;
  std::string model_path;
  std::string pairs;
  std::string src_emb;
  std::string tgt_emb;
  std::string out;
  Hyperparams hp;
  int history = 10;
  int threads = 1;
  // gradcheck knobs
  int gc_dim = 3;
  int gc_vocab = 12;
  int gc_instances = 3;
  double gc_epsilon = 1e-5;
  double gc_perturb = 0.0;
};

void add_hyperparam_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--dim", cfg.hp.dim_source,
                  "word/phrase embedding dimensionality d_s = d_t")
      ->default_str("50");
  cmd->add_option("--attn-dim", cfg.hp.dim_attention,
                  "attention space dimensionality d_a")
      ->default_str("50");
  cmd->add_option("--sem-dim", cfg.hp.dim_semantic,
                  "semantic space dimensionality d_sem")
      ->default_str("50");
  cmd->add_option("--alpha", cfg.hp.alpha,
                  "reconstruction/semantic error balance "
                  "(beta is derived as 1 - alpha, here 0.875)")
      ->default_str("0.125");
  cmd->add_option("--lambda-l", cfg.hp.lambda_embed,
                  "L2 weight for the word embedding matrices")
      ->default_str("1e-05");
  cmd->add_option("--lambda-rec", cfg.hp.lambda_rec,
                  "L2 weight for the recursive autoencoder parameters")
      ->default_str("0.0001");
  cmd->add_option("--lambda-att", cfg.hp.lambda_att,
                  "L2 weight for the attention projection parameters")
      ->default_str("0.0001");
  cmd->add_option("--lambda-sem", cfg.hp.lambda_sem,
                  "L2 weight for the semantic similarity parameters")
      ->default_str("0.001");
  cmd->add_option("--max-iter", cfg.hp.max_iterations,
                  "maximum number of L-BFGS iterations")
      ->default_str("100");
  cmd->add_option("--seed", cfg.hp.seed, "random seed")->default_str("1");
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw DataError("cannot write output file: " + path);
  return file;
}

int cmd_train(RunConfig& cfg) {
  Corpus corpus = load_corpus(cfg.corpus);
  if (corpus.pairs.empty()) {
    throw DataError("corpus is empty: " + cfg.corpus);
  }
  // One stream drives all randomness, in a fixed order: source embedding
  // fill, target embedding fill, parameter init, negative sampling.
  Rng rng(cfg.hp.seed);
  cfg.hp.dim_target = cfg.hp.dim_source;

  std::optional<EmbeddingTable> pre_src, pre_tgt;
  if (!cfg.src_emb.empty()) {
    pre_src = load_pretrained_embeddings(cfg.src_emb, corpus.source_vocab,
                                         cfg.hp.dim_source, rng);
  }
  if (!cfg.tgt_emb.empty()) {
    pre_tgt = load_pretrained_embeddings(cfg.tgt_emb, corpus.target_vocab,
                                         cfg.hp.dim_target, rng);
  }
  ModelParams model = init_model(
      cfg.hp, corpus.source_vocab.size(), corpus.target_vocab.size(),
      pre_src ? &*pre_src : nullptr, pre_tgt ? &*pre_tgt : nullptr, rng);

  std::vector<TrainingInstance> instances =
      sample_all_negatives(corpus.pairs, corpus.source_vocab.size(),
                           corpus.target_vocab.size(), rng);

  LbfgsConfig lbfgs_cfg;
  lbfgs_cfg.history_size = cfg.history;
  lbfgs_cfg.max_iterations = cfg.hp.max_iterations;

  ModelParams scratch = model;
  auto eval = [&](const Eigen::VectorXd& flat) {
    scratch.unflatten(flat);
    ObjectiveGradient og =
        objective_and_gradient(instances, scratch, cfg.hp, cfg.threads);
    return std::make_pair(og.value, std::move(og.gradient));
  };

  MinimizeResult result = minimize(eval, model.flatten(), lbfgs_cfg);
  for (const auto& rec : result.trace.records) {
    std::printf("iter=%d value=%.17g gnorm=%.17g step=%.17g evals=%d\n",
                rec.iteration, rec.value, rec.grad_inf_norm, rec.step_length,
                rec.line_search_evals);
  }
  if (result.trace.line_search_failed) {
    std::printf("line_search_failed=1\n");
  }

  model.unflatten(result.x);
  save_model({model, cfg.hp, corpus.source_vocab, corpus.target_vocab},
             cfg.out);
  std::printf("final_objective=%.17g iterations=%zu model=%s\n", result.value,
              result.trace.records.size(), cfg.out.c_str());
  return 0;
}

// Applies one command per scored pair from the pairs file.
template <typename Fn>
void for_each_scored_pair(const RunConfig& cfg, Fn&& fn) {
  ModelFile mf = load_model(cfg.model_path);
  std::ifstream in(cfg.pairs);
  if (!in) throw DataError("cannot open pairs file: " + cfg.pairs);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    auto [src, tgt] = split_pair_line(line, line_number);
    PhrasePair pair =
        encode_pair(src, tgt, mf.source_vocab, mf.target_vocab);
    fn(line, score_pair(pair, mf.model), mf);
  }
}

int cmd_score(const RunConfig& cfg) {
  std::ofstream file;
  std::ostream& out = open_output(cfg.out, file);
  for_each_scored_pair(cfg, [&](const std::string& line,
                                const ScoreResult& result, const ModelFile&) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", result.score);
    out << line << " ||| " << buf << '\n';
  });
  return 0;
}

int cmd_attend(const RunConfig& cfg) {
  std::ofstream file;
  std::ostream& out = open_output(cfg.out, file);
  for_each_scored_pair(
      cfg, [&](const std::string&, const ScoreResult& result,
               const ModelFile& mf) {
        write_attention_record(out, result, mf.source_vocab, mf.target_vocab);
      });
  return 0;
}

int cmd_gradcheck(const RunConfig& cfg) {
  GradCheckConfig gc;
  gc.dim = cfg.gc_dim;
  gc.vocab_size = cfg.gc_vocab;
  gc.instance_count = cfg.gc_instances;
  gc.seed = cfg.hp.seed;
  gc.epsilon = cfg.gc_epsilon;
  gc.perturb = cfg.gc_perturb;

  GradCheckReport report = run_gradient_check(gc);
  while (report.boundary_skip) {
    // Seed too close to a hinge or tie boundary; move to the next one.
    ++gc.seed;
    report = run_gradient_check(gc);
  }

  bool ok = true;
  for (int g = 0; g < 4; ++g) {
    std::printf("%s max_rel_error=%.3e\n", kGradCheckGroupNames[g],
                report.group_max_rel[g]);
    if (report.group_max_rel[g] > 1e-4) ok = false;
  }
  std::printf("worst group=%s flat_index=%lld max_rel_error=%.3e\n",
              report.worst_group >= 0
                  ? kGradCheckGroupNames[report.worst_group]
                  : "none",
              static_cast<long long>(report.worst_index), report.max_rel);
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Bilingual phrase embeddings via recursive autoencoders with a "
      "bidimensional attention network and a bilinear similarity head."};
  app.require_subcommand(1);

  RunConfig cfg;

  CLI::App* train = app.add_subcommand(
      "train", "Train a model on a phrase-pair corpus with L-BFGS");
  train->add_option("--corpus", cfg.corpus,
                    "corpus file, one `src ||| tgt` pair per line")
      ->required();
  train->add_option("--out", cfg.out, "output model file")->required();
  train->add_option("--src-emb", cfg.src_emb,
                    "pretrained source embeddings (word2vec text format)");
  train->add_option("--tgt-emb", cfg.tgt_emb,
                    "pretrained target embeddings (word2vec text format)");
  add_hyperparam_flags(train, cfg);
  train->add_option("--history", cfg.history, "L-BFGS history size")
      ->default_str("10");
  train->add_option("--threads", cfg.threads,
                    "worker threads for objective/gradient evaluation")
      ->default_str("1");

  CLI::App* score = app.add_subcommand(
      "score", "Score phrase pairs with a trained model");
  score->add_option("--model", cfg.model_path, "model file")->required();
  score->add_option("--pairs", cfg.pairs, "pairs file to score")->required();
  score->add_option("--out", cfg.out, "output file (default stdout)");

  CLI::App* attend = app.add_subcommand(
      "attend", "Dump attention records (JSON lines) for phrase pairs");
  attend->add_option("--model", cfg.model_path, "model file")->required();
  attend->add_option("--pairs", cfg.pairs, "pairs file")->required();
  attend->add_option("--out", cfg.out, "output file (default stdout)");

  CLI::App* gradcheck = app.add_subcommand(
      "gradcheck",
      "Compare analytic gradients with the central-difference oracle");
  gradcheck->add_option("--dim", cfg.gc_dim, "model dimensionality")
      ->default_str("3");
  gradcheck->add_option("--vocab", cfg.gc_vocab, "synthetic vocabulary size")
      ->default_str("12");
  gradcheck
      ->add_option("--instances", cfg.gc_instances,
                   "synthetic instance count")
      ->default_str("3");
  gradcheck->add_option("--seed", cfg.hp.seed, "random seed")
      ->default_str("1");
  gradcheck->add_option("--epsilon", cfg.gc_epsilon,
                        "central-difference step");
  gradcheck
      ->add_option("--perturb", cfg.gc_perturb,
                   "test hook: corrupt one analytic gradient coordinate")
      ->group("");  // hidden

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (train->parsed()) return cmd_train(cfg);
    if (score->parsed()) return cmd_score(cfg);
    if (attend->parsed()) return cmd_attend(cfg);
    if (gradcheck->parsed()) return cmd_gradcheck(cfg);
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const ShapeError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
