#ifndef BATTRAE_CORPUS_HPP
#define BATTRAE_CORPUS_HPP

#include <Eigen/Core>
#include <string>
#include <unordered_map>
#include <vector>

#include "battrae/rng.hpp"

namespace battrae {

inline constexpr const char* kUnkToken = "<unk>";

/// Token inventory for one language. Ids are contiguous from 0 and the
/// reserved unknown token is always present.
struct Vocabulary {
  std::vector<std::string> tokens;
  std::unordered_map<std::string, int> index;
  int unk_id = 0;

  static Vocabulary with_unk();

  // Returns the existing id or inserts the token at the end.
  int add(const std::string& token);
  // Id of the token, or unk_id when absent.
  int lookup(const std::string& token) const;
  int size() const { return static_cast<int>(tokens.size()); }
};

/// One aligned phrase pair, already mapped to token ids.
struct PhrasePair {
  std::vector<int> source;
  std::vector<int> target;
};

/// Word embedding matrix: one dim-vector column per vocabulary id.
struct EmbeddingTable {
  int dim = 0;
  Eigen::MatrixXd matrix;  // dim x |V|
};

struct Corpus {
  std::vector<PhrasePair> pairs;
  Vocabulary source_vocab;
  Vocabulary target_vocab;
};

// Splits a `src tokens ||| tgt tokens` line into whitespace tokens per side.
// line_number is used in error messages only. Throws DataError on a line
// without exactly one separator or with an empty side.
std::pair<std::vector<std::string>, std::vector<std::string>> split_pair_line(
    const std::string& line, std::size_t line_number);

// Reads a phrase-pair file, building both vocabularies as a side effect.
// Line order is preserved.
Corpus load_corpus(const std::string& path);

// Maps raw token strings onto ids using the given vocabularies; unknown
// tokens fall back to unk_id.
PhrasePair encode_pair(const std::vector<std::string>& source_tokens,
                       const std::vector<std::string>& target_tokens,
                       const Vocabulary& source_vocab,
                       const Vocabulary& target_vocab);

// Reads word2vec text output ("word v1 ... v_dim" rows, optional
// "count dim" header). Vocabulary tokens missing from the file are drawn
// from N(0, 0.01) using rng.
EmbeddingTable load_pretrained_embeddings(const std::string& path,
                                          const Vocabulary& vocab, int dim,
                                          Rng& rng);

// Writes the table in the same text format, 17 significant digits.
void save_embeddings(const std::string& path, const EmbeddingTable& table,
                     const Vocabulary& vocab);

}  // namespace battrae

#endif
