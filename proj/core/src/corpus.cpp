#include "battrae/corpus.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "battrae/errors.hpp"

namespace battrae {

namespace {

std::vector<std::string> whitespace_tokens(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

double parse_double(const std::string& word, const std::string& context) {
  double value = 0.0;
  auto [ptr, ec] =
      std::from_chars(word.data(), word.data() + word.size(), value);
  if (ec != std::errc() || ptr != word.data() + word.size()) {
    throw DataError(context + ": non-numeric value '" + word + "'");
  }
  return value;
}

}  // namespace

Vocabulary Vocabulary::with_unk() {
  Vocabulary v;
  v.unk_id = v.add(kUnkToken);
  return v;
}

int Vocabulary::add(const std::string& token) {
  auto it = index.find(token);
  if (it != index.end()) return it->second;
  int id = static_cast<int>(tokens.size());
  tokens.push_back(token);
  index.emplace(token, id);
  return id;
}

int Vocabulary::lookup(const std::string& token) const {
  auto it = index.find(token);
  return it == index.end() ? unk_id : it->second;
}

std::pair<std::vector<std::string>, std::vector<std::string>> split_pair_line(
    const std::string& line, std::size_t line_number) {
  static const std::string kSep = " ||| ";
  std::size_t pos = line.find(kSep);
  if (pos == std::string::npos) {
    throw DataError("line " + std::to_string(line_number) +
                    ": missing ' ||| ' separator");
  }
  if (line.find(kSep, pos + kSep.size()) != std::string::npos) {
    throw DataError("line " + std::to_string(line_number) +
                    ": more than one ' ||| ' separator");
  }
  auto source = whitespace_tokens(line.substr(0, pos));
  auto target = whitespace_tokens(line.substr(pos + kSep.size()));
  if (source.empty() || target.empty()) {
    throw DataError("line " + std::to_string(line_number) +
                    ": empty phrase side");
  }
  return {std::move(source), std::move(target)};
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path);
  Corpus corpus;
  corpus.source_vocab = Vocabulary::with_unk();
  corpus.target_vocab = Vocabulary::with_unk();
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    auto [src, tgt] = split_pair_line(line, line_number);
    PhrasePair pair;
    pair.source.reserve(src.size());
    for (const auto& tok : src)
      pair.source.push_back(corpus.source_vocab.add(tok));
    pair.target.reserve(tgt.size());
    for (const auto& tok : tgt)
      pair.target.push_back(corpus.target_vocab.add(tok));
    corpus.pairs.push_back(std::move(pair));
  }
  return corpus;
}

PhrasePair encode_pair(const std::vector<std::string>& source_tokens,
                       const std::vector<std::string>& target_tokens,
                       const Vocabulary& source_vocab,
                       const Vocabulary& target_vocab) {
  PhrasePair pair;
  pair.source.reserve(source_tokens.size());
  for (const auto& tok : source_tokens)
    pair.source.push_back(source_vocab.lookup(tok));
  pair.target.reserve(target_tokens.size());
  for (const auto& tok : target_tokens)
    pair.target.push_back(target_vocab.lookup(tok));
  return pair;
}

EmbeddingTable load_pretrained_embeddings(const std::string& path,
                                          const Vocabulary& vocab, int dim,
                                          Rng& rng) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file: " + path);

  EmbeddingTable table;
  table.dim = dim;
  table.matrix.resize(dim, vocab.size());
  std::vector<bool> filled(vocab.size(), false);

  std::string line;
  std::size_t line_number = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_number;
    auto fields = whitespace_tokens(line);
    if (fields.empty()) continue;
    const std::string context = "embedding file line " +
                                std::to_string(line_number);
    if (first_content_line && fields.size() == 2) {
      // "count dim" header
      first_content_line = false;
      long header_dim = std::lround(parse_double(fields[1], context));
      if (header_dim != dim) {
        throw DataError(context + ": header dimension " +
                        std::to_string(header_dim) + " != requested " +
                        std::to_string(dim));
      }
      continue;
    }
    first_content_line = false;
    if (static_cast<int>(fields.size()) != dim + 1) {
      throw DataError(context + ": expected " + std::to_string(dim) +
                      " values, got " + std::to_string(fields.size() - 1));
    }
    auto it = vocab.index.find(fields[0]);
    if (it == vocab.index.end()) continue;  // token outside the vocabulary
    for (int i = 0; i < dim; ++i) {
      table.matrix(i, it->second) = parse_double(fields[i + 1], context);
    }
    filled[it->second] = true;
  }
  for (int col = 0; col < vocab.size(); ++col) {
    if (filled[col]) continue;
    for (int i = 0; i < dim; ++i) table.matrix(i, col) = rng.normal(0.0, 0.01);
  }
  return table;
}

void save_embeddings(const std::string& path, const EmbeddingTable& table,
                     const Vocabulary& vocab) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write embedding file: " + path);
  out << vocab.size() << ' ' << table.dim << '\n';
  char buf[64];
  for (int col = 0; col < vocab.size(); ++col) {
    out << vocab.tokens[col];
    for (int i = 0; i < table.dim; ++i) {
      std::snprintf(buf, sizeof(buf), " %.17g", table.matrix(i, col));
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace battrae
