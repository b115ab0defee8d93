#ifndef BATTRAE_DUMP_HPP
#define BATTRAE_DUMP_HPP

#include <ostream>

#include "battrae/model.hpp"

namespace battrae {

// Writes one JSON record (single line) describing a scored pair: tree
// strings, postorder node labels, the full attention matrix, both weight
// vectors, per-side node rankings by weight, and the similarity score.
// Key order is fixed; numbers use shortest round-trip decimals.
void write_attention_record(std::ostream& out, const ScoreResult& result,
                            const Vocabulary& source_vocab,
                            const Vocabulary& target_vocab);

}  // namespace battrae

#endif
