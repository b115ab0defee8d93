#ifndef BATTRAE_MODEL_IO_HPP
#define BATTRAE_MODEL_IO_HPP

#include <string>

#include "battrae/model.hpp"

namespace battrae {

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kFlatOrderId = "battrae-flat-1";

struct ModelFile {
  ModelParams model;
  Hyperparams hp;
  Vocabulary source_vocab;
  Vocabulary target_vocab;
};

// Self-describing text container; scalars are stored as hex-floats so the
// round trip is bit-exact. Forward-incompatible changes bump the version.
void save_model(const ModelFile& file, const std::string& path);
ModelFile load_model(const std::string& path);

}  // namespace battrae

#endif
