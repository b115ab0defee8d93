#include "battrae/model_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "battrae/errors.hpp"

namespace battrae {

namespace {

void write_scalar(std::ostream& out, double value) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", value);
  out << buf;
}

void write_matrix(std::ostream& out, const std::string& name,
                  const Eigen::MatrixXd& m) {
  out << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  // One column per line, matching the column-major flat order.
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (r > 0) out << ' ';
      write_scalar(out, m(r, c));
    }
    out << '\n';
  }
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string line(const std::string& what) {
    std::string l;
    if (!std::getline(in_, l)) {
      throw DataError("model file truncated while reading " + what);
    }
    return l;
  }

  // "key value" line; returns the value part, checks the key.
  std::string keyed(const std::string& key) {
    std::string l = line(key);
    std::istringstream ss(l);
    std::string k, v;
    ss >> k >> v;
    if (k != key) {
      throw DataError("model file: expected field '" + key + "', got '" + k +
                      "'");
    }
    return v;
  }

  double keyed_double(const std::string& key) {
    const std::string v = keyed(key);
    char* end = nullptr;
    double value = std::strtod(v.c_str(), &end);  // accepts hex-floats
    if (end == v.c_str() || *end != '\0') {
      throw DataError("model file: field '" + key + "' is not numeric");
    }
    return value;
  }

  long keyed_long(const std::string& key) {
    const std::string v = keyed(key);
    char* end = nullptr;
    long value = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0') {
      throw DataError("model file: field '" + key + "' is not an integer");
    }
    return value;
  }

  Eigen::MatrixXd matrix(const std::string& name, Eigen::Index rows,
                         Eigen::Index cols) {
    std::istringstream header(line("matrix " + name));
    std::string tag, got_name;
    Eigen::Index got_rows = 0, got_cols = 0;
    header >> tag >> got_name >> got_rows >> got_cols;
    if (tag != "matrix" || got_name != name) {
      throw DataError("model file: expected matrix '" + name + "'");
    }
    if (got_rows != rows || got_cols != cols) {
      throw DataError("model file: matrix '" + name + "' has shape " +
                      std::to_string(got_rows) + "x" +
                      std::to_string(got_cols) + ", expected " +
                      std::to_string(rows) + "x" + std::to_string(cols));
    }
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
      std::istringstream row(line("matrix " + name + " column"));
      std::string word;
      for (Eigen::Index r = 0; r < rows; ++r) {
        if (!(row >> word)) {
          throw DataError("model file: matrix '" + name +
                          "' column truncated");
        }
        char* end = nullptr;
        m(r, c) = std::strtod(word.c_str(), &end);
        if (end == word.c_str() || *end != '\0') {
          throw DataError("model file: matrix '" + name +
                          "' has a non-numeric entry");
        }
      }
    }
    return m;
  }

  Vocabulary vocab(const std::string& key) {
    const long count = keyed_long(key);
    Vocabulary v;
    for (long i = 0; i < count; ++i) {
      v.add(line(key + " token"));
    }
    auto it = v.index.find(kUnkToken);
    if (it == v.index.end()) {
      throw DataError("model file: vocabulary '" + key + "' lacks " +
                      std::string(kUnkToken));
    }
    v.unk_id = it->second;
    return v;
  }

 private:
  std::istream& in_;
};

}  // namespace

void save_model(const ModelFile& file, const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // fixed newlines everywhere
  if (!out) throw DataError("cannot write model file: " + path);
  const Hyperparams& hp = file.hp;

  out << "battrae-model\n";
  out << "format_version " << kModelFormatVersion << '\n';
  out << "flat_order " << kFlatOrderId << '\n';
  out << "alpha ";
  write_scalar(out, hp.alpha);
  out << '\n';
  for (auto [name, value] :
       {std::pair<const char*, double>{"lambda_L", hp.lambda_embed},
        {"lambda_rec", hp.lambda_rec},
        {"lambda_att", hp.lambda_att},
        {"lambda_sem", hp.lambda_sem}}) {
    out << name << ' ';
    write_scalar(out, value);
    out << '\n';
  }
  out << "dim_source " << hp.dim_source << '\n';
  out << "dim_target " << hp.dim_target << '\n';
  out << "dim_attention " << hp.dim_attention << '\n';
  out << "dim_semantic " << hp.dim_semantic << '\n';
  out << "max_iterations " << hp.max_iterations << '\n';
  out << "seed " << hp.seed << '\n';

  out << "source_vocab " << file.source_vocab.size() << '\n';
  for (const auto& tok : file.source_vocab.tokens) out << tok << '\n';
  out << "target_vocab " << file.target_vocab.size() << '\n';
  for (const auto& tok : file.target_vocab.tokens) out << tok << '\n';

  const ModelParams& m = file.model;
  write_matrix(out, "L_s", m.embed_source.matrix);
  write_matrix(out, "L_t", m.embed_target.matrix);
  write_matrix(out, "W1_s", m.rae_source.w1);
  write_matrix(out, "b1_s", m.rae_source.b1);
  write_matrix(out, "W2_s", m.rae_source.w2);
  write_matrix(out, "b2_s", m.rae_source.b2);
  write_matrix(out, "W1_t", m.rae_target.w1);
  write_matrix(out, "b1_t", m.rae_target.b1);
  write_matrix(out, "W2_t", m.rae_target.w2);
  write_matrix(out, "b2_t", m.rae_target.b2);
  write_matrix(out, "W3", m.attention.w3);
  write_matrix(out, "W4", m.attention.w4);
  write_matrix(out, "bA", m.attention.bias);
  write_matrix(out, "W5", m.semantic.w5);
  write_matrix(out, "W6", m.semantic.w6);
  write_matrix(out, "S", m.semantic.bilinear);
  write_matrix(out, "bs", m.semantic.bias);
  out << "end\n";
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file: " + path);
  Reader reader(in);

  if (reader.line("magic") != "battrae-model") {
    throw DataError("model file: bad magic line");
  }
  const long version = reader.keyed_long("format_version");
  if (version != kModelFormatVersion) {
    throw DataError("model file: format_version " + std::to_string(version) +
                    " unsupported (expected " +
                    std::to_string(kModelFormatVersion) + ")");
  }
  if (reader.keyed("flat_order") != kFlatOrderId) {
    throw DataError("model file: unknown flat_order id");
  }

  ModelFile file;
  Hyperparams& hp = file.hp;
  hp.alpha = reader.keyed_double("alpha");
  hp.lambda_embed = reader.keyed_double("lambda_L");
  hp.lambda_rec = reader.keyed_double("lambda_rec");
  hp.lambda_att = reader.keyed_double("lambda_att");
  hp.lambda_sem = reader.keyed_double("lambda_sem");
  hp.dim_source = static_cast<int>(reader.keyed_long("dim_source"));
  hp.dim_target = static_cast<int>(reader.keyed_long("dim_target"));
  hp.dim_attention = static_cast<int>(reader.keyed_long("dim_attention"));
  hp.dim_semantic = static_cast<int>(reader.keyed_long("dim_semantic"));
  hp.max_iterations = static_cast<int>(reader.keyed_long("max_iterations"));
  hp.seed = static_cast<std::uint64_t>(reader.keyed_long("seed"));

  file.source_vocab = reader.vocab("source_vocab");
  file.target_vocab = reader.vocab("target_vocab");

  ModelParams& m = file.model;
  const int d_s = hp.dim_source, d_t = hp.dim_target;
  m.embed_source.dim = d_s;
  m.embed_source.matrix =
      reader.matrix("L_s", d_s, file.source_vocab.size());
  m.embed_target.dim = d_t;
  m.embed_target.matrix =
      reader.matrix("L_t", d_t, file.target_vocab.size());
  m.rae_source.w1 = reader.matrix("W1_s", d_s, 2 * d_s);
  m.rae_source.b1 = reader.matrix("b1_s", d_s, 1);
  m.rae_source.w2 = reader.matrix("W2_s", 2 * d_s, d_s);
  m.rae_source.b2 = reader.matrix("b2_s", 2 * d_s, 1);
  m.rae_target.w1 = reader.matrix("W1_t", d_t, 2 * d_t);
  m.rae_target.b1 = reader.matrix("b1_t", d_t, 1);
  m.rae_target.w2 = reader.matrix("W2_t", 2 * d_t, d_t);
  m.rae_target.b2 = reader.matrix("b2_t", 2 * d_t, 1);
  m.attention.w3 = reader.matrix("W3", hp.dim_attention, d_s);
  m.attention.w4 = reader.matrix("W4", hp.dim_attention, d_t);
  m.attention.bias = reader.matrix("bA", hp.dim_attention, 1);
  m.semantic.w5 = reader.matrix("W5", hp.dim_semantic, d_s);
  m.semantic.w6 = reader.matrix("W6", hp.dim_semantic, d_t);
  m.semantic.bilinear =
      reader.matrix("S", hp.dim_semantic, hp.dim_semantic);
  m.semantic.bias = reader.matrix("bs", hp.dim_semantic, 1);
  if (reader.line("end marker") != "end") {
    throw DataError("model file: missing end marker");
  }
  return file;
}

}  // namespace battrae
