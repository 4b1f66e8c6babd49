#include "crossner/checkpoint.h"

#include <bit>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "crossner/error.h"

namespace crossner {
namespace {

constexpr std::string_view kMagic = "crossner-checkpoint";

struct TensorEntry {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

struct Header {
  ModelConfig config;
  Vocab vocab;
  std::vector<TensorEntry> tensors;
};

std::string next_line(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw CheckpointTruncatedError("checkpoint header ends early");
  return line;
}

// "<key> <value>" line; the key must match.
std::string keyed(std::istream& in, std::string_view key) {
  const std::string line = next_line(in);
  if (line.size() <= key.size() || line.compare(0, key.size(), key) != 0 || line[key.size()] != ' ') {
    throw CheckpointError("expected '" + std::string(key) + "' in checkpoint header, got '" + line + "'");
  }
  return line.substr(key.size() + 1);
}

std::size_t keyed_size(std::istream& in, std::string_view key) {
  const std::string v = keyed(in, key);
  std::size_t pos = 0;
  try {
    const unsigned long long n = std::stoull(v, &pos);
    if (pos == v.size()) return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
  }
  throw CheckpointError("bad number '" + v + "' for " + std::string(key));
}

std::vector<std::pair<std::string, std::size_t*>> size_fields(ModelConfig& c) {
  return {{"word_dim", &c.word_dim},         {"char_dim", &c.char_dim},
          {"char_kernels", &c.char_kernels}, {"max_kernel_width", &c.max_kernel_width},
          {"max_word_length", &c.max_word_length}, {"lstm_dim", &c.lstm_dim},
          {"heads", &c.heads},               {"head_dim", &c.head_dim}};
}

void write_header(std::ostream& out, const NerModel<float>& model) {
  ModelConfig c = model.config();
  const Vocab& v = model.vocab();
  out << kMagic << ' ' << kCheckpointVersion << '\n';
  out << "architecture " << to_string(c.architecture) << '\n';
  out << "head " << to_string(c.head) << '\n';
  for (const auto& [key, field] : size_fields(c)) out << key << ' ' << *field << '\n';
  out << "types " << v.scheme.num_types() << '\n';
  for (const std::string& t : v.scheme.types()) out << t << '\n';
  out << "chars " << v.chars.size() << '\n';
  for (char32_t ch : v.chars) out << static_cast<std::uint32_t>(ch) << '\n';
  out << "words " << v.words.size() << '\n';
  for (const std::string& w : v.words) out << w << '\n';
  out << "tensors " << model.params().size() << '\n';
  for (const Parameter<float>& p : model.params()) {
    out << p.name << ' ' << p.value.rows() << ' ' << p.value.cols() << '\n';
  }
  out << "end\n";
}

Header read_header(std::istream& in) {
  const std::string first = next_line(in);
  std::istringstream magic_line(first);
  std::string magic;
  int version = 0;
  if (!(magic_line >> magic) || magic != kMagic) throw CheckpointError("not a checkpoint file");
  if (!(magic_line >> version)) throw CheckpointError("checkpoint version is missing");
  if (version != kCheckpointVersion) {
    throw CheckpointVersionError("checkpoint version " + std::to_string(version) + ", this build reads " +
                                 std::to_string(kCheckpointVersion));
  }
  Header h;
  try {
    h.config.architecture = parse_architecture(keyed(in, "architecture"));
    h.config.head = parse_head(keyed(in, "head"));
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("checkpoint config: ") + e.what());
  }
  for (const auto& [key, field] : size_fields(h.config)) *field = keyed_size(in, key);

  std::vector<std::string> types(keyed_size(in, "types"));
  for (std::string& t : types) t = next_line(in);
  h.vocab.scheme = TagScheme(std::move(types));
  h.vocab.chars.resize(keyed_size(in, "chars"));
  for (char32_t& ch : h.vocab.chars) ch = static_cast<char32_t>(std::stoul(next_line(in)));
  h.vocab.words.resize(keyed_size(in, "words"));
  for (std::string& w : h.vocab.words) w = next_line(in);

  h.tensors.resize(keyed_size(in, "tensors"));
  for (TensorEntry& t : h.tensors) {
    std::istringstream line(next_line(in));
    if (!(line >> t.name >> t.rows >> t.cols)) throw CheckpointError("malformed tensor directory entry");
  }
  if (next_line(in) != "end") throw CheckpointError("checkpoint header is missing its end marker");
  return h;
}

void check_directory(const std::vector<TensorEntry>& directory, const ParameterStore<float>& params) {
  if (directory.size() != params.size()) {
    throw CheckpointShapeError("checkpoint has " + std::to_string(directory.size()) + " tensors, model has " +
                               std::to_string(params.size()));
  }
  std::size_t i = 0;
  for (const Parameter<float>& p : params) {
    const TensorEntry& e = directory[i++];
    if (e.name != p.name || e.rows != p.value.rows() || e.cols != p.value.cols()) {
      throw CheckpointShapeError("checkpoint tensor " + e.name + " " + shape_string(e.rows, e.cols) +
                                 " does not match model tensor " + p.name + " " + p.value.shape_string());
    }
  }
}

void read_payload(std::istream& in, ParameterStore<float>& params) {
  for (Parameter<float>& p : params) {
    for (float& v : p.value.values()) {
      unsigned char bytes[4];
      if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
        throw CheckpointTruncatedError("checkpoint payload ends inside tensor " + p.name);
      }
      const std::uint32_t bits = static_cast<std::uint32_t>(bytes[0]) | static_cast<std::uint32_t>(bytes[1]) << 8 |
                                 static_cast<std::uint32_t>(bytes[2]) << 16 |
                                 static_cast<std::uint32_t>(bytes[3]) << 24;
      v = std::bit_cast<float>(bits);
    }
  }
}

}  // namespace

void save_checkpoint(std::ostream& out, const NerModel<float>& model) {
  write_header(out, model);
  for (const Parameter<float>& p : model.params()) {
    for (float v : p.value.values()) {
      const std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
      const char bytes[4] = {static_cast<char>(bits & 0xFF), static_cast<char>((bits >> 8) & 0xFF),
                             static_cast<char>((bits >> 16) & 0xFF), static_cast<char>((bits >> 24) & 0xFF)};
      out.write(bytes, 4);
    }
  }
  if (!out) throw CheckpointError("failed writing checkpoint");
}

void save_checkpoint(const std::string& path, const NerModel<float>& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot open " + path + " for writing");
  save_checkpoint(out, model);
}

void load_parameters(std::istream& in, NerModel<float>& model) {
  const Header h = read_header(in);
  check_directory(h.tensors, model.params());
  read_payload(in, model.params());
}

std::unique_ptr<NerModel<float>> load_checkpoint(std::istream& in, std::shared_ptr<const EmbeddingTable> embeddings) {
  Header h = read_header(in);
  auto model = std::make_unique<NerModel<float>>(h.config, std::move(h.vocab), std::move(embeddings), 0);
  check_directory(h.tensors, model->params());
  read_payload(in, model->params());
  return model;
}

std::unique_ptr<NerModel<float>> load_checkpoint(const std::string& path,
                                                 std::shared_ptr<const EmbeddingTable> embeddings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path);
  return load_checkpoint(in, std::move(embeddings));
}

CheckpointInfo read_checkpoint_info(std::istream& in) {
  Header h = read_header(in);
  return {h.config, std::move(h.vocab)};
}

}  // namespace crossner
