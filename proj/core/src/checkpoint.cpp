#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "profilereg/error.hpp"
#include "profilereg/model.hpp"
#include "profilereg/text.hpp"

namespace profilereg::model {

namespace {

constexpr char kMagic[4] = {'P', 'R', 'E', 'G'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw DataError(path + ": truncated checkpoint");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}

double read_f64(std::istream& in, const std::string& path) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw DataError(path + ": truncated checkpoint");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const std::vector<nn::NamedTensor>& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path + ": cannot open for writing");
  out.write(kMagic, 4);
  write_u32(out, kVersion);
  write_u32(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, tensor] : params) {
    write_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32(out, static_cast<std::uint32_t>(tensor->shape.size()));
    for (int d : tensor->shape) write_u32(out, static_cast<std::uint32_t>(d));
    for (double v : tensor->values) write_f64(out, v);
  }
  if (!out) throw DataError(path + ": write failed");
}

std::map<std::string, nn::Tensor> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path + ": cannot open checkpoint");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw DataError(path + ": not a checkpoint file");
  }
  std::uint32_t version = read_u32(in, path);
  if (version != kVersion) {
    throw DataError(path + ": unsupported checkpoint version " + std::to_string(version));
  }
  std::uint32_t count = read_u32(in, path);
  std::map<std::string, nn::Tensor> archive;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::uint32_t name_len = read_u32(in, path);
    std::string name(name_len, '\0');
    in.read(name.data(), static_cast<std::streamsize>(name_len));
    if (!in) throw DataError(path + ": truncated checkpoint");
    std::uint32_t ndim = read_u32(in, path);
    std::vector<int> shape;
    shape.reserve(ndim);
    std::size_t total = 1;
    for (std::uint32_t d = 0; d < ndim; ++d) {
      std::uint32_t v = read_u32(in, path);
      shape.push_back(static_cast<int>(v));
      total *= v;
    }
    nn::Tensor t = nn::Tensor::zeros(shape);
    if (t.values.size() != total) throw DataError(path + ": inconsistent tensor header");
    for (double& v : t.values) v = read_f64(in, path);
    if (!archive.emplace(name, std::move(t)).second) {
      throw DataError(path + ": duplicate tensor name '" + name + "'");
    }
  }
  return archive;
}

void apply_checkpoint(const std::map<std::string, nn::Tensor>& archive,
                      const std::vector<nn::NamedTensor>& params) {
  for (const auto& [name, tensor] : params) {
    auto it = archive.find(name);
    if (it == archive.end()) {
      throw DataError("checkpoint: missing tensor '" + name + "'");
    }
    if (!tensor->same_shape(it->second)) {
      throw DataError("checkpoint: shape mismatch for '" + name + "' (have " +
                      nn::shape_string(tensor->shape) + ", archive " +
                      nn::shape_string(it->second.shape) + ")");
    }
    tensor->values = it->second.values;
  }
  if (archive.size() != params.size()) {
    for (const auto& [name, tensor] : archive) {
      (void)tensor;
      bool known = false;
      for (const auto& [pname, ptensor] : params) {
        (void)ptensor;
        if (pname == name) {
          known = true;
          break;
        }
      }
      if (!known) throw DataError("checkpoint: unexpected tensor '" + name + "'");
    }
  }
}

int load_pretrained_embeddings(const std::string& path, const corpus::Vocabulary& vocab,
                               nn::Tensor& word_embed) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open embeddings");
  if (word_embed.ndim() != 2) throw DataError("embeddings: word table must be 2-D");
  int dim = word_embed.dim(1);
  int loaded = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string word;
    fields >> word;
    int row = vocab.find(word);
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(dim));
    double v;
    while (fields >> v) values.push_back(v);
    if (static_cast<int>(values.size()) != dim) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                      " values, found " + std::to_string(values.size()));
    }
    if (row < 0) continue;
    for (int j = 0; j < dim; ++j) word_embed.at(row, j) = values[static_cast<std::size_t>(j)];
    ++loaded;
  }
  return loaded;
}

}  // namespace profilereg::model
