#include "metaphor/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "metaphor/errors.hpp"

namespace metaphor {

namespace {

constexpr std::array<char, 8> kMagic = {'M', 'T', 'P', 'H', 'C', 'K', 'P', 'T'};
constexpr std::uint64_t kMaxBlob = std::uint64_t{1} << 32;

template <typename T>
void write_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xff);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T read_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw ParseError("checkpoint", 0, "truncated file");
  }
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[i]) << (8 * i);
  return value;
}

void write_string(std::ostream& out, const std::string& s) {
  write_le<std::uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
  const auto n = read_le<std::uint64_t>(in);
  if (n > kMaxBlob) throw ParseError("checkpoint", 0, "implausible string length");
  std::string s(n, '\0');
  if (!in.read(s.data(), static_cast<std::streamsize>(n))) {
    throw ParseError("checkpoint", 0, "truncated file");
  }
  return s;
}

}  // namespace

void save_checkpoint(std::ostream& out, const Model& model, const TrainConfig& config) {
  if (config.model != model.config()) throw ConfigError("checkpoint config does not match the model");
  out.write(kMagic.data(), kMagic.size());
  write_le<std::uint32_t>(out, kCheckpointVersion);
  write_string(out, to_json(config).dump());
  const auto params = model.named_parameters();
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, t] : params) {
    write_string(out, name);
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) write_le<std::uint64_t>(out, d);
    for (double v : t.data()) write_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  if (!out) throw Error("failed writing checkpoint");
}

void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const TrainConfig& config) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  save_checkpoint(out, model, config);
}

LoadedCheckpoint load_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw ParseError("checkpoint", 0, "not a checkpoint file (bad magic)");
  }
  const auto version = read_le<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw ParseError("checkpoint", 0, "unsupported checkpoint version " + std::to_string(version));
  }
  LoadedCheckpoint loaded;
  try {
    loaded.config = train_config_from_json(nlohmann::json::parse(read_string(in)));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("checkpoint", 0, std::string("bad config block: ") + e.what());
  }
  loaded.model = make_model(loaded.config.model, 0);

  const auto count = read_le<std::uint32_t>(in);
  std::vector<NamedTensor> values;
  for (std::uint32_t k = 0; k < count; ++k) {
    auto name = read_string(in);
    const auto rank = read_le<std::uint32_t>(in);
    if (rank > 8) throw ParseError("checkpoint", 0, "implausible tensor rank");
    Shape shape(rank);
    for (auto& d : shape) d = read_le<std::uint64_t>(in);
    const auto n = shape_size(shape);
    if (n > kMaxBlob) throw ParseError("checkpoint", 0, "implausible tensor size");
    std::vector<double> data(n);
    for (auto& v : data) v = std::bit_cast<double>(read_le<std::uint64_t>(in));
    values.emplace_back(std::move(name), Tensor::constant(std::move(shape), std::move(data)));
  }
  load_parameters(*loaded.model, values);
  return loaded;
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open checkpoint");
  return load_checkpoint(in);
}

}  // namespace metaphor
