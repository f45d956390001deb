#include "rsarl/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "rsarl/config.hpp"

namespace rsarl {
namespace {

constexpr char kMagic[8] = {'R', 'S', 'A', 'R', 'L', 'N', 'E', 'T'};

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xffU));
  }
}

class Reader {
 public:
  Reader(const std::string& bytes, const std::string& path) : bytes_(bytes), path_(path) {}

  template <typename T>
  T get_le() {
    need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }

  std::string get_bytes(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw CheckpointError(CheckpointError::Kind::parse,
                            path_ + ": truncated checkpoint (offset " + std::to_string(pos_) + ")");
    }
  }

  const std::string& bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const ValueNetParams& params, const std::filesystem::path& path) {
  const std::string config = network_to_json(params.config).dump();
  const std::vector<double> flat = params.flatten();

  std::string bytes(kMagic, sizeof kMagic);
  put_le<std::uint32_t>(bytes, kCheckpointVersion);
  put_le<std::uint32_t>(bytes, static_cast<std::uint32_t>(config.size()));
  bytes += config;
  put_le<std::uint64_t>(bytes, flat.size());
  for (const double v : flat) put_le<std::uint64_t>(bytes, std::bit_cast<std::uint64_t>(v));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError(CheckpointError::Kind::io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError(CheckpointError::Kind::io, "write failed: " + path.string());
}

ValueNetParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(CheckpointError::Kind::io, "cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string name = path.string();
  Reader r(bytes, name);

  if (r.get_bytes(sizeof kMagic) != std::string(kMagic, sizeof kMagic)) {
    throw CheckpointError(CheckpointError::Kind::parse, name + ": not a checkpoint file");
  }
  const auto version = r.get_le<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw CheckpointError(CheckpointError::Kind::version,
                          name + ": checkpoint format version " + std::to_string(version) +
                              ", this build reads version " + std::to_string(kCheckpointVersion));
  }
  const auto config_len = r.get_le<std::uint32_t>();
  const std::string config_text = r.get_bytes(config_len);

  NetworkConfig cfg;
  try {
    cfg = network_from_json(nlohmann::ordered_json::parse(config_text));
    cfg.validate();
  } catch (const std::exception& e) {
    throw CheckpointError(CheckpointError::Kind::parse,
                          name + ": bad network configuration: " + e.what());
  }

  ValueNetParams params = ValueNetParams::zeros(cfg);
  const auto count = r.get_le<std::uint64_t>();
  if (count != params.size()) {
    throw CheckpointError(CheckpointError::Kind::dimension,
                          name + ": " + std::to_string(count) +
                              " parameters stored, configuration implies " +
                              std::to_string(params.size()));
  }
  std::vector<double> flat(count);
  for (auto& v : flat) v = std::bit_cast<double>(r.get_le<std::uint64_t>());
  if (!r.at_end()) {
    throw CheckpointError(CheckpointError::Kind::parse, name + ": trailing bytes after parameters");
  }
  params.assign(flat);
  if (!params.all_finite()) {
    throw CheckpointError(CheckpointError::Kind::parse, name + ": non-finite parameter values");
  }
  return params;
}

ValueNetParams load_checkpoint(const std::filesystem::path& path, const NetworkConfig& expected) {
  ValueNetParams params = load_checkpoint(path);
  if (!(params.config == expected)) {
    throw CheckpointError(CheckpointError::Kind::dimension,
                          path.string() + ": network configuration " +
                              network_to_json(params.config).dump() +
                              " does not match the run configuration " +
                              network_to_json(expected).dump());
  }
  return params;
}

}  // namespace rsarl
