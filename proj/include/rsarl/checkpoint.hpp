#ifndef RSARL_CHECKPOINT_HPP_
#define RSARL_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <stdexcept>

#include "rsarl/valuenet.hpp"

namespace rsarl {

/// Binary checkpoint layout, all integers little-endian:
///
///   8 bytes  magic "RSARLNET"
///   u32      format version
///   u32      byte length L of the network configuration (JSON text)
///   L bytes  network configuration
///   u64      parameter count N
///   N x f64  parameters in ValueNetParams flat order (IEEE-754 bits)
inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  enum class Kind { io, parse, version, dimension };
  CheckpointError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

void save_checkpoint(const ValueNetParams& params, const std::filesystem::path& path);

ValueNetParams load_checkpoint(const std::filesystem::path& path);

/// Also fails with Kind::dimension unless the stored network configuration
/// equals `expected`.
ValueNetParams load_checkpoint(const std::filesystem::path& path, const NetworkConfig& expected);

}  // namespace rsarl

#endif  // RSARL_CHECKPOINT_HPP_
