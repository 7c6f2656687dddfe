#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ardq/qnet.hpp"

namespace ardq {

/// Checkpoint file layout:
///   "ARDQ1\n"
///   <decimal byte length of the header>"\n"
///   <JSON header: config echo, seed, param_count, arrays [{name, shape, offset}]>
///   "\n"
///   param_count little-endian IEEE-754 doubles
/// Identical inputs produce identical bytes.
struct Checkpoint {
  nlohmann::json config;  // full experiment config echo
  std::uint64_t seed = 0;
  std::vector<ParamEntry> arrays;
  std::vector<double> params;
};

inline constexpr char kCheckpointMagic[] = "ARDQ1";

std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::string& bytes);

void write_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::string& path);

/// Throws std::runtime_error naming the first array whose name or shape differs.
void check_layout_matches(const ParamLayout& layout, const Checkpoint& ckpt);

}  // namespace ardq
