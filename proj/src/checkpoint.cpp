#include "ardq/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ardq {

namespace {

std::string shape_string(const std::vector<int>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? "," : "") + std::to_string(shape[i]);
  return s + "]";
}

}  // namespace

std::string encode_checkpoint(const Checkpoint& ckpt) {
  nlohmann::json header;
  header["config"] = ckpt.config;
  header["seed"] = ckpt.seed;
  header["param_count"] = ckpt.params.size();
  header["dtype"] = "float64-le";
  nlohmann::json arrays = nlohmann::json::array();
  for (const ParamEntry& e : ckpt.arrays) arrays.push_back({{"name", e.name}, {"shape", e.shape}, {"offset", e.offset}});
  header["arrays"] = arrays;
  const std::string text = header.dump();

  std::string out = std::string(kCheckpointMagic) + "\n" + std::to_string(text.size()) + "\n" + text + "\n";
  out.reserve(out.size() + ckpt.params.size() * 8);
  for (double v : ckpt.params) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFFu));
  }
  return out;
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  const std::string magic = std::string(kCheckpointMagic) + "\n";
  if (bytes.compare(0, magic.size(), magic) != 0) throw std::runtime_error("checkpoint: bad magic (expected ARDQ1)");
  std::size_t pos = magic.size();
  const std::size_t nl = bytes.find('\n', pos);
  if (nl == std::string::npos) throw std::runtime_error("checkpoint: truncated header length");
  std::size_t len = 0;
  try {
    len = std::stoul(bytes.substr(pos, nl - pos));
  } catch (const std::exception&) {
    throw std::runtime_error("checkpoint: malformed header length");
  }
  pos = nl + 1;
  if (pos + len + 1 > bytes.size()) throw std::runtime_error("checkpoint: truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(pos, len));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("checkpoint: header is not valid JSON: ") + e.what());
  }
  pos += len + 1;

  Checkpoint ckpt;
  ckpt.config = header.at("config");
  ckpt.seed = header.at("seed").get<std::uint64_t>();
  const auto count = header.at("param_count").get<std::size_t>();
  for (const auto& a : header.at("arrays")) {
    ParamEntry e;
    e.name = a.at("name").get<std::string>();
    e.shape = a.at("shape").get<std::vector<int>>();
    e.offset = a.at("offset").get<std::size_t>();
    e.size = 1;
    for (int d : e.shape) e.size *= static_cast<std::size_t>(d);
    if (e.offset + e.size > count) throw std::runtime_error("checkpoint: array '" + e.name + "' overruns the data");
    ckpt.arrays.push_back(std::move(e));
  }
  if (bytes.size() - pos != count * 8)
    throw std::runtime_error("checkpoint: expected " + std::to_string(count * 8) + " bytes of parameters, found " +
                             std::to_string(bytes.size() - pos));
  ckpt.params.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + i * 8 + static_cast<std::size_t>(b)]))
              << (8 * b);
    ckpt.params[i] = std::bit_cast<double>(bits);
  }
  return ckpt;
}

void write_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open checkpoint '" + path + "' for writing");
  const std::string bytes = encode_checkpoint(ckpt);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing checkpoint '" + path + "'");
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return decode_checkpoint(ss.str());
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void check_layout_matches(const ParamLayout& layout, const Checkpoint& ckpt) {
  const auto& want = layout.entries();
  for (std::size_t i = 0; i < std::max(want.size(), ckpt.arrays.size()); ++i) {
    if (i >= want.size())
      throw std::runtime_error("checkpoint has extra array '" + ckpt.arrays[i].name + "' the network does not use");
    if (i >= ckpt.arrays.size()) throw std::runtime_error("checkpoint lacks array '" + want[i].name + "'");
    const ParamEntry& a = want[i];
    const ParamEntry& b = ckpt.arrays[i];
    if (a.name != b.name)
      throw std::runtime_error("checkpoint array #" + std::to_string(i) + " is '" + b.name + "', network expects '" +
                               a.name + "'");
    if (a.shape != b.shape || a.offset != b.offset)
      throw std::runtime_error("checkpoint array '" + a.name + "' has shape " + shape_string(b.shape) +
                               ", network expects " + shape_string(a.shape));
  }
  if (ckpt.params.size() != layout.total()) throw std::runtime_error("checkpoint parameter count mismatch");
}

}  // namespace ardq
