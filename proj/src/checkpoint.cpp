#include "pome/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "pome/error.hpp"

namespace pome {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(b, 4);
}

void put_f64(std::ostream& os, double v) {
  const std::uint64_t u = std::bit_cast<std::uint64_t>(v);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((u >> (8 * i)) & 0xFF);
  os.write(b, 8);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw ContractError("checkpoint truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw ContractError("checkpoint truncated");
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(u);
}

}  // namespace

void save_checkpoint(const std::string& path, const ParamSet& params) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ContractError("cannot open checkpoint for writing: " + path);
  os.write(kCheckpointMagic, 4);
  put_u32(os, kCheckpointVersion);
  put_u32(os, static_cast<std::uint32_t>(params.count()));
  for (std::size_t p = 0; p < params.count(); ++p) {
    const std::string& name = params.names()[p];
    const Array& a = params.at(p);
    put_u32(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u32(os, static_cast<std::uint32_t>(a.shape.size()));
    for (int e : a.shape) put_u32(os, static_cast<std::uint32_t>(e));
    for (double v : a.data) put_f64(os, v);
  }
  if (!os) throw ContractError("failed writing checkpoint: " + path);
}

ParamSet load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ContractError("cannot open checkpoint: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kCheckpointMagic, 4) != 0)
    throw ContractError("not a checkpoint file (bad magic): " + path);
  const std::uint32_t version = get_u32(is);
  if (version != kCheckpointVersion)
    throw ContractError("unsupported checkpoint version " + std::to_string(version));

  ParamSet params;
  const std::uint32_t count = get_u32(is);
  for (std::uint32_t p = 0; p < count; ++p) {
    const std::uint32_t name_len = get_u32(is);
    if (name_len > 4096) throw ContractError("checkpoint corrupt: absurd name length");
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    if (!is) throw ContractError("checkpoint truncated");
    const std::uint32_t ndim = get_u32(is);
    if (ndim > 8) throw ContractError("checkpoint corrupt: absurd rank");
    std::vector<int> shape(ndim);
    for (auto& e : shape) e = static_cast<int>(get_u32(is));
    Array a = Array::zeros(shape);
    for (double& v : a.data) v = get_f64(is);
    params.add(name, std::move(a));
  }
  return params;
}

}  // namespace pome
