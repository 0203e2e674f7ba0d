#include "meg/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace meg {

namespace {

constexpr char kMagic[8] = {'M', 'E', 'G', 'C', 'K', 'P', 'T', '1'};

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t out = 0;
    for (int i = 0; i < 8; ++i) out |= ((v >> (i * 8)) & 0xff) << ((7 - i) * 8);
    return out;
  }
  return v;
}

void write_u64(std::ostream& os, std::uint64_t v) {
  const std::uint64_t le = to_le(v);
  os.write(reinterpret_cast<const char*>(&le), sizeof(le));
}

void write_f64(std::ostream& os, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof(bits));
  write_u64(os, bits);
}

std::uint64_t read_u64(std::istream& is) {
  std::uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!is) throw std::runtime_error("checkpoint: truncated file");
  return to_le(v);
}

double read_f64(std::istream& is) {
  const std::uint64_t bits = read_u64(is);
  double d;
  std::memcpy(&d, &bits, sizeof(d));
  return d;
}

}  // namespace

void save_checkpoint(const ParamRegistry& registry, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("checkpoint: cannot open " + path.string() + " for writing");
  os.write(kMagic, sizeof(kMagic));
  const auto names = registry.names();  // ascending
  write_u64(os, names.size());
  for (const std::string& name : names) {
    const Tensor& t = registry.param(name);
    write_u64(os, name.size());
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u64(os, t.rank());
    for (std::size_t d : t.shape) write_u64(os, d);
    for (double v : t.data) write_f64(os, v);
  }
  if (!os) throw std::runtime_error("checkpoint: write failed for " + path.string());
}

void load_checkpoint(ParamRegistry& registry, const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path.string());
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("checkpoint: bad magic in " + path.string());
  }
  const std::uint64_t count = read_u64(is);
  if (count != registry.size()) {
    throw std::runtime_error("checkpoint: file has " + std::to_string(count) +
                             " entries, registry has " + std::to_string(registry.size()));
  }
  for (std::uint64_t e = 0; e < count; ++e) {
    const std::uint64_t name_len = read_u64(is);
    std::string name(name_len, '\0');
    is.read(name.data(), static_cast<std::streamsize>(name_len));
    if (!is) throw std::runtime_error("checkpoint: truncated name");
    if (!registry.contains(name)) {
      throw std::runtime_error("checkpoint: unknown parameter '" + name + "'");
    }
    Tensor& dst = registry.param(name);
    const std::uint64_t rank = read_u64(is);
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) d = static_cast<std::size_t>(read_u64(is));
    if (shape != dst.shape) {
      throw std::runtime_error("checkpoint: shape mismatch for '" + name + "': file " +
                               shape_to_string(shape) + " vs registry " +
                               shape_to_string(dst.shape));
    }
    for (double& v : dst.data) v = read_f64(is);
  }
}

}  // namespace meg
