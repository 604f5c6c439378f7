#include "swarmtune/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

#include "swarmtune/errors.hpp"

namespace swarmtune {

namespace {

constexpr char kMagic[4] = {'T', 'C', 'N', 'N'};

// Integers and reals are written byte-by-byte little-endian so files are
// portable across hosts regardless of native byte order.
void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

std::uint32_t get_u32(std::istream& in, const std::string& name) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw ParseError(name + ": truncated container");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& in, const std::string& name) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw ParseError(name + ": truncated container");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void write_container(std::ostream& out, const Container& entries) {
  out.write(kMagic, 4);
  put_u32(out, kContainerVersion);
  put_u32(out, static_cast<std::uint32_t>(entries.size()));
  for (const auto& [name, values] : entries) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u64(out, values.size());
    for (double v : values) put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
}

void write_container(const std::filesystem::path& path, const Container& entries) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(path.string() + ": cannot open file for writing");
  write_container(out, entries);
  if (!out) throw InputError(path.string() + ": write failed");
}

Container read_container(std::istream& in, const std::string& name) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw ParseError(name + ": not a TCNN container (bad magic)");
  }
  const std::uint32_t version = get_u32(in, name);
  if (version != kContainerVersion) {
    throw ParseError(name + ": unsupported container version " + std::to_string(version));
  }
  const std::uint32_t count = get_u32(in, name);
  Container entries;
  entries.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t name_len = get_u32(in, name);
    if (name_len > 4096) throw ParseError(name + ": implausible entry name length");
    std::string entry_name(name_len, '\0');
    if (!in.read(entry_name.data(), name_len)) throw ParseError(name + ": truncated container");
    const std::uint64_t value_count = get_u64(in, name);
    if (value_count > (std::uint64_t{1} << 32)) {
      throw ParseError(name + ": implausible entry size for '" + entry_name + "'");
    }
    std::vector<double> values(value_count);
    for (auto& v : values) v = std::bit_cast<double>(get_u64(in, name));
    entries.emplace_back(std::move(entry_name), std::move(values));
  }
  return entries;
}

Container read_container(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  return read_container(in, path.string());
}

const std::vector<double>& container_entry(const Container& entries, const std::string& name,
                                           const std::string& source) {
  for (const auto& [entry_name, values] : entries) {
    if (entry_name == name) return values;
  }
  throw ParseError(source + ": missing container entry '" + name + "'");
}

}  // namespace swarmtune
