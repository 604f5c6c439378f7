#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace swarmtune {

// Flat binary container for model and tensor snapshots: magic "TCNN", a u32
// format version, then length-prefixed named arrays of 64-bit little-endian
// reals. Entry order is preserved so identical inputs write identical bytes.
using ContainerEntry = std::pair<std::string, std::vector<double>>;
using Container = std::vector<ContainerEntry>;

inline constexpr std::uint32_t kContainerVersion = 1;

void write_container(std::ostream& out, const Container& entries);
void write_container(const std::filesystem::path& path, const Container& entries);
Container read_container(std::istream& in, const std::string& name);
Container read_container(const std::filesystem::path& path);

// Lookup helper: missing entries are a format error in whatever file the
// caller is loading, hence ParseError.
const std::vector<double>& container_entry(const Container& entries, const std::string& name,
                                           const std::string& source);

}  // namespace swarmtune
