#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "ttlab/errors.hpp"

// Little-endian binary readers/writers for the checkpoint formats.
namespace ttlab::binio {

static_assert(std::endian::native == std::endian::little,
              "checkpoint io assumes a little-endian host");

template <typename T>
void write_le(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_le(std::istream& in, const char* what) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw FormatError(std::string("truncated file while reading ") + what);
  return value;
}

inline void write_magic(std::ostream& out, const char (&magic)[9]) {
  out.write(magic, 8);
}

inline void expect_magic(std::istream& in, const char (&magic)[9], const char* what) {
  char buf[8];
  in.read(buf, 8);
  if (!in || std::memcmp(buf, magic, 8) != 0)
    throw FormatError(std::string(what) + ": bad magic string");
}

inline void expect_version(std::istream& in, std::uint32_t supported, const char* what) {
  const auto version = read_le<std::uint32_t>(in, "format version");
  if (version > supported)
    throw FormatError(std::string(what) + ": format version " + std::to_string(version) +
                      " is newer than supported version " + std::to_string(supported));
  if (version == 0 || version < supported)
    throw FormatError(std::string(what) + ": unsupported format version " +
                      std::to_string(version));
}

}  // namespace ttlab::binio
