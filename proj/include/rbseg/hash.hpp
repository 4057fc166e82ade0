#ifndef RBSEG_HASH_HPP
#define RBSEG_HASH_HPP

#include <cstddef>
#include <cstdint>
#include <string>

namespace rbseg {

// FNV-1a 64-bit; provenance hashing for configs and reports (not crypto).
inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s) {
  return fnv1a64(s.data(), s.size());
}

std::string hex64(std::uint64_t v);

// CRC-32 (IEEE 802.3 polynomial); payload integrity in checkpoint files.
std::uint32_t crc32(const void* data, std::size_t n);

}  // namespace rbseg

#endif  // RBSEG_HASH_HPP
