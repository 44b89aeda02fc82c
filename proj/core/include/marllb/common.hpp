#pragma once

#include <cstdint>
#include <cstring>
#include <string_view>

namespace marllb {

// FNV-1a, 64 bit. Used for config hashing, trace hashing and seed derivation.
inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = kFnvOffset) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = kFnvOffset) {
  return fnv1a64(s.data(), s.size(), h);
}

// Incremental hasher for traces. Doubles are hashed by bit pattern, so two
// traces hash equal only if they are bit-identical.
struct HashAccumulator {
  std::uint64_t h = kFnvOffset;

  void add_bytes(const void* data, std::size_t n) { h = fnv1a64(data, n, h); }
  void add(std::uint64_t v) { add_bytes(&v, sizeof v); }
  void add(std::int64_t v) { add_bytes(&v, sizeof v); }
  void add(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    add(bits);
  }
  void add(std::string_view s) { add_bytes(s.data(), s.size()); }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// One top-level seed fans out into independent named streams. Every random
// draw in the system goes through a stream derived here, which is what makes
// episodes bit-reproducible per (config, seed).
inline std::uint64_t derive_stream_seed(std::uint64_t base, std::string_view stream,
                                        std::uint64_t index = 0) {
  std::uint64_t h = fnv1a64(stream);
  h = splitmix64(h ^ splitmix64(base));
  return splitmix64(h ^ (0x632be59bd9b4e019ull * (index + 1)));
}

}  // namespace marllb
