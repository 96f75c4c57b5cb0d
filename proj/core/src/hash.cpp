#include "metaforge/util/hash.hpp"

#include <openssl/evp.h>

#include "metaforge/common.hpp"
#include "metaforge/util/strings.hpp"

namespace metaforge::hash {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t i) {
  std::uint64_t state = seed + i * 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t seeded_hash(std::uint64_t seed, std::string_view bytes) {
  return mix64(fnv1a64(bytes) ^ mix64(seed ^ 0xd6e8feb86659fd93ULL));
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr)) {
    throw Error(ErrorKind::io, "sha256 failed");
  }
  return strings::hex_encode(std::string_view(reinterpret_cast<char*>(digest), len));
}

std::uint64_t bounded(std::uint64_t value, std::uint64_t n) {
  return n == 0 ? 0 : value % n;
}

}  // namespace metaforge::hash
