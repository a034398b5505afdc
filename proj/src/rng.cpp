#include "stableval/rng.hpp"

#include <random>

#include "stableval/errors.hpp"
#include "stableval/util.hpp"

namespace stableval {

uint64_t keyed_prng::mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t keyed_prng::derive_key(std::initializer_list<std::string_view> parts) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& p : parts) {
    uint64_t len = p.size();
    char lenbytes[8];
    for (int i = 0; i < 8; ++i) lenbytes[i] = static_cast<char>((len >> (8 * i)) & 0xff);
    h = fnv1a64(h, std::string_view(lenbytes, 8));
    h = fnv1a64(h, p);
  }
  return mix64(h);
}

uint64_t keyed_prng::next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t keyed_prng::uniform_below(uint64_t n) {
  if (n == 0) throw validation_error("uniform_below(0)");
  const uint64_t threshold = (0 - n) % n;
  for (;;) {
    uint64_t r = next();
    if (r >= threshold) return r % n;
  }
}

double keyed_prng::uniform01() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

uint64_t os_entropy64() {
  static thread_local std::random_device rd;
  return (static_cast<uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace stableval
