#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string_view>

namespace stableval {

// Counter-based generator with a 64-bit mixing finalizer. Streams are
// addressed by a derived key, so any (key, counter) pair can be regenerated
// independently of draw order. Used everywhere determinism must survive
// resume: option layouts, the simulated backend, test meta-streams.
class keyed_prng {
 public:
  explicit keyed_prng(uint64_t key) : state_(key) {}

  static uint64_t mix64(uint64_t z);

  // length-prefixed FNV over the parts, finalized by mix64; a part list is
  // unambiguous ("ab","c" never collides with "a","bc")
  static uint64_t derive_key(std::initializer_list<std::string_view> parts);

  uint64_t next();

  // unbiased via rejection sampling
  uint64_t uniform_below(uint64_t n);

  // 53-bit mantissa uniform in [0, 1)
  double uniform01();

 private:
  uint64_t state_;
};

// one fresh 64-bit value from the operating system
uint64_t os_entropy64();

// injectable source of fresh seeds; defaults to os_entropy64
using entropy_source = std::function<uint64_t()>;

}  // namespace stableval
