#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lelek {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

// Error hierarchy. Every failure the library reports derives from Error so
// callers can catch one type.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainMismatch : Error {
  using Error::Error;
};

struct InvalidStructure : Error {
  using Error::Error;
};

struct NotEpi : Error {
  using Error::Error;
};

struct NotOnto : Error {
  using Error::Error;
};

struct NotInFPlus : Error {
  using Error::Error;
};

struct DepthExhausted : Error {
  using Error::Error;
};

// Deterministic across standard libraries: std::uniform_int_distribution is
// implementation-defined, so bounded draws go through this SplitMix64 stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % bound;
  }

  bool coin() { return (next() >> 63) != 0; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace lelek
