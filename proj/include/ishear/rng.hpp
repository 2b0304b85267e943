#pragma once
#include <array>
#include <cstdint>
#include <limits>

namespace ishear {

// Philox4x32-10 counter-based generator. Every (seed, stream) pair is an
// independent sequence; position is the block counter, so state is tiny and
// copies are cheap.
class Philox {
 public:
  using result_type = std::uint64_t;

  Philox(std::uint64_t seed = 0, std::uint64_t stream = 0);

  result_type operator()();
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  // Uniform on the open interval (0, 1).
  double uniform();
  // Standard normal (Box-Muller, second value cached).
  double normal();
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key);

 private:
  void refill();
  std::uint64_t seed_, stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ishear
