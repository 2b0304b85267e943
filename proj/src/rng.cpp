#include "ishear/rng.hpp"

#include <cmath>
#include <numbers>

namespace ishear {

namespace {
constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
}  // namespace

std::array<std::uint32_t, 4> Philox::block(std::array<std::uint32_t, 4> c,
                                           std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    std::uint64_t p0 = std::uint64_t(kM0) * c[0];
    std::uint64_t p1 = std::uint64_t(kM1) * c[2];
    std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
    std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  return c;
}

Philox::Philox(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

void Philox::refill() {
  std::array<std::uint32_t, 4> ctr = {std::uint32_t(counter_), std::uint32_t(counter_ >> 32),
                                      std::uint32_t(stream_), std::uint32_t(stream_ >> 32)};
  buf_ = block(ctr, {std::uint32_t(seed_), std::uint32_t(seed_ >> 32)});
  ++counter_;
  pos_ = 0;
}

Philox::result_type Philox::operator()() {
  if (pos_ >= 4) refill();
  std::uint64_t v = (std::uint64_t(buf_[pos_]) << 32) | buf_[pos_ + 1];
  pos_ += 2;
  return v;
}

double Philox::uniform() {
  return (double((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double Philox::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform(), u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

std::uint64_t Philox::below(std::uint64_t n) {
  return std::uint64_t((static_cast<unsigned __int128>((*this)()) * n) >> 64);
}

}  // namespace ishear
