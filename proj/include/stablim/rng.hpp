#pragma once

#include <array>
#include <cstdint>

namespace stablim {

// Philox4x32 with 10 rounds. Counter-based, so any draw is addressable
// directly from (key, counter) without advancing a state.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Mixes a master seed with an index into a well-separated child seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// Stream identifiers keep independent uses of one seed apart.
namespace streams {
inline constexpr std::uint32_t primary = 0;
inline constexpr std::uint32_t secondary = 1;
inline constexpr std::uint32_t tertiary = 2;
inline constexpr std::uint32_t initial = 3;
}  // namespace streams

// All randomness consumed at one (seed, stream, index) position. Successive
// calls walk a sub-counter, so rejection samplers stay a pure function of
// the position.
class IndexedStream {
 public:
  IndexedStream(std::uint64_t seed, std::uint32_t stream, std::uint64_t index) noexcept;

  std::uint64_t next_u64() noexcept;
  // Uniform on the open interval (0, 1).
  double uniform() noexcept;
  double normal() noexcept;
  double exponential() noexcept;
  // Gamma(shape, 1) by Marsaglia and Tsang.
  double gamma(double shape) noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::uint64_t index_;
  std::uint32_t stream_;
  std::uint32_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int used_ = 2;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace stablim
