#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace leibenson {

/// Philox4x64-10 counter-based generator (Salmon et al., SC'11). Output is a
/// pure function of (counter, key), so any particle/step pair can be drawn
/// independently of evaluation order or thread assignment.
class Philox4x64 {
 public:
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static Counter generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      ctr = single_round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
  static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
  static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

  static Counter single_round(const Counter& c, const Key& k) noexcept {
    const unsigned __int128 p0 = static_cast<unsigned __int128>(kMul0) * c[0];
    const unsigned __int128 p1 = static_cast<unsigned __int128>(kMul1) * c[2];
    const auto hi0 = static_cast<std::uint64_t>(p0 >> 64);
    const auto lo0 = static_cast<std::uint64_t>(p0);
    const auto hi1 = static_cast<std::uint64_t>(p1 >> 64);
    const auto lo1 = static_cast<std::uint64_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// Uniform double in the open interval (0, 1) from the top 52 bits. With 53
/// bits the largest value would round up to 1.
inline double to_unit_open(std::uint64_t v) noexcept {
  return (static_cast<double>(v >> 12) + 0.5) * 0x1.0p-52;
}

/// Stream purposes keep draws for different roles disjoint under one seed.
enum class StreamPurpose : std::uint64_t {
  initial = 1,
  step = 2,
  restart_initial = 3,
  restart_step = 4,
};

/// Fills `out[0..n)` with standard normals for the given particle and step.
/// Each Philox block yields four uniforms, i.e. two Box–Muller pairs.
inline void gaussian_block(std::uint64_t seed, StreamPurpose purpose, std::uint64_t particle,
                           std::uint64_t step, std::uint64_t substep, double* out, int n) noexcept {
  const Philox4x64::Key key{seed, static_cast<std::uint64_t>(purpose)};
  std::uint64_t block = 0;
  for (int i = 0; i < n; i += 4, ++block) {
    const auto bits = Philox4x64::generate({particle, step, substep, block}, key);
    for (int j = 0; j < 4 && i + j < n; j += 2) {
      const double u1 = to_unit_open(bits[j]);
      const double u2 = to_unit_open(bits[j + 1]);
      const double radius = std::sqrt(-2.0 * std::log(u1));
      const double angle = 2.0 * std::numbers::pi * u2;
      out[i + j] = radius * std::cos(angle);
      if (i + j + 1 < n) out[i + j + 1] = radius * std::sin(angle);
    }
  }
}

/// One uniform in (0,1) for the given particle and step (substep slot 0, block
/// index reserved for uniforms).
inline double uniform_draw(std::uint64_t seed, StreamPurpose purpose, std::uint64_t particle,
                           std::uint64_t step) noexcept {
  const Philox4x64::Key key{seed, static_cast<std::uint64_t>(purpose)};
  const auto bits = Philox4x64::generate({particle, step, 0, ~std::uint64_t{0}}, key);
  return to_unit_open(bits[0]);
}

}  // namespace leibenson
