#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace siu {

using Rng = std::mt19937_64;

// Seeds a generator from an ordered list of 64-bit words, e.g. {seed, t, agent}.
// Equal word lists give equal streams.
inline Rng make_rng(std::initializer_list<std::uint64_t> words) {
  std::seed_seq::result_type buf[16];
  std::size_t k = 0;
  for (std::uint64_t w : words) {
    if (k + 2 > 16) break;
    buf[k++] = static_cast<std::seed_seq::result_type>(w & 0xffffffffULL);
    buf[k++] = static_cast<std::seed_seq::result_type>(w >> 32);
  }
  std::seed_seq seq(buf, buf + k);
  return Rng(seq);
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace siu
