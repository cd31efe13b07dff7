// SPDX-License-Identifier: Apache-2.0
//
// Splittable deterministic random streams.  The contract is the normative
// part: identical (root_seed, stream_index) gives an identical sequence, and
// distinct stream_index values give statistically independent streams.  The
// engine behind the contract is xoshiro256++ with per-stream state derived
// through SplitMix64, which is the standard seeding recipe for that family.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <thread>
#include <vector>

namespace tauber {

struct SeedSpec {
  std::uint64_t root_seed = 0;
  std::uint64_t stream_index = 0;

  // Stream reserved for the c-th work chunk of a bulk operation.  Bulk
  // Monte Carlo routines consume stream indices [stream_index,
  // stream_index + n_chunks); callers wanting unrelated streams should space
  // their indices accordingly.
  SeedSpec chunk(std::uint64_t c) const { return {root_seed, stream_index + c}; }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

class RngStream {
 public:
  explicit RngStream(SeedSpec seed) {
    // Two SplitMix64 passes: one over the root seed, one over the stream
    // index mixed with the root entropy.  Bijective mixing keeps distinct
    // (root, index) pairs on distinct, well-spread xoshiro states.
    std::uint64_t s0 = seed.root_seed;
    const std::uint64_t a = detail::splitmix64(s0);
    const std::uint64_t b = detail::splitmix64(s0);
    std::uint64_t s1 = a ^ (seed.stream_index * 0x9E3779B97F4A7C15ULL + b);
    for (auto& w : state_) w = detail::splitmix64(s1);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0)
      state_[0] = 0x9E3779B97F4A7C15ULL;
  }

  std::uint64_t next_u64() {
    auto& s = state_;
    const std::uint64_t result = detail::rotl(s[0] + s[3], 23) + s[0];
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = detail::rotl(s[3], 45);
    return result;
  }

  // Uniform on [0, 1), 53 random bits.
  double uniform01() { return (next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe to pass to log.
  double uniform_pos() { return 1.0 - uniform01(); }

  // Standard normal via Box-Muller; the paired value is cached.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
    const double theta = 6.2831853071795864769 * uniform01();
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
  }

 private:
  std::uint64_t state_[4];
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// Runs `fn(chunk_index, begin, end, rng)` over [0, n) split into fixed-size
// chunks, chunk c drawing from stream seed.chunk(c).  Results must be written
// into per-chunk slots by the caller and reduced in chunk order afterwards;
// that makes every derived statistic independent of the thread count.
template <class Fn>
void for_each_chunk(std::size_t n, std::size_t chunk_size, SeedSpec seed,
                    int threads, Fn&& fn) {
  if (chunk_size == 0) chunk_size = 1;
  const std::size_t n_chunks = (n + chunk_size - 1) / chunk_size;
  auto run_chunk = [&](std::size_t c) {
    const std::size_t begin = c * chunk_size;
    const std::size_t end = std::min(n, begin + chunk_size);
    RngStream rng(seed.chunk(c));
    fn(c, begin, end, rng);
  };
  if (threads <= 1 || n_chunks <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      run_chunk(c);
    }
  };
  std::vector<std::thread> pool;
  const int nt = std::min<std::size_t>(threads, n_chunks);
  pool.reserve(nt);
  for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

inline std::size_t chunk_count(std::size_t n, std::size_t chunk_size) {
  return chunk_size == 0 ? n : (n + chunk_size - 1) / chunk_size;
}

}  // namespace tauber
