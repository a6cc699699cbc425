#pragma once

#include <cstdint>
#include <random>

namespace filtlab {

// splitmix64 step; used to mix (seed, stream, tag) into independent engine seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d4a919f38954a7ULL;
  return x ^ (x >> 31);
}

// Independent per-purpose stream tags. Each (seed, path, tag) triple gets its
// own engine, so path results never depend on how work is split across threads.
enum class StreamTag : std::uint64_t {
  Increments = 1,    // Brownian increments
  TimeSampling = 2,  // random time terminal draws
  Marks = 3,         // mark variables attached to times
};

inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream,
                                        StreamTag tag) {
  std::uint64_t h = splitmix64(seed ^ 0x8f1bbcdcbfa53e0bULL);
  h = splitmix64(h ^ stream);
  h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
  return h;
}

// One engine bound to a (seed, stream index, tag) triple.
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t stream, StreamTag tag)
      : engine_(derive_stream_seed(seed, stream, tag)) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  double exponential(double rate) {
    return std::exponential_distribution<double>(rate)(engine_);
  }
  // +1 or -1 with equal probability.
  double rademacher() { return uniform_(engine_) < 0.5 ? -1.0 : 1.0; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace filtlab
