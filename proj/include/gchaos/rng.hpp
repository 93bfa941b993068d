#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <thread>
#include <vector>

namespace gchaos {

// Fixed role offsets so every randomized stage derives its substream from
// one master seed.
inline constexpr std::uint64_t kRoleSampling = 1;
inline constexpr std::uint64_t kRoleBootstrap = 2;
inline constexpr std::uint64_t kRoleFamily = 3;
inline constexpr std::uint64_t kRoleRestart = 4;
inline constexpr std::uint64_t kRoleContraction = 5;

inline constexpr std::size_t kSampleChunk = 4096;

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t role,
                                    std::uint64_t index) {
  return mix64(mix64(master ^ mix64(role)) ^ index);
}

// Standard normal generator: mt19937_64 feeding Box-Muller over 53-bit
// uniforms. The algorithm is fixed so streams are reproducible from the seed.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : eng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(angle);
    have_spare_ = true;
    return r * std::cos(angle);
  }

  void fill(std::span<double> out) {
    for (double& v : out) v = next();
  }

  std::uint64_t next_u64() { return eng_(); }

  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Static strided split; callers write results into preallocated slots so the
// outcome is identical for any thread count.
inline void parallel_for(std::size_t count, int threads,
                         const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::size_t workers =
      std::min(static_cast<std::size_t>(threads), count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace gchaos
