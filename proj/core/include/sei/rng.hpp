#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace sei {

/// Seeded random stream. Independent streams are derived from a
/// (seed, stream id) pair so that e.g. data noise, fresh loss noise and crop
/// positions never share state.
class Rng {
   public:
    explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0);

    double uniform();                        // [0, 1)
    double uniform(double lo, double hi);    // [lo, hi)
    double normal();                         // N(0, 1)
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);  // inclusive
    double rademacher();                     // +1 or -1 with equal probability

    std::mt19937_64& engine() { return engine_; }

    /// Full textual state (engine and cached normal sample).
    std::string state() const;
    void set_state(const std::string& state);

    bool operator==(const Rng& other) const;

   private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Stable stream ids used across the library.
namespace streams {
inline constexpr std::uint64_t kInit = 1;
inline constexpr std::uint64_t kDataNoise = 2;
inline constexpr std::uint64_t kLoss = 3;
inline constexpr std::uint64_t kCrop = 4;
inline constexpr std::uint64_t kSplit = 5;
inline constexpr std::uint64_t kTexture = 6;
}  // namespace streams

}  // namespace sei
