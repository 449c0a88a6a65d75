#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <utility>

namespace ragwb {

/// SplitMix64 (Steele, Lea, Flood). Used only to expand a 64-bit seed into
/// generator state.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();

private:
    std::uint64_t state_;
};

/// xoshiro256** 1.0 (Blackman, Vigna), state filled by four SplitMix64 draws.
///
/// Everything that must reproduce across implementations (dataset splits,
/// judge presentation order) goes through this generator and the two
/// routines below rather than <random> distributions, whose outputs are
/// implementation-defined.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed);

    std::uint64_t next();
    std::uint64_t operator()() { return next(); }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    /// Unbiased integer in [0, bound): draws r until r >= (2^64 - bound) % bound,
    /// then returns r % bound. `bound` must be positive.
    std::uint64_t below(std::uint64_t bound);

private:
    std::uint64_t s_[4];
};

/// Fisher-Yates from the back: for i = n-1 down to 1, swap(i, below(i+1)).
template <typename T>
void shuffle(std::span<T> items, Xoshiro256& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        using std::swap;
        swap(items[i - 1], items[j]);
    }
}

/// 64-bit FNV-1a, used to derive per-item seeds from stable string ids.
std::uint64_t fnv1a64(std::string_view text);

}  // namespace ragwb
