#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sqss::qsim {

/// Deterministic random stream (xoshiro256++ seeded via splitmix64).
///
/// One root stream is created per session and split into named substreams
/// ("dealer", "participant/3", "adversary", ...) so that every trial replays
/// bit-exactly from its seed, independent of platform or standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Derives an independent stream keyed by this stream's seed and `label`.
    Rng substream(std::string_view label) const;

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64();

    /// Uniform bit in {0, 1}.
    int bit();

    /// Uniform integer in [0, n); n must be >= 1.
    std::uint64_t index(std::uint64_t n);

    /// Uniform double in [0, 1) with 53 random bits.
    double real();

    /// Standard normal deviate (Box-Muller).
    double normal();

    /// Uniformly random k-subset of {0, ..., n-1}, returned sorted ascending.
    std::vector<std::size_t> sample_sorted(std::size_t n, std::size_t k);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_[4];
    std::uint64_t seed_;
    bool have_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

} // namespace sqss::qsim
