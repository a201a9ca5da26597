#pragma once

#include <array>
#include <cstdint>

namespace skewguard {

/// Seedable, splittable random stream.
///
/// State is xoshiro256++ filled by SplitMix64 over a hash of
/// (seed, stream-id), so equal keys give bitwise-identical sequences and
/// distinct stream-ids give statistically independent ones. Normal draws use
/// the Box-Muller transform (polar form is deliberately NOT used); the
/// algorithm is fixed so golden sequences stay stable across versions.
///
/// A stream is owned by exactly one consumer; derive independent children
/// with substream() instead of sharing.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64();

    /// Uniform in [0,1) with 53-bit resolution.
    double next_double();

    /// Unbiased uniform integer in [0, n); n must be > 0.
    std::uint64_t next_below(std::uint64_t n);

    /// Standard normal via Box-Muller; the sine mate is cached.
    double next_normal();

    /// Independent child stream keyed by (seed, stream-id, tag). Pure
    /// function of the key, not of draw position: safe to call from
    /// parallel code that agrees on tags.
    RngStream substream(std::uint64_t tag) const;

private:
    std::array<std::uint64_t, 4> state_{};
    std::uint64_t seed_ = 0;
    std::uint64_t stream_id_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace skewguard
