#pragma once

#include <array>
#include <cstdint>

namespace propcomp {

/**
 * Philox4x32-10 counter-based generator (Salmon et al., "Parallel random
 * numbers: as easy as 1, 2, 3", SC'11).
 *
 * A pure function of (key, counter): no state, so any draw of any substream
 * can be computed independently. The algorithm and constants are fixed;
 * changing them breaks reproducibility of every stored experiment.
 */
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter bijection(Counter counter, Key key);
};

/// Identifies one substream: experiment seed, grid point, replication.
struct StreamKey {
    std::uint64_t seed = 0;
    std::uint32_t grid_index = 0;
    std::uint32_t replication = 0;
};

/**
 * Random access into a substream. Draw d maps to the Philox block with
 * counter (d_lo, d_hi, grid_index, replication) under key (seed_lo, seed_hi).
 */
class Substream {
public:
    explicit Substream(StreamKey key) : key_(key) {}

    /// Two 64-bit words of draw d.
    std::array<std::uint64_t, 2> words(std::uint64_t draw) const;
    /// Uniform on the open interval (0, 1), 52-bit resolution.
    double uniform(std::uint64_t draw) const;
    /// Standard normal by Box-Muller (cosine branch) on the two words of draw d.
    double normal(std::uint64_t draw) const;

    const StreamKey& key() const noexcept { return key_; }

private:
    StreamKey key_;
};

/// Maps a 64-bit word to the cell midpoints (k + 1/2) / 2^52. The extremes
/// 2^-53 and 1 - 2^-53 are exact, so 0 and 1 are never returned.
double to_open_unit(std::uint64_t word);

}  // namespace propcomp
