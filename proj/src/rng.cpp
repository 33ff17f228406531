#include "propcomp/rng.hpp"

#include <cmath>
#include <numbers>

namespace propcomp {

namespace {

constexpr std::uint32_t kMultiplier0 = 0xD2511F53;
constexpr std::uint32_t kMultiplier1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;
constexpr int kRounds = 10;

}  // namespace

Philox4x32::Counter Philox4x32::bijection(Counter ctr, Key key) {
    for (int round = 0; round < kRounds; ++round) {
        const std::uint64_t p0 = std::uint64_t{kMultiplier0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{kMultiplier1} * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

std::array<std::uint64_t, 2> Substream::words(std::uint64_t draw) const {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(draw),
                                  static_cast<std::uint32_t>(draw >> 32), key_.grid_index,
                                  key_.replication};
    const Philox4x32::Key key{static_cast<std::uint32_t>(key_.seed),
                              static_cast<std::uint32_t>(key_.seed >> 32)};
    const auto out = Philox4x32::bijection(ctr, key);
    return {(std::uint64_t{out[1]} << 32) | out[0], (std::uint64_t{out[3]} << 32) | out[2]};
}

double to_open_unit(std::uint64_t word) {
    return (static_cast<double>(word >> 12) + 0.5) * 0x1.0p-52;
}

double Substream::uniform(std::uint64_t draw) const { return to_open_unit(words(draw)[0]); }

double Substream::normal(std::uint64_t draw) const {
    const auto w = words(draw);
    const double radius = std::sqrt(-2.0 * std::log(to_open_unit(w[0])));
    return radius * std::cos(2.0 * std::numbers::pi * to_open_unit(w[1]));
}

}  // namespace propcomp
