#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace spde_mlmc {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A pure
/// function of (counter, key): no state, so any draw can be reproduced on any
/// worker.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    [[nodiscard]] static Counter apply(Counter counter, Key key);
};

/// Logical position of one random sample path. Every (seed, level, sample,
/// replicate, stream) tuple maps to a disjoint Philox counter range; the
/// within-path position is the fourth counter word.
struct StreamCoordinate {
    std::uint64_t seed = 0;
    std::uint32_t level = 0;
    std::uint32_t sample = 0;
    std::uint32_t replicate = 0;
    /// Caller-defined study tag (schedule mode, top level, ...). 16 bits.
    std::uint32_t stream = 0;

    friend bool operator==(const StreamCoordinate&, const StreamCoordinate&) = default;
};

/// Standard normal variates addressed by a 64-bit index within a path.
/// Index 2b and 2b+1 come from one Philox block via Box-Muller.
class NormalStream {
public:
    explicit NormalStream(const StreamCoordinate& coord);

    /// Fills `out` with variates for indices [first, first + out.size()).
    void fill(std::uint64_t first, std::span<double> out) const;

    [[nodiscard]] double at(std::uint64_t index) const;

    /// Largest number of variates addressable in one path.
    static constexpr std::uint64_t kCapacity = std::uint64_t{1} << 33;

private:
    [[nodiscard]] std::array<double, 2> block(std::uint32_t b) const;

    Philox4x32::Key key_{};
    std::uint32_t words_[3]{};
};

/// Two 32-bit words to a double in (0, 1] with 53 random bits.
[[nodiscard]] double to_unit_open_closed(std::uint32_t hi, std::uint32_t lo);

}  // namespace spde_mlmc
