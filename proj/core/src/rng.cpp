#include "spde_mlmc/rng.hpp"

#include <cmath>
#include <numbers>

#include "spde_mlmc/error.hpp"

namespace spde_mlmc {

namespace {
constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
constexpr int kRounds = 10;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}
}  // namespace

Philox4x32::Counter Philox4x32::apply(Counter c, Key k) {
    for (int r = 0; r < kRounds; ++r) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, c[0], hi0, lo0);
        mulhilo(kMul1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kWeyl0;
        k[1] += kWeyl1;
    }
    return c;
}

double to_unit_open_closed(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) | (lo >> 11);
    return static_cast<double>(bits + 1) * 0x1.0p-53;
}

NormalStream::NormalStream(const StreamCoordinate& coord) {
    if (coord.stream > 0xFFFFu) throw CapacityError("StreamCoordinate: stream tag exceeds 16 bits");
    if (coord.level > 0xFFFFu) throw CapacityError("StreamCoordinate: level exceeds 16 bits");
    key_ = {static_cast<std::uint32_t>(coord.seed), static_cast<std::uint32_t>(coord.seed >> 32)};
    words_[0] = coord.sample;
    words_[1] = coord.replicate;
    words_[2] = (coord.level << 16) | coord.stream;
}

std::array<double, 2> NormalStream::block(std::uint32_t b) const {
    const auto w = Philox4x32::apply({b, words_[0], words_[1], words_[2]}, key_);
    const double u1 = to_unit_open_closed(w[0], w[1]);
    const double u2 = to_unit_open_closed(w[2], w[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

void NormalStream::fill(std::uint64_t first, std::span<double> out) const {
    if (first + out.size() > kCapacity) throw CapacityError("NormalStream: path needs more variates than addressable");
    std::size_t pos = 0;
    std::uint64_t index = first;
    if (index % 2 == 1 && pos < out.size()) {
        out[pos++] = block(static_cast<std::uint32_t>(index / 2))[1];
        ++index;
    }
    while (pos + 1 < out.size()) {
        const auto z = block(static_cast<std::uint32_t>(index / 2));
        out[pos++] = z[0];
        out[pos++] = z[1];
        index += 2;
    }
    if (pos < out.size()) out[pos] = block(static_cast<std::uint32_t>(index / 2))[0];
}

double NormalStream::at(std::uint64_t index) const {
    if (index >= kCapacity) throw CapacityError("NormalStream: index out of range");
    return block(static_cast<std::uint32_t>(index / 2))[index % 2];
}

}  // namespace spde_mlmc
