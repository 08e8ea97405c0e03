#include "searchnet/rng.hpp"

#include <bit>

namespace searchnet {

double bits_to_unit(std::uint64_t bits) noexcept {
    return std::bit_cast<double>((bits >> 12) | 0x3FF0000000000000ULL) - 1.0;
}

std::uint64_t Rng::below(std::uint64_t bound) noexcept {
    // Lemire's multiply-shift with rejection of the biased low region.
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<unsigned __int128>(next()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace searchnet
