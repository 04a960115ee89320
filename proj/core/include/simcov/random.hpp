#pragma once

#include <cstdint>

namespace simcov {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream seed for `counter` under `master`; counter-based, so
/// repetitions can be generated in any order.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) noexcept {
    return mix64(mix64(master) ^ mix64(counter + 0x632be59bd9b4e019ULL));
}

}  // namespace simcov
