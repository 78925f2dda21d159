#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace bloomclf {

// All randomness in the project flows through this one generator so runs are
// reproducible from a single seed. The algorithm is pinned: std::mt19937_64
// (fully specified by the C++ standard), index draws via engine() % n, and
// Fisher-Yates shuffles from the back. Reports and manifests record the name
// returned by rng_algorithm().
using Rng = std::mt19937_64;

inline const char* rng_algorithm() { return "mt19937_64/mod-draw/fisher-yates"; }

inline std::size_t draw_index(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(n));
}

template <typename T>
void shuffle_in_place(std::vector<T>& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = draw_index(rng, i);
        std::swap(items[i - 1], items[j]);
    }
}

} // namespace bloomclf
