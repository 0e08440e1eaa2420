#pragma once

// Shared helpers for the test binaries: seeded generators and linear-scan
// oracles that deliberately avoid the library's own machinery.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace support {

inline std::vector<bool> random_bits(std::mt19937_64 &rng, uint64_t n, double density) {
    std::bernoulli_distribution d(density);
    std::vector<bool> v(n);
    for (uint64_t i = 0; i < n; ++i)
        v[i] = d(rng);
    return v;
}

/// prefix[p] = number of ones in [0, p)
inline std::vector<uint64_t> prefix_ones(const std::vector<bool> &v) {
    std::vector<uint64_t> p(v.size() + 1, 0);
    for (size_t i = 0; i < v.size(); ++i)
        p[i + 1] = p[i] + (v[i] ? 1 : 0);
    return p;
}

/// positions of ones in order; entry k-1 answers select(k)
inline std::vector<uint64_t> one_positions(const std::vector<bool> &v) {
    std::vector<uint64_t> out;
    for (size_t i = 0; i < v.size(); ++i)
        if (v[i])
            out.push_back(i);
    return out;
}

inline std::vector<uint64_t> sorted_values(std::mt19937_64 &rng, uint64_t n, uint64_t universe) {
    std::uniform_int_distribution<uint64_t> d(0, universe - 1);
    std::vector<uint64_t> v(n);
    for (auto &x : v)
        x = d(rng);
    std::sort(v.begin(), v.end());
    return v;
}

inline std::optional<std::pair<uint64_t, uint64_t>> linear_pred(const std::vector<uint64_t> &v, uint64_t x) {
    std::optional<std::pair<uint64_t, uint64_t>> best;
    for (size_t i = 0; i < v.size(); ++i)
        if (v[i] <= x)
            best = std::pair<uint64_t, uint64_t>{i + 1, v[i]};
    return best;
}

/// n distinct values from [1, u], sorted.
inline std::vector<uint64_t> distinct_sorted(std::mt19937_64 &rng, uint64_t n, uint64_t u) {
    std::vector<uint64_t> v;
    if (n * 4 >= u) {
        std::vector<uint64_t> all(u);
        for (uint64_t i = 0; i < u; ++i)
            all[i] = i + 1;
        std::shuffle(all.begin(), all.end(), rng);
        v.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n));
    } else {
        std::uniform_int_distribution<uint64_t> d(1, u);
        while (v.size() < n) {
            for (uint64_t i = v.size(); i < n; ++i)
                v.push_back(d(rng));
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        }
    }
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace support
