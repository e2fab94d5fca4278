#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "citytsp/errors.hpp"
#include "citytsp/point.hpp"
#include "citytsp/tour.hpp"

namespace citytsp {

inline constexpr int kExactTspCap = 18;

/// Minimum-length spanning cycle via Held-Karp dynamic programming over
/// subsets. Hard cap of 18 nodes (memory is m * 2^(m-1) doubles). Among
/// optimal cycles, returns the lexicographically smallest order starting at
/// index 0; that fixes rotation, direction, and all ties.
inline Tour exact_tsp(std::span<const Point> points) {
    const int m = static_cast<int>(points.size());
    if (m < 3) throw ParameterError("exact_tsp: need at least 3 points");
    if (m > kExactTspCap)
        throw CapabilityError("exact_tsp: " + std::to_string(m) + " points exceeds cap " +
                              std::to_string(kExactTspCap) + "; use strips_tour instead");

    std::vector<double> d(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            d[static_cast<std::size_t>(i) * m + j] = dist(points[static_cast<std::size_t>(i)],
                                                          points[static_cast<std::size_t>(j)]);

    // g[mask][j]: shortest path that starts at j, visits exactly the vertices
    // in mask (subset of 1..m-1, excluding j), and ends at vertex 0.
    const int nbits = m - 1;
    const std::size_t nmask = std::size_t{1} << nbits;
    std::vector<double> g(nmask * static_cast<std::size_t>(m), std::numeric_limits<double>::infinity());
    auto at = [&](std::uint32_t mask, int j) -> double& { return g[std::size_t{mask} * m + j]; };

    for (int j = 0; j < m; ++j) at(0, j) = d[static_cast<std::size_t>(j) * m];
    for (std::uint32_t mask = 1; mask < nmask; ++mask) {
        for (int j = 0; j < m; ++j) {
            if (j != 0 && (mask >> (j - 1)) & 1u) continue;  // j must not be in mask
            double best = std::numeric_limits<double>::infinity();
            std::uint32_t rest = mask;
            while (rest != 0) {
                const int bit = std::countr_zero(rest);
                rest &= rest - 1;
                const int v = bit + 1;
                const double cand = d[static_cast<std::size_t>(j) * m + v] + at(mask ^ (1u << bit), v);
                if (cand < best) best = cand;
            }
            at(mask, j) = best;
        }
    }

    const std::uint32_t full = static_cast<std::uint32_t>(nmask - 1);
    Tour tour;
    tour.length = at(full, 0);

    // Greedy reconstruction: always extend with the smallest vertex that still
    // completes an optimal cycle. The candidate sums reuse the exact dp values,
    // so equality holds to rounding; the epsilon absorbs it.
    const double eps = 1e-12 * std::max(1.0, tour.length);
    tour.order.reserve(static_cast<std::size_t>(m));
    tour.order.push_back(0);
    std::uint32_t remaining = full;
    int cur = 0;
    while (remaining != 0) {
        double target = at(remaining, cur);
        int pick = -1;
        std::uint32_t rest = remaining;
        while (rest != 0) {
            const int bit = std::countr_zero(rest);
            rest &= rest - 1;
            const int v = bit + 1;
            if (d[static_cast<std::size_t>(cur) * m + v] + at(remaining ^ (1u << bit), v) <= target + eps) {
                pick = v;
                break;
            }
        }
        if (pick < 0) throw InvariantError("exact_tsp: reconstruction failed");
        tour.order.push_back(pick);
        remaining ^= 1u << (pick - 1);
        cur = pick;
    }
    return tour;
}

}  // namespace citytsp
