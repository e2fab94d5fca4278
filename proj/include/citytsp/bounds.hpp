#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "citytsp/errors.hpp"
#include "citytsp/instance.hpp"
#include "citytsp/point.hpp"

namespace citytsp {

/// Sum over nodes of the distance to the nearest other node. Every spanning
/// cycle has length at least this: each node's two incident edges are each at
/// least its nearest-neighbor distance, and the half-sum identity halves the
/// double counting.
inline double nn_lower_bound(std::span<const Point> points) {
    const std::size_t n = points.size();
    if (n < 3) throw ParameterError("nn_lower_bound: need at least 3 points");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            best = std::min(best, dist(points[i], points[j]));
        }
        total += best;
    }
    return total;
}

/// V_n = sum of exact per-city cycle lengths, with cities holding <= 2 nodes
/// contributing 0. Lower-bounds any spanning cycle of the whole instance, but
/// only under the lemma hypothesis s > r*sqrt(2).
inline double city_cycle_lower_bound(const Instance& instance, std::span<const double> per_city_exact_lengths) {
    if (!instance.selection) throw ParameterError("city_cycle_lower_bound: instance has no city structure");
    const CityGrid& grid = instance.selection->grid;
    if (!(grid.s > grid.r * std::sqrt(2.0)))
        throw ParameterError("city_cycle_lower_bound: inapplicable, requires s > r*sqrt(2) (s = " +
                             std::to_string(grid.s) + ", r*sqrt(2) = " + std::to_string(grid.r * std::sqrt(2.0)) +
                             ")");
    const auto counts = instance.per_city_counts();
    if (per_city_exact_lengths.size() != counts.size())
        throw ParameterError("city_cycle_lower_bound: need one length per selected city");
    double v_n = 0.0;
    for (std::size_t l = 0; l < counts.size(); ++l)
        if (counts[l] > 2) v_n += per_city_exact_lengths[l];
    return v_n;
}

}  // namespace citytsp
