#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "citytsp/errors.hpp"
#include "citytsp/point.hpp"

namespace citytsp {

/// A spanning cycle: `order` lists node indices in visiting sequence, the
/// last entry connecting back to the first. `length` caches the cycle length.
struct Tour {
    std::vector<int> order;
    double length = 0.0;

    int size() const { return static_cast<int>(order.size()); }
};

inline double cycle_length(std::span<const Point> points, std::span<const int> order) {
    double total = 0.0;
    const std::size_t t = order.size();
    for (std::size_t i = 0; i < t; ++i) {
        const Point& a = points[static_cast<std::size_t>(order[i])];
        const Point& b = points[static_cast<std::size_t>(order[(i + 1) % t])];
        total += dist(a, b);
    }
    return total;
}

/// Euclidean length of the cycle `tour` over `points`.
inline double tour_length(std::span<const Point> points, const Tour& tour) {
    if (points.size() < 3) throw ParameterError("tour_length: need at least 3 points");
    if (tour.order.size() != points.size())
        throw ParameterError("tour_length: tour must span all points");
    std::vector<char> seen(points.size(), 0);
    for (int idx : tour.order) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= points.size() || seen[static_cast<std::size_t>(idx)])
            throw ParameterError("tour_length: order is not a permutation of node indices");
        seen[static_cast<std::size_t>(idx)] = 1;
    }
    return cycle_length(points, tour.order);
}

inline bool is_permutation(const Tour& tour, std::size_t n) {
    if (tour.order.size() != n) return false;
    std::vector<char> seen(n, 0);
    for (int idx : tour.order) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= n || seen[static_cast<std::size_t>(idx)]) return false;
        seen[static_cast<std::size_t>(idx)] = 1;
    }
    return true;
}

/// Sum of the two incident edge lengths of the node at position `pos`.
inline double incident_length(std::span<const Point> points, std::span<const int> order, std::size_t pos) {
    const std::size_t t = order.size();
    const Point& cur = points[static_cast<std::size_t>(order[pos])];
    const Point& prev = points[static_cast<std::size_t>(order[(pos + t - 1) % t])];
    const Point& next = points[static_cast<std::size_t>(order[(pos + 1) % t])];
    return dist(cur, prev) + dist(cur, next);
}

}  // namespace citytsp
