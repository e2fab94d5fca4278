#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "citytsp/errors.hpp"
#include "citytsp/point.hpp"
#include "citytsp/tour.hpp"

namespace citytsp {

/// Concentric-cell grid over the unit square: cells W1 of side 2*A*w tile the
/// square, and each has a centered companion W2 of side 4*A*w. Valid only
/// when 1/(2*A*w) is a positive integer.
struct WGrid {
    double w = 0.0;
    double A = 0.0;

    long cells_per_axis() const {
        const double raw = 1.0 / (2.0 * A * w);
        const long g = static_cast<long>(std::round(raw));
        if (g < 1 || std::abs(raw - static_cast<double>(g)) > 1e-9)
            throw ParameterError("WGrid: 1/(2*A*w) must be a positive integer, got " + std::to_string(raw));
        return g;
    }

    double insertion_bound() const { return 4.0 * A * w * std::sqrt(2.0); }
};

/// Largest w <= w_target with 1/(2*A*w) integral (at least one cell).
inline double snap_w(double w_target, double A) {
    if (!(w_target > 0.0) || !(A > 0.0)) throw ParameterError("snap_w: need positive w and A");
    const long g = std::max(1L, static_cast<long>(std::round(1.0 / (2.0 * A * w_target))));
    return 1.0 / (2.0 * A * static_cast<double>(g));
}

struct InsertOutcome {
    Tour tour;          // spans points.size()+1 nodes; the new node has index points.size()
    double cost = 0.0;  // added minus removed edge length
    double bound = 0.0; // 4*A*w*sqrt(2)
    bool fallback = false;  // no tour edge inside W2; cheapest insertion used instead
};

/// Insert `new_point` into `tour`. If some tour edge keeps both endpoints
/// inside the companion cell W2 of the W1 cell containing the new point, the
/// shortest such edge is split and the cost is reported against the grid
/// bound. Otherwise the cheapest insertion over all edges is taken and the
/// outcome is flagged as a fallback.
inline InsertOutcome insert_node(std::span<const Point> points, const Tour& tour, Point new_point,
                                 const WGrid& grid) {
    const std::size_t n = points.size();
    if (!is_permutation(tour, n)) throw ParameterError("insert_node: tour must span the points");
    if (new_point.x < 0.0 || new_point.x > 1.0 || new_point.y < 0.0 || new_point.y > 1.0)
        throw ParameterError("insert_node: new point must lie in the unit square");
    const long g = grid.cells_per_axis();

    const double cell = 1.0 / static_cast<double>(g);
    const long ix = std::clamp(static_cast<long>(std::floor(new_point.x * g)), 0L, g - 1);
    const long iy = std::clamp(static_cast<long>(std::floor(new_point.y * g)), 0L, g - 1);
    const Rect w2{(static_cast<double>(ix) - 0.5) * cell, (static_cast<double>(iy) - 0.5) * cell,
                  2.0 * cell, 2.0 * cell};

    int best_edge = -1;
    double best_len = std::numeric_limits<double>::infinity();
    for (int e = 0; e < static_cast<int>(n); ++e) {
        const Point& u = points[static_cast<std::size_t>(tour.order[static_cast<std::size_t>(e)])];
        const Point& v =
            points[static_cast<std::size_t>(tour.order[static_cast<std::size_t>((e + 1) % n)])];
        if (!w2.contains(u) || !w2.contains(v)) continue;
        const double len = dist(u, v);
        if (len < best_len) {
            best_len = len;
            best_edge = e;
        }
    }

    InsertOutcome out;
    out.bound = grid.insertion_bound();
    if (best_edge < 0) {
        // F event failed here: fall back to cheapest insertion over all edges.
        out.fallback = true;
        double best_cost = std::numeric_limits<double>::infinity();
        for (int e = 0; e < static_cast<int>(n); ++e) {
            const Point& u = points[static_cast<std::size_t>(tour.order[static_cast<std::size_t>(e)])];
            const Point& v =
                points[static_cast<std::size_t>(tour.order[static_cast<std::size_t>((e + 1) % n)])];
            const double c = dist(u, new_point) + dist(new_point, v) - dist(u, v);
            if (c < best_cost) {
                best_cost = c;
                best_edge = e;
            }
        }
        out.cost = best_cost;
    } else {
        const Point& u = points[static_cast<std::size_t>(tour.order[static_cast<std::size_t>(best_edge)])];
        const Point& v =
            points[static_cast<std::size_t>(tour.order[static_cast<std::size_t>((best_edge + 1) % n)])];
        out.cost = dist(u, new_point) + dist(new_point, v) - dist(u, v);
    }

    out.tour.order.reserve(n + 1);
    for (int e = 0; e <= best_edge; ++e) out.tour.order.push_back(tour.order[static_cast<std::size_t>(e)]);
    out.tour.order.push_back(static_cast<int>(n));
    for (std::size_t e = static_cast<std::size_t>(best_edge) + 1; e < n; ++e)
        out.tour.order.push_back(tour.order[e]);
    out.tour.length = tour.length + out.cost;
    return out;
}

}  // namespace citytsp
