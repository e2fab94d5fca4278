#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "citytsp/errors.hpp"
#include "citytsp/point.hpp"
#include "citytsp/tour.hpp"

namespace citytsp {

/// Constructive guarantee for a strips tour of a nodes in a b x b square with
/// strip width c: the tour is no longer than b^2/c + a*c*sqrt(2) + 2b, and
/// with c ~ b/sqrt(a) that is at most 5*b*sqrt(a).
struct StripsCertificate {
    long a = 0;
    double b = 0.0;
    double c = 0.0;
    double bound = 0.0;
};

inline double strips_bound(long a, double b, double c) {
    return b * b / c + static_cast<double>(a) * c * std::sqrt(2.0) + 2.0 * b;
}

namespace detail {

// Strip count for auto width: the even integer (or 1) nearest sqrt(a) that
// minimizes the certificate. Even counts let the serpentine sweep finish on
// the same side it started, so the closing leg fits the 2b horizontal budget.
inline long auto_strip_count(long a) {
    const double root = std::sqrt(static_cast<double>(a));
    long lo = 2 * static_cast<long>(std::floor(root / 2.0));
    std::vector<long> candidates{1, std::max<long>(2, lo), std::max<long>(2, lo) + 2};
    long best = 1;
    double best_bound = strips_bound(a, 1.0, 1.0);
    for (long k : candidates) {
        const double bound = strips_bound(a, 1.0, 1.0 / static_cast<double>(k));
        if (bound < best_bound - 1e-15) {
            best = k;
            best_bound = bound;
        }
    }
    return best;
}

}  // namespace detail

/// Serpentine strips tour: bucket points into vertical strips of width c and
/// visit them top-to-bottom in even strips, bottom-to-top in odd ones. Pass
/// strip_width <= 0 for the auto choice c ~ b/sqrt(a). The certificate bound
/// is asserted on the produced tour, never assumed.
inline std::pair<Tour, StripsCertificate> strips_tour(std::span<const Point> points, Point origin,
                                                      double side, double strip_width = 0.0) {
    const long a = static_cast<long>(points.size());
    if (a < 3) throw ParameterError("strips_tour: need at least 3 points");
    if (!(side > 0.0)) throw ParameterError("strips_tour: square side must be positive");
    const Rect box = square(origin, side);
    for (std::size_t i = 0; i < points.size(); ++i)
        if (!box.contains(points[i], 1e-12))
            throw ParameterError("strips_tour: point " + std::to_string(i) + " lies outside the square");

    long k;  // number of strips
    if (strip_width <= 0.0) {
        k = detail::auto_strip_count(a);
    } else {
        const double ratio = side / strip_width;
        k = static_cast<long>(std::round(ratio));
        if (k < 1 || std::abs(ratio - static_cast<double>(k)) > 1e-9)
            throw ParameterError("strips_tour: side/strip_width must be a positive integer");
    }
    const double c = side / static_cast<double>(k);

    Tour tour;
    tour.order.resize(static_cast<std::size_t>(a));
    std::iota(tour.order.begin(), tour.order.end(), 0);
    auto strip_of = [&](const Point& p) {
        const long idx = static_cast<long>(std::floor((p.x - origin.x) / c));
        return std::clamp(idx, 0L, k - 1);
    };
    std::sort(tour.order.begin(), tour.order.end(), [&](int lhs, int rhs) {
        const Point& p = points[static_cast<std::size_t>(lhs)];
        const Point& q = points[static_cast<std::size_t>(rhs)];
        const long sp = strip_of(p);
        const long sq = strip_of(q);
        if (sp != sq) return sp < sq;
        const double yp = (sp % 2 == 0) ? -p.y : p.y;  // even strips descend
        const double yq = (sp % 2 == 0) ? -q.y : q.y;
        if (yp != yq) return yp < yq;
        if (p.x != q.x) return p.x < q.x;
        return lhs < rhs;
    });
    tour.length = cycle_length(points, tour.order);

    StripsCertificate cert{a, side, c, strips_bound(a, side, c)};
    if (tour.length > cert.bound + 1e-9)
        throw InvariantError("strips_tour: produced length " + std::to_string(tour.length) +
                             " exceeds certificate bound " + std::to_string(cert.bound));
    return {std::move(tour), cert};
}

}  // namespace citytsp
