#pragma once

#include <cmath>
#include <cstdint>

namespace citytsp {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double dist(const Point& a, const Point& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

/// Axis-aligned rectangle given by lower-left corner and extents.
struct Rect {
    double x0 = 0.0;
    double y0 = 0.0;
    double w = 0.0;
    double h = 0.0;

    bool contains(const Point& p, double tol = 0.0) const {
        return p.x >= x0 - tol && p.x <= x0 + w + tol && p.y >= y0 - tol &&
               p.y <= y0 + h + tol;
    }
};

inline Rect square(Point origin, double side) { return Rect{origin.x, origin.y, side, side}; }

}  // namespace citytsp
