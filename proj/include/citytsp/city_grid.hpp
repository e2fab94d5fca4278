#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "citytsp/errors.hpp"
#include "citytsp/point.hpp"
#include "citytsp/rng.hpp"

namespace citytsp {

/// Regular tiling of the unit square into r x r city squares separated by
/// gaps of width s. Admissible only when (1-r)/(r+s) is an integer, so the
/// tiling closes flush with the square's far edge.
struct CityGrid {
    double r = 0.0;
    double s = 0.0;
    int per_axis = 0;
    std::vector<Point> origins;  // lower-left corners, row-major (iy * per_axis + ix)

    int city_count() const { return per_axis * per_axis; }

    Rect city_rect(int id) const { return square(origins.at(static_cast<std::size_t>(id)), r); }

    std::pair<int, int> lattice_of(int id) const { return {id % per_axis, id / per_axis}; }

    int id_of(int ix, int iy) const { return iy * per_axis + ix; }
};

inline CityGrid build_city_grid(double r, double s) {
    if (!(r > 0.0) || !(s > 0.0)) throw ParameterError("build_city_grid: need r > 0 and s > 0");
    if (!(r + s < 1.0)) throw ParameterError("build_city_grid: need r + s < 1");
    const double ratio = (1.0 - r) / (r + s);
    const double m_real = std::round(ratio);
    if (std::abs(ratio - m_real) > 1e-9) {
        // Suggest the nearest admissible pair with the same r (s grown to fit).
        const long m = static_cast<long>(std::floor(ratio));
        std::string hint;
        if (m >= 1) {
            const double s_fit = (1.0 - r) / static_cast<double>(m) - r;
            hint = "; nearest admissible pair keeping r: (r=" + std::to_string(r) +
                   ", s=" + std::to_string(s_fit) + ")";
        }
        throw ParameterError("build_city_grid: (1-r)/(r+s) = " + std::to_string(ratio) +
                             " is not an integer" + hint);
    }
    const int m = static_cast<int>(m_real);
    if (m < 1) throw ParameterError("build_city_grid: grid needs at least 2 cities per axis");

    CityGrid grid;
    grid.r = r;
    grid.s = s;
    grid.per_axis = m + 1;
    grid.origins.reserve(static_cast<std::size_t>(grid.per_axis) * grid.per_axis);
    const double pitch = r + s;
    for (int iy = 0; iy <= m; ++iy)
        for (int ix = 0; ix <= m; ++ix)
            grid.origins.push_back(Point{ix * pitch, iy * pitch});
    return grid;
}

/// Smallest admissible (r, s) dominating the targets: r stays fixed, the gap
/// grows until the tiling closes. Always yields s >= s_target because the
/// strip count m is rounded down.
inline std::pair<double, double> snap_parameters(double r_target, double s_target) {
    if (!(r_target > 0.0) || !(s_target > 0.0))
        throw ParameterError("snap_parameters: need positive targets");
    if (!(r_target + s_target < 1.0)) throw ParameterError("snap_parameters: need r + s < 1");
    const long m = static_cast<long>(std::floor((1.0 - r_target) / (r_target + s_target) + 1e-12));
    if (m < 1) throw ParameterError("snap_parameters: no admissible pair with at least 2 cities per axis");
    const double s = (1.0 - r_target) / static_cast<double>(m) - r_target;
    return {r_target, s};
}

/// A well-connected choice of N cities: their lattice coordinates form a
/// connected subgraph of Z^2 under 4-adjacency.
struct CitySelection {
    CityGrid grid;
    std::vector<int> indices;                       // selected city ids, in selection order
    std::vector<std::pair<int, int>> lattice_coords;  // matching Z^2 coordinates

    int size() const { return static_cast<int>(indices.size()); }
};

/// Grow a random connected lattice animal of N cities by sampling uniformly
/// from the BFS frontier. Deterministic given the rng stream.
inline CitySelection select_well_connected(const CityGrid& grid, int n_cities, Rng rng) {
    const int total = grid.city_count();
    if (n_cities < 1) throw ParameterError("select_well_connected: N must be >= 1");
    if (n_cities > total)
        throw ParameterError("select_well_connected: N = " + std::to_string(n_cities) +
                             " exceeds city count " + std::to_string(total));

    std::vector<char> chosen(static_cast<std::size_t>(total), 0);
    std::vector<char> in_frontier(static_cast<std::size_t>(total), 0);
    std::vector<int> frontier;
    std::vector<int> picked;
    picked.reserve(static_cast<std::size_t>(n_cities));

    const int start = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(total)));
    chosen[static_cast<std::size_t>(start)] = 1;
    picked.push_back(start);

    auto push_neighbors = [&](int id) {
        const auto [ix, iy] = grid.lattice_of(id);
        const int dx[4] = {1, -1, 0, 0};
        const int dy[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
            const int nx = ix + dx[d];
            const int ny = iy + dy[d];
            if (nx < 0 || ny < 0 || nx >= grid.per_axis || ny >= grid.per_axis) continue;
            const int nid = grid.id_of(nx, ny);
            if (!chosen[static_cast<std::size_t>(nid)] && !in_frontier[static_cast<std::size_t>(nid)]) {
                in_frontier[static_cast<std::size_t>(nid)] = 1;
                frontier.push_back(nid);
            }
        }
    };
    push_neighbors(start);

    while (static_cast<int>(picked.size()) < n_cities) {
        // Frontier is nonempty as long as cities remain: the grid is connected.
        const std::size_t slot = rng.next_below(frontier.size());
        const int id = frontier[slot];
        frontier[slot] = frontier.back();
        frontier.pop_back();
        in_frontier[static_cast<std::size_t>(id)] = 0;
        chosen[static_cast<std::size_t>(id)] = 1;
        picked.push_back(id);
        push_neighbors(id);
    }

    std::sort(picked.begin(), picked.end());
    CitySelection sel;
    sel.grid = grid;
    sel.indices = std::move(picked);
    sel.lattice_coords.reserve(sel.indices.size());
    for (int id : sel.indices) sel.lattice_coords.push_back(grid.lattice_of(id));
    return sel;
}

}  // namespace citytsp
