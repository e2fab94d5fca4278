#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "citytsp/errors.hpp"
#include "citytsp/point.hpp"

namespace citytsp {

/// Piecewise-constant probability density on the unit square [0,1]^2.
/// Cell values are bounded away from 0 and infinity, which keeps rejection
/// sampling exact and all per-region integrals closed-form.
class DensityField {
  public:
    DensityField(std::vector<double> cells, int resolution) : cells_(std::move(cells)), res_(resolution) {
        if (res_ < 1 || cells_.size() != static_cast<std::size_t>(res_) * res_)
            throw ParameterError("DensityField: cells must be a resolution x resolution grid");
        eps1_ = *std::min_element(cells_.begin(), cells_.end());
        eps2_ = *std::max_element(cells_.begin(), cells_.end());
        if (!(eps1_ > 0.0) || !std::isfinite(eps2_))
            throw ParameterError("DensityField: cell values must satisfy 0 < eps1 <= eps2 < inf");
        double total = 0.0;
        for (double v : cells_) total += v;
        total /= static_cast<double>(res_) * res_;
        if (std::abs(total - 1.0) > 1e-12)
            throw ParameterError("DensityField: density must integrate to 1 over the unit square, got " +
                                 std::to_string(total));
    }

    static DensityField uniform(int resolution = 16) {
        return DensityField(std::vector<double>(static_cast<std::size_t>(resolution) * resolution, 1.0),
                            resolution);
    }

    /// Checkerboard with high/low cell ratio `ratio` >= 1, normalized to mass 1.
    /// Resolution must be even so the two levels cover equal area.
    static DensityField checker(double ratio, int resolution = 16) {
        if (!(ratio >= 1.0)) throw ParameterError("DensityField::checker: ratio must be >= 1");
        if (resolution % 2 != 0) throw ParameterError("DensityField::checker: resolution must be even");
        const double lo = 2.0 / (1.0 + ratio);
        const double hi = ratio * lo;
        std::vector<double> cells(static_cast<std::size_t>(resolution) * resolution);
        for (int iy = 0; iy < resolution; ++iy)
            for (int ix = 0; ix < resolution; ++ix)
                cells[static_cast<std::size_t>(iy) * resolution + ix] = ((ix + iy) % 2 == 0) ? hi : lo;
        return DensityField(std::move(cells), resolution);
    }

    int resolution() const { return res_; }
    double eps1() const { return eps1_; }
    double eps2() const { return eps2_; }
    const std::vector<double>& cells() const { return cells_; }

    /// eta1 = eps1/eps2 and eta2 = eps2/eps1, the two-sided density ratios.
    double eta1() const { return eps1_ / eps2_; }
    double eta2() const { return eps2_ / eps1_; }

    double value_at(const Point& p) const {
        const int ix = cell_index(p.x);
        const int iy = cell_index(p.y);
        return cells_[static_cast<std::size_t>(iy) * res_ + ix];
    }

    /// Exact integral of the density over rect (clipped to the unit square).
    double integral(const Rect& rect) const {
        const double x0 = std::clamp(rect.x0, 0.0, 1.0);
        const double x1 = std::clamp(rect.x0 + rect.w, 0.0, 1.0);
        const double y0 = std::clamp(rect.y0, 0.0, 1.0);
        const double y1 = std::clamp(rect.y0 + rect.h, 0.0, 1.0);
        if (x1 <= x0 || y1 <= y0) return 0.0;
        const double cell = 1.0 / res_;
        const int ix0 = cell_index(x0);
        const int ix1 = cell_index_upper(x1);
        const int iy0 = cell_index(y0);
        const int iy1 = cell_index_upper(y1);
        double sum = 0.0;
        for (int iy = iy0; iy <= iy1; ++iy) {
            const double oy = std::min(y1, (iy + 1) * cell) - std::max(y0, iy * cell);
            if (oy <= 0.0) continue;
            for (int ix = ix0; ix <= ix1; ++ix) {
                const double ox = std::min(x1, (ix + 1) * cell) - std::max(x0, ix * cell);
                if (ox <= 0.0) continue;
                sum += ox * oy * cells_[static_cast<std::size_t>(iy) * res_ + ix];
            }
        }
        return sum;
    }

  private:
    int cell_index(double v) const {
        return std::clamp(static_cast<int>(std::floor(v * res_)), 0, res_ - 1);
    }
    int cell_index_upper(double v) const {
        // Index of the cell containing v when v is an upper boundary.
        return std::clamp(static_cast<int>(std::ceil(v * res_)) - 1, 0, res_ - 1);
    }

    std::vector<double> cells_;
    int res_;
    double eps1_ = 0.0;
    double eps2_ = 0.0;
};

}  // namespace citytsp
