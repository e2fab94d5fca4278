#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "citytsp/errors.hpp"
#include "citytsp/rng.hpp"

namespace citytsp {

/// Streaming mean/variance (Welford). Accumulation error stays near n*eps
/// relative, so results are order-independent to well below 1e-10.
class RunningStat {
  public:
    void add(double x) {
        ++count_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(count_);
        m2_ += delta * (x - mean_);
    }

    long count() const { return count_; }
    double mean() const { return mean_; }

    /// Unbiased sample variance (n-1 denominator).
    double variance() const { return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0; }

    double stddev() const { return std::sqrt(variance()); }

    double se() const { return count_ > 0 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0; }

    /// Coefficient of variation, stddev/mean.
    double cv() const { return mean_ != 0.0 ? stddev() / mean_ : 0.0; }

  private:
    long count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Streaming covariance of a pair of scalars.
class RunningCov {
  public:
    void add(double x, double y) {
        ++count_;
        const double dx = x - mean_x_;
        mean_x_ += dx / static_cast<double>(count_);
        mean_y_ += (y - mean_y_) / static_cast<double>(count_);
        c2_ += dx * (y - mean_y_);
    }

    long count() const { return count_; }
    double mean_x() const { return mean_x_; }
    double mean_y() const { return mean_y_; }
    double covariance() const { return count_ > 1 ? c2_ / static_cast<double>(count_ - 1) : 0.0; }

  private:
    long count_ = 0;
    double mean_x_ = 0.0;
    double mean_y_ = 0.0;
    double c2_ = 0.0;
};

/// Bootstrap standard error of a statistic of an i.i.d. sample.
inline double bootstrap_se(std::span<const double> sample,
                           const std::function<double(std::span<const double>)>& statistic, Rng rng,
                           int resamples = 200) {
    if (sample.empty()) throw ParameterError("bootstrap_se: empty sample");
    RunningStat stat;
    std::vector<double> resample(sample.size());
    for (int b = 0; b < resamples; ++b) {
        for (std::size_t i = 0; i < sample.size(); ++i)
            resample[i] = sample[rng.next_below(sample.size())];
        stat.add(statistic(resample));
    }
    return stat.stddev();
}

/// Bootstrap SE for paired-sample statistics (covariance, correlation).
inline double bootstrap_se_pairs(std::span<const double> xs, std::span<const double> ys,
                                 const std::function<double(std::span<const double>, std::span<const double>)>& statistic,
                                 Rng rng, int resamples = 200) {
    if (xs.empty() || xs.size() != ys.size()) throw ParameterError("bootstrap_se_pairs: bad sample");
    RunningStat stat;
    std::vector<double> rx(xs.size()), ry(ys.size());
    for (int b = 0; b < resamples; ++b) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const std::size_t j = rng.next_below(xs.size());
            rx[i] = xs[j];
            ry[i] = ys[j];
        }
        stat.add(statistic(rx, ry));
    }
    return stat.stddev();
}

/// Least-squares slope of y against x.
inline double ols_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ParameterError("ols_slope: need matched samples, size >= 2");
    RunningCov cov;
    RunningStat vx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cov.add(x[i], y[i]);
        vx.add(x[i]);
    }
    if (vx.variance() == 0.0) throw ParameterError("ols_slope: x values are constant");
    return cov.covariance() / vx.variance();
}

inline double sample_covariance(std::span<const double> xs, std::span<const double> ys) {
    RunningCov cov;
    for (std::size_t i = 0; i < xs.size(); ++i) cov.add(xs[i], ys[i]);
    return cov.covariance();
}

inline double sample_correlation(std::span<const double> xs, std::span<const double> ys) {
    RunningCov cov;
    RunningStat sx, sy;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        cov.add(xs[i], ys[i]);
        sx.add(xs[i]);
        sy.add(ys[i]);
    }
    const double denom = sx.stddev() * sy.stddev();
    return denom > 0.0 ? cov.covariance() / denom : 0.0;
}

}  // namespace citytsp
