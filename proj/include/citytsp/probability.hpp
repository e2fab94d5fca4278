#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "citytsp/errors.hpp"

namespace citytsp {

namespace detail {

// log of the binomial coefficient C(n, k), accumulated term by term in long
// double. Keeps the relative error of the resulting pmf near 1e-13 even for
// n up to 1e6, where a three-way lgamma difference would lose digits.
inline long double log_choose(long n, long k) {
    if (k < 0 || k > n) return -std::numeric_limits<long double>::infinity();
    const long m = std::min(k, n - k);
    long double sum = 0.0L;
    for (long i = 1; i <= m; ++i) sum += logl(static_cast<long double>(n - m + i)) - logl(static_cast<long double>(i));
    return sum;
}

}  // namespace detail

/// log B(k; n, p), exact in log space; -inf marks an exact zero.
inline double binomial_log_pmf(long k, long n, double p) {
    if (n < 0 || k < 0 || k > n) throw ParameterError("binomial_pmf: need 0 <= k <= n");
    if (!(p >= 0.0) || !(p <= 1.0)) throw ParameterError("binomial_pmf: need 0 <= p <= 1");
    if (p == 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    if (p == 1.0) return k == n ? 0.0 : -std::numeric_limits<double>::infinity();
    const long double lp = logl(static_cast<long double>(p));
    const long double lq = log1pl(static_cast<long double>(-p));
    return static_cast<double>(detail::log_choose(n, k) + static_cast<long double>(k) * lp +
                               static_cast<long double>(n - k) * lq);
}

inline double binomial_pmf(long k, long n, double p) { return std::exp(binomial_log_pmf(k, n, p)); }

/// log Poi(k; lambda) = k log(lambda) - lambda - log(k!).
inline double poisson_log_pmf(long k, double lambda) {
    if (k < 0) throw ParameterError("poisson_pmf: need k >= 0");
    if (!(lambda > 0.0)) throw ParameterError("poisson_pmf: need lambda > 0");
    const long double ll = logl(static_cast<long double>(lambda));
    return static_cast<double>(static_cast<long double>(k) * ll - static_cast<long double>(lambda) -
                               lgammal(static_cast<long double>(k) + 1.0L));
}

inline double poisson_pmf(long k, double lambda) { return std::exp(poisson_log_pmf(k, lambda)); }

/// Two-cell multinomial pmf B(k1, k2; n, p1, p2).
inline double multinomial_two_cell_log_pmf(long k1, long k2, long n, double p1, double p2) {
    if (k1 < 0 || k2 < 0 || k1 + k2 > n) throw ParameterError("multinomial_two_cell_pmf: need k1 + k2 <= n");
    if (!(p1 >= 0.0) || !(p2 >= 0.0) || p1 + p2 > 1.0)
        throw ParameterError("multinomial_two_cell_pmf: need p1, p2 >= 0 and p1 + p2 <= 1");
    const long k3 = n - k1 - k2;
    const double p3 = 1.0 - p1 - p2;
    if (p1 == 0.0 && k1 > 0) return -std::numeric_limits<double>::infinity();
    if (p2 == 0.0 && k2 > 0) return -std::numeric_limits<double>::infinity();
    if (p3 <= 0.0 && k3 > 0) return -std::numeric_limits<double>::infinity();
    long double sum = detail::log_choose(n, k1) + detail::log_choose(n - k1, k2);
    if (k1 > 0) sum += static_cast<long double>(k1) * logl(static_cast<long double>(p1));
    if (k2 > 0) sum += static_cast<long double>(k2) * logl(static_cast<long double>(p2));
    if (k3 > 0) sum += static_cast<long double>(k3) * logl(static_cast<long double>(p3));
    return static_cast<double>(sum);
}

inline double multinomial_two_cell_pmf(long k1, long k2, long n, double p1, double p2) {
    return std::exp(multinomial_two_cell_log_pmf(k1, k2, n, p1, p2));
}

/// Binomial-vs-Poisson deviation scan over the dense-count window
/// [eta1*n/(2N), 2*eta2*n/N]. The theory predicts max_rel_dev to shrink
/// linearly with ratio_scale = n/N^2.
struct PmfComparison {
    long k_lo = 0;
    long k_hi = 0;
    double max_rel_dev = 0.0;
    double ratio_scale = 0.0;  // n / N^2
};

inline PmfComparison compare_binomial_poisson(long n, long N, double p, double eta1, double eta2) {
    if (n < 1 || N < 1) throw ParameterError("compare_binomial_poisson: need n, N >= 1");
    if (!(eta1 > 0.0) || !(eta2 >= eta1)) throw ParameterError("compare_binomial_poisson: need 0 < eta1 <= eta2");
    const double nn = static_cast<double>(N);
    if (p < eta1 / nn - 1e-12 || p > eta2 / nn + 1e-12)
        throw ParameterError("compare_binomial_poisson: p must lie in [eta1/N, eta2/N]");
    PmfComparison out;
    out.k_lo = static_cast<long>(std::ceil(eta1 * static_cast<double>(n) / (2.0 * nn) - 1e-12));
    out.k_hi = std::min<long>(n, static_cast<long>(std::floor(2.0 * eta2 * static_cast<double>(n) / nn + 1e-12)));
    out.ratio_scale = static_cast<double>(n) / (nn * nn);
    if (out.k_lo > out.k_hi)
        throw ParameterError("compare_binomial_poisson: empty k range [" + std::to_string(out.k_lo) + ", " +
                             std::to_string(out.k_hi) + "]; needs n/N >= 2/eta1");
    const double lambda = static_cast<double>(n) * p;
    for (long k = out.k_lo; k <= out.k_hi; ++k) {
        const double dev = std::abs(std::exp(binomial_log_pmf(k, n, p) - poisson_log_pmf(k, lambda)) - 1.0);
        out.max_rel_dev = std::max(out.max_rel_dev, dev);
    }
    return out;
}

/// dePoissonization transfer: P(A) >= 1 - sqrt(n)/D1 * P0(A_P^c) where
/// D1 = sqrt(n) e^-n n^n / n! is the Stirling lower bound on sqrt(n) P0(N_P = n).
/// The identity is exact, so a measured binomial probability below the bound
/// means the two event estimates are inconsistent.
struct DepoissonizationResult {
    double bound = 0.0;
    bool consistent = false;
};

inline DepoissonizationResult depoissonization_check(double event_prob_binomial,
                                                     double event_prob_poisson_complement, long n) {
    if (n < 1) throw ParameterError("depoissonization_check: need n >= 1");
    if (!(event_prob_binomial >= 0.0) || !(event_prob_binomial <= 1.0) ||
        !(event_prob_poisson_complement >= 0.0) || !(event_prob_poisson_complement <= 1.0))
        throw ParameterError("depoissonization_check: probabilities must lie in [0, 1]");
    // sqrt(n)/D1 = n! e^n / n^n, evaluated in log space.
    const long double nl = static_cast<long double>(n);
    const long double log_factor = lgammal(nl + 1.0L) + nl - nl * logl(nl);
    const double bound =
        1.0 - event_prob_poisson_complement * static_cast<double>(expl(log_factor));
    return {bound, event_prob_binomial >= bound};
}

/// Paley-Zygmund: P(X >= lambda * E X) >= (1 - lambda)^2 (E X)^2 / E X^2.
inline double paley_zygmund_bound(double mean, double second_moment, double lambda) {
    if (!(lambda > 0.0) || !(lambda < 1.0)) throw ParameterError("paley_zygmund_bound: need 0 < lambda < 1");
    if (!(mean > 0.0) || !(second_moment >= mean * mean))
        throw ParameterError("paley_zygmund_bound: need second_moment >= mean^2 > 0");
    const double ratio = mean * mean / second_moment;
    return (1.0 - lambda) * (1.0 - lambda) * ratio;
}

}  // namespace citytsp
