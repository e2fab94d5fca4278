#include "support/oracles.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <functional>
#include <numeric>

#include <gmpxx.h>

namespace oracles {

double brute_force_tsp(std::span<const citytsp::Point> points) {
    const int n = static_cast<int>(points.size());
    std::vector<int> perm(static_cast<std::size_t>(n - 1));
    std::iota(perm.begin(), perm.end(), 1);
    double best = std::numeric_limits<double>::infinity();
    do {
        // Fixing vertex 0 kills rotations; direction duplicates remain and are harmless.
        double len = citytsp::dist(points[0], points[static_cast<std::size_t>(perm.front())]);
        for (std::size_t i = 0; i + 1 < perm.size(); ++i)
            len += citytsp::dist(points[static_cast<std::size_t>(perm[i])],
                                 points[static_cast<std::size_t>(perm[i + 1])]);
        len += citytsp::dist(points[static_cast<std::size_t>(perm.back())], points[0]);
        best = std::min(best, len);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

double resum_cycle_length(std::span<const citytsp::Point> points, std::span<const int> order) {
    double total = 0.0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const citytsp::Point& a = points[static_cast<std::size_t>(order[i])];
        const citytsp::Point& b = points[static_cast<std::size_t>(order[(i + 1) % order.size()])];
        const double dx = a.x - b.x;
        const double dy = a.y - b.y;
        total += std::sqrt(dx * dx + dy * dy);
    }
    return total;
}

namespace {

mpz_class binomial_coefficient(long n, long k) {
    mpz_class out;
    mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return out;
}

mpq_class rational_pow(const mpq_class& base, long exp) {
    mpq_class out = 1;
    for (long i = 0; i < exp; ++i) out *= base;
    return out;
}

}  // namespace

double exact_binomial_pmf(long k, long n, long p_num, long p_den) {
    const mpq_class p(p_num, p_den);
    const mpq_class q = mpq_class(1) - p;
    mpq_class value = binomial_coefficient(n, k);
    value *= rational_pow(p, k);
    value *= rational_pow(q, n - k);
    return value.get_d();
}

double exact_multinomial_two_cell_pmf(long k1, long k2, long n, long a1, long b1, long a2, long b2) {
    const mpq_class p1(a1, b1), p2(a2, b2);
    const mpq_class p3 = mpq_class(1) - p1 - p2;
    mpq_class value = binomial_coefficient(n, k1);
    value *= binomial_coefficient(n - k1, k2);
    value *= rational_pow(p1, k1);
    value *= rational_pow(p2, k2);
    value *= rational_pow(p3, n - k1 - k2);
    return value.get_d();
}

double exact_factorial_over_power(long n) {
    mpz_class fact;
    mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(n));
    mpz_class power;
    mpz_ui_pow_ui(power.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(n));
    const mpq_class ratio(fact, power);
    return ratio.get_d();
}

bool lattice_connected(const std::vector<std::pair<int, int>>& coords) {
    const std::size_t n = coords.size();
    if (n <= 1) return true;
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    std::map<std::pair<int, int>, std::size_t> where;
    for (std::size_t i = 0; i < n; ++i) where[coords[i]] = i;
    for (std::size_t i = 0; i < n; ++i) {
        const auto [x, y] = coords[i];
        for (const auto& nb : {std::pair{x + 1, y}, std::pair{x, y + 1}}) {
            auto it = where.find(nb);
            if (it != where.end()) parent[find(i)] = find(it->second);
        }
    }
    const std::size_t root = find(0);
    for (std::size_t i = 1; i < n; ++i)
        if (find(i) != root) return false;
    return true;
}

}  // namespace oracles
