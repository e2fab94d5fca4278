#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "citytsp/city_grid.hpp"
#include "citytsp/density.hpp"
#include "citytsp/errors.hpp"
#include "citytsp/point.hpp"
#include "citytsp/rng.hpp"

namespace citytsp {

enum class ProcessKind { Binomial, Poisson };

inline std::string to_string(ProcessKind k) { return k == ProcessKind::Binomial ? "binomial" : "poisson"; }

/// Sampled node set. For city-constrained instances every node lies inside
/// its assigned city square; unconstrained instances have no selection and
/// city_of stays empty.
struct Instance {
    std::vector<Point> nodes;
    std::vector<int> city_of;  // index into selection->indices
    ProcessKind process = ProcessKind::Binomial;
    double n_param = 0.0;  // exact count for Binomial, mean for Poisson
    std::uint64_t seed = 0;
    std::optional<CitySelection> selection;

    int node_count() const { return static_cast<int>(nodes.size()); }

    /// Node count per selected city (length = selection size).
    std::vector<long> per_city_counts() const {
        std::vector<long> counts(selection ? selection->indices.size() : 0, 0);
        for (int c : city_of) ++counts.at(static_cast<std::size_t>(c));
        return counts;
    }

    std::vector<int> nodes_in_city(int sel_pos) const {
        std::vector<int> ids;
        for (int i = 0; i < node_count(); ++i)
            if (city_of[static_cast<std::size_t>(i)] == sel_pos) ids.push_back(i);
        return ids;
    }
};

/// Rejection-sampler counters; expected accept ratio is at least eps1/eps2.
struct SampleStats {
    long proposals = 0;
    long accepts = 0;
    double acceptance_rate() const { return proposals > 0 ? static_cast<double>(accepts) / proposals : 0.0; }
};

/// Per-city mass p_l = integral of f over city l / integral over all selected
/// cities. Satisfies eta1/N <= p_l <= eta2/N.
inline std::vector<double> city_masses(const CitySelection& sel, const DensityField& f) {
    std::vector<double> mass;
    mass.reserve(sel.indices.size());
    double total = 0.0;
    for (int id : sel.indices) {
        const double q = f.integral(sel.grid.city_rect(id));
        mass.push_back(q);
        total += q;
    }
    for (double& q : mass) q /= total;
    return mass;
}

namespace detail {

// One draw from f conditioned on `rect`: uniform proposal, accept with
// probability f(p)/eps2. A valid field forces termination; the iteration cap
// only guards against corrupted state.
inline Point rejection_sample(const Rect& rect, const DensityField& f, Rng& rng, SampleStats* stats) {
    for (long iter = 0; iter < 100'000'000; ++iter) {
        Point p{rng.uniform(rect.x0, rect.x0 + rect.w), rng.uniform(rect.y0, rect.y0 + rect.h)};
        const double u = rng.next_unit();
        if (stats) ++stats->proposals;
        if (u * f.eps2() < f.value_at(p)) {
            if (stats) ++stats->accepts;
            return p;
        }
    }
    throw InvariantError("rejection_sample: acceptance never triggered");
}

}  // namespace detail

/// n i.i.d. nodes with density g_N = f restricted to the selected cities and
/// renormalized. Joint per-city counts are multinomial(n, p_l).
inline Instance sample_binomial(const CitySelection& sel, const DensityField& f, long n, Rng rng,
                                SampleStats* stats = nullptr) {
    if (n < 1) throw ParameterError("sample_binomial: n must be >= 1");
    const int N = sel.size();
    Instance inst;
    inst.process = ProcessKind::Binomial;
    inst.n_param = static_cast<double>(n);
    inst.selection = sel;
    inst.nodes.reserve(static_cast<std::size_t>(n));
    inst.city_of.reserve(static_cast<std::size_t>(n));
    // Uniform proposal over the union of equal-area squares + thinning by f
    // draws from g_N exactly; the proposing square is the containing city.
    for (long i = 0; i < n; ++i) {
        for (;;) {
            const int pos = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(N)));
            const Rect rect = sel.grid.city_rect(sel.indices[static_cast<std::size_t>(pos)]);
            Point p{rng.uniform(rect.x0, rect.x0 + rect.w), rng.uniform(rect.y0, rect.y0 + rect.h)};
            const double u = rng.next_unit();
            if (stats) ++stats->proposals;
            if (u * f.eps2() < f.value_at(p)) {
                if (stats) ++stats->accepts;
                inst.nodes.push_back(p);
                inst.city_of.push_back(pos);
                break;
            }
        }
    }
    return inst;
}

/// Poisson process with intensity mean_n * g_N: independent per-city counts
/// N_l ~ Poisson(mean_n * p_l), nodes then i.i.d. with f conditioned on the
/// city square.
inline Instance sample_poisson(const CitySelection& sel, const DensityField& f, double mean_n, Rng rng,
                               SampleStats* stats = nullptr) {
    if (!(mean_n > 0.0)) throw ParameterError("sample_poisson: mean_n must be positive");
    const auto mass = city_masses(sel, f);
    Instance inst;
    inst.process = ProcessKind::Poisson;
    inst.n_param = mean_n;
    inst.selection = sel;
    for (int pos = 0; pos < sel.size(); ++pos) {
        Rng city_rng = rng.fork(static_cast<std::uint64_t>(pos));
        const long count = city_rng.poisson(mean_n * mass[static_cast<std::size_t>(pos)]);
        const Rect rect = sel.grid.city_rect(sel.indices[static_cast<std::size_t>(pos)]);
        for (long i = 0; i < count; ++i) {
            inst.nodes.push_back(detail::rejection_sample(rect, f, city_rng, stats));
            inst.city_of.push_back(pos);
        }
    }
    return inst;
}

/// n i.i.d. nodes with density f over the whole unit square (no cities).
inline Instance sample_unconstrained(const DensityField& f, long n, Rng rng, SampleStats* stats = nullptr) {
    if (n < 1) throw ParameterError("sample_unconstrained: n must be >= 1");
    Instance inst;
    inst.process = ProcessKind::Binomial;
    inst.n_param = static_cast<double>(n);
    inst.nodes.reserve(static_cast<std::size_t>(n));
    const Rect unit{0.0, 0.0, 1.0, 1.0};
    for (long i = 0; i < n; ++i) inst.nodes.push_back(detail::rejection_sample(unit, f, rng, stats));
    return inst;
}

}  // namespace citytsp
