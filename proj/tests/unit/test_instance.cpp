#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "citytsp/instance.hpp"
#include "citytsp/io.hpp"
#include "citytsp/stats.hpp"

using namespace citytsp;

namespace {

CitySelection make_selection(int n_cities, std::uint64_t seed = 3) {
    const auto grid = build_city_grid(0.2, 0.2);
    return select_well_connected(grid, n_cities, Rng(seed, Stream::Selection));
}

}  // namespace

TEST_CASE("binomial sample in one city is n uniform points in that square") {
    const auto sel = make_selection(1);
    const auto f = DensityField::uniform();
    const auto inst = sample_binomial(sel, f, 5, Rng(9, Stream::Sampling));
    REQUIRE(inst.node_count() == 5);
    const Rect rect = sel.grid.city_rect(sel.indices[0]);
    for (const auto& p : inst.nodes) REQUIRE(rect.contains(p));
    REQUIRE(inst.per_city_counts() == std::vector<long>{5});
}

TEST_CASE("every node lies inside its assigned city square") {
    const auto sel = make_selection(6, 17);
    const auto f = DensityField::checker(2.0);
    const auto inst = sample_binomial(sel, f, 500, Rng(5, Stream::Sampling));
    for (int i = 0; i < inst.node_count(); ++i) {
        const int pos = inst.city_of[static_cast<std::size_t>(i)];
        const Rect rect = sel.grid.city_rect(sel.indices[static_cast<std::size_t>(pos)]);
        REQUIRE(rect.contains(inst.nodes[static_cast<std::size_t>(i)]));
    }
}

TEST_CASE("uniform binomial per-city counts pass a chi-square fit") {
    const int N = 9;
    const long n = 10000;
    const auto sel = make_selection(N);
    const auto inst = sample_binomial(sel, DensityField::uniform(), n, Rng(21, Stream::Sampling));
    const auto counts = inst.per_city_counts();
    const double expected = static_cast<double>(n) / N;
    double stat = 0.0;
    for (long c : counts) stat += (c - expected) * (c - expected) / expected;
    // chi-square df=8 critical value at p=0.001; below it means p > 0.001.
    REQUIRE(stat < 26.1245);
}

TEST_CASE("two-level density puts per-city masses inside the eta bounds") {
    const auto sel = make_selection(4, 2);
    const auto f = DensityField::checker(2.0);
    const auto mass = city_masses(sel, f);
    const int N = sel.size();
    double total = 0.0;
    for (double p_l : mass) {
        REQUIRE(p_l >= f.eta1() / N - 1e-12);
        REQUIRE(p_l <= f.eta2() / N + 1e-12);
        total += p_l;
    }
    REQUIRE(total == Catch::Approx(1.0).margin(1e-12));

    // Empirical frequencies agree with the exact masses within 4 sigma.
    const long n = 20000;
    const auto inst = sample_binomial(sel, f, n, Rng(33, Stream::Sampling));
    const auto counts = inst.per_city_counts();
    for (int l = 0; l < N; ++l) {
        const double p_l = mass[static_cast<std::size_t>(l)];
        const double se = std::sqrt(p_l * (1.0 - p_l) / static_cast<double>(n));
        REQUIRE(static_cast<double>(counts[static_cast<std::size_t>(l)]) / n ==
                Catch::Approx(p_l).margin(4.0 * se));
    }
}

TEST_CASE("uniform binomial counts are exchangeable across congruent cities") {
    const int N = 4;
    const auto sel = make_selection(N, 8);
    const long n = 64;
    const int trials = 3000;
    std::vector<RunningStat> per_city(N);
    const Rng root(77, Stream::Trials);
    for (int t = 0; t < trials; ++t) {
        const auto inst = sample_binomial(sel, DensityField::uniform(), n, root.fork(t));
        const auto counts = inst.per_city_counts();
        for (int l = 0; l < N; ++l) per_city[static_cast<std::size_t>(l)].add(static_cast<double>(counts[l]));
    }
    const double expected = static_cast<double>(n) / N;
    for (const auto& st : per_city) REQUIRE(st.mean() == Catch::Approx(expected).margin(4.0 * st.se()));
}

TEST_CASE("poisson zero-count probability matches e^-1") {
    const auto sel = make_selection(1);
    const auto f = DensityField::uniform();
    const int trials = 100000;
    int zeros = 0;
    const Rng root(4, Stream::Trials);
    for (int t = 0; t < trials; ++t) {
        const auto inst = sample_poisson(sel, f, 1.0, root.fork(t));
        if (inst.node_count() == 0) ++zeros;
    }
    const double p = std::exp(-1.0);
    const double se = std::sqrt(p * (1.0 - p) / trials);
    REQUIRE(static_cast<double>(zeros) / trials == Catch::Approx(p).margin(3.0 * se));
}

TEST_CASE("poisson counts across disjoint cities are uncorrelated") {
    const auto sel = make_selection(2, 5);
    const auto f = DensityField::uniform();
    const int trials = 2000;
    RunningCov cov;
    RunningStat s1, s2;
    const Rng root(12, Stream::Trials);
    for (int t = 0; t < trials; ++t) {
        const auto counts = sample_poisson(sel, f, 40.0, root.fork(t)).per_city_counts();
        cov.add(static_cast<double>(counts[0]), static_cast<double>(counts[1]));
        s1.add(static_cast<double>(counts[0]));
        s2.add(static_cast<double>(counts[1]));
    }
    const double corr = cov.covariance() / (s1.stddev() * s2.stddev());
    REQUIRE(std::abs(corr) <= 3.0 / std::sqrt(static_cast<double>(trials)));
}

TEST_CASE("poisson mean count concentrates near mean_n") {
    const auto sel = make_selection(1, 9);
    const int trials = 10000;
    RunningStat st;
    const Rng root(31, Stream::Trials);
    for (int t = 0; t < trials; ++t)
        st.add(static_cast<double>(sample_poisson(sel, DensityField::uniform(), 50.0, root.fork(t)).node_count()));
    REQUIRE(st.mean() >= 48.5);
    REQUIRE(st.mean() <= 51.5);
}

TEST_CASE("resampling with the same seed is byte-identical") {
    const auto sel = make_selection(4, 6);
    const auto f = DensityField::checker(1.5);
    const auto a = sample_binomial(sel, f, 200, Rng(55, Stream::Sampling));
    const auto b = sample_binomial(sel, f, 200, Rng(55, Stream::Sampling));
    REQUIRE(instance_to_json(a).dump() == instance_to_json(b).dump());

    const auto pa = sample_poisson(sel, f, 80.0, Rng(56, Stream::Sampling));
    const auto pb = sample_poisson(sel, f, 80.0, Rng(56, Stream::Sampling));
    REQUIRE(instance_to_json(pa).dump() == instance_to_json(pb).dump());
}

TEST_CASE("rejection acceptance rate is at least eps1/eps2") {
    const auto sel = make_selection(4, 10);
    const auto f = DensityField::checker(3.0);
    SampleStats stats;
    (void)sample_binomial(sel, f, 20000, Rng(14, Stream::Sampling), &stats);
    const double floor = f.eps1() / f.eps2();
    const double se = std::sqrt(floor * (1.0 - floor) / static_cast<double>(stats.proposals));
    REQUIRE(stats.acceptance_rate() >= floor - 3.0 * se);
}

TEST_CASE("sampler preconditions") {
    const auto sel = make_selection(2);
    REQUIRE_THROWS_AS(sample_binomial(sel, DensityField::uniform(), 0, Rng(1)), ParameterError);
    REQUIRE_THROWS_AS(sample_poisson(sel, DensityField::uniform(), 0.0, Rng(1)), ParameterError);
}
