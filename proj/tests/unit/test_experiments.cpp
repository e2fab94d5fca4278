#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "citytsp/exact.hpp"
#include "citytsp/experiments.hpp"

using namespace citytsp;

namespace {

ExperimentConfig base_config() {
    ExperimentConfig cfg;
    cfg.r = 0.1;
    cfg.s = 0.35;
    cfg.n_cities = 4;
    cfg.n_schedule = {48};
    cfg.trials = 50;
    cfg.seed = 1234;
    cfg.exact_cap = 12;
    return cfg;
}

}  // namespace

TEST_CASE("identical configs give identical trial streams") {
    const auto a = run_city_trials(base_config());
    const auto b = run_city_trials(base_config());
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].trial_seed == b[i].trial_seed);
        REQUIRE(a[i].v_n == b[i].v_n);
        REQUIRE(a[i].merged_length == b[i].merged_length);
        REQUIRE(a[i].u_tot == b[i].u_tot);
    }
}

TEST_CASE("sandwich and bookkeeping invariants hold in every trial") {
    const auto records = run_city_trials(base_config());
    for (const auto& rec : records) {
        REQUIRE(rec.v_n <= rec.merged_length + 1e-9);
        REQUIRE(rec.per_city.size() == 4);
        long total = 0;
        double v_sum = 0.0;
        for (const auto& city : rec.per_city) {
            total += city.count;
            v_sum += city.t_l;
            if (city.count <= 2) {
                REQUIRE(city.t_l == 0.0);
                REQUIRE(city.method == CitySolver::Empty);
            }
        }
        REQUIRE(total == rec.n);
        REQUIRE(rec.v_n == Catch::Approx(v_sum).margin(1e-12));
        REQUIRE(rec.b_n == Catch::Approx(0.1 * std::sqrt(48.0 * 4.0)).margin(1e-12));
        if (rec.merged_via_cycles)
            REQUIRE(rec.upper_slack <= 2.0 * 3.0 * (0.35 + 0.8) + 1e-9);
        else
            REQUIRE(rec.merged_length == Catch::Approx(5.0 * std::sqrt(48.0)));
    }
}

TEST_CASE("global exact solve fits between V_n and the merged length") {
    // Small enough for a global exact solve: 2 cities x 8 nodes = 16 <= 18.
    ExperimentConfig cfg = base_config();
    cfg.n_cities = 2;
    cfg.n_schedule = {16};
    cfg.trials = 30;
    cfg.exact_cap = 10;
    const auto grid = build_city_grid(cfg.r, cfg.s);
    const auto sel = select_well_connected(grid, 2, Rng(cfg.seed, Stream::Selection));
    const auto field = cfg.density.to_field();
    const Rng root(cfg.seed, Stream::Trials);
    int checked = 0;
    for (long t = 0; t < cfg.trials; ++t) {
        Rng rng = root.fork(static_cast<std::uint64_t>(t));
        const auto inst = sample_binomial(sel, field, 16, rng);
        const auto counts = inst.per_city_counts();
        if (counts[0] < 8 || counts[1] < 8) continue;
        const auto rec = run_city_trial(sel, field, 16, ProcessKind::Binomial,
                                        root.fork(static_cast<std::uint64_t>(t)), cfg.exact_cap, false);
        const double global_exact = exact_tsp(inst.nodes).length;
        REQUIRE(rec.v_n <= global_exact + 1e-9);
        REQUIRE(global_exact <= rec.merged_length + 1e-9);
        ++checked;
    }
    REQUIRE(checked > 5);
}

TEST_CASE("mean T_l over r sqrt(n/N) is stable when n doubles") {
    ExperimentConfig cfg = base_config();
    cfg.n_cities = 4;
    cfg.trials = 500;
    auto ratio_at = [&](long n) {
        ExperimentConfig c = cfg;
        c.n_schedule = {n};
        const auto records = run_city_trials(c);
        RunningStat st;
        const double scale = c.r * std::sqrt(static_cast<double>(n) / c.n_cities);
        for (const auto& rec : records)
            for (const auto& city : rec.per_city) st.add(city.t_l / scale);
        return st.mean();
    };
    const double at32 = ratio_at(32);
    const double at64 = ratio_at(64);
    REQUIRE(std::abs(at64 - at32) / at32 < 0.25);
}

TEST_CASE("U_l frequency implies a positive exponential rate") {
    ExperimentConfig cfg = base_config();
    cfg.trials = 400;
    for (const long per_city : {8L, 16L, 32L}) {
        ExperimentConfig c = cfg;
        c.n_schedule = {per_city * c.n_cities};
        const auto records = run_city_trials(c);
        long held = 0, total = 0;
        for (const auto& rec : records)
            for (const auto& city : rec.per_city) {
                held += city.u_l ? 1 : 0;
                ++total;
            }
        const double fail_rate =
            std::max(1.0 - static_cast<double>(held) / total, 1.0 / static_cast<double>(total + 1));
        const double delta4_hat = -std::log(fail_rate) * static_cast<double>(c.n_cities) /
                                  static_cast<double>(c.n_schedule.front());
        INFO("n/N = " << per_city << " fail rate " << fail_rate);
        REQUIRE(delta4_hat > 0.0);
        REQUIRE(static_cast<double>(held) / total >= 1.0 - std::exp(-delta4_hat * per_city) - 1e-12);
    }
}

TEST_CASE("policy errors and regime errors are reported") {
    ExperimentConfig cfg = base_config();
    cfg.exact_only = true;
    cfg.exact_cap = 3;
    cfg.n_schedule = {200};  // some city will exceed 3 nodes
    REQUIRE_THROWS_AS(run_city_trials(cfg), CapabilityError);

    ExperimentConfig tight = base_config();
    tight.M = 100.0;  // r^2 = 0.01 << 100 log(48)/48
    REQUIRE_THROWS_AS(run_city_trials(tight), ParameterError);

    ExperimentConfig close_cities = base_config();
    close_cities.r = 0.2;
    close_cities.s = 0.2;  // s < r sqrt 2
    REQUIRE_THROWS_AS(run_city_trials(close_cities), ParameterError);
}

TEST_CASE("nn distance scaling shows the 1/sqrt(k) law") {
    const std::vector<long> ks{8, 16, 32, 64};
    const auto rows = estimate_nn_distance_scaling(ks, 0.2, DensitySpec{}, 2000, 77);
    REQUIRE(rows.size() == 4);
    std::vector<double> lx, ly;
    double norm_min = 1e9, norm_max = 0.0;
    for (const auto& row : rows) {
        lx.push_back(std::log(static_cast<double>(row.k)));
        ly.push_back(std::log(row.mean_d));
        norm_min = std::min(norm_min, row.normalized);
        norm_max = std::max(norm_max, row.normalized);
    }
    const double slope = ols_slope(lx, ly);
    REQUIRE(slope > -0.60);
    REQUIRE(slope < -0.40);
    REQUIRE(norm_max / norm_min <= 1.5);
}

TEST_CASE("nn distance scaling k=2 mean lies in (0, r sqrt 2)") {
    const auto rows = estimate_nn_distance_scaling(std::vector<long>{2}, 0.1, DensitySpec{}, 1000, 5);
    REQUIRE(rows[0].mean_d > 0.0);
    REQUIRE(rows[0].mean_d < 0.1 * std::sqrt(2.0));
    REQUIRE_THROWS_AS(estimate_nn_distance_scaling(std::vector<long>{1}, 0.1, DensitySpec{}, 1000, 5),
                      ParameterError);
    REQUIRE_THROWS_AS(estimate_nn_distance_scaling(std::vector<long>{4}, 0.1, DensitySpec{}, 10, 5),
                      ParameterError);
}

TEST_CASE("poissonized city lengths are uncorrelated; binomial covariance shrinks with N") {
    ExperimentConfig cfg;
    cfg.r = 0.1;
    cfg.s = 0.2;
    cfg.density = DensitySpec{};
    cfg.trials = 400;
    cfg.seed = 31;
    cfg.exact_cap = 12;
    cfg.pair_l1 = 0;
    cfg.pair_l2 = 1;
    cfg.process = ProcessKind::Poisson;
    cfg.n_schedule = {64};
    cfg.N_schedule = {4};
    const auto poisson_rows = estimate_covariance_decay(cfg);
    REQUIRE(std::abs(poisson_rows[0].correlation) <= 3.0 * poisson_rows[0].corr_se_boot);
    REQUIRE(poisson_rows[0].low_trials);

    cfg.process = ProcessKind::Binomial;
    cfg.n_schedule = {64, 64};
    cfg.N_schedule = {4, 8};
    const auto rows = estimate_covariance_decay(cfg);
    REQUIRE(std::abs(rows[1].covariance) <=
            std::abs(rows[0].covariance) + 3.0 * (rows[0].cov_se_boot + rows[1].cov_se_boot));

    cfg.pair_l2 = 0;
    REQUIRE_THROWS_AS(estimate_covariance_decay(cfg), ParameterError);
}

TEST_CASE("scaling study returns bands and enforces the regime") {
    ExperimentConfig cfg;
    cfg.r = 0.1;
    cfg.s = 0.2;
    cfg.trials = 60;
    cfg.seed = 9;
    cfg.M = 0.05;
    cfg.n_schedule = {64, 128};
    cfg.N_schedule = {4, 8};
    const auto rows = scaling_study(cfg);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        REQUIRE(row.vn_ratio_mean > 0.1);
        REQUIRE(row.vn_ratio_mean < 3.0);
        REQUIRE(row.merged_ratio_mean > row.vn_ratio_mean);
        REQUIRE(row.p_upper_below_theta5 >= 0.9);
    }

    ExperimentConfig bad = cfg;
    bad.s = 0.125;  // breaks s > r sqrt 2  (and the grid)
    REQUIRE_THROWS_AS(scaling_study(bad), ParameterError);
}

TEST_CASE("unconstrained study obeys the ceiling and the ordering") {
    const std::vector<long> ns{10, 100};
    const auto rows = unconstrained_study(ns, 40, DensitySpec{}, 2024);
    REQUIRE(rows[0].exact_available);
    REQUIRE(rows[0].mean_nn <= rows[0].mean_exact + 1e-9);
    REQUIRE(rows[0].mean_exact <= rows[0].mean_strips + 1e-9);
    REQUIRE_FALSE(rows[1].exact_available);
    for (const auto& row : rows) REQUIRE(row.mean_strips <= row.ceiling);
    REQUIRE_THROWS_AS(unconstrained_study(std::vector<long>{2500}, 5, DensitySpec{}, 1), ParameterError);
}

TEST_CASE("aggregate summarizes scalars and honors preconditions") {
    const auto records = run_city_trials(base_config());
    const auto summary = aggregate(records, {{0, 1}});
    REQUIRE(summary.scalars.at("v_n").count == 50);
    REQUIRE(summary.scalars.at("merged_over_bn").mean > 0.0);
    REQUIRE(summary.scalars.at("v_n").variance >= 0.0);
    REQUIRE(summary.covariances.count("cov(T_0,T_1)") == 1);
    REQUIRE_THROWS_AS(aggregate(std::vector<TrialRecord>{}), ParameterError);

    // Identical records aggregate to zero variance.
    std::vector<TrialRecord> same(5, records.front());
    REQUIRE(aggregate(same).scalars.at("v_n").variance == 0.0);

    // Order independence.
    std::vector<TrialRecord> reversed(records.rbegin(), records.rend());
    const auto fwd = aggregate(records);
    const auto rev = aggregate(reversed);
    REQUIRE(fwd.scalars.at("v_n").mean == Catch::Approx(rev.scalars.at("v_n").mean).epsilon(1e-10));
    REQUIRE(fwd.scalars.at("v_n").variance ==
            Catch::Approx(rev.scalars.at("v_n").variance).epsilon(1e-10));
}
