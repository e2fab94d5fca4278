#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "citytsp/bounds.hpp"
#include "citytsp/city_grid.hpp"
#include "citytsp/density.hpp"
#include "citytsp/errors.hpp"
#include "citytsp/exact.hpp"
#include "citytsp/instance.hpp"
#include "citytsp/merge.hpp"
#include "citytsp/rng.hpp"
#include "citytsp/stats.hpp"
#include "citytsp/strips.hpp"
#include "citytsp/tour.hpp"

namespace citytsp {

struct DensitySpec {
    enum class Kind { Uniform, Checker };
    Kind kind = Kind::Uniform;
    double ratio = 1.0;  // checker high/low ratio
    int resolution = 16;

    DensityField to_field() const {
        return kind == Kind::Uniform ? DensityField::uniform(resolution)
                                     : DensityField::checker(ratio, resolution);
    }

    std::string describe() const {
        return kind == Kind::Uniform ? "uniform" : "checker:" + std::to_string(ratio);
    }
};

enum class StudyKind { CityTrials, NnScaling, Covariance, Scaling, Unconstrained, PmfCompare };

/// Which solver produced a per-city length.
enum class CitySolver : char { Empty = 'z', Exact = 'e', Strips = 's' };

struct CityTrial {
    long count = 0;
    double t_l = 0.0;
    CitySolver method = CitySolver::Empty;
    bool u_l = false;  // eta1*n/(2N) <= N_l <= 2*eta2*n/N
};

struct TrialRecord {
    long trial_index = 0;
    std::uint64_t trial_seed = 0;
    long n = 0;
    int n_cities = 0;
    double r = 0.0;
    double s = 0.0;
    std::vector<CityTrial> per_city;
    double v_n = 0.0;
    double merged_length = 0.0;
    double upper_slack = 0.0;  // merged - V_n
    double b_n = 0.0;          // r * sqrt(n N)
    bool u_tot = false;
    bool merged_via_cycles = false;  // false: whole-square 5 sqrt(n) fallback bound
    int max_removals = 0;
};

struct ExperimentConfig {
    StudyKind study = StudyKind::CityTrials;
    double r = 0.0;
    double s = 0.0;
    int n_cities = 0;
    std::vector<long> n_schedule;
    std::vector<int> N_schedule;  // paired with n_schedule for scaling/covariance studies
    DensitySpec density;
    long trials = 1;
    std::uint64_t seed = 0;
    double M = 0.0;  // regime constant; 0 disables the r^2 >= M log(n)/n check
    int exact_cap = 12;
    bool exact_only = false;
    ProcessKind process = ProcessKind::Binomial;
    int pair_l1 = -1;
    int pair_l2 = -1;
    std::vector<long> k_schedule;
    long samples = 0;
    long pmf_n = 0;
    long pmf_N = 0;
    double pmf_eta1 = 1.0;
    double pmf_eta2 = 1.0;

    long n_single() const {
        if (n_schedule.size() != 1)
            throw ParameterError("ExperimentConfig: this study takes a single n");
        return n_schedule.front();
    }
};

/// Named inequality check of the dense regime (Eq. r^2 >= M log(n)/n).
inline void check_regime(double r, double M, long n) {
    if (M <= 0.0) return;
    const double rhs = M * std::log(static_cast<double>(n)) / static_cast<double>(n);
    if (r * r < rhs)
        throw ParameterError("regime violation: r^2 >= M*log(n)/n fails (r^2 = " + std::to_string(r * r) +
                             ", M*log(n)/n = " + std::to_string(rhs) + ")");
}

namespace detail {

struct CitySolve {
    double length = 0.0;
    CitySolver method = CitySolver::Empty;
    std::optional<Tour> tour;  // local indices; present when count >= 3
};

inline CitySolve solve_city(std::span<const Point> pts, const Rect& rect, int exact_cap, bool exact_only) {
    CitySolve out;
    if (pts.size() <= 2) return out;
    if (static_cast<int>(pts.size()) <= exact_cap) {
        out.tour = exact_tsp(pts);
        out.method = CitySolver::Exact;
    } else {
        if (exact_only)
            throw CapabilityError("solve_city: " + std::to_string(pts.size()) +
                                  " nodes exceed the exact cap in exact-only mode");
        auto [tour, cert] = strips_tour(pts, Point{rect.x0, rect.y0}, rect.w);
        out.tour = std::move(tour);
        out.method = CitySolver::Strips;
    }
    out.length = out.tour->length;
    return out;
}

}  // namespace detail

/// One Monte Carlo trial of the dense-cities model: sample nodes, solve every
/// city, sum V_n, and merge (or fall back to the 5 sqrt(n) whole-square bound
/// when some city is too thin to merge).
inline TrialRecord run_city_trial(const CitySelection& sel, const DensityField& field, long n,
                                  ProcessKind process, Rng trial_rng, int exact_cap, bool exact_only) {
    const int N = sel.size();
    const CityGrid& grid = sel.grid;
    TrialRecord rec;
    rec.trial_seed = trial_rng.key();
    rec.n = n;
    rec.n_cities = N;
    rec.r = grid.r;
    rec.s = grid.s;
    rec.b_n = grid.r * std::sqrt(static_cast<double>(n) * N);

    const Instance inst = (process == ProcessKind::Binomial)
                              ? sample_binomial(sel, field, n, trial_rng)
                              : sample_poisson(sel, field, static_cast<double>(n), trial_rng);

    std::vector<std::vector<int>> ids(static_cast<std::size_t>(N));
    for (int i = 0; i < inst.node_count(); ++i)
        ids[static_cast<std::size_t>(inst.city_of[static_cast<std::size_t>(i)])].push_back(i);

    const double eta1 = field.eta1();
    const double eta2 = field.eta2();
    const double count_lo = eta1 * static_cast<double>(n) / (2.0 * N);
    const double count_hi = 2.0 * eta2 * static_cast<double>(n) / N;

    rec.per_city.resize(static_cast<std::size_t>(N));
    std::vector<std::pair<int, Tour>> cycles;
    bool mergeable = true;
    rec.u_tot = true;
    for (int l = 0; l < N; ++l) {
        auto& city = rec.per_city[static_cast<std::size_t>(l)];
        const auto& own = ids[static_cast<std::size_t>(l)];
        city.count = static_cast<long>(own.size());
        city.u_l = static_cast<double>(city.count) >= count_lo && static_cast<double>(city.count) <= count_hi;
        rec.u_tot = rec.u_tot && city.u_l;

        std::vector<Point> pts;
        pts.reserve(own.size());
        for (int id : own) pts.push_back(inst.nodes[static_cast<std::size_t>(id)]);
        auto solved = detail::solve_city(pts, grid.city_rect(sel.indices[static_cast<std::size_t>(l)]),
                                         exact_cap, exact_only);
        city.t_l = solved.length;
        city.method = solved.method;
        rec.v_n += solved.length;

        if (city.count < 8) {
            mergeable = false;
        } else if (mergeable) {
            Tour global = *solved.tour;
            for (int& idx : global.order) idx = own[static_cast<std::size_t>(idx)];
            cycles.emplace_back(l, std::move(global));
        }
    }

    if (mergeable) {
        auto [merged, trace] = merge_cycles(inst.nodes, sel, cycles, grid.r, grid.s);
        rec.merged_length = merged.length;
        rec.merged_via_cycles = true;
        rec.max_removals = trace.max_removals;
        const double slack_cap = 2.0 * (N - 1) * (grid.s + 8.0 * grid.r);
        if (rec.merged_length - rec.v_n > slack_cap + 1e-9)
            throw InvariantError("run_city_trial: merged slack exceeds 2(N-1)(s+8r), trial seed " +
                                 std::to_string(rec.trial_seed));
    } else {
        rec.merged_length = 5.0 * std::sqrt(static_cast<double>(n));
        rec.merged_via_cycles = false;
    }
    rec.upper_slack = rec.merged_length - rec.v_n;
    if (rec.v_n > rec.merged_length + 1e-9)
        throw InvariantError("run_city_trial: V_n exceeds the merged length, trial seed " +
                             std::to_string(rec.trial_seed));
    return rec;
}

/// Seeded trial stream. Requires s > r*sqrt(2) so V_n is a genuine lower
/// bound in every trial.
inline std::vector<TrialRecord> run_city_trials(const ExperimentConfig& config) {
    if (config.trials < 1) throw ParameterError("run_city_trials: trials must be >= 1");
    if (config.exact_cap < 3 || config.exact_cap > kExactTspCap)
        throw ParameterError("run_city_trials: exact_cap must lie in [3, 18]");
    const long n = config.n_single();
    check_regime(config.r, config.M, n);
    const CityGrid grid = build_city_grid(config.r, config.s);
    if (!(grid.s > grid.r * std::sqrt(2.0)))
        throw ParameterError("run_city_trials: need s > r*sqrt(2) for the V_n lower bound");
    const CitySelection sel =
        select_well_connected(grid, config.n_cities, Rng(config.seed, Stream::Selection));
    const DensityField field = config.density.to_field();

    std::vector<TrialRecord> records;
    records.reserve(static_cast<std::size_t>(config.trials));
    const Rng trials_root(config.seed, Stream::Trials);
    for (long t = 0; t < config.trials; ++t) {
        TrialRecord rec = run_city_trial(sel, field, n, config.process,
                                         trials_root.fork(static_cast<std::uint64_t>(t)), config.exact_cap,
                                         config.exact_only);
        rec.trial_index = t;
        records.push_back(std::move(rec));
    }
    return records;
}

struct ScalarSummary {
    double mean = 0.0;
    double variance = 0.0;
    double se = 0.0;
    long count = 0;
};

struct SummaryStats {
    std::map<std::string, ScalarSummary> scalars;
    std::map<std::string, double> covariances;  // keyed "cov(T_i,T_j)"
};

/// Order-stable aggregation of a trial stream. Pass city index pairs to also
/// estimate cov(T_l1, T_l2).
inline SummaryStats aggregate(std::span<const TrialRecord> records,
                              const std::vector<std::pair<int, int>>& pairs = {}) {
    if (records.empty()) throw ParameterError("aggregate: need at least one record");
    std::map<std::string, RunningStat> stats;
    std::vector<RunningCov> covs(pairs.size());
    for (const TrialRecord& rec : records) {
        stats["v_n"].add(rec.v_n);
        stats["merged_length"].add(rec.merged_length);
        stats["upper_slack"].add(rec.upper_slack);
        stats["u_tot_rate"].add(rec.u_tot ? 1.0 : 0.0);
        if (rec.b_n > 0.0) {
            stats["vn_over_bn"].add(rec.v_n / rec.b_n);
            stats["merged_over_bn"].add(rec.merged_length / rec.b_n);
        }
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            const auto [l1, l2] = pairs[p];
            covs[p].add(rec.per_city.at(static_cast<std::size_t>(l1)).t_l,
                        rec.per_city.at(static_cast<std::size_t>(l2)).t_l);
        }
    }
    SummaryStats out;
    for (const auto& [name, st] : stats)
        out.scalars[name] = ScalarSummary{st.mean(), st.variance(), st.se(), st.count()};
    for (std::size_t p = 0; p < pairs.size(); ++p)
        out.covariances["cov(T_" + std::to_string(pairs[p].first) + ",T_" + std::to_string(pairs[p].second) +
                        ")"] = covs[p].covariance();
    return out;
}

struct NnScalingRow {
    long k = 0;
    double mean_d = 0.0;
    double normalized = 0.0;  // mean_d * sqrt(k) / r, ~constant under the sqrt scaling
    double se = 0.0;
};

/// Monte Carlo estimate of E d(Z_k, {Z_1..Z_{k-1}}) for i.i.d. points in an
/// r x r square with the conditional density of f.
inline std::vector<NnScalingRow> estimate_nn_distance_scaling(std::span<const long> k_schedule, double r,
                                                              const DensitySpec& density, long samples,
                                                              std::uint64_t seed) {
    if (samples < 1000) throw ParameterError("estimate_nn_distance_scaling: need samples >= 1000");
    if (!(r > 0.0) || r > 1.0) throw ParameterError("estimate_nn_distance_scaling: need 0 < r <= 1");
    const DensityField field = density.to_field();
    const Rect box{0.0, 0.0, r, r};
    std::vector<NnScalingRow> rows;
    rows.reserve(k_schedule.size());
    const Rng root(seed, Stream::Sampling);
    std::vector<Point> pts;
    for (long k : k_schedule) {
        if (k < 2) throw ParameterError("estimate_nn_distance_scaling: need k >= 2");
        Rng rng = root.fork(static_cast<std::uint64_t>(k));
        RunningStat stat;
        for (long sidx = 0; sidx < samples; ++sidx) {
            pts.clear();
            for (long i = 0; i < k; ++i) pts.push_back(detail::rejection_sample(box, field, rng, nullptr));
            double best = std::numeric_limits<double>::infinity();
            for (long i = 0; i + 1 < k; ++i)
                best = std::min(best, dist(pts[static_cast<std::size_t>(k - 1)], pts[static_cast<std::size_t>(i)]));
            stat.add(best);
        }
        rows.push_back(NnScalingRow{k, stat.mean(), stat.mean() * std::sqrt(static_cast<double>(k)) / r,
                                    stat.se()});
    }
    return rows;
}

struct CovarianceRow {
    long n = 0;
    int n_cities = 0;
    double covariance = 0.0;
    double cov_se_boot = 0.0;
    double correlation = 0.0;
    double corr_se_boot = 0.0;
    double scale = 0.0;  // r^2 n^2 / N^3
    bool low_trials = false;
};

/// Covariance of the pair (T_l1, T_l2) along a schedule of (n, N) points.
inline std::vector<CovarianceRow> estimate_covariance_decay(const ExperimentConfig& config) {
    if (config.pair_l1 < 0 || config.pair_l2 < 0)
        throw ParameterError("estimate_covariance_decay: pair of city positions required");
    if (config.pair_l1 == config.pair_l2)
        throw ParameterError("estimate_covariance_decay: the two cities must differ");
    if (config.trials < 2) throw ParameterError("estimate_covariance_decay: need trials >= 2");
    if (config.n_schedule.empty() || config.n_schedule.size() != config.N_schedule.size())
        throw ParameterError("estimate_covariance_decay: n_schedule and N_schedule must pair up");

    const DensityField field = config.density.to_field();
    const CityGrid grid = build_city_grid(config.r, config.s);
    std::vector<CovarianceRow> rows;
    for (std::size_t point = 0; point < config.n_schedule.size(); ++point) {
        const long n = config.n_schedule[point];
        const int N = config.N_schedule[point];
        check_regime(config.r, config.M, n);
        if (config.pair_l1 >= N || config.pair_l2 >= N)
            throw ParameterError("estimate_covariance_decay: pair positions must be < N");
        const CitySelection sel = select_well_connected(
            grid, N, Rng(config.seed, Stream::Selection).fork(static_cast<std::uint64_t>(point)));

        std::vector<double> t1, t2;
        t1.reserve(static_cast<std::size_t>(config.trials));
        t2.reserve(static_cast<std::size_t>(config.trials));
        const Rng trials_root = Rng(config.seed, Stream::Trials).fork(static_cast<std::uint64_t>(point));
        for (long t = 0; t < config.trials; ++t) {
            Rng rng = trials_root.fork(static_cast<std::uint64_t>(t));
            const Instance inst = (config.process == ProcessKind::Binomial)
                                      ? sample_binomial(sel, field, n, rng)
                                      : sample_poisson(sel, field, static_cast<double>(n), rng);
            double t_pair[2] = {0.0, 0.0};
            const int wanted[2] = {config.pair_l1, config.pair_l2};
            for (int w = 0; w < 2; ++w) {
                std::vector<Point> pts;
                for (int i = 0; i < inst.node_count(); ++i)
                    if (inst.city_of[static_cast<std::size_t>(i)] == wanted[w])
                        pts.push_back(inst.nodes[static_cast<std::size_t>(i)]);
                t_pair[w] = detail::solve_city(
                                pts, grid.city_rect(sel.indices[static_cast<std::size_t>(wanted[w])]),
                                config.exact_cap, config.exact_only)
                                .length;
            }
            t1.push_back(t_pair[0]);
            t2.push_back(t_pair[1]);
        }

        CovarianceRow row;
        row.n = n;
        row.n_cities = N;
        row.covariance = sample_covariance(t1, t2);
        row.correlation = sample_correlation(t1, t2);
        const Rng boot = Rng(config.seed, Stream::Bootstrap).fork(static_cast<std::uint64_t>(point));
        row.cov_se_boot = bootstrap_se_pairs(t1, t2, sample_covariance, boot.fork(1));
        row.corr_se_boot = bootstrap_se_pairs(t1, t2, sample_correlation, boot.fork(2));
        row.scale = config.r * config.r * static_cast<double>(n) * static_cast<double>(n) /
                    (static_cast<double>(N) * N * N);
        row.low_trials = config.trials < 1000;
        rows.push_back(row);
    }
    return rows;
}

struct ScalingRow {
    long n = 0;
    int n_cities = 0;
    double b_n = 0.0;
    double vn_ratio_mean = 0.0;
    double vn_ratio_se = 0.0;
    double merged_ratio_mean = 0.0;
    double merged_ratio_se = 0.0;
    double merged_ratio_cv = 0.0;
    double cv_se_boot = 0.0;
    double theta5_hat = 0.0;          // 1.2 * observed mean ratio
    double p_upper_below_theta5 = 0.0;  // empirical P(merged/b_n <= theta5_hat)
};

/// Theorem-1 scaling surface: mean V_n/b_n and merged/b_n along a schedule of
/// (n, N) points obeying the regime checks. Pass `all_records` to also
/// receive the per-point trial streams.
inline std::vector<ScalingRow> scaling_study(const ExperimentConfig& config,
                                             std::vector<std::vector<TrialRecord>>* all_records = nullptr) {
    if (config.n_schedule.empty() || config.n_schedule.size() != config.N_schedule.size())
        throw ParameterError("scaling_study: n_schedule and N_schedule must pair up");
    if (!(config.s > config.r * std::sqrt(2.0)))
        throw ParameterError("regime violation: s > r*sqrt(2) fails (s = " + std::to_string(config.s) +
                             ", r*sqrt(2) = " + std::to_string(config.r * std::sqrt(2.0)) + ")");
    std::vector<ScalingRow> rows;
    for (std::size_t point = 0; point < config.n_schedule.size(); ++point) {
        ExperimentConfig sub = config;
        sub.n_schedule = {config.n_schedule[point]};
        sub.n_cities = config.N_schedule[point];
        sub.seed = Rng(config.seed).fork(static_cast<std::uint64_t>(point)).key();
        const auto records = run_city_trials(sub);

        ScalingRow row;
        row.n = config.n_schedule[point];
        row.n_cities = sub.n_cities;
        row.b_n = records.front().b_n;
        RunningStat vn_ratio, merged_ratio;
        std::vector<double> merged_ratios;
        merged_ratios.reserve(records.size());
        for (const auto& rec : records) {
            vn_ratio.add(rec.v_n / rec.b_n);
            merged_ratio.add(rec.merged_length / rec.b_n);
            merged_ratios.push_back(rec.merged_length / rec.b_n);
        }
        row.vn_ratio_mean = vn_ratio.mean();
        row.vn_ratio_se = vn_ratio.se();
        row.merged_ratio_mean = merged_ratio.mean();
        row.merged_ratio_se = merged_ratio.se();
        row.merged_ratio_cv = merged_ratio.cv();
        row.cv_se_boot = bootstrap_se(
            merged_ratios,
            [](std::span<const double> xs) {
                RunningStat st;
                for (double x : xs) st.add(x);
                return st.cv();
            },
            Rng(config.seed, Stream::Bootstrap).fork(static_cast<std::uint64_t>(point)));
        row.theta5_hat = 1.2 * row.merged_ratio_mean;
        long below = 0;
        for (double v : merged_ratios)
            if (v <= row.theta5_hat) ++below;
        row.p_upper_below_theta5 = static_cast<double>(below) / static_cast<double>(merged_ratios.size());
        rows.push_back(row);
        if (all_records) all_records->push_back(records);
    }
    return rows;
}

struct UnconstrainedRow {
    long n = 0;
    double mean_strips = 0.0;
    double mean_nn = 0.0;
    double mean_exact = 0.0;  // NaN when n > 12
    bool exact_available = false;
    double ceiling = 0.0;  // 5 sqrt(n)
    double nn_normalized = 0.0;  // mean_nn / sqrt(n)
};

inline constexpr long kUnconstrainedExactCap = 12;
inline constexpr long kUnconstrainedStripsCap = 2000;

/// Theorem-2 surface on the unit square: strips length against the 5 sqrt(n)
/// ceiling, the nearest-neighbor lower bound, and exact lengths for tiny n.
inline std::vector<UnconstrainedRow> unconstrained_study(std::span<const long> n_schedule, long trials,
                                                         const DensitySpec& density, std::uint64_t seed) {
    if (trials < 1) throw ParameterError("unconstrained_study: trials must be >= 1");
    const DensityField field = density.to_field();
    std::vector<UnconstrainedRow> rows;
    const Rng root(seed, Stream::Trials);
    for (long n : n_schedule) {
        if (n < 3 || n > kUnconstrainedStripsCap)
            throw ParameterError("unconstrained_study: n must lie in [3, 2000]");
        UnconstrainedRow row;
        row.n = n;
        row.ceiling = 5.0 * std::sqrt(static_cast<double>(n));
        row.exact_available = n <= kUnconstrainedExactCap;
        RunningStat st_strips, st_nn, st_exact;
        const Rng n_root = root.fork(static_cast<std::uint64_t>(n));
        for (long t = 0; t < trials; ++t) {
            Rng rng = n_root.fork(static_cast<std::uint64_t>(t));
            const Instance inst = sample_unconstrained(field, n, rng);
            auto [tour, cert] = strips_tour(inst.nodes, Point{0.0, 0.0}, 1.0);
            if (tour.length > row.ceiling + 1e-9)
                throw InvariantError("unconstrained_study: strips length exceeds 5*sqrt(n), trial seed " +
                                     std::to_string(rng.key()));
            const double nn = nn_lower_bound(inst.nodes);
            st_strips.add(tour.length);
            st_nn.add(nn);
            if (row.exact_available) {
                const Tour exact = exact_tsp(inst.nodes);
                if (nn > exact.length + 1e-9 || exact.length > tour.length + 1e-9)
                    throw InvariantError(
                        "unconstrained_study: nn <= exact <= strips ordering failed, trial seed " +
                        std::to_string(rng.key()));
                st_exact.add(exact.length);
            }
        }
        row.mean_strips = st_strips.mean();
        row.mean_nn = st_nn.mean();
        row.mean_exact = row.exact_available ? st_exact.mean() : std::numeric_limits<double>::quiet_NaN();
        row.nn_normalized = row.mean_nn / std::sqrt(static_cast<double>(n));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace citytsp
