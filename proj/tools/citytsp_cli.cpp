// Command-line front end: instance generation, tour construction, and the
// Monte Carlo experiment studies. Exit codes: 0 success, 2 usage/parameter,
// 3 capability cap, 4 hard invariant violation.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "citytsp/bounds.hpp"
#include "citytsp/city_grid.hpp"
#include "citytsp/density.hpp"
#include "citytsp/errors.hpp"
#include "citytsp/exact.hpp"
#include "citytsp/experiments.hpp"
#include "citytsp/instance.hpp"
#include "citytsp/io.hpp"
#include "citytsp/merge.hpp"
#include "citytsp/probability.hpp"
#include "citytsp/rng.hpp"
#include "citytsp/strips.hpp"
#include "citytsp/tour.hpp"
#include "citytsp/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParameter = 2;
constexpr int kExitCapability = 3;
constexpr int kExitInvariant = 4;

std::int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

std::string iso_date_utc() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%d", &tm_utc);
    return buf;
}

citytsp::DensitySpec parse_density(const std::string& text) {
    citytsp::DensitySpec spec;
    if (text == "uniform") {
        spec.kind = citytsp::DensitySpec::Kind::Uniform;
        return spec;
    }
    if (text.rfind("checker:", 0) == 0) {
        spec.kind = citytsp::DensitySpec::Kind::Checker;
        spec.ratio = std::stod(text.substr(8));
        return spec;
    }
    throw citytsp::ParameterError("unknown density '" + text + "' (expected uniform or checker:RATIO)");
}

citytsp::ProcessKind parse_process(const std::string& text) {
    if (text == "binomial") return citytsp::ProcessKind::Binomial;
    if (text == "poisson") return citytsp::ProcessKind::Poisson;
    throw citytsp::ParameterError("unknown process '" + text + "' (expected binomial or poisson)");
}

void write_manifest(const fs::path& path, citytsp::RunManifest manifest) {
    manifest.tool_version = citytsp::kVersion;
    manifest.finished_unix_ms = now_ms();
    citytsp::atomic_write(path, citytsp::manifest_to_json(manifest).dump(2) + "\n");
}

// ---- generate ----

struct GenerateArgs {
    double r = 0.0, s = 0.0;
    int n_cities = 0;
    long n = 0;
    std::string process = "binomial";
    std::string density = "uniform";
    std::uint64_t seed = 0;
    std::string out;
};

int run_generate(const GenerateArgs& args, const std::vector<std::string>& argv) {
    citytsp::RunManifest manifest;
    manifest.command = "generate";
    manifest.argv = argv;
    manifest.seed = args.seed;
    manifest.started_unix_ms = now_ms();

    const citytsp::DensitySpec density = parse_density(args.density);
    const citytsp::ProcessKind process = parse_process(args.process);
    const citytsp::CityGrid grid = citytsp::build_city_grid(args.r, args.s);
    const citytsp::CitySelection sel =
        citytsp::select_well_connected(grid, args.n_cities, citytsp::Rng(args.seed, citytsp::Stream::Selection));
    const citytsp::DensityField field = density.to_field();
    const citytsp::Rng sampler(args.seed, citytsp::Stream::Sampling);
    citytsp::Instance inst =
        process == citytsp::ProcessKind::Binomial
            ? citytsp::sample_binomial(sel, field, args.n, sampler)
            : citytsp::sample_poisson(sel, field, static_cast<double>(args.n), sampler);
    inst.seed = args.seed;

    citytsp::atomic_write(args.out, citytsp::instance_to_json(inst).dump(2) + "\n");
    manifest.outputs = {args.out};
    manifest.resolved = ordered_json{{"r", args.r},       {"s", args.s},           {"N", args.n_cities},
                                     {"n", args.n},       {"process", args.process}, {"density", args.density},
                                     {"seed", args.seed}, {"out", args.out}};
    write_manifest(args.out + ".manifest.json", std::move(manifest));
    std::cout << "wrote " << args.out << " (" << inst.node_count() << " nodes)\n";
    return kExitOk;
}

// ---- tour ----

struct TourArgs {
    std::string in;
    std::string method = "strips";
    double strip_width = 0.0;
    std::string out;
};

int run_tour(const TourArgs& args, const std::vector<std::string>& argv) {
    citytsp::RunManifest manifest;
    manifest.command = "tour";
    manifest.argv = argv;
    manifest.started_unix_ms = now_ms();

    const citytsp::Instance inst = citytsp::instance_from_json(nlohmann::json::parse(citytsp::read_file(args.in)));
    manifest.seed = inst.seed;
    ordered_json doc;

    if (args.method == "strips") {
        auto [tour, cert] = citytsp::strips_tour(inst.nodes, citytsp::Point{0.0, 0.0}, 1.0, args.strip_width);
        doc = citytsp::tour_to_json(tour);
        doc["method"] = "strips";
        doc["certificate"] = citytsp::certificate_to_json(cert);
    } else if (args.method == "exact") {
        const citytsp::Tour tour = citytsp::exact_tsp(inst.nodes);
        doc = citytsp::tour_to_json(tour);
        doc["method"] = "exact";
    } else if (args.method == "merge") {
        if (!inst.selection)
            throw citytsp::ParameterError("tour --method merge needs an instance with city structure");
        const citytsp::CitySelection& sel = *inst.selection;
        std::vector<std::vector<int>> ids(static_cast<std::size_t>(sel.size()));
        for (int i = 0; i < inst.node_count(); ++i)
            ids[static_cast<std::size_t>(inst.city_of[static_cast<std::size_t>(i)])].push_back(i);
        std::vector<std::pair<int, citytsp::Tour>> cycles;
        for (int l = 0; l < sel.size(); ++l) {
            const auto& own = ids[static_cast<std::size_t>(l)];
            std::vector<citytsp::Point> pts;
            pts.reserve(own.size());
            for (int id : own) pts.push_back(inst.nodes[static_cast<std::size_t>(id)]);
            auto solved = citytsp::detail::solve_city(
                pts, sel.grid.city_rect(sel.indices[static_cast<std::size_t>(l)]), 12, false);
            if (!solved.tour)
                throw citytsp::ParameterError("tour --method merge: city " + std::to_string(l) +
                                              " has fewer than 3 nodes");
            citytsp::Tour global = *solved.tour;
            for (int& idx : global.order) idx = own[static_cast<std::size_t>(idx)];
            cycles.emplace_back(l, std::move(global));
        }
        auto [tour, trace] = citytsp::merge_cycles(inst.nodes, sel, cycles, sel.grid.r, sel.grid.s);
        doc = citytsp::tour_to_json(tour);
        doc["method"] = "merge";
        doc["merge_trace"] = citytsp::merge_trace_to_json(trace);
    } else {
        throw citytsp::ParameterError("unknown method '" + args.method + "' (expected strips, exact, or merge)");
    }

    citytsp::atomic_write(args.out, doc.dump(2) + "\n");
    manifest.outputs = {args.out};
    manifest.resolved = ordered_json{{"in", args.in},
                                     {"method", args.method},
                                     {"strip_width", args.strip_width},
                                     {"out", args.out}};
    write_manifest(args.out + ".manifest.json", std::move(manifest));
    std::cout << "wrote " << args.out << "\n";
    return kExitOk;
}

// ---- experiment ----

citytsp::StudyKind parse_study(const std::string& text) {
    if (text == "city_trials") return citytsp::StudyKind::CityTrials;
    if (text == "nn_scaling") return citytsp::StudyKind::NnScaling;
    if (text == "covariance") return citytsp::StudyKind::Covariance;
    if (text == "scaling") return citytsp::StudyKind::Scaling;
    if (text == "unconstrained") return citytsp::StudyKind::Unconstrained;
    if (text == "pmf_compare") return citytsp::StudyKind::PmfCompare;
    throw citytsp::ParameterError("unknown study '" + text + "'");
}

template <typename T>
std::vector<T> parse_list(const std::string& text) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if constexpr (std::is_same_v<T, long>)
            out.push_back(std::stol(item));
        else
            out.push_back(static_cast<T>(std::stol(item)));
    }
    if (out.empty()) throw citytsp::ParameterError("empty list value '" + text + "'");
    return out;
}

/// Flat key=value experiment config. Unknown keys are errors so typos in
/// study names or parameters never pass silently.
citytsp::ExperimentConfig parse_experiment_config(const std::string& text, ordered_json& resolved) {
    static const std::set<std::string> known = {
        "study",   "r",       "s",          "N",       "n",          "n_schedule", "N_schedule",
        "density", "trials",  "seed",       "M",       "exact_cap",  "exact_only", "process",
        "pair",    "k_schedule", "samples", "eta1",    "eta2",       "p"};
    citytsp::ExperimentConfig cfg;
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw citytsp::ParameterError("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (!known.count(key))
            throw citytsp::ParameterError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (kv.count(key))
            throw citytsp::ParameterError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        kv[key] = value;
        resolved[key] = value;
    }
    if (!kv.count("study")) throw citytsp::ParameterError("config: missing required key 'study'");
    cfg.study = parse_study(kv.at("study"));

    auto get = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        return it == kv.end() ? std::nullopt : std::optional<std::string>(it->second);
    };
    if (auto v = get("r")) cfg.r = std::stod(*v);
    if (auto v = get("s")) cfg.s = std::stod(*v);
    if (auto v = get("N")) cfg.n_cities = std::stoi(*v);
    if (auto v = get("n")) cfg.n_schedule = {std::stol(*v)};
    if (auto v = get("n_schedule")) cfg.n_schedule = parse_list<long>(*v);
    if (auto v = get("N_schedule")) cfg.N_schedule = parse_list<int>(*v);
    if (auto v = get("density")) cfg.density = parse_density(*v);
    if (auto v = get("trials")) cfg.trials = std::stol(*v);
    if (auto v = get("seed")) cfg.seed = std::stoull(*v);
    if (auto v = get("M")) cfg.M = std::stod(*v);
    if (auto v = get("exact_cap")) cfg.exact_cap = std::stoi(*v);
    if (auto v = get("exact_only")) cfg.exact_only = (*v == "1" || *v == "true");
    if (auto v = get("process")) cfg.process = parse_process(*v);
    if (auto v = get("pair")) {
        const auto pair = parse_list<int>(*v);
        if (pair.size() != 2) throw citytsp::ParameterError("config: pair must be two indices 'l1,l2'");
        cfg.pair_l1 = pair[0];
        cfg.pair_l2 = pair[1];
    }
    if (auto v = get("k_schedule")) cfg.k_schedule = parse_list<long>(*v);
    if (auto v = get("samples")) cfg.samples = std::stol(*v);
    if (auto v = get("eta1")) cfg.pmf_eta1 = std::stod(*v);
    if (auto v = get("eta2")) cfg.pmf_eta2 = std::stod(*v);
    if (cfg.study == citytsp::StudyKind::PmfCompare) {
        if (cfg.n_schedule.size() != 1 || cfg.n_cities < 1)
            throw citytsp::ParameterError("config: pmf_compare needs n and N");
        cfg.pmf_n = cfg.n_schedule.front();
        cfg.pmf_N = cfg.n_cities;
    }
    return cfg;
}

std::string solver_mix(const citytsp::TrialRecord& rec) {
    int exact = 0, strips = 0, zero = 0;
    for (const auto& city : rec.per_city) {
        switch (city.method) {
            case citytsp::CitySolver::Exact: ++exact; break;
            case citytsp::CitySolver::Strips: ++strips; break;
            case citytsp::CitySolver::Empty: ++zero; break;
        }
    }
    return "e" + std::to_string(exact) + "s" + std::to_string(strips) + "z" + std::to_string(zero);
}

void append_trial_rows(citytsp::CsvWriter& csv, std::span<const citytsp::TrialRecord> records) {
    using citytsp::format_double;
    for (const auto& rec : records) {
        csv.append_row({std::to_string(rec.trial_seed), std::to_string(rec.n), std::to_string(rec.n_cities),
                        format_double(rec.r), format_double(rec.s), format_double(rec.v_n),
                        format_double(rec.merged_length), format_double(rec.b_n),
                        rec.u_tot ? "1" : "0", solver_mix(rec)});
    }
}

ordered_json summary_to_json(const citytsp::SummaryStats& summary) {
    ordered_json doc;
    for (const auto& [name, sc] : summary.scalars)
        doc[name] = ordered_json{{"mean", sc.mean}, {"variance", sc.variance}, {"se", sc.se}, {"count", sc.count}};
    for (const auto& [name, value] : summary.covariances) doc[name] = value;
    return doc;
}

/// Minimal dependency-free SVG: polyline of (x, y) with +-3 SE whiskers.
std::string svg_plot(const std::vector<double>& xs, const std::vector<double>& ys,
                     const std::vector<double>& ses, const std::string& title) {
    const double width = 480.0, height = 320.0, margin = 48.0;
    double xmin = xs.front(), xmax = xs.front(), ymin = ys.front(), ymax = ys.front();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xmin = std::min(xmin, xs[i]);
        xmax = std::max(xmax, xs[i]);
        ymin = std::min(ymin, ys[i] - 3.0 * ses[i]);
        ymax = std::max(ymax, ys[i] + 3.0 * ses[i]);
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;
    auto sx = [&](double x) { return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin); };
    auto sy = [&](double y) { return height - margin - (y - ymin) / (ymax - ymin) * (height - 2 * margin); };
    std::ostringstream out;
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height << "'>\n";
    out << "<text x='" << margin << "' y='20' font-size='13'>" << title << "</text>\n";
    out << "<line x1='" << margin << "' y1='" << height - margin << "' x2='" << width - margin << "' y2='"
        << height - margin << "' stroke='black'/>\n";
    out << "<line x1='" << margin << "' y1='" << margin << "' x2='" << margin << "' y2='" << height - margin
        << "' stroke='black'/>\n";
    out << "<polyline fill='none' stroke='steelblue' stroke-width='1.5' points='";
    for (std::size_t i = 0; i < xs.size(); ++i) out << sx(xs[i]) << "," << sy(ys[i]) << " ";
    out << "'/>\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out << "<line x1='" << sx(xs[i]) << "' y1='" << sy(ys[i] - 3.0 * ses[i]) << "' x2='" << sx(xs[i])
            << "' y2='" << sy(ys[i] + 3.0 * ses[i]) << "' stroke='steelblue'/>\n";
        out << "<circle cx='" << sx(xs[i]) << "' cy='" << sy(ys[i]) << "' r='2.5' fill='steelblue'/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

struct ExperimentArgs {
    std::string config_path;
    std::string out_dir = ".";
    bool plot = false;
    long corrupt_trial = -1;  // test hook: corrupt one record to exercise exit 4
};

int run_experiment(const ExperimentArgs& args, const std::vector<std::string>& argv) {
    citytsp::RunManifest manifest;
    manifest.command = "experiment";
    manifest.argv = argv;
    manifest.started_unix_ms = now_ms();

    ordered_json resolved;
    const citytsp::ExperimentConfig cfg = parse_experiment_config(citytsp::read_file(args.config_path), resolved);
    manifest.seed = cfg.seed;
    manifest.resolved = resolved;
    const fs::path dir = args.out_dir;
    fs::create_directories(dir);
    std::vector<std::string> outputs;

    auto emit = [&](const fs::path& name, const std::string& content) {
        const fs::path path = dir / name;
        citytsp::atomic_write(path, content);
        outputs.push_back(path.string());
    };

    switch (cfg.study) {
        case citytsp::StudyKind::CityTrials: {
            auto records = citytsp::run_city_trials(cfg);
            if (args.corrupt_trial >= 0 && args.corrupt_trial < static_cast<long>(records.size()))
                records[static_cast<std::size_t>(args.corrupt_trial)].merged_length =
                    records[static_cast<std::size_t>(args.corrupt_trial)].v_n - 1.0;
            for (const auto& rec : records)
                if (rec.v_n > rec.merged_length + 1e-9)
                    throw citytsp::InvariantError("invariant violation: V_n > merged length at trial seed " +
                                                  std::to_string(rec.trial_seed));
            citytsp::CsvWriter csv(
                {"trial_seed", "n", "N", "r", "s", "V_n", "merged", "b_n", "U_tot", "solver_mix"});
            append_trial_rows(csv, records);
            emit("trials.csv", csv.str());
            emit("summary.json", summary_to_json(citytsp::aggregate(records)).dump(2) + "\n");
            break;
        }
        case citytsp::StudyKind::Scaling: {
            std::vector<std::vector<citytsp::TrialRecord>> all_records;
            const auto rows = citytsp::scaling_study(cfg, &all_records);
            citytsp::CsvWriter csv(
                {"trial_seed", "n", "N", "r", "s", "V_n", "merged", "b_n", "U_tot", "solver_mix"});
            for (const auto& records : all_records) append_trial_rows(csv, records);
            emit("trials.csv", csv.str());
            citytsp::CsvWriter summary({"n", "N", "b_n", "vn_over_bn_mean", "vn_over_bn_se",
                                        "merged_over_bn_mean", "merged_over_bn_se", "merged_over_bn_cv",
                                        "cv_se_boot", "theta5_hat", "p_upper_below_theta5"});
            using citytsp::format_double;
            for (const auto& row : rows)
                summary.append_row({std::to_string(row.n), std::to_string(row.n_cities), format_double(row.b_n),
                                    format_double(row.vn_ratio_mean), format_double(row.vn_ratio_se),
                                    format_double(row.merged_ratio_mean), format_double(row.merged_ratio_se),
                                    format_double(row.merged_ratio_cv), format_double(row.cv_se_boot),
                                    format_double(row.theta5_hat), format_double(row.p_upper_below_theta5)});
            emit("scaling.csv", summary.str());
            ordered_json sj;
            for (std::size_t i = 0; i < all_records.size(); ++i)
                sj["point_" + std::to_string(i)] = summary_to_json(citytsp::aggregate(all_records[i]));
            emit("summary.json", sj.dump(2) + "\n");
            if (args.plot) {
                std::vector<double> xs, ys, ses;
                for (const auto& row : rows) {
                    xs.push_back(static_cast<double>(row.n));
                    ys.push_back(row.merged_ratio_mean);
                    ses.push_back(row.merged_ratio_se);
                }
                emit("scaling.svg", svg_plot(xs, ys, ses, "mean merged/b_n vs n (3 SE whiskers)"));
            }
            break;
        }
        case citytsp::StudyKind::Covariance: {
            citytsp::ExperimentConfig cc = cfg;
            if (cc.N_schedule.empty() && cc.n_cities > 0)
                cc.N_schedule.assign(cc.n_schedule.size(), cc.n_cities);
            const auto rows = citytsp::estimate_covariance_decay(cc);
            citytsp::CsvWriter csv({"n", "N", "cov", "cov_se_boot", "corr", "corr_se_boot", "scale",
                                    "low_trials"});
            using citytsp::format_double;
            for (const auto& row : rows)
                csv.append_row({std::to_string(row.n), std::to_string(row.n_cities), format_double(row.covariance),
                                format_double(row.cov_se_boot), format_double(row.correlation),
                                format_double(row.corr_se_boot), format_double(row.scale),
                                row.low_trials ? "1" : "0"});
            emit("covariance.csv", csv.str());
            ordered_json sj;
            sj["points"] = rows.size();
            emit("summary.json", sj.dump(2) + "\n");
            break;
        }
        case citytsp::StudyKind::NnScaling: {
            if (cfg.k_schedule.empty()) throw citytsp::ParameterError("config: nn_scaling needs k_schedule");
            const auto rows = citytsp::estimate_nn_distance_scaling(cfg.k_schedule, cfg.r, cfg.density,
                                                                    cfg.samples, cfg.seed);
            citytsp::CsvWriter csv({"k", "mean_d", "normalized", "se"});
            using citytsp::format_double;
            std::vector<double> xs, ys, ses;
            for (const auto& row : rows) {
                csv.append_row({std::to_string(row.k), format_double(row.mean_d), format_double(row.normalized),
                                format_double(row.se)});
                xs.push_back(std::log(static_cast<double>(row.k)));
                ys.push_back(std::log(row.mean_d));
                ses.push_back(row.se / row.mean_d);
            }
            emit("nn_scaling.csv", csv.str());
            ordered_json sj;
            sj["log_slope"] = citytsp::ols_slope(xs, ys);
            emit("summary.json", sj.dump(2) + "\n");
            if (args.plot) emit("nn_scaling.svg", svg_plot(xs, ys, ses, "log mean_d vs log k"));
            break;
        }
        case citytsp::StudyKind::Unconstrained: {
            const auto rows =
                citytsp::unconstrained_study(cfg.n_schedule, cfg.trials, cfg.density, cfg.seed);
            citytsp::CsvWriter csv(
                {"n", "mean_strips", "mean_nn", "mean_exact", "ceiling", "nn_normalized"});
            using citytsp::format_double;
            std::vector<double> xs, ys, ses;
            for (const auto& row : rows) {
                csv.append_row({std::to_string(row.n), format_double(row.mean_strips), format_double(row.mean_nn),
                                row.exact_available ? format_double(row.mean_exact) : "nan",
                                format_double(row.ceiling), format_double(row.nn_normalized)});
                xs.push_back(static_cast<double>(row.n));
                ys.push_back(row.mean_strips);
                ses.push_back(0.0);
            }
            emit("unconstrained.csv", csv.str());
            ordered_json sj;
            sj["points"] = rows.size();
            emit("summary.json", sj.dump(2) + "\n");
            if (args.plot) emit("unconstrained.svg", svg_plot(xs, ys, ses, "mean strips length vs n"));
            break;
        }
        case citytsp::StudyKind::PmfCompare: {
            const double p = 1.0 / static_cast<double>(cfg.pmf_N);
            const auto cmp =
                citytsp::compare_binomial_poisson(cfg.pmf_n, cfg.pmf_N, p, cfg.pmf_eta1, cfg.pmf_eta2);
            citytsp::CsvWriter csv({"k", "B", "Poi", "ratio"});
            using citytsp::format_double;
            const double lambda = static_cast<double>(cfg.pmf_n) * p;
            for (long k = cmp.k_lo; k <= cmp.k_hi; ++k) {
                const double b = citytsp::binomial_pmf(k, cfg.pmf_n, p);
                const double poi = citytsp::poisson_pmf(k, lambda);
                csv.append_row({std::to_string(k), format_double(b), format_double(poi), format_double(b / poi)});
            }
            emit("pmf_compare.csv", csv.str());
            ordered_json sj;
            sj["max_rel_dev"] = cmp.max_rel_dev;
            sj["ratio_scale"] = cmp.ratio_scale;
            sj["k_lo"] = cmp.k_lo;
            sj["k_hi"] = cmp.k_hi;
            emit("summary.json", sj.dump(2) + "\n");
            ordered_json calib = ordered_json::array();
            calib.push_back(ordered_json{{"name", "pmf_compare_max_rel_dev_n" + std::to_string(cfg.pmf_n) +
                                                      "_N" + std::to_string(cfg.pmf_N)},
                                         {"value", cmp.max_rel_dev},
                                         {"seed", cfg.seed},
                                         {"date", iso_date_utc()}});
            emit("calibration.json", calib.dump(2) + "\n");
            break;
        }
    }

    manifest.outputs = outputs;
    write_manifest(dir / "manifest.json", std::move(manifest));
    std::cout << "experiment complete; outputs in " << dir.string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dense-cities random Euclidean TSP toolkit"};
    app.require_subcommand(1);
    std::vector<std::string> raw_args(argv, argv + argc);

    GenerateArgs gen;
    CLI::App* generate = app.add_subcommand("generate", "sample a city-constrained instance");
    generate->add_option("--r", gen.r, "city side length")->required();
    generate->add_option("--s", gen.s, "intercity gap")->required();
    generate->add_option("--N", gen.n_cities, "number of well-connected cities")->required();
    generate->add_option("--n", gen.n, "node count (binomial) or mean (poisson)")->required();
    generate->add_option("--process", gen.process, "binomial|poisson");
    generate->add_option("--density", gen.density, "uniform|checker:RATIO");
    generate->add_option("--seed", gen.seed, "64-bit seed")->required();
    generate->add_option("--out", gen.out, "output instance file")->required();

    TourArgs tour;
    CLI::App* tour_cmd = app.add_subcommand("tour", "construct a tour for an instance");
    tour_cmd->add_option("--in", tour.in, "instance file")->required();
    tour_cmd->add_option("--method", tour.method, "strips|exact|merge")->required();
    tour_cmd->add_option("--strip-width", tour.strip_width, "strip width (default auto)");
    tour_cmd->add_option("--out", tour.out, "output tour file")->required();

    ExperimentArgs exp;
    CLI::App* exp_cmd = app.add_subcommand("experiment", "run a Monte Carlo study from a config file");
    exp_cmd->add_option("--config", exp.config_path, "flat key=value config file")->required();
    exp_cmd->add_option("--out-dir", exp.out_dir, "output directory");
    exp_cmd->add_flag("--plot", exp.plot, "emit an SVG plot");
    exp_cmd->add_option("--corrupt-trial", exp.corrupt_trial, "")->group("");  // fault-injection test hook

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitParameter;
    }

    try {
        if (generate->parsed()) return run_generate(gen, raw_args);
        if (tour_cmd->parsed()) return run_tour(tour, raw_args);
        if (exp_cmd->parsed()) return run_experiment(exp, raw_args);
    } catch (const citytsp::ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParameter;
    } catch (const citytsp::CapabilityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCapability;
    } catch (const citytsp::InvariantError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParameter;
    }
    return kExitOk;
}
