#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "citytsp/city_grid.hpp"
#include "citytsp/errors.hpp"
#include "citytsp/experiments.hpp"
#include "citytsp/instance.hpp"
#include "citytsp/merge.hpp"
#include "citytsp/strips.hpp"
#include "citytsp/tour.hpp"

namespace citytsp {

inline constexpr int kSchemaVersion = 1;

/// Locale-free decimal rendering with 17 significant digits (round-trips the
/// exact double).
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

/// Write-then-rename so readers never observe a partial file.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ParameterError("atomic_write: cannot open " + tmp.string());
        out << content;
        if (!out) throw ParameterError("atomic_write: write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParameterError("read_file: cannot open " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// ---- Instance ----

inline nlohmann::ordered_json instance_to_json(const Instance& inst) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    if (inst.selection) {
        doc["r"] = inst.selection->grid.r;
        doc["s"] = inst.selection->grid.s;
        doc["N"] = inst.selection->size();
        auto coords = nlohmann::ordered_json::array();
        for (const auto& [ix, iy] : inst.selection->lattice_coords) coords.push_back({ix, iy});
        doc["selected_cities"] = std::move(coords);
    } else {
        doc["r"] = 0.0;
        doc["s"] = 0.0;
        doc["N"] = 0;
        doc["selected_cities"] = nlohmann::ordered_json::array();
    }
    doc["process"] = {{"kind", to_string(inst.process)},
                      {"n", inst.process == ProcessKind::Binomial
                                ? nlohmann::ordered_json(static_cast<long>(inst.n_param))
                                : nlohmann::ordered_json(inst.n_param)}};
    doc["seed"] = inst.seed;
    auto nodes = nlohmann::ordered_json::array();
    for (const Point& p : inst.nodes) nodes.push_back({p.x, p.y});
    doc["nodes"] = std::move(nodes);
    doc["city_of"] = inst.city_of;
    return doc;
}

inline Instance instance_from_json(const nlohmann::json& doc) {
    if (doc.value("schema_version", 0) != kSchemaVersion)
        throw ParameterError("instance_from_json: unsupported schema_version");
    Instance inst;
    const std::string kind = doc.at("process").at("kind").get<std::string>();
    if (kind == "binomial")
        inst.process = ProcessKind::Binomial;
    else if (kind == "poisson")
        inst.process = ProcessKind::Poisson;
    else
        throw ParameterError("instance_from_json: unknown process kind " + kind);
    inst.n_param = doc.at("process").at("n").get<double>();
    inst.seed = doc.at("seed").get<std::uint64_t>();
    for (const auto& row : doc.at("nodes")) inst.nodes.push_back(Point{row.at(0).get<double>(), row.at(1).get<double>()});
    inst.city_of = doc.at("city_of").get<std::vector<int>>();

    const int N = doc.at("N").get<int>();
    if (N > 0) {
        const double r = doc.at("r").get<double>();
        const double s = doc.at("s").get<double>();
        const CityGrid grid = build_city_grid(r, s);
        CitySelection sel;
        sel.grid = grid;
        for (const auto& row : doc.at("selected_cities")) {
            const int ix = row.at(0).get<int>();
            const int iy = row.at(1).get<int>();
            if (ix < 0 || iy < 0 || ix >= grid.per_axis || iy >= grid.per_axis)
                throw ParameterError("instance_from_json: lattice coordinate out of range");
            sel.indices.push_back(grid.id_of(ix, iy));
            sel.lattice_coords.emplace_back(ix, iy);
        }
        if (static_cast<int>(sel.indices.size()) != N)
            throw ParameterError("instance_from_json: N disagrees with selected_cities");
        inst.selection = std::move(sel);
    }
    if (inst.city_of.size() != inst.nodes.size() && !(inst.city_of.empty() && N == 0))
        throw ParameterError("instance_from_json: city_of must match nodes");
    return inst;
}

// ---- Tour / certificate / trace ----

inline nlohmann::ordered_json tour_to_json(const Tour& tour) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["order"] = tour.order;
    doc["length"] = tour.length;
    return doc;
}

inline Tour tour_from_json(const nlohmann::json& doc) {
    if (doc.value("schema_version", 0) != kSchemaVersion)
        throw ParameterError("tour_from_json: unsupported schema_version");
    Tour tour;
    tour.order = doc.at("order").get<std::vector<int>>();
    tour.length = doc.at("length").get<double>();
    return tour;
}

inline nlohmann::ordered_json certificate_to_json(const StripsCertificate& cert) {
    return nlohmann::ordered_json{{"a", cert.a}, {"b", cert.b}, {"c", cert.c}, {"bound", cert.bound}};
}

inline nlohmann::ordered_json merge_trace_to_json(const MergeTrace& trace) {
    nlohmann::ordered_json doc;
    doc["root_city"] = trace.root_city;
    doc["order_of_merging"] = trace.order_of_merging;
    auto removed = nlohmann::ordered_json::array();
    for (const auto& per_city : trace.removed_edges) {
        auto list = nlohmann::ordered_json::array();
        for (const auto& [u, v] : per_city) list.push_back({u, v});
        removed.push_back(std::move(list));
    }
    doc["removed_edges"] = std::move(removed);
    auto added = nlohmann::ordered_json::array();
    for (const CrossEdge& e : trace.added_cross_edges)
        added.push_back({{"u", e.u}, {"v", e.v}, {"length", e.length}});
    doc["added_cross_edges"] = std::move(added);
    doc["max_removals"] = trace.max_removals;
    doc["removal_cap_hit"] = trace.removal_cap_hit;
    return doc;
}

// ---- CSV ----

class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
        append_row(header);
    }

    void append_row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_) throw ParameterError("CsvWriter: column count mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) body_ += ',';
            body_ += cells[i];
        }
        body_ += '\n';
    }

    const std::string& str() const { return body_; }

  private:
    std::size_t columns_;
    std::string body_;
};

// ---- Run manifest ----

/// Written alongside every CLI output; holds everything needed to replay the
/// run bit-for-bit (timestamps excepted).
struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    nlohmann::ordered_json resolved;
    std::uint64_t seed = 0;
    std::string tool_version;
    std::int64_t started_unix_ms = 0;
    std::int64_t finished_unix_ms = 0;
    std::vector<std::string> outputs;
};

inline nlohmann::ordered_json manifest_to_json(const RunManifest& m) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["tool"] = "citytsp";
    doc["tool_version"] = m.tool_version;
    doc["command"] = m.command;
    doc["argv"] = m.argv;
    doc["resolved"] = m.resolved;
    doc["seed"] = m.seed;
    doc["started_unix_ms"] = m.started_unix_ms;
    doc["finished_unix_ms"] = m.finished_unix_ms;
    doc["outputs"] = m.outputs;
    return doc;
}

}  // namespace citytsp
