#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "citytsp/instance.hpp"
#include "citytsp/io.hpp"

using namespace citytsp;

TEST_CASE("format_double renders 17 significant digits and round-trips") {
    const double values[] = {0.1, 1.0 / 3.0, 12345.678901234567, 1e-300, -0.0, 5.0};
    for (double v : values) {
        const std::string text = format_double(v);
        REQUIRE(std::stod(text) == v);
        REQUIRE(text.find(',') == std::string::npos);
    }
}

TEST_CASE("instance json round-trips bit-exactly") {
    const auto grid = build_city_grid(0.2, 0.2);
    const auto sel = select_well_connected(grid, 4, Rng(6, Stream::Selection));
    auto inst = sample_binomial(sel, DensityField::checker(2.0), 64, Rng(6, Stream::Sampling));
    inst.seed = 6;

    const std::string text = instance_to_json(inst).dump(2);
    const Instance back = instance_from_json(nlohmann::json::parse(text));
    REQUIRE(back.node_count() == inst.node_count());
    for (int i = 0; i < inst.node_count(); ++i) {
        REQUIRE(back.nodes[static_cast<std::size_t>(i)].x == inst.nodes[static_cast<std::size_t>(i)].x);
        REQUIRE(back.nodes[static_cast<std::size_t>(i)].y == inst.nodes[static_cast<std::size_t>(i)].y);
    }
    REQUIRE(back.city_of == inst.city_of);
    REQUIRE(back.selection->indices == sel.indices);
    REQUIRE(instance_to_json(back).dump(2) == text);
}

TEST_CASE("tour json round-trips") {
    Tour tour{{2, 0, 1, 3}, 3.25};
    const auto doc = tour_to_json(tour);
    const Tour back = tour_from_json(doc);
    REQUIRE(back.order == tour.order);
    REQUIRE(back.length == tour.length);
}

TEST_CASE("csv writer enforces column counts") {
    CsvWriter csv({"a", "b"});
    csv.append_row({"1", "2"});
    REQUIRE(csv.str() == "a,b\n1,2\n");
    REQUIRE_THROWS_AS(csv.append_row({"only-one"}), ParameterError);
}

TEST_CASE("atomic_write leaves no temp file behind") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "citytsp_io_test";
    fs::remove_all(dir);
    const fs::path target = dir / "nested" / "file.json";
    atomic_write(target, "{}\n");
    REQUIRE(fs::exists(target));
    REQUIRE_FALSE(fs::exists(target.string() + ".tmp"));
    REQUIRE(read_file(target) == "{}\n");
    fs::remove_all(dir);
}

TEST_CASE("malformed instance documents are rejected") {
    REQUIRE_THROWS_AS(instance_from_json(nlohmann::json::parse(R"({"schema_version": 99})")), ParameterError);
    const char* bad_city = R"({
      "schema_version": 1, "r": 0.2, "s": 0.2, "N": 1,
      "selected_cities": [[9, 9]],
      "process": {"kind": "binomial", "n": 1},
      "seed": 0, "nodes": [[0.1, 0.1]], "city_of": [0]
    })";
    REQUIRE_THROWS_AS(instance_from_json(nlohmann::json::parse(bad_city)), ParameterError);
}
