#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "dmet/io_json.hpp"
#include "dmet/tree_ray.hpp"
#include "fixtures.hpp"
#include "helpers.hpp"

using namespace dmet;
namespace fs = std::filesystem;

namespace {

fs::path fixture(const std::string& name) { return fs::path(DMET_FIXTURES_DIR) / name; }

}  // namespace

TEST_CASE("decimal strings round-trip exactly") {
    for (double v : {0.0, 1.0, 6599.0, 0.5, 0.25, 1e-9, 0.7071067811865476, -3.25})
        CHECK(io::parse_decimal(io::json(io::to_decimal(v)), "t") == v);
    CHECK(io::to_decimal(6599.0) == "6599");  // integers stay integer-shaped
    CHECK_THROWS_AS(io::parse_decimal(io::json("12x"), "t"), io::FormatError);
    CHECK_THROWS_AS(io::parse_decimal(io::json::array(), "t"), io::FormatError);
}

TEST_CASE("space documents round-trip through JSON") {
    testing::Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        auto space = testing::random_space(rng);
        auto j = io::space_to_json(*space);
        auto back = io::space_from_json(j);
        REQUIRE(back.ok());
        CHECK(*back.value == *space);
    }
    SECTION("missing fields are format errors") {
        CHECK_THROWS_AS(io::space_from_json(io::json{{"points", {"a"}}}), io::FormatError);
    }
    SECTION("basepoint must be a known label") {
        auto j = io::space_to_json(*make_line_space(3));
        j["basepoint"] = "zz";
        CHECK_THROWS_AS(io::space_from_json(j), io::FormatError);
    }
}

TEST_CASE("family documents round-trip through JSON") {
    auto fx = testing::make_offset_gluings({20, 40, 60});
    auto j = io::family_to_json(fx.fam_a);
    auto back = io::family_from_json(j);
    REQUIRE(back.stage_count() == fx.fam_a.stage_count());
    for (int t = 0; t < back.stage_count(); ++t) {
        CHECK(back.stages[t].cross.cross == fx.fam_a.stages[t].cross.cross);
        CHECK(back.stages[t].inclusion == fx.fam_a.stages[t].inclusion);
    }
    SECTION("incoherent families are rejected at load") {
        j["stages"][0]["cross"]["cross"][0][1] = "99";
        CHECK_THROWS_AS(io::family_from_json(j), std::invalid_argument);
    }
}

TEST_CASE("tree and prefix map documents round-trip") {
    auto tree = RootedTreeTruncation::from_child_counts({{2}, {2, 1}, {1, 2, 1}, {1, 1, 1, 1}});
    auto back = io::tree_from_json(io::tree_to_json(tree));
    CHECK(back.size() == tree.size());
    for (int v = 0; v < tree.size(); ++v) CHECK(back.label(v) == tree.label(v));

    PrefixMap map{{{{0}, {1}, 1.0}, {{1, 0}, {0, 0}, 0.5}}};
    auto map_back = io::prefix_map_from_json(io::prefix_map_to_json(map));
    REQUIRE(map_back.pairs.size() == 2);
    CHECK(map_back.pairs[1].u == map.pairs[1].u);
    CHECK(map_back.pairs[1].C == 0.5);

    SECTION("depth cap truncates on load") {
        auto shallow = io::tree_from_json(io::tree_to_json(tree), 2);
        CHECK(shallow.depth() == 2);
    }
    SECTION("level shape mismatches are format errors") {
        auto j = io::tree_to_json(tree);
        j["children"][1] = {2};
        CHECK_THROWS_AS(io::tree_from_json(j), std::exception);
    }
}

TEST_CASE("grid and isometry documents round-trip") {
    auto grid = make_planar_grid(uniform_angles(8), {1, 10, 100});
    auto back = io::grid_from_json(io::grid_to_json(grid));
    CHECK(back.directions == grid.directions);
    CHECK(back.radii == grid.radii);

    PartialIsometry pi{{{0, -1}, {1, 0}}, {{1, {0, 1}}, {3, {0, 1, 2}}}};
    auto pi_back = io::isometry_from_json(io::isometry_to_json(pi));
    CHECK(pi_back.matrix == pi.matrix);
    CHECK(pi_back.strata.size() == 2);
    CHECK(pi_back.strata[1].weight == 3);

    SECTION("radius cap filters on load") {
        auto small = io::grid_from_json(io::grid_to_json(grid), 10.0);
        CHECK(small.radii == std::vector<double>{1, 10});
    }
}

TEST_CASE("partial bijections serialize one-based") {
    auto s = PartialBijection::of_pairs(4, {{0, 2}, {1, 3}});
    auto j = io::partial_bijection_to_json(s);
    CHECK(j["pairs"][0] == io::json::array({1, 3}));
    CHECK(io::partial_bijection_from_json(j) == s);
}

TEST_CASE("shipped fixtures parse and agree with the library") {
    SECTION("the path fixture is accepted") {
        auto space = io::load_space(fixture("p3_space.json"));
        CHECK(space->size() == 3);
    }
    SECTION("the broken triangle fixture is rejected") {
        auto checked = io::space_from_json(io::read_json_file(fixture("bad_triangle_space.json")));
        CHECK_FALSE(checked.ok());
    }
    SECTION("the line gluing fixture equals subset_metric at A = {0}") {
        auto cross = io::load_cross(fixture("line6_cross_a0.json"));
        auto expected = subset_metric(cross.space, SubsetSpec{{0}});
        CHECK(cross.cross == expected.cross);
    }
    SECTION("the binary tree fixture matches the built-in constructor") {
        auto tree = io::tree_from_json(io::read_json_file(fixture("tree_binary_d6.json")));
        CHECK(tree.size() == RootedTreeTruncation::binary(6).size());
    }
}

TEST_CASE("atomic writes leave no temporaries") {
    auto dir = fs::temp_directory_path() / "dmet_io_test";
    fs::create_directories(dir);
    auto path = dir / "report.json";
    io::write_file_atomic(path, "{\"x\": 1}\n");
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(content == "{\"x\": 1}\n");
    CHECK_FALSE(fs::exists(path.string() + ".tmp"));
    fs::remove_all(dir);
}

TEST_CASE("digests are stable and content-sensitive") {
    CHECK(io::fnv64_hex("abc") == io::fnv64_hex("abc"));
    CHECK(io::fnv64_hex("abc") != io::fnv64_hex("abd"));
}
