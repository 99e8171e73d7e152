#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dmet/tree_ray.hpp"

using namespace dmet;
using Catch::Approx;

namespace {

PrefixMap swap_map() {
    return PrefixMap{{{{0}, {1}, 1.0}, {{1}, {0}, 1.0}}};
}

std::vector<int> word(const std::string& s) {
    return RootedTreeTruncation::word_from_string(s);
}

// Direct evaluation of the gluing formula: min over strata of
// d(x,z) + 2C + d(f z, y), plus the basepoint term.
double sigma_formula(const RootedTreeTruncation& tree, const PrefixMap& map, double glue,
                     int x, int y) {
    double best = tree.distance(x, 0) + glue + tree.distance(0, y);
    for (const auto& p : map.pairs) {
        for (int z = 0; z < tree.size(); ++z) {
            if (!detail::is_prefix(p.u, tree.word_of(z))) continue;
            best = std::min(best,
                            tree.distance(x, z) + 2.0 * p.C +
                                tree.distance(transport_node(tree, p, z), y));
        }
    }
    return best;
}

}  // namespace

TEST_CASE("boundary distance on full-depth words") {
    auto tree = RootedTreeTruncation::binary(6);
    SECTION("shared prefix of length 3") {
        BoundaryPoint a{word("001000")}, b{word("001100")};
        CHECK(boundary_distance(tree, a, b) == Approx(std::exp(-3.0)));
    }
    SECTION("identical words collapse to the resolution sentinel") {
        BoundaryPoint a{word("010101")};
        CHECK(boundary_distance(tree, a, a) == Approx(std::exp(-6.0)));
    }
    SECTION("first letters differ") {
        BoundaryPoint a{word("000000")}, b{word("100000")};
        CHECK(boundary_distance(tree, a, b) == 1.0);
    }
    SECTION("words from another tree are rejected") {
        BoundaryPoint bad{word("020000")};
        CHECK_THROWS_AS(boundary_distance(tree, bad, bad), std::invalid_argument);
    }
}

TEST_CASE("prefix map validation") {
    auto tree = RootedTreeTruncation::binary(5);
    SECTION("prefixes must stay below the depth") {
        PrefixMap deep{{{word("00000"), {0}, 1.0}}};
        CHECK_FALSE(validate_prefix_map(tree, deep).ok());
    }
    SECTION("stratum constants must cover the depth shift") {
        PrefixMap shift{{{word("0"), word("001"), 1.0}}};
        auto report = validate_prefix_map(tree, shift);
        REQUIRE_FALSE(report.ok());
        CHECK(report.violations.front().rule == "stratum_constant");
        PrefixMap ok_shift{{{word("0"), word("001"), 2.0}}};
        CHECK(validate_prefix_map(tree, ok_shift).ok());
    }
    SECTION("overlapping cylinders are rejected") {
        PrefixMap overlap{{{word("0"), word("10"), 1.0}, {word("00"), word("11"), 1.0}}};
        auto report = validate_prefix_map(tree, overlap);
        REQUIRE_FALSE(report.ok());
        CHECK(report.violations.front().rule == "domain_overlap");
    }
    SECTION("non-isomorphic subtrees are rejected") {
        auto lopsided = RootedTreeTruncation::from_child_counts(
            {{2}, {1, 2}, {1, 1, 1}, {1, 1, 1}});
        PrefixMap cross_shape{{{{0}, {1}, 1.0}}};
        auto report = validate_prefix_map(lopsided, cross_shape);
        REQUIRE_FALSE(report.ok());
        CHECK(report.violations.front().rule == "subtree_shape");
    }
}

TEST_CASE("chi glues the identity cylinder at distance 2C") {
    auto tree = RootedTreeTruncation::binary(5);
    PrefixMap id0{{{{0}, {0}, 1.0}}};
    auto glued = chi_tree(tree, id0);
    for (int x = 0; x < tree.size(); ++x)
        if (detail::is_prefix({0}, tree.word_of(x)))
            CHECK(glued.cross.cross(x, x) == 2.0);

    SECTION("graph metric equals the direct formula on every pair") {
        for (int x = 0; x < tree.size(); ++x)
            for (int y = 0; y < tree.size(); ++y)
                CHECK(glued.cross.cross(x, y) == sigma_formula(tree, id0, 1.0, x, y));
    }
    SECTION("the doubled block matrix validates") {
        CHECK(validate_space(doubled_matrix(glued.cross)).ok());
    }
}

TEST_CASE("chi of the cylinder swap keeps swapped nodes at distance 2") {
    auto tree = RootedTreeTruncation::binary(5);
    auto glued = chi_tree(tree, swap_map());
    for (int x = 1; x < tree.size(); ++x) {
        auto w = tree.word_of(x);
        int stratum = stratum_of(swap_map(), w);
        REQUIRE(stratum >= 0);
        int fx = transport_node(tree, swap_map().pairs[stratum], x);
        CHECK(glued.cross.cross(x, fx) == 2.0);
    }
    // dual route: shortest paths against the explicit formula
    for (int x = 0; x < tree.size(); ++x)
        for (int y = 0; y < tree.size(); ++y)
            CHECK(glued.cross.cross(x, y) == sigma_formula(tree, swap_map(), 1.0, x, y));
}

TEST_CASE("chi of the empty map is the basepoint gluing") {
    auto tree = RootedTreeTruncation::binary(4);
    auto glued = chi_tree(tree, PrefixMap{});
    for (int x = 0; x < tree.size(); ++x)
        for (int y = 0; y < tree.size(); ++y)
            CHECK(glued.cross.cross(x, y) ==
                  tree.distance(x, 0) + 1.0 + tree.distance(0, y));

    SECTION("configurable gluing length") {
        AnalysisConfig cfg;
        cfg.glue_length = 2.5;
        auto wide = chi_tree(tree, PrefixMap{}, cfg);
        CHECK(wide.cross.cross(0, 0) == 2.5);
    }
}

TEST_CASE("chi refuses maps whose constants shortcut the tree") {
    auto tree = RootedTreeTruncation::binary(5);
    // both images sit deep inside cylinder 01: crossing over and back would
    // shortcut between the 0- and 1-subtrees
    PrefixMap bad{{{word("000"), word("0100"), 1.0}, {word("100"), word("0101"), 1.0}}};
    REQUIRE(validate_prefix_map(tree, bad).ok());  // per-pair data looks fine
    CHECK_THROWS_AS(chi_tree(tree, bad), std::invalid_argument);
}

TEST_CASE("inner lemma: depth-preserving transport distorts by at most 2C") {
    auto tree = RootedTreeTruncation::binary(6);
    for (const auto& map : {swap_map(), PrefixMap{{{word("0"), word("00"), 1.0}}},
                            PrefixMap{{{word("01"), word("1"), 1.0}}}}) {
        REQUIRE(validate_prefix_map(tree, map).ok());
        for (const auto& p : map.pairs) {
            std::vector<int> stratum;
            for (int z = 0; z < tree.size(); ++z)
                if (detail::is_prefix(p.u, tree.word_of(z))) stratum.push_back(z);
            for (int x : stratum)
                for (int y : stratum) {
                    double d0 = tree.distance(x, y);
                    double d1 = tree.distance(transport_node(tree, p, x),
                                              transport_node(tree, p, y));
                    CHECK(std::abs(d1 - d0) <= 2.0 * p.C);
                }
        }
    }
}

TEST_CASE("psi recovers the swap map exactly") {
    auto tree = RootedTreeTruncation::binary(6);
    auto glued = chi_tree(tree, swap_map());
    auto recovered = psi_tree(tree, glued.cross, {3, 5, 6});
    CHECK(recovered.injective);
    CHECK(recovered.as_action() == boundary_action(tree, swap_map()));
    for (const auto& p : recovered.pairs) CHECK(p.bound == 2.0);
}

TEST_CASE("psi recovers a one-cylinder identity with everything else divergent") {
    auto tree = RootedTreeTruncation::binary(6);
    PrefixMap id0{{{{0}, {0}, 1.0}}};
    auto glued = chi_tree(tree, id0);
    auto recovered = psi_tree(tree, glued.cross, {3, 5, 6});
    CHECK(recovered.as_action() == boundary_action(tree, id0));
}

TEST_CASE("psi of a diagonal single-ray gluing is the identity on that ray") {
    auto tree = RootedTreeTruncation::star(3, 8);
    auto space = tree.as_metric_space();
    SubsetSpec ray0;
    ray0.indices.push_back(0);
    for (int v = 1; v < tree.size(); ++v) {
        int w = v;
        while (tree.parent(w) != 0) w = tree.parent(w);
        if (w == tree.child(0, 0)) ray0.indices.push_back(v);
    }
    auto rho = subset_metric(space, ray0);
    auto recovered = psi_tree(tree, rho, {4, 6, 8});
    REQUIRE(recovered.pairs.size() == 1);
    CHECK(recovered.pairs.front().source == recovered.pairs.front().target);
    CHECK(recovered.pairs.front().source.word == word("00000000"));
}

TEST_CASE("psi of the basepoint gluing is the empty map") {
    auto tree = RootedTreeTruncation::binary(6);
    auto glued = chi_tree(tree, PrefixMap{});
    auto recovered = psi_tree(tree, glued.cross, {3, 5, 6});
    CHECK(recovered.pairs.empty());
}

TEST_CASE("composing gluings composes the boundary maps") {
    auto tree = RootedTreeTruncation::binary(6);
    PrefixMap g{{{{0}, {1}, 1.0}}};  // 0w -> 1w
    PrefixMap f{{{{1}, {0}, 1.0}}};  // 1w -> 0w
    auto chi_f = chi_tree(tree, f);
    auto chi_g = chi_tree(tree, g);
    auto combined = compose(chi_f.cross, chi_g.cross);  // g acts first

    auto recovered = psi_tree(tree, combined, {3, 5, 6});
    PrefixMap expected{{{{0}, {0}, 1.0}}};  // f(g(.)) is the identity on cylinder 0
    CHECK(recovered.as_action() == boundary_action(tree, expected));
}

TEST_CASE("meet depths of recovered pairs respect the ratio bound") {
    auto tree = RootedTreeTruncation::binary(6);
    SECTION("identity pairs") {
        BoundaryPoint r1{word("001100")}, r2{word("010011")};
        auto rep = rays_lemma_check(tree, r1, r1, r2, r2, 1.0);
        CHECK(rep.source_meet == rep.target_meet);
        CHECK(rep.status == RatioStatus::Within);
        CHECK(rep.ratio == 1.0);
    }
    SECTION("swap pairs inside one cylinder keep the meet depth") {
        auto glued = chi_tree(tree, swap_map());
        auto rec = psi_tree(tree, glued.cross, {3, 5, 6});
        const auto& a = rec.pairs[0];
        const auto& b = rec.pairs[1];
        auto rep = rays_lemma_check(tree, a.source, a.target, b.source, b.target, 1.0);
        CHECK(rep.source_meet == rep.target_meet);
        CHECK(rep.status == RatioStatus::Within);
    }
    SECTION("a depth shift lands on the boundary band") {
        PrefixMap shift{{{word("0"), word("00"), 1.0}}};
        auto action = boundary_action(tree, shift);
        // two sources meeting at depth 2 transport to targets meeting at 3
        BoundaryPoint r1{word("000000")}, r2{word("001111")};
        BoundaryPoint t1, t2;
        for (const auto& [s, t] : action) {
            if (s == r1) t1 = t;
            if (s == r2) t2 = t;
        }
        auto rep = rays_lemma_check(tree, r1, t1, r2, t2, 1.0);
        CHECK(std::abs(rep.target_meet - rep.source_meet) == 1);
        CHECK(rep.status == RatioStatus::Boundary);
    }
}

TEST_CASE("no-branching trees realize only the empty and identity maps") {
    auto tree = RootedTreeTruncation::unary_chain(8);
    auto rep = survey_boundary_maps(tree, {4, 6, 8});
    CHECK(rep.boundary_rays == 1);
    CHECK(rep.attempted == 2);
    CHECK(rep.recovered_exactly == 2);
    CHECK(rep.matches_partial_bijection_count);
}

TEST_CASE("the two-ray line realizes all seven partial bijections") {
    auto tree = RootedTreeTruncation::star(2, 8);
    auto rep = survey_boundary_maps(tree, {4, 6, 8});
    CHECK(rep.boundary_rays == 2);
    CHECK(rep.attempted == 7);
    CHECK(rep.recovered_exactly == 7);
    CHECK(rep.matches_partial_bijection_count);
}

TEST_CASE("psi round trip holds for a four-pair map on the depth-6 binary tree") {
    auto tree = RootedTreeTruncation::binary(6);
    PrefixMap rotation{{{word("00"), word("11"), 1.0},
                        {word("01"), word("10"), 1.0},
                        {word("10"), word("01"), 1.0},
                        {word("11"), word("00"), 1.0}}};
    auto glued = chi_tree(tree, rotation);
    auto recovered = psi_tree(tree, glued.cross, {3, 5, 6});
    CHECK(recovered.as_action() == boundary_action(tree, rotation));
}
