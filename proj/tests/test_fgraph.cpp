#include "common.hpp"
#include "oracles.hpp"

#include "peermech/fgraph.hpp"

#include <doctest.h>

using namespace peermech;

namespace {

TypeSpaces shape(std::initializer_list<std::size_t> sizes) {
    std::vector<std::vector<Label>> labels;
    for (std::size_t k : sizes) {
        labels.emplace_back();
        for (std::size_t t = 0; t < k; ++t) labels.back().push_back(std::to_string(t));
    }
    return TypeSpaces(labels);
}

std::size_t at(const FeasibilityGraph& g, std::size_t agent, std::vector<int> minus) {
    return g.index(VertexId{agent, std::move(minus)});
}

// The seven-vertex hole of the (2,2,3) graph in cyclic order.
std::vector<std::size_t> seven_hole(const FeasibilityGraph& g) {
    return {at(g, 0, {0, 0}), at(g, 1, {1, 0}), at(g, 2, {1, 1}), at(g, 0, {1, 1}),
            at(g, 2, {0, 1}), at(g, 1, {0, 2}), at(g, 2, {0, 0})};
}

}  // namespace

TEST_SUITE("fgraph") {

TEST_CASE("vertex numbering") {
    const FeasibilityGraph g(shape({2, 2, 3}));
    CHECK(g.vertex_count() == 16);
    CHECK(g.clique_count() == 12);
    for (std::size_t v = 0; v < g.vertex_count(); ++v) CHECK(g.index(g.id(v)) == v);
    CHECK(g.name(at(g, 0, {1, 2})) == "1:(1,2)");
}

TEST_CASE("adjacency matches shared profiles") {
    const FeasibilityGraph bin(shape({2, 2, 2}));
    CHECK(bin.adjacent(at(bin, 0, {0, 0}), at(bin, 1, {1, 0})));
    CHECK_FALSE(bin.adjacent(at(bin, 0, {0, 0}), at(bin, 0, {0, 1})));
    CHECK_FALSE(bin.adjacent(at(bin, 0, {0, 0}), at(bin, 1, {1, 1})));
    for (auto types : {shape({2, 2}), shape({2, 3}), shape({2, 2, 2}), shape({2, 2, 3}), shape({2, 2, 2, 2})}) {
        const FeasibilityGraph g(types);
        for (std::size_t v = 0; v < g.vertex_count(); ++v) {
            std::vector<std::size_t> expect;
            for (std::size_t w = 0; w < g.vertex_count(); ++w) {
                CHECK(g.adjacent(v, w) == oracle::conflict(g, v, w));
                if (oracle::conflict(g, v, w)) expect.push_back(w);
            }
            CHECK(g.neighbors(v) == expect);
            CHECK(expect.size() == types.size(g.agent(v)) * (g.agents() - 1));
        }
    }
}

TEST_CASE("cliques") {
    const FeasibilityGraph g(shape({2, 3, 2}));
    for (std::uint64_t code = 0; code < g.clique_count(); ++code) {
        const Profile theta = g.types().decode(code);
        const auto c = g.clique(theta);
        REQUIRE(c.size() == 3);
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = a + 1; b < 3; ++b) {
                CHECK(g.adjacent(c[a], c[b]));
                CHECK(g.shared_clique(c[a], c[b]) == theta);
            }
    }
    CHECK_FALSE(g.shared_clique(at(g, 0, {0, 0}), at(g, 0, {0, 1})).has_value());
}

TEST_CASE("the seven-hole") {
    const FeasibilityGraph g(shape({2, 2, 3}));
    const auto hole = seven_hole(g);
    const auto adj = [&](std::size_t a, std::size_t b) { return g.adjacent(a, b); };
    CHECK(is_odd_hole(std::span<const std::size_t>(hole), adj));
    const auto holes = find_odd_holes(g, {}, HoleSearchOptions{});
    CHECK(std::find(holes.begin(), holes.end(), canonical_cycle(hole)) != holes.end());
    for (const auto& h : holes) {
        CHECK(is_odd_hole(std::span<const std::size_t>(h), adj));
        CHECK(h == canonical_cycle(h));
    }
    const auto comps = components_of(g, hole);
    REQUIRE(comps.size() == 1);
    CHECK(comps[0].size() == 7);
    const auto only = find_odd_holes(g, hole, HoleSearchOptions{});
    REQUIRE(only.size() == 1);
    CHECK(only[0] == canonical_cycle(hole));
}

TEST_CASE("binary three-agent graph has no odd hole") {
    const FeasibilityGraph g(shape({2, 2, 2}));
    HoleSearchOptions o;
    o.max_len = 11;
    CHECK(find_odd_holes(g, {}, o).empty());
}

TEST_CASE("hole search guard") {
    const FeasibilityGraph g(shape({2, 2, 3}));
    HoleSearchOptions o;
    o.vertex_guard = 10;
    CHECK_THROWS_AS(find_odd_holes(g, {}, o), GuardExceeded);
}

TEST_CASE("simple graphs") {
    SimpleGraph c5(5), c4(4);
    for (std::size_t k = 0; k < 5; ++k) c5.add_edge(k, (k + 1) % 5);
    for (std::size_t k = 0; k < 4; ++k) c4.add_edge(k, (k + 1) % 4);
    CHECK(find_odd_holes(c5, HoleSearchOptions{}).size() == 1);
    CHECK(find_odd_holes(c4, HoleSearchOptions{}).empty());
    CHECK_THROWS(c5.add_edge(2, 2));
    c5.add_edge(1, 0);
    CHECK(c5.edges().size() == 5);
    // the complement of C7 has no odd hole, C7 itself does
    SimpleGraph c7(7);
    for (std::size_t k = 0; k < 7; ++k) c7.add_edge(k, (k + 1) % 7);
    HoleSearchOptions o;
    o.max_len = 7;
    CHECK(find_odd_holes(c7, o).size() == 1);
}

TEST_CASE("complement of a feasibility subgraph") {
    const FeasibilityGraph g(shape({2, 2}));
    std::vector<std::size_t> all(g.vertex_count());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const SimpleGraph h = complement(g, all);
    for (std::size_t a = 0; a < all.size(); ++a)
        for (std::size_t b = 0; b < all.size(); ++b)
            if (a != b) CHECK(h.adjacent(a, b) != g.adjacent(a, b));
}

TEST_CASE("export") {
    const FeasibilityGraph g(shape({2, 2}));
    const nlohmann::json doc = to_json(g);
    CHECK(doc["vertices"].size() == 4);
    CHECK(doc["adjacency"]["1:(0)"].size() == 2);
    const std::string dot = to_dot(g);
    CHECK(dot.find("graph") != std::string::npos);
    CHECK(dot.find("1:(0)") != std::string::npos);
}

}  // TEST_SUITE
