#include "common.hpp"
#include "oracles.hpp"

#include "peermech/extremal.hpp"
#include "peermech/solve.hpp"

#include <doctest.h>

#include <random>

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

std::vector<std::size_t> seven_hole(const FeasibilityGraph& g) {
    return {g.index({0, {0, 0}}), g.index({1, {1, 0}}), g.index({2, {1, 1}}), g.index({0, {1, 1}}),
            g.index({2, {0, 1}}), g.index({1, {0, 2}}), g.index({2, {0, 0}})};
}

std::size_t count_stable_sets(const FeasibilityGraph& g, bool covering) {
    std::size_t count = 0;
    const std::size_t n = g.vertex_count();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        bool ok = true;
        for (std::size_t a = 0; a < n && ok; ++a)
            for (std::size_t b = a + 1; b < n && ok; ++b)
                if ((mask >> a & 1) && (mask >> b & 1) && g.adjacent(a, b)) ok = false;
        for (std::uint64_t code = 0; covering && ok && code < g.clique_count(); ++code) {
            bool hit = false;
            for (auto v : g.clique(g.types().decode(code))) hit |= (mask >> v & 1) != 0;
            ok = hit;
        }
        if (ok) ++count;
    }
    return count;
}

// Greedy stable set among vertices away from the hole's neighbourhood, random order.
std::vector<std::size_t> random_stable_set(const FeasibilityGraph& g, const std::vector<std::size_t>& avoid,
                                           std::mt19937_64& rng) {
    std::vector<std::size_t> order(g.vertex_count());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng() % k]);
    std::vector<std::size_t> s;
    for (std::size_t v : order) {
        if (std::find(avoid.begin(), avoid.end(), v) != avoid.end()) continue;
        if (rng() % 2) continue;
        if (std::none_of(s.begin(), s.end(), [&](std::size_t w) { return g.adjacent(v, w); })) s.push_back(v);
    }
    return s;
}

}  // namespace

TEST_SUITE("extremal") {

TEST_CASE("half mechanism on the seven-hole is extreme") {
    const FeasibilityGraph g(shape({2, 2, 3}));
    const auto hole = seven_hole(g);
    const Mechanism m = construct_hole_mechanism(g, hole, {});
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
        CHECK(m[v] == (std::find(hole.begin(), hole.end(), v) != hole.end() ? Rational(1, 2) : Rational(0)));
    const auto cert = is_extreme(g, m, AllocationMode::may_withhold);
    CHECK(cert.extreme);
    CHECK(cert.rank == g.vertex_count());
    CHECK_FALSE(cert.witness.has_value());
    const nlohmann::json doc = to_json(g, cert);
    CHECK(doc["verdict"] == "extreme");
}

TEST_CASE("non-extreme points carry a witness direction") {
    const FeasibilityGraph g(shape({2, 2, 3}));
    Mechanism m = construct_hole_mechanism(g, seven_hole(g), {});
    m.q /= Rational(2);
    const auto cert = is_extreme(g, m, AllocationMode::may_withhold);
    CHECK_FALSE(cert.extreme);
    REQUIRE(cert.witness.has_value());
    const Vector<Rational>& d = *cert.witness;
    CHECK_FALSE(d.isZero());
    for (const Rational& eps : {Rational(1, 100), Rational(-1, 100)}) {
        Mechanism moved = m;
        moved.q += eps * d;
        CHECK(check_feasible(g, moved).feasible);
    }
    Mechanism bad = m;
    bad.q.setConstant(1);
    CHECK_THROWS_AS(is_extreme(g, bad, AllocationMode::may_withhold), InputError);
}

TEST_CASE("construction with a stable set") {
    const FeasibilityGraph g(shape({2, 2, 3}));
    const auto hole = seven_hole(g);
    const auto vh = hole_clique_union(g, hole);
    const auto near = hole_neighborhood(g, hole);
    // every vertex touches this hole, so S outside V_H gets 1/2
    CHECK(near.size() == g.vertex_count());
    std::vector<std::size_t> s;
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        if (std::find(vh.begin(), vh.end(), v) != vh.end()) continue;
        if (std::none_of(s.begin(), s.end(), [&](std::size_t w) { return g.adjacent(v, w); })) s.push_back(v);
    }
    REQUIRE_FALSE(s.empty());
    const Mechanism m = construct_hole_mechanism(g, hole, s);
    for (std::size_t v : s) CHECK(m[v] == Rational(1, 2));
    CHECK(check_feasible(g, m).feasible);
    CHECK(is_extreme(g, m, AllocationMode::may_withhold).extreme);

    // a larger shape leaves room for S away from the hole
    const FeasibilityGraph big(shape({2, 2, 3, 2}));
    std::vector<std::size_t> lifted;
    for (std::size_t v : hole) {
        std::vector<int> minus;
        for (std::size_t k = 0; k < 3; ++k)
            if (k != g.agent(v)) minus.push_back(g.type_at(v, k));
        minus.push_back(0);
        lifted.push_back(big.index({g.agent(v), minus}));
    }
    const auto big_near = hole_neighborhood(big, lifted);
    std::vector<std::size_t> far;
    for (std::size_t v = 0; v < big.vertex_count(); ++v) {
        if (std::find(big_near.begin(), big_near.end(), v) != big_near.end()) continue;
        if (std::none_of(far.begin(), far.end(), [&](std::size_t w) { return big.adjacent(v, w); })) far.push_back(v);
    }
    REQUIRE_FALSE(far.empty());
    const Mechanism wide = construct_hole_mechanism(big, lifted, far);
    for (std::size_t v : far) CHECK(wide[v] == 1);
    CHECK(check_feasible(big, wide).feasible);

    const std::vector<std::size_t> not_hole{hole[0], hole[1], hole[2], hole[3], hole[4]};
    CHECK_THROWS_AS(construct_hole_mechanism(g, not_hole, {}), InputError);
}

TEST_CASE("hole mechanisms are extreme for sampled holes and stable sets") {
    const FeasibilityGraph g(shape({2, 2, 3}));
    const auto holes = find_odd_holes(g, {}, HoleSearchOptions{});
    REQUIRE_FALSE(holes.empty());
    std::mt19937_64 rng(17);
    for (const auto& h : holes) {
        for (int k = 0; k < 3; ++k) {
            const auto s = random_stable_set(g, h, rng);
            const Mechanism m = construct_hole_mechanism(g, h, s);
            CHECK(check_feasible(g, m).feasible);
            CHECK(is_extreme(g, m, AllocationMode::may_withhold).extreme);
            const auto report = check_hole_characterization(g, m);
            CHECK(report.stochastic);
            CHECK(report.all_have_holes);
            CHECK(report.consistent);
        }
    }
}

TEST_CASE("enumeration on perfect graphs returns the stable sets") {
    for (auto types : {shape({2, 2}), shape({2, 3}), shape({2, 2, 2})}) {
        const FeasibilityGraph g(types);
        const auto points = enumerate_extreme_points(g, AllocationMode::may_withhold);
        CHECK(points.size() == count_stable_sets(g, false));
        for (const auto& m : points) CHECK(m.deterministic());
        const auto must = enumerate_extreme_points(g, AllocationMode::must_allocate);
        CHECK(must.size() == count_stable_sets(g, true));
    }
}

TEST_CASE("enumeration membership agrees with the rank test") {
    const FeasibilityGraph g(shape({2, 2, 3}));
    const auto points = enumerate_extreme_points(g, AllocationMode::may_withhold);
    std::size_t stochastic = 0;
    for (const auto& m : points) {
        CHECK(is_extreme(g, m, AllocationMode::may_withhold).extreme);
        if (!m.deterministic()) {
            ++stochastic;
            CHECK(check_hole_characterization(g, m).all_have_holes);
        }
    }
    CHECK(stochastic > 0);
    // midpoints of two distinct extreme points are never extreme
    for (std::size_t k = 0; k + 1 < points.size(); k += 37) {
        Mechanism mid = points[k];
        mid.q = (points[k].q + points[k + 1].q) / Rational(2);
        CHECK_FALSE(is_extreme(g, mid, AllocationMode::may_withhold).extreme);
    }
}

TEST_CASE("enumeration guard") {
    const FeasibilityGraph g(shape({2, 2, 3}));
    CHECK_THROWS_AS(enumerate_extreme_points(g, AllocationMode::may_withhold, 10), GuardExceeded);
}

TEST_CASE("characterization of a deterministic point") {
    const FeasibilityGraph g(shape({2, 2, 2}));
    const Mechanism m = zero_mechanism(g.types(), AllocationMode::may_withhold);
    const auto report = check_hole_characterization(g, m);
    CHECK_FALSE(report.stochastic);
    CHECK(report.extreme);
    CHECK(report.consistent);
}

}  // TEST_SUITE
