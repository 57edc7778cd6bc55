#include "common.hpp"
#include "oracles.hpp"

#include "peermech/simgen.hpp"

#include <doctest.h>

#include <fstream>
#include <random>

using namespace peermech;

namespace {

WeightInstance hole7() {
    std::ifstream in(data_path("hole7_weights.json"));
    return parse_weight_instance(nlohmann::json::parse(in));
}

Mechanism half_on_positive(const WeightInstance& inst) {
    Mechanism m = zero_mechanism(inst.types, AllocationMode::may_withhold);
    for (std::size_t v = 0; v < inst.types.vertex_count(); ++v)
        if (inst.weights[v] > 0) m.q(static_cast<Index>(v)) = Rational(1, 2);
    return m;
}

// Feasible random mechanism: uniform draws scaled by 1/n.
Mechanism random_mechanism(const TypeSpaces& types, std::mt19937_64& rng) {
    Mechanism m = zero_mechanism(types, AllocationMode::may_withhold);
    const long n = static_cast<long>(types.agents());
    for (Index v = 0; v < m.q.size(); ++v) m.q(v) = Rational(static_cast<long>(rng() % 7), 6 * n);
    return m;
}

}  // namespace

TEST_SUITE("mech") {

TEST_CASE("feasibility") {
    const WeightInstance inst = hole7();
    const FeasibilityGraph g(inst.types);
    CHECK(check_feasible(g, half_on_positive(inst)).feasible);

    Mechanism bad = zero_mechanism(inst.types, AllocationMode::may_withhold);
    const std::size_t a = g.index({0, {0, 0}}), b = g.index({1, {1, 0}});
    bad.q(static_cast<Index>(a)) = 1;
    bad.q(static_cast<Index>(b)) = 1;
    const FeasibilityReport r = check_feasible(g, bad);
    CHECK_FALSE(r.feasible);
    REQUIRE(r.clique.has_value());
    CHECK(*r.clique == g.shared_clique(a, b));

    Mechanism uniform = zero_mechanism(inst.types, AllocationMode::must_allocate);
    uniform.q.setConstant(Rational(1, 3));
    CHECK(check_feasible(g, uniform).feasible);
    uniform.q(0) = Rational(1, 4);
    CHECK_FALSE(check_feasible(g, uniform).feasible);
}

TEST_CASE("utility of the half mechanism on the seven-hole") {
    const WeightInstance inst = hole7();
    CHECK(utility(inst.weights, half_on_positive(inst)) == Rational(7, 2));
    CHECK(utility(inst.weights, zero_mechanism(inst.types, AllocationMode::may_withhold)) == 0);
}

TEST_CASE("both utility routes agree") {
    std::mt19937_64 rng(11);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Environment env = gen_random_env({2, 3, 2}, seed);
        const WeightVector w = weights(env);
        for (int k = 0; k < 20; ++k) {
            const Mechanism m = random_mechanism(env.types, rng);
            CHECK(utility(w, m) == utility_by_profiles(env, m));
        }
    }
}

TEST_CASE("ranks") {
    const std::vector<Rational> equal(3, Rational(1, 2));
    CHECK(ranks(equal) == std::vector<Rational>{Rational(1, 3), Rational(2, 3), Rational(1)});
    std::mt19937_64 rng(3);
    for (int k = 0; k < 200; ++k) {
        std::vector<Rational> u(2 + rng() % 5);
        for (auto& x : u) x = Rational(static_cast<long>(rng() % 5) - 2, 2);
        const auto r = ranks(u);
        CHECK(r == oracle::ranks(u));
        auto sorted = r;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t j = 0; j < u.size(); ++j)
            CHECK(sorted[j] == Rational(static_cast<long>(j + 1), static_cast<long>(u.size())));
    }
}

TEST_CASE("rank table on the hole environment") {
    const Environment env = load_environment(data_path("env_b1.json"));
    const RankTable table = rank_table(env);
    REQUIRE(table.rows.size() == 9);
    for (const auto& row : table.rows) {
        int ones = 0;
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(row.robust_rank[i] >= row.rank[i]);
            if (row.peer[i] == 1) {
                ++ones;
                CHECK(row.robust_rank[i] <= Rational(2, 3));
            } else {
                CHECK(row.rank[i] == 1);
            }
        }
        CHECK(ones == 2);
        CHECK(row.delta <= Rational(2, 3));
    }
    const InformationalSize size = informational_size_profile(env);
    CHECK(size.max <= Rational(2, 3));
    const std::string csv = rank_table_csv(env, table);
    CHECK(csv.rfind("theta,agent,peer_value,rank,robust_rank,delta\n", 0) == 0);
}

TEST_CASE("informational size matches a brute-force definition") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const Environment env = gen_random_env({2, 2, 3}, seed);
        const RankTable table = rank_table(env);
        const std::size_t n = env.agents();
        const auto rank_at = [&](const Profile& theta, std::size_t i) {
            std::vector<Rational> u(n);
            for (std::size_t j = 0; j < n; ++j) {
                Profile minus;
                for (std::size_t k = 0; k < n; ++k)
                    if (k != j) minus.push_back(theta[k]);
                u[j] = oracle::peer_value(env, j, minus);
            }
            return oracle::ranks(u)[i];
        };
        for (const auto& row : table.rows) {
            Rational delta = 0;
            for (std::size_t i = 0; i < n; ++i) {
                Rational robust = 0;
                for (int t = 0; t < static_cast<int>(env.types.size(i)); ++t) {
                    Profile other = row.theta;
                    other[i] = t;
                    const Rational r = rank_at(other, i);
                    robust = std::max(robust, r);
                    delta = std::max(delta, abs(r - rank_at(row.theta, i)));
                }
                CHECK(row.robust_rank[i] == robust);
                CHECK(row.rank[i] == rank_at(row.theta, i));
            }
            CHECK(row.delta == delta);
            CHECK(row.delta <= Rational(static_cast<long>(n - 1), static_cast<long>(n)));
        }
    }
}

TEST_CASE("ranking mechanism") {
    const Environment env = load_environment(data_path("env_b1.json"));
    const Mechanism m = ranking_mechanism(env, Rational(2, 3));
    const FeasibilityGraph g(env.types);
    CHECK(check_feasible(g, m).feasible);
    CHECK(utility(env, m) == 1);
    const auto pt = peer_table(env);
    for (const auto& e : env.support)
        for (std::size_t i = 0; i < 3; ++i) {
            const std::size_t v = env.types.vertex(i, e.theta);
            CHECK(m[v] == (pt.value(static_cast<Index>(v)) == 1 ? Rational(1, 2) : Rational(0)));
        }
    CHECK(ranking_mechanism(env, Rational(1, 4)).q.isZero());
    CHECK_THROWS(ranking_mechanism(env, Rational(1)));

    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const Environment r = gen_random_env({2, 3, 2}, seed);
        for (const Rational& p : {Rational(1, 3), Rational(1, 2), Rational(2, 3), Rational(9, 10)}) {
            const Mechanism q = ranking_mechanism(r, p);
            CHECK(check_feasible(FeasibilityGraph(r.types), q).feasible);
            for (Index v = 0; v < q.q.size(); ++v) CHECK((q.q(v) >= 0 && q.q(v) <= 1));
        }
    }
}

TEST_CASE("ranking mechanism on two groups") {
    const Environment env = gen_group_env(2);
    const Mechanism m = ranking_mechanism(env, Rational(2, 3));
    for (const auto& e : env.support) {
        int winners = 0;
        for (std::size_t i = 0; i < 6; ++i) {
            const Rational& q = m[env.types.vertex(i, e.theta)];
            if (q != 0) {
                CHECK(q == Rational(1, 4));
                ++winners;
            }
        }
        CHECK(winners == 4);
    }
}

TEST_CASE("jury mechanisms") {
    const Environment env = load_environment(data_path("env_jury2.json"));
    const std::vector<std::size_t> j2{1};
    const Mechanism m = jury_mechanism_for(env, j2, AllocationMode::may_withhold);
    CHECK(utility(env, m) == Rational(1, 2));
    CHECK(jury_utility(env, j2, AllocationMode::may_withhold) == Rational(1, 2));
    const FeasibilityGraph g(env.types);
    const JuryWitness w = is_jury(g, m);
    CHECK(w.is_jury);
    CHECK(w.jurors == j2);
    CHECK(utility(env, jury_mechanism_for(env, {}, AllocationMode::may_withhold)) == 0);
    CHECK_THROWS(jury_mechanism_for(env, {0, 1}, AllocationMode::must_allocate));

    const Environment b1 = load_environment(data_path("env_b1.json"));
    for (std::size_t j = 0; j < 3; ++j)
        CHECK(jury_utility(b1, {j}, AllocationMode::may_withhold) <= Rational(2, 3));
}

TEST_CASE("jury mechanism beats every other rule with the same jurors") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const Environment env = gen_random_env({2, 2, 2}, seed);
        const FeasibilityGraph g(env.types);
        const WeightVector w = weights(env);
        const std::vector<std::size_t> jurors{2};
        const Rational best = jury_utility(env, jurors, AllocationMode::may_withhold);
        CHECK(is_jury(g, jury_mechanism_for(env, jurors, AllocationMode::may_withhold)).is_jury);
        // juror 3 has two types; each maps to none, agent 1 or agent 2
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                Mechanism m = zero_mechanism(env.types, AllocationMode::may_withhold);
                const int choice[2] = {a, b};
                for (std::size_t v = 0; v < g.vertex_count(); ++v) {
                    const std::size_t i = g.agent(v);
                    if (i == 2) continue;
                    if (choice[g.type_at(v, 2)] == static_cast<int>(i) + 1) m.q(static_cast<Index>(v)) = 1;
                }
                CHECK(utility(w, m) <= best);
            }
    }
}

TEST_CASE("is_jury") {
    const WeightInstance inst = hole7();
    const FeasibilityGraph g(inst.types);
    CHECK_FALSE(is_jury(g, half_on_positive(inst)).is_jury);
    Mechanism constant = zero_mechanism(inst.types, AllocationMode::must_allocate);
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
        if (g.agent(v) == 1) constant.q(static_cast<Index>(v)) = 1;
    const JuryWitness w = is_jury(g, constant);
    CHECK(w.is_jury);
    CHECK(w.jurors == std::vector<std::size_t>{0, 2});
}

TEST_CASE("mechanism JSON round-trip") {
    const WeightInstance inst = hole7();
    const Mechanism m = half_on_positive(inst);
    const nlohmann::json doc = to_json(inst.types, m);
    CHECK(doc["entries"].size() == 7);
    CHECK(parse_mechanism(inst.types, doc) == m);
}

}  // TEST_SUITE
