// Acceptance checks. Usage: acceptance [k ...]; no argument runs all twelve.

#include "oracles.hpp"

#include "peermech/extremal.hpp"
#include "peermech/hardness.hpp"
#include "peermech/simgen.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace peermech;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> failures;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok && std::find(failures.begin(), failures.end(), what) == failures.end()) failures.push_back(what);
        pass = pass && ok;
    }
};

TypeSpaces shape(const std::vector<std::size_t>& sizes) {
    std::vector<std::vector<Label>> labels;
    for (std::size_t k : sizes) {
        labels.emplace_back();
        for (std::size_t t = 0; t < k; ++t) labels.back().push_back(std::to_string(t));
    }
    return TypeSpaces(labels);
}

std::string shape_name(const std::vector<std::size_t>& sizes) {
    std::string s = "(";
    for (std::size_t k = 0; k < sizes.size(); ++k) s += (k ? "," : "") + std::to_string(sizes[k]);
    return s + ")";
}

std::vector<Rational> as_vector(const WeightVector& w) { return {w.values.data(), w.values.data() + w.values.size()}; }

WeightInstance hole7() {
    std::ifstream in(std::string(PEERMECH_TEST_DATA) + "/hole7_weights.json");
    return parse_weight_instance(nlohmann::json::parse(in));
}

Mechanism random_mechanism(const TypeSpaces& types, std::mt19937_64& rng) {
    Mechanism m = zero_mechanism(types, AllocationMode::may_withhold);
    const long n = static_cast<long>(types.agents());
    for (Index v = 0; v < m.q.size(); ++v) m.q(v) = Rational(static_cast<long>(rng() % 11), 10 * n);
    return m;
}

void criterion1(Outcome& o) {
    const WeightInstance inst = hole7();
    const FeasibilityGraph g(inst.types);
    o.require(g.vertex_count() == 16, "graph does not have 16 vertices");
    LpOptions opt;
    opt.check_unique = true;
    const SolveReport r = solve_lp(g, inst.weights, opt);
    o.require(r.status == SolveStatus::optimal, "LP not optimal");
    o.require(r.objective == Rational(7, 2), "objective " + to_string(r.objective) + " != 7/2");
    o.require(r.unique.value_or(false), "optimum not confirmed unique");
    std::size_t halves = 0;
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        const Rational expect = inst.weights[v] > 0 ? Rational(1, 2) : Rational(0);
        o.require(r.mechanism[v] == expect, "q(" + g.name(v) + ") = " + to_string(r.mechanism[v]));
        if (inst.weights[v] > 0) ++halves;
    }
    o.require(halves == 7, "weight file does not mark seven hole vertices");
    o.require(is_extreme(g, r.mechanism, AllocationMode::may_withhold).extreme, "optimum not extreme");
    o.detail << "objective 7/2, unique, extreme";
}

void criterion2(Outcome& o) {
    const WeightInstance inst = hole7();
    const FeasibilityGraph g(inst.types);
    const SolveReport r = solve_deterministic(g, inst.weights, BranchOptions{});
    const Rational brute = oracle::max_stable_weight(g, as_vector(inst.weights));
    o.require(r.objective == 3, "deterministic optimum " + to_string(r.objective));
    o.require(brute == 3, "stable-set enumeration gives " + to_string(brute));
    o.require(r.mechanism.deterministic() && check_feasible(g, r.mechanism).feasible, "returned mechanism invalid");
    o.detail << "deterministic optimum 3 = stable-set enumeration";
}

void criterion3(Outcome& o) {
    std::size_t instances = 0, points = 0;
    const std::vector<std::vector<std::size_t>> shapes{{2, 2}, {2, 3}, {3, 3}, {3, 2}};
    for (std::uint64_t seed = 1; seed <= 2; ++seed)
        for (const auto& s : shapes) {
            const Environment env = gen_random_env(s, seed);
            const FeasibilityGraph g(env.types);
            ++instances;
            for (const AllocationMode mode : {AllocationMode::may_withhold, AllocationMode::must_allocate}) {
                for (const auto& m : enumerate_extreme_points(g, mode)) {
                    ++points;
                    o.require(m.deterministic(), shape_name(s) + ": stochastic extreme point");
                    o.require(is_jury(g, m).is_jury, shape_name(s) + ": extreme point is not a jury mechanism");
                }
                JuryOptions jo;
                jo.mode = mode;
                LpOptions lo;
                lo.mode = mode;
                const Rational jury = solve_jury(env, jo).objective, lp = solve_lp(env, lo).objective;
                o.require(jury == lp, shape_name(s) + " " + to_string(mode) + ": jury " + to_string(jury) +
                                          " != LP " + to_string(lp));
            }
        }
    o.detail << instances << " instances, " << points << " extreme points, all deterministic juries; jury = LP";
}

void criterion4(Outcome& o) {
    const FeasibilityGraph g(shape({2, 2, 2}));
    o.require(g.vertex_count() == 12, "expected 12 variables");
    const auto points = enumerate_extreme_points(g, AllocationMode::must_allocate);
    for (const auto& m : points) {
        o.require(m.deterministic(), "stochastic must-allocate extreme point");
        o.require(is_jury(g, m).is_jury, "must-allocate extreme point is not a jury mechanism");
    }
    o.require(!points.empty(), "no extreme points");
    o.detail << points.size() << " must-allocate extreme points, all deterministic juries";
}

void criterion5(Outcome& o) {
    const FeasibilityGraph binary(shape({2, 2, 2}));
    std::size_t binary_stochastic = 0;
    for (const auto& m : enumerate_extreme_points(binary, AllocationMode::may_withhold))
        if (!m.deterministic()) ++binary_stochastic;
    o.require(binary_stochastic == 0, "binary types have stochastic extreme points");

    const FeasibilityGraph g(shape({2, 2, 3}));
    std::size_t stochastic = 0;
    for (const auto& m : enumerate_extreme_points(g, AllocationMode::may_withhold)) {
        if (m.deterministic()) continue;
        ++stochastic;
        const HoleCharacterization report = check_hole_characterization(g, m);
        o.require(report.extreme && report.all_have_holes && report.consistent,
                  "stochastic extreme point fails the hole characterization");
    }
    o.require(stochastic > 0, "(2,2,3) has no stochastic extreme point");
    o.detail << "binary: 0 stochastic; (2,2,3): " << stochastic << " stochastic, all with odd holes";
}

void criterion6(Outcome& o) {
    const std::vector<std::vector<std::size_t>> shapes{{2, 2}, {2, 2, 2}, {2, 2, 3}, {2, 3, 3}};
    for (const auto& s : shapes) {
        const FeasibilityGraph g(shape(s));
        std::vector<std::size_t> all(g.vertex_count());
        std::iota(all.begin(), all.end(), std::size_t{0});
        HoleSearchOptions five;
        five.max_len = 5;
        const auto holes = find_odd_holes(g, all, five);
        o.require(holes.empty(), shape_name(s) + ": odd 5-hole found");
        const SimpleGraph comp = complement(g, all);
        HoleSearchOptions any;
        any.max_len = std::max<std::size_t>(5, comp.vertex_count());
        o.require(find_odd_holes(comp, any).empty(), shape_name(s) + ": complement has an odd hole");
        o.detail << shape_name(s) << " " << g.vertex_count() << "v ";
    }
    o.detail << "no 5-hole, complements free of odd holes";
}

void criterion7(Outcome& o) {
    std::size_t graphs = 0, checks = 0;
    for (std::size_t n = 1; n <= 5; ++n)
        for (const auto& edges : oracle::graph_classes(n)) {
            SimpleGraph src(n);
            for (std::size_t v = 0; v < n; ++v) src.names.push_back(std::to_string(v + 1));
            for (auto [a, b] : edges) src.add_edge(a, b);
            ++graphs;
            for (std::size_t k = 1; k <= 5; ++k) {
                const ReductionCheck c = verify_reduction(src, k);
                ++checks;
                o.require(c.holds, "equivalence fails on a graph with " + std::to_string(n) + " vertices, " +
                                       std::to_string(edges.size()) + " edges, k=" + std::to_string(k));
            }
        }
    o.detail << graphs << " isomorphism classes, " << checks << " (graph, k) pairs";
}

void criterion8(Outcome& o) {
    for (std::size_t ell = 1; ell <= 2; ++ell) {
        const Environment env = gen_group_env(ell);
        const std::size_t n = env.agents();
        const Rational ranking = utility(env, ranking_mechanism(env, Rational(2, 3)));
        const Rational upper = upper_bound(env, AllocationMode::may_withhold);
        const SolveReport jury = solve_jury(env, JuryOptions{});
        o.require(ranking == 1 && upper == 1, "ranking " + to_string(ranking) + ", upper " + to_string(upper));
        o.require(jury.status == SolveStatus::optimal && jury.objective <= Rational(2, 3),
                  "l=" + std::to_string(ell) + ": jury value " + to_string(jury.objective) + " > 2/3");
        Rational worst = 0;
        for (const auto& row : rank_table(env).rows) worst = std::max(worst, row.delta);
        o.require(worst <= Rational(2, static_cast<long>(n)),
                  "l=" + std::to_string(ell) + ": informational size " + to_string(worst) + " > 2/" + std::to_string(n));
        o.detail << "l=" << ell << ": ranking 1, upper 1, jury " << to_string(jury.objective) << ", max delta "
                 << to_string(worst) << "; ";
    }
}

void criterion9(Outcome& o) {
    std::vector<std::pair<std::string, Environment>> envs;
    const std::vector<Rational> levels{Rational(-1), Rational(1)};
    NetworkOptions net;
    net.observe_own = false;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) envs.emplace_back("ring3", gen_network_env(ring_network(3), levels, Rational(1, 4), seed, net));
    for (std::uint64_t seed = 1; seed <= 3; ++seed) envs.emplace_back("ring4", gen_network_env(ring_network(4), levels, Rational(1, 3), seed, net));
    for (std::uint64_t seed = 1; seed <= 3; ++seed) envs.emplace_back("star3", gen_network_env(star_network(3), levels, Rational(1, 4), seed, net));
    for (std::uint64_t seed = 1; seed <= 2; ++seed) envs.emplace_back("star4", gen_network_env(star_network(4), levels, Rational(1, 2), seed, net));
    for (std::uint64_t seed = 1; seed <= 4; ++seed) envs.emplace_back("ci2", gen_ci_env(random_ci_structure(2, seed), 2));
    for (std::uint64_t seed = 1; seed <= 4; ++seed) envs.emplace_back("ci3", gen_ci_env(random_ci_structure(3, seed), 3));
    const std::vector<Rational> grid{Rational(1, 3), Rational(1, 2), Rational(2, 3), Rational(3, 4)};
    std::size_t cells = 0;
    for (const auto& [name, env] : envs) {
        const Rational lp = solve_lp(env, LpOptions{}).objective;
        const Rational upper = upper_bound(env, AllocationMode::may_withhold);
        for (const auto& p : grid) {
            const Rational lb = ranking_lower_bound(env, p);
            const Rational ranking = utility(env, ranking_mechanism(env, p));
            ++cells;
            o.require(lb <= ranking && ranking <= lp && lp <= upper,
                      name + " p=" + to_string(p) + ": " + to_string(lb) + " / " + to_string(ranking) + " / " +
                          to_string(lp) + " / " + to_string(upper));
        }
    }
    o.detail << envs.size() << " environments, " << cells << " cells: lower bound <= ranking <= LP <= upper";
}

SignalKernel binary_kernel(const Rational& right_low, const Rational& right_high) {
    return {{"0", "1"}, {{right_low, 1 - right_low}, {1 - right_high, right_high}}};
}

void criterion10(Outcome& o) {
    const ValueDistribution f1{{Rational(-1), Rational(1)}, {Rational(1, 2), Rational(1, 2)}};
    const ValueDistribution f2{{Rational(-1, 2), Rational(1)}, {Rational(2, 3), Rational(1, 3)}};
    const SignalKernel k1 = binary_kernel(Rational(3, 4), Rational(2, 3));
    const SignalKernel k2 = binary_kernel(Rational(4, 5), Rational(1, 2));
    const ReplicationReport sup = jury_replication_check(InfoStructure::suppliers({f1, f2, f1, f2}, {k1, k2, k1, k2}), 2);
    const ReplicationReport rec = jury_replication_check(InfoStructure::recipients(f2, {k1, k2, k2, k1}), 2);
    for (const auto* r : {&sup, &rec}) {
        o.require(r->equal && r->jury == r->target,
                  r->kind + ": jury " + to_string(r->jury) + " != benchmark " + to_string(r->target));
        o.require(r->replicated.agents() == 4, r->kind + ": replicated environment is not 4 agents");
        o.detail << r->kind << " " << to_string(r->jury) << " = " << to_string(r->target) << "; ";
    }
}

void criterion11(Outcome& o) {
    const std::vector<Label> bin{"0", "1"};
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const SymmetricEnvironment s = gen_symmetric_env(3, bin, seed);
        const FeasibilityGraph g(s.env.types);
        const Rational e1 = expected_value(s.env, 0);
        const auto points = enumerate_extreme_points(g, AllocationMode::must_allocate);
        for (const auto& m : points)
            o.require(utility(s.env, m) == e1, "seed " + std::to_string(seed) + ": extreme point utility " +
                                                   to_string(utility(s.env, m)) + " != " + to_string(e1));
        o.detail << "seed " << seed << ": " << points.size() << " points at " << to_string(e1) << "; ";
    }
}

void criterion12(Outcome& o) {
    std::mt19937_64 rng(2024);
    const std::vector<std::vector<std::size_t>> shapes{{2, 2}, {2, 3}, {3, 3}, {2, 2, 2}, {2, 2, 3}};
    std::size_t verdicts = 0, utilities = 0;
    for (const auto& s : shapes) {
        const FeasibilityGraph g(shape(s));
        for (const AllocationMode mode : {AllocationMode::may_withhold, AllocationMode::must_allocate}) {
            const auto points = enumerate_extreme_points(g, mode);
            std::set<std::vector<Rational>> members;
            for (const auto& m : points) members.insert(std::vector<Rational>(m.q.data(), m.q.data() + m.q.size()));
            const auto check = [&](const Mechanism& m) {
                const bool member = members.count(std::vector<Rational>(m.q.data(), m.q.data() + m.q.size())) > 0;
                ++verdicts;
                o.require(is_extreme(g, m, mode).extreme == member,
                          shape_name(s) + " " + to_string(mode) + ": rank test disagrees with enumeration");
            };
            for (const auto& m : points) check(m);
            // random convex combinations of up to three extreme points
            for (int t = 0; t < 60 && !points.empty(); ++t) {
                Mechanism m = points[rng() % points.size()];
                const std::size_t parts = 1 + rng() % 3;
                Vector<Rational> acc = m.q;
                for (std::size_t k = 1; k < parts; ++k) acc += points[rng() % points.size()].q;
                m.q = acc / Rational(static_cast<long>(parts));
                check(m);
            }
        }
        for (std::uint64_t seed = 1; seed <= 2; ++seed) {
            const Environment env = gen_random_env(s, seed);
            const WeightVector w = weights(env);
            for (int t = 0; t < 100; ++t) {
                const Mechanism m = random_mechanism(env.types, rng);
                ++utilities;
                o.require(utility(w, m) == utility_by_profiles(env, m), shape_name(s) + ": utility routes differ");
            }
        }
    }
    o.detail << verdicts << " rank-test verdicts match enumeration; " << utilities << " utility pairs agree";
}

const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
    {"seven-hole LP optimum", criterion1},
    {"seven-hole deterministic optimum", criterion2},
    {"two agents: extreme points are juries", criterion3},
    {"must-allocate with three binary agents", criterion4},
    {"stochastic extreme points need a ternary type space", criterion5},
    {"no 5-holes, complements without odd holes", criterion6},
    {"stable-set reduction on all small graphs", criterion7},
    {"hole groups separate ranking from juries", criterion8},
    {"analytic lower bound chain", criterion9},
    {"jury replication", criterion10},
    {"symmetric environments", criterion11},
    {"rank test and utility oracles", criterion12},
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::size_t> which;
    for (int a = 1; a < argc; ++a) which.push_back(std::stoul(argv[a]));
    if (which.empty())
        for (std::size_t k = 1; k <= criteria.size(); ++k) which.push_back(k);
    bool all = true;
    for (std::size_t k : which) {
        if (k == 0 || k > criteria.size()) {
            std::cerr << "no criterion " << k << '\n';
            return 2;
        }
        Outcome o;
        try {
            criteria[k - 1].second(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << k << ": " << criteria[k - 1].first << " | ";
        for (const auto& f : o.failures) std::cout << "failed: " << f << " | ";
        std::cout << o.detail.str() << std::endl;
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
