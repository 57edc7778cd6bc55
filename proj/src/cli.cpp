#include "peermech/cli.hpp"

#include "peermech/extremal.hpp"
#include "peermech/hardness.hpp"
#include "peermech/simgen.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

namespace peermech::cli {

namespace {

struct Instance {
    TypeSpaces types;
    WeightVector weights;
    std::optional<Environment> env;
};

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("parse failure in ") + path + ": " + e.what());
    }
}

Instance load_instance(const std::string& path) {
    const nlohmann::json doc = read_json(path);
    Instance inst;
    if (doc.is_object() && doc.contains("weights")) {
        WeightInstance w = parse_weight_instance(doc);
        inst.types = std::move(w.types);
        inst.weights = std::move(w.weights);
    } else {
        inst.env = parse_environment(doc);
        inst.types = inst.env->types;
        inst.weights = weights(*inst.env);
    }
    return inst;
}

const Environment& require_env(const Instance& inst) {
    if (!inst.env) throw InputError("this command needs an environment file, not a weight file");
    return *inst.env;
}

TypeSpaces shape_types(const std::vector<std::size_t>& shape) {
    std::vector<std::vector<Label>> labels;
    for (std::size_t k : shape) {
        labels.emplace_back();
        for (std::size_t t = 0; t < k; ++t) labels.back().push_back(std::to_string(t));
    }
    return TypeSpaces(labels);
}

std::vector<Rational> parse_list(const std::string& text) {
    std::vector<Rational> out;
    std::stringstream in(text);
    for (std::string item; std::getline(in, item, ',');) {
        try {
            out.push_back(parse_rational(item));
        } catch (const std::invalid_argument& e) {
            throw InputError("bad number '" + item + "'");
        }
    }
    return out;
}

Rational parse_number(const std::string& text) {
    try {
        return parse_rational(text);
    } catch (const std::invalid_argument&) {
        throw InputError("bad number '" + text + "'");
    }
}

std::string decimal(const Rational& x) {
    std::ostringstream s;
    s << std::setprecision(12) << to_double(x);
    return s.str();
}

std::size_t vertex_by_name(const FeasibilityGraph& g, const std::string& name) {
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
        if (g.name(v) == name) return v;
    throw InputError("unknown vertex " + name);
}

struct Common {
    std::string env_path;
    std::string mode = "may-withhold";
    std::string format = "json";
    bool float_column = false;
    bool timing = false;
    std::string out_path;
};

class Runner {
public:
    Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

    int operator()(std::vector<std::string> args);

private:
    std::ostream& out_;
    std::ostream& err_;
    Common c_;
    std::ostringstream buffer_;
    int status_ = ok;

    void emit(const nlohmann::json& doc) { buffer_ << doc.dump(2) << '\n'; }
    void exact(nlohmann::json& doc, const std::string& key, const Rational& x) const {
        doc[key] = to_string(x);
        if (c_.float_column) doc[key + "_float"] = decimal(x);
    }
    AllocationMode mode() const { return parse_mode(c_.mode); }

    void add_common(CLI::App* sub, bool env_required = true, bool with_mode = true) {
        auto* opt = sub->add_option("--env", c_.env_path, "environment or weight file (JSON)");
        if (env_required) opt->required();
        if (with_mode)
            sub->add_option("--mode", c_.mode, "may-withhold | must-allocate")
                ->check(CLI::IsMember({"may-withhold", "must-allocate"}));
        sub->add_option("--format", c_.format, "json | csv | text")->check(CLI::IsMember({"json", "csv", "text", "dot"}));
        sub->add_flag("--float", c_.float_column, "add decimal renderings next to exact values");
        sub->add_option("--out", c_.out_path, "write output to this file instead of stdout");
    }

    void report_solve(const TypeSpaces& types, const SolveReport& report) {
        if (c_.format == "text") {
            buffer_ << "status " << to_string(report.status) << '\n' << "objective " << to_string(report.objective);
            if (c_.float_column) buffer_ << " (" << decimal(report.objective) << ")";
            buffer_ << '\n';
            if (report.unique) buffer_ << "unique " << (*report.unique ? "true" : "false") << '\n';
            if (report.jurors) {
                buffer_ << "jurors";
                for (auto j : *report.jurors) buffer_ << ' ' << j + 1;
                buffer_ << '\n';
            }
            const FeasibilityGraph g(types, true);
            for (std::size_t v = 0; v < g.vertex_count(); ++v)
                if (report.mechanism[v] != 0) buffer_ << g.name(v) << ' ' << to_string(report.mechanism[v]) << '\n';
            if (!report.note.empty()) buffer_ << "note " << report.note << '\n';
        } else {
            nlohmann::json doc = to_json(types, report);
            if (c_.float_column) doc["objective_float"] = decimal(report.objective);
            emit(doc);
        }
        if (report.status == SolveStatus::guard_exceeded) {
            err_ << "guard exceeded: " << report.note << '\n';
            status_ = guard_exceeded;
        } else if (report.status == SolveStatus::infeasible) {
            err_ << "infeasible\n";
            status_ = domain_error;
        }
    }
};

int Runner::operator()(std::vector<std::string> args) {
    CLI::App app{"Exact solvers for dominant-strategy allocation mechanisms driven by peer reports", "peermech"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");
    std::function<void()> action;

    // solve
    bool unique = false;
    std::size_t var_guard = 5000;
    auto* solve = app.add_subcommand("solve", "optimal stochastic mechanism (exact LP)");
    add_common(solve);
    solve->add_flag("--unique", unique, "check that the optimum is unique");
    solve->add_option("--guard", var_guard, "variable guard");
    solve->add_flag("--timing", c_.timing, "report wall time");
    solve->callback([&] {
        action = [&] {
            const Instance inst = load_instance(c_.env_path);
            LpOptions o;
            o.mode = mode();
            o.variable_guard = var_guard;
            o.check_unique = unique;
            o.timing = c_.timing;
            report_solve(inst.types, inst.env ? solve_lp(*inst.env, o) : solve_lp(FeasibilityGraph(inst.types, true), inst.weights, o));
        };
    });

    // solve-det
    std::size_t node_guard = 10'000'000, lp_after = 0;
    auto* det = app.add_subcommand("solve-det", "optimal deterministic mechanism (branch and bound)");
    add_common(det);
    det->add_option("--node-guard", node_guard, "branch-and-bound node limit");
    det->add_option("--lp-bound-after", lp_after, "nodes before LP bounding starts (0 = never)");
    det->add_flag("--timing", c_.timing, "report wall time");
    det->callback([&] {
        action = [&] {
            const Instance inst = load_instance(c_.env_path);
            BranchOptions o;
            o.mode = mode();
            o.node_guard = node_guard;
            o.lp_bound_after = lp_after;
            o.timing = c_.timing;
            report_solve(inst.types, inst.env ? solve_deterministic(*inst.env, o)
                                              : solve_deterministic(FeasibilityGraph(inst.types, true), inst.weights, o));
        };
    });

    // jury
    std::size_t max_agents = 16;
    bool single = false;
    auto* jury = app.add_subcommand("jury", "best jury mechanism by enumerating juror sets");
    add_common(jury);
    jury->add_option("--max-agents", max_agents, "guard on n for 2^n enumeration");
    jury->add_flag("--single", single, "only juror sets of size at most one");
    jury->callback([&] {
        action = [&] {
            const Instance inst = load_instance(c_.env_path);
            JuryOptions o;
            o.mode = mode();
            o.max_agents = max_agents;
            o.single_juror_only = single;
            report_solve(inst.types, solve_jury(require_env(inst), o));
        };
    });

    // ranking
    std::string p_text = "1/2";
    auto* ranking = app.add_subcommand("ranking", "ranking-based mechanism q^p");
    add_common(ranking, true, false);
    ranking->add_option("--p", p_text, "threshold in (0, 1)");
    ranking->callback([&] {
        action = [&] {
            const Instance inst = load_instance(c_.env_path);
            const Environment& env = require_env(inst);
            const Rational p = parse_number(p_text);
            if (p <= 0 || p >= 1) throw InputError("p must lie in (0, 1)");
            const Mechanism m = ranking_mechanism(env, p);
            const Rational u = utility(env, m);
            if (c_.format == "text") {
                buffer_ << "utility " << to_string(u) << '\n';
                const FeasibilityGraph g(env.types);
                for (std::size_t v = 0; v < g.vertex_count(); ++v)
                    if (m[v] != 0) buffer_ << g.name(v) << ' ' << to_string(m[v]) << '\n';
                return;
            }
            nlohmann::json doc;
            exact(doc, "p", p);
            exact(doc, "utility", u);
            doc["mechanism"] = to_json(env.types, m);
            emit(doc);
        };
    });

    // rank-table
    auto* rt = app.add_subcommand("rank-table", "peer values, ranks, robust ranks and informational size");
    add_common(rt, true, false);
    rt->callback([&] {
        action = [&] {
            const Instance inst = load_instance(c_.env_path);
            const Environment& env = require_env(inst);
            const RankTable table = rank_table(env);
            if (c_.format == "json") {
                nlohmann::json rows = nlohmann::json::array();
                for (const auto& row : table.rows) {
                    nlohmann::json r;
                    nlohmann::json theta = nlohmann::json::array();
                    for (std::size_t i = 0; i < env.agents(); ++i) theta.push_back(env.types.label(i, row.theta[i]));
                    r["theta"] = theta;
                    exact(r, "prob", row.prob);
                    for (const char* key : {"peer", "rank", "robust_rank"}) {
                        const auto& xs = std::string(key) == "peer" ? row.peer : std::string(key) == "rank" ? row.rank : row.robust_rank;
                        nlohmann::json arr = nlohmann::json::array();
                        for (const auto& x : xs) arr.push_back(to_string(x));
                        r[key] = arr;
                    }
                    exact(r, "delta", row.delta);
                    rows.push_back(r);
                }
                const InformationalSize size = informational_size_profile(env);
                nlohmann::json doc{{"rows", rows}};
                exact(doc, "max_delta", size.max);
                emit(doc);
                return;
            }
            const std::string csv = rank_table_csv(env, table);
            if (!c_.float_column) {
                buffer_ << csv;
                return;
            }
            std::istringstream lines(csv);
            std::string line;
            std::getline(lines, line);
            buffer_ << line << ",peer_value_float,rank_float,robust_rank_float,delta_float\n";
            for (const auto& row : table.rows)
                for (std::size_t i = 0; i < env.agents(); ++i) {
                    std::getline(lines, line);
                    buffer_ << line << ',' << decimal(row.peer[i]) << ',' << decimal(row.rank[i]) << ','
                            << decimal(row.robust_rank[i]) << ',' << decimal(row.delta) << '\n';
                }
        };
    });

    // graph
    std::vector<std::size_t> shape;
    std::size_t max_len = 7, hole_guard = 5000;
    bool first_only = false;
    std::string mech_path;
    auto* graph = app.add_subcommand("graph", "feasibility-graph utilities");
    graph->require_subcommand(1);
    const auto graph_types = [&]() -> TypeSpaces {
        if (!shape.empty()) return shape_types(shape);
        if (c_.env_path.empty()) throw InputError("give --env or --shape");
        return load_instance(c_.env_path).types;
    };
    auto* holes = graph->add_subcommand("holes", "list odd holes");
    add_common(holes, false, false);
    holes->add_option("--shape", shape, "type-space sizes instead of --env")->delimiter(',');
    holes->add_option("--max-len", max_len, "longest hole length searched");
    holes->add_flag("--first", first_only, "stop at the first hole");
    holes->add_option("--guard", hole_guard, "vertex guard");
    holes->callback([&] {
        action = [&] {
            const FeasibilityGraph g(graph_types(), true);
            HoleSearchOptions o;
            o.max_len = max_len;
            o.first_only = first_only;
            o.vertex_guard = hole_guard;
            const auto found = find_odd_holes(g, {}, o);
            if (c_.format == "text") {
                for (const auto& h : found) {
                    for (std::size_t k = 0; k < h.size(); ++k) buffer_ << (k ? " " : "") << g.name(h[k]);
                    buffer_ << '\n';
                }
                return;
            }
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& h : found) {
                nlohmann::json names = nlohmann::json::array();
                for (auto v : h) names.push_back(g.name(v));
                arr.push_back(names);
            }
            emit({{"max_len", max_len}, {"count", found.size()}, {"holes", arr}});
        };
    });
    auto* exp = graph->add_subcommand("export", "feasibility graph as JSON adjacency or DOT");
    add_common(exp, false, false);
    exp->add_option("--shape", shape, "type-space sizes instead of --env")->delimiter(',');
    exp->callback([&] {
        action = [&] {
            const FeasibilityGraph g(graph_types(), true);
            if (c_.format == "dot")
                buffer_ << to_dot(g);
            else
                emit(to_json(g));
        };
    });
    auto* comps = graph->add_subcommand("components", "connected components; with --mechanism, of its fractional part");
    add_common(comps, false, false);
    comps->add_option("--shape", shape, "type-space sizes instead of --env")->delimiter(',');
    comps->add_option("--mechanism", mech_path, "mechanism JSON");
    comps->callback([&] {
        action = [&] {
            const FeasibilityGraph g(graph_types(), true);
            if (!mech_path.empty()) {
                const Mechanism m = parse_mechanism(g.types(), read_json(mech_path));
                emit(to_json(g, check_hole_characterization(g, m)));
                return;
            }
            nlohmann::json arr = nlohmann::json::array();
            std::vector<std::size_t> all(g.vertex_count());
            std::iota(all.begin(), all.end(), std::size_t{0});
            for (const auto& comp : components_of(g, all)) {
                nlohmann::json names = nlohmann::json::array();
                for (auto v : comp) names.push_back(g.name(v));
                arr.push_back(names);
            }
            emit({{"components", arr}});
        };
    });

    // extreme
    std::size_t enum_guard = default_enumeration_guard();
    std::vector<std::string> hole_names, stable_names;
    auto* extreme = app.add_subcommand("extreme", "extreme points of the mechanism polytope");
    extreme->require_subcommand(1);
    auto* verify = extreme->add_subcommand("verify", "rank test of a mechanism");
    add_common(verify, false);
    verify->add_option("--shape", shape, "type-space sizes instead of --env")->delimiter(',');
    verify->add_option("--mechanism", mech_path, "mechanism JSON")->required();
    verify->callback([&] {
        action = [&] {
            const FeasibilityGraph g(graph_types(), true);
            const Mechanism m = parse_mechanism(g.types(), read_json(mech_path));
            emit(to_json(g, is_extreme(g, m, mode())));
        };
    });
    auto* enumerate = extreme->add_subcommand("enumerate", "all extreme points");
    add_common(enumerate, false);
    enumerate->add_option("--shape", shape, "type-space sizes instead of --env")->delimiter(',');
    enumerate->add_option("--guard", enum_guard, "variable guard");
    enumerate->callback([&] {
        action = [&] {
            const FeasibilityGraph g(graph_types(), true);
            const auto points = enumerate_extreme_points(g, mode(), enum_guard);
            nlohmann::json arr = nlohmann::json::array();
            std::size_t stochastic = 0;
            for (const auto& m : points) {
                arr.push_back(to_json(g.types(), m));
                if (!m.deterministic()) ++stochastic;
            }
            emit({{"mode", to_string(mode())}, {"count", points.size()}, {"stochastic", stochastic}, {"points", arr}});
        };
    });
    auto* construct = extreme->add_subcommand("construct", "q_{H,S} from an odd hole and a stable set");
    add_common(construct, false, false);
    construct->add_option("--shape", shape, "type-space sizes instead of --env")->delimiter(',');
    construct->add_option("--hole", hole_names, "hole vertices in cyclic order (default: first hole found)");
    construct->add_option("--stable", stable_names, "stable set vertices");
    construct->callback([&] {
        action = [&] {
            const FeasibilityGraph g(graph_types(), true);
            std::vector<std::size_t> hole, stable;
            for (const auto& name : hole_names) hole.push_back(vertex_by_name(g, name));
            for (const auto& name : stable_names) stable.push_back(vertex_by_name(g, name));
            if (hole.empty()) {
                HoleSearchOptions o;
                o.first_only = true;
                const auto found = find_odd_holes(g, {}, o);
                if (found.empty()) throw InputError("the feasibility graph has no odd hole of length <= 7");
                hole = found.front();
            }
            const Mechanism m = construct_hole_mechanism(g, hole, stable);
            nlohmann::json doc{{"mechanism", to_json(g.types(), m)}};
            doc["certificate"] = to_json(g, is_extreme(g, m, AllocationMode::may_withhold));
            emit(doc);
        };
    });

    // reduce
    std::string graph_path;
    std::size_t k_hat = 1;
    bool verify_flag = false;
    auto* red = app.add_subcommand("reduce", "stable-set to deterministic-mechanism reduction");
    red->add_option("--graph", graph_path, "source graph (edge list or JSON)")->required();
    red->add_option("--k", k_hat, "target stable-set size")->required();
    red->add_flag("--verify", verify_flag, "brute-force both sides of the equivalence");
    red->add_option("--out", c_.out_path, "write output to this file instead of stdout");
    red->callback([&] {
        action = [&] {
            const SimpleGraph source = load_graph(graph_path);
            if (verify_flag) {
                const ReductionCheck check = verify_reduction(source, k_hat);
                buffer_ << "k=" << check.k << ", equivalence=" << (check.holds ? "true" : "false") << '\n';
                if (!check.holds) status_ = domain_error;
                return;
            }
            const ReductionInstance r = reduce(source, k_hat);
            nlohmann::json doc = to_json(r.instance);
            doc["k"] = r.k;
            emit(doc);
        };
    });

    // gen
    std::size_t ell = 1, n_agents = 3;
    std::string topology = "ring", adjacency_path, levels_text = "-1,1", noise_text = "1/4", structure_path,
                alphabet_text = "0,1";
    std::uint64_t seed = 0;
    bool own = false, replicate = false;
    auto* gen = app.add_subcommand("gen", "environment generators");
    gen->require_subcommand(1);
    const auto add_out = [&](CLI::App* sub) {
        sub->add_option("--out", c_.out_path, "write output to this file instead of stdout");
    };
    auto* group = gen->add_subcommand("group", "independent copies of the three-agent hole environment");
    group->add_option("--ell", ell, "number of groups")->required()->check(CLI::PositiveNumber);
    add_out(group);
    group->callback([&] { action = [&] { emit(to_json(gen_group_env(ell))); }; });
    auto* net = gen->add_subcommand("network", "signals along a social network");
    net->add_option("--topology", topology, "ring | star | empty")->check(CLI::IsMember({"ring", "star", "empty"}));
    net->add_option("--adjacency", adjacency_path, "JSON neighbor lists (1-based), overrides --topology");
    net->add_option("--n", n_agents, "number of agents");
    net->add_option("--levels", levels_text, "comma-separated value levels");
    net->add_option("--noise", noise_text, "mislabeling probability");
    net->add_flag("--own,!--no-own", own, "types also carry the agent's own value");
    net->add_option("--seed", seed, "random seed")->required();
    add_out(net);
    net->callback([&] {
        action = [&] {
            std::vector<std::vector<std::size_t>> nbrs;
            if (!adjacency_path.empty()) {
                const auto doc = read_json(adjacency_path);
                try {
                    for (const auto& row : doc) {
                        nbrs.emplace_back();
                        for (const auto& j : row) {
                            const long long k = j.get<long long>();
                            if (k < 1) throw InputError("neighbor indices are 1-based");
                            nbrs.back().push_back(static_cast<std::size_t>(k - 1));
                        }
                    }
                } catch (const nlohmann::json::exception& e) {
                    throw InputError(std::string("malformed adjacency: ") + e.what());
                }
            } else if (topology == "ring") {
                nbrs = ring_network(n_agents);
            } else if (topology == "star") {
                nbrs = star_network(n_agents);
            } else {
                nbrs.assign(n_agents, {});
            }
            NetworkOptions o;
            o.observe_own = own;
            emit(to_json(gen_network_env(nbrs, parse_list(levels_text), parse_number(noise_text), seed, o)));
        };
    });
    auto* ci = gen->add_subcommand("ci", "conditionally independent signal structure");
    ci->add_option("--structure", structure_path, "information structure JSON")->required();
    ci->add_option("--n", n_agents, "number of agents");
    ci->add_flag("--replicate", replicate, "check the jury replication of the n-agent benchmark");
    add_out(ci);
    ci->callback([&] {
        action = [&] {
            const InfoStructure s = parse_info_structure(read_json(structure_path));
            if (!replicate) {
                emit(to_json(gen_ci_env(s, n_agents)));
                return;
            }
            const ReplicationReport r = jury_replication_check(s, n_agents);
            nlohmann::json doc{{"case", r.kind}, {"n", r.n}, {"equal", r.equal}};
            exact(doc, "target", r.target);
            exact(doc, "jury", r.jury);
            emit(doc);
            if (!r.equal) status_ = domain_error;
        };
    });
    auto* sym = gen->add_subcommand("symmetric", "symmetrized random environment");
    sym->add_option("--n", n_agents, "number of agents");
    sym->add_option("--alphabet", alphabet_text, "comma-separated type labels");
    sym->add_option("--seed", seed, "random seed")->required();
    add_out(sym);
    sym->callback([&] {
        action = [&] {
            std::vector<Label> alphabet;
            std::stringstream in(alphabet_text);
            for (std::string item; std::getline(in, item, ',');) alphabet.push_back(item);
            emit(to_json(gen_symmetric_env(n_agents, alphabet, seed).env));
        };
    });

    // simulate
    std::string config_path;
    std::size_t jobs = 1;
    auto* sim = app.add_subcommand("simulate", "scaling experiment over an n-grid and p-grid (CSV)");
    sim->add_option("--config", config_path, "experiment config JSON")->required();
    sim->add_option("--seed", seed, "master seed")->required();
    sim->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    sim->add_option("--out", c_.out_path, "CSV path (default: config output, else stdout)");
    sim->callback([&] {
        action = [&] {
            ExperimentConfig config = parse_experiment_config(read_json(config_path));
            config.seed = seed;
            config.jobs = jobs;
            if (c_.out_path.empty()) c_.out_path = config.output;
            buffer_ << experiment_csv(run_scaling_experiment(config));
        };
    });

    // bound
    std::string p_grid_text;
    auto* bound = app.add_subcommand("bound", "upper bound, ranking utility and its analytic lower bound");
    add_common(bound, true, false);
    bound->add_option("--p", p_grid_text, "comma-separated thresholds");
    bound->callback([&] {
        action = [&] {
            const Instance inst = load_instance(c_.env_path);
            const Environment& env = require_env(inst);
            const auto grid = p_grid_text.empty() ? std::vector<Rational>{} : parse_list(p_grid_text);
            for (const auto& p : grid)
                if (p <= 0 || p >= 1) throw InputError("p must lie in (0, 1)");
            const InformationalSize size = informational_size_profile(env);
            nlohmann::json doc;
            exact(doc, "upper_bound_may_withhold", upper_bound(env, AllocationMode::may_withhold));
            exact(doc, "upper_bound_must_allocate", upper_bound(env, AllocationMode::must_allocate));
            exact(doc, "max_delta", size.max);
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& p : grid) {
                nlohmann::json row;
                exact(row, "p", p);
                exact(row, "ranking_utility", utility(env, ranking_mechanism(env, p)));
                exact(row, "analytic_lb", ranking_lower_bound(env, p));
                rows.push_back(row);
            }
            doc["rows"] = rows;
            if (c_.format == "csv") {
                buffer_ << "p,ranking_utility,analytic_lb,upper_bound,max_delta\n";
                for (const auto& row : rows)
                    buffer_ << row["p"].get<std::string>() << ',' << row["ranking_utility"].get<std::string>() << ','
                            << row["analytic_lb"].get<std::string>() << ','
                            << doc["upper_bound_may_withhold"].get<std::string>() << ','
                            << doc["max_delta"].get<std::string>() << '\n';
                return;
            }
            emit(doc);
        };
    });

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out_, err_);
        return code == 0 ? ok : usage_error;
    }
    try {
        action();
        if (c_.out_path.empty()) {
            out_ << buffer_.str();
        } else {
            std::ofstream file(c_.out_path);
            if (!file) throw InputError("cannot write " + c_.out_path);
            file << buffer_.str();
        }
        return status_;
    } catch (const GuardExceeded& e) {
        err_ << "guard exceeded: " << e.what() << '\n';
        return guard_exceeded;
    } catch (const InputError& e) {
        err_ << "error: " << e.what() << '\n';
        return domain_error;
    } catch (const std::invalid_argument& e) {
        err_ << "error: " << e.what() << '\n';
        return domain_error;
    } catch (const std::exception& e) {
        err_ << "internal error: " << e.what() << '\n';
        return domain_error;
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    return Runner(out, err)(args);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
    return run(args, out, err);
}

}  // namespace peermech::cli
