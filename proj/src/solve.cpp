#include "peermech/solve.hpp"

#include <boost/dynamic_bitset.hpp>

#include <chrono>
#include <functional>
#include <numeric>
#include <set>

namespace peermech {

std::string to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::guard_exceeded: return "guard-exceeded";
    }
    return "unknown";
}

namespace {

using Bits = boost::dynamic_bitset<>;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_shape(const FeasibilityGraph& g, const WeightVector& w) {
    if (static_cast<std::size_t>(w.values.size()) != g.vertex_count())
        throw InputError("weight vector does not match the feasibility graph");
}

struct LpModel {
    std::vector<std::size_t> vars;  // graph vertex per LP column
    Matrix<Rational> A;
    Vector<Rational> b;
    Vector<Rational> c;
    std::vector<RowSense> senses;
};

LpModel build_model(const FeasibilityGraph& g, const WeightVector& w, AllocationMode mode, bool presolve) {
    const auto& types = g.types();
    LpModel model;
    std::vector<long> column(g.vertex_count(), -1);
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        if (presolve && mode == AllocationMode::may_withhold && !(w[v] > 0)) continue;
        column[v] = static_cast<long>(model.vars.size());
        model.vars.push_back(v);
    }
    std::set<std::vector<std::size_t>> rows;
    for (std::uint64_t code = 0; code < types.profile_count(); ++code) {
        std::vector<std::size_t> row;
        for (std::size_t v : g.clique(types.decode(code)))
            if (column[v] >= 0) row.push_back(static_cast<std::size_t>(column[v]));
        if (row.empty()) continue;
        std::sort(row.begin(), row.end());
        rows.insert(std::move(row));
    }
    const Index m = static_cast<Index>(rows.size()), n = static_cast<Index>(model.vars.size());
    model.A = Matrix<Rational>::Zero(m, n);
    model.b = Vector<Rational>::Constant(m, Rational(1));
    model.c = Vector<Rational>(n);
    for (Index j = 0; j < n; ++j) model.c(j) = w[model.vars[static_cast<std::size_t>(j)]];
    Index r = 0;
    for (const auto& row : rows) {
        for (std::size_t j : row) model.A(r, static_cast<Index>(j)) = 1;
        ++r;
    }
    model.senses.assign(static_cast<std::size_t>(m),
                        mode == AllocationMode::must_allocate ? RowSense::equal : RowSense::less_equal);
    return model;
}

// Every coordinate is fixed on the optimal face {feasible, w.q = opt}.
bool unique_optimum(const FeasibilityGraph& g, const WeightVector& w, AllocationMode mode, const Rational& opt,
                    const SimplexOptions& simplex, std::size_t& pivots) {
    LpModel model = build_model(g, w, mode, false);
    const Index m = model.A.rows(), n = model.A.cols();
    Matrix<Rational> A(m + 1, n);
    A.topRows(m) = model.A;
    A.row(m) = model.c.transpose();
    Vector<Rational> b(m + 1);
    b.head(m) = model.b;
    b(m) = opt;
    auto senses = model.senses;
    senses.push_back(RowSense::equal);
    for (Index j = 0; j < n; ++j) {
        Vector<Rational> c = Vector<Rational>::Zero(n);
        c(j) = 1;
        const auto hi = maximize(A, b, c, senses, simplex);
        c(j) = -1;
        const auto lo = maximize(A, b, c, senses, simplex);
        pivots += hi.pivots + lo.pivots;
        if (hi.status != LpStatus::optimal || lo.status != LpStatus::optimal)
            throw std::runtime_error("face re-solve failed");
        if (hi.objective != -lo.objective) return false;
    }
    return true;
}

}  // namespace

SolveReport solve_lp(const FeasibilityGraph& g, const WeightVector& w, const LpOptions& options) {
    check_shape(g, w);
    const auto start = Clock::now();
    SolveReport report;
    report.mechanism = zero_mechanism(g.types(), options.mode);
    report.objective = 0;
    if (g.vertex_count() > options.variable_guard) {
        report.status = SolveStatus::guard_exceeded;
        report.note = std::to_string(g.vertex_count()) + " LP variables exceed the guard of " +
                      std::to_string(options.variable_guard);
        return report;
    }
    const LpModel model = build_model(g, w, options.mode, options.presolve);
    report.stats.variables = model.vars.size();
    report.stats.rows = static_cast<std::size_t>(model.A.rows());
    if (!model.vars.empty()) {
        const auto sol = maximize(model.A, model.b, model.c, model.senses, options.simplex);
        report.stats.pivots = sol.pivots;
        if (sol.status == LpStatus::infeasible) {
            report.status = SolveStatus::infeasible;
            return report;
        }
        if (sol.status != LpStatus::optimal) {
            report.status = SolveStatus::guard_exceeded;
            report.note = sol.status == LpStatus::pivot_limit ? "pivot limit reached" : "LP reported unbounded";
            return report;
        }
        for (std::size_t j = 0; j < model.vars.size(); ++j)
            report.mechanism.q(static_cast<Index>(model.vars[j])) = sol.x(static_cast<Index>(j));
        report.objective = sol.objective;
    }
    if (options.check_unique)
        report.unique = unique_optimum(g, w, options.mode, report.objective, options.simplex, report.stats.pivots);
    if (options.timing) report.stats.wall_seconds = seconds_since(start);
    return report;
}

SolveReport solve_lp(const Environment& env, const LpOptions& options) {
    const FeasibilityGraph g(env.types);
    SolveReport report = solve_lp(g, weights(env), options);
    if (report.status == SolveStatus::optimal && utility(env, report.mechanism) != report.objective)
        throw std::logic_error("LP objective differs from mechanism utility");
    return report;
}

// ---------------------------------------------------------------------------
// Branch and bound

namespace {

struct NodeLimit {};

class WithholdSearch {
public:
    WithholdSearch(const FeasibilityGraph& g, const WeightVector& w, const BranchOptions& options)
        : g_(g), options_(options) {
        for (std::size_t v = 0; v < g.vertex_count(); ++v)
            if (w[v] > 0) order_.push_back(v);
        std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
        const std::size_t m = order_.size();
        weight_.reserve(m);
        for (std::size_t v : order_) weight_.push_back(w[v]);
        conflict_.assign(m, Bits(m));
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = a + 1; b < m; ++b)
                if (g.adjacent(order_[a], order_[b])) conflict_[a].set(b), conflict_[b].set(a);
        if (options.lp_bound_after > 0) {
            std::vector<long> pos(g.vertex_count(), -1);
            for (std::size_t k = 0; k < m; ++k) pos[order_[k]] = static_cast<long>(k);
            std::set<std::vector<std::size_t>> seen;
            const auto& types = g.types();
            for (std::uint64_t code = 0; code < types.profile_count(); ++code) {
                std::vector<std::size_t> members;
                for (std::size_t v : g.clique(types.decode(code)))
                    if (pos[v] >= 0) members.push_back(static_cast<std::size_t>(pos[v]));
                if (members.size() < 2) continue;
                std::sort(members.begin(), members.end());
                if (!seen.insert(members).second) continue;
                Bits bits(m);
                for (std::size_t k : members) bits.set(k);
                cliques_.push_back(bits);
            }
        }
    }

    void run() {
        Bits avail(order_.size());
        avail.set();
        best_value_ = 0;
        try {
            branch(avail, Rational(0));
        } catch (const NodeLimit&) {
            limited_ = true;
        }
    }

    bool limited() const { return limited_; }
    std::size_t nodes() const { return nodes_; }
    const Rational& best_value() const { return best_value_; }
    std::vector<std::size_t> best_set() const {
        std::vector<std::size_t> out;
        for (std::size_t k : best_) out.push_back(order_[k]);
        return out;
    }

private:
    void branch(Bits& avail, const Rational& value) {
        if (++nodes_ > options_.node_guard) throw NodeLimit{};
        if (avail.none()) {
            if (value > best_value_) {
                best_value_ = value;
                best_ = chosen_;
            }
            return;
        }
        Rational bound = value;
        for (auto k = avail.find_first(); k != Bits::npos; k = avail.find_next(k)) bound += weight_[k];
        if (bound <= best_value_) return;
        if (options_.lp_bound_after > 0 && nodes_ > options_.lp_bound_after && lp_bound(avail) + value <= best_value_)
            return;
        const std::size_t v = avail.find_first();
        Bits include = avail - conflict_[v];
        include.reset(v);
        chosen_.push_back(v);
        branch(include, value + weight_[v]);
        chosen_.pop_back();
        Bits exclude = avail;
        exclude.reset(v);
        branch(exclude, value);
    }

    Rational lp_bound(const Bits& avail) const {
        std::vector<std::size_t> cols;
        std::vector<long> col_of(order_.size(), -1);
        for (auto k = avail.find_first(); k != Bits::npos; k = avail.find_next(k)) {
            col_of[k] = static_cast<long>(cols.size());
            cols.push_back(k);
        }
        std::set<std::vector<std::size_t>> rows;
        for (const Bits& clique : cliques_) {
            const Bits part = clique & avail;
            if (part.count() < 2) continue;
            std::vector<std::size_t> row;
            for (auto k = part.find_first(); k != Bits::npos; k = part.find_next(k))
                row.push_back(static_cast<std::size_t>(col_of[k]));
            rows.insert(std::move(row));
        }
        const Index n = static_cast<Index>(cols.size());
        const Index m = static_cast<Index>(rows.size()) + n;
        Matrix<Rational> A = Matrix<Rational>::Zero(m, n);
        Vector<Rational> b = Vector<Rational>::Constant(m, Rational(1));
        Vector<Rational> c(n);
        for (Index j = 0; j < n; ++j) {
            c(j) = weight_[cols[static_cast<std::size_t>(j)]];
            A(j, j) = 1;
        }
        Index r = n;
        for (const auto& row : rows) {
            for (std::size_t j : row) A(r, static_cast<Index>(j)) = 1;
            ++r;
        }
        const auto sol = maximize(A, b, c, std::vector<RowSense>(static_cast<std::size_t>(m), RowSense::less_equal));
        if (sol.status != LpStatus::optimal) return c.sum();
        return sol.objective;
    }

    const FeasibilityGraph& g_;
    BranchOptions options_;
    std::vector<std::size_t> order_;
    std::vector<Rational> weight_;
    std::vector<Bits> conflict_;
    std::vector<Bits> cliques_;
    std::vector<std::size_t> chosen_, best_;
    Rational best_value_;
    std::size_t nodes_ = 0;
    bool limited_ = false;
};

class AllocateSearch {
public:
    AllocateSearch(const FeasibilityGraph& g, const WeightVector& w, const BranchOptions& options)
        : g_(g), w_(w), options_(options) {
        const std::size_t nv = g.vertex_count();
        const auto& types = g.types();
        const std::size_t np = static_cast<std::size_t>(types.profile_count());
        members_.resize(np);
        in_clique_.assign(nv, {});
        for (std::size_t p = 0; p < np; ++p) {
            members_[p] = g.clique(types.decode(p));
            for (std::size_t v : members_[p]) in_clique_[v].push_back(p);
        }
        conflict_.assign(nv, Bits(nv));
        for (std::size_t v = 0; v < nv; ++v)
            for (std::size_t u : g.neighbors(v)) conflict_[v].set(u);
    }

    void run() {
        Bits avail(g_.vertex_count());
        avail.set();
        Bits covered(members_.size());
        try {
            branch(avail, covered, Rational(0));
        } catch (const NodeLimit&) {
            limited_ = true;
        }
    }

    bool limited() const { return limited_; }
    bool found() const { return found_; }
    std::size_t nodes() const { return nodes_; }
    const Rational& best_value() const { return best_value_; }
    const std::vector<std::size_t>& best_set() const { return best_; }

private:
    void branch(const Bits& avail, const Bits& covered, const Rational& value) {
        if (++nodes_ > options_.node_guard) throw NodeLimit{};
        if (covered.all()) {
            if (!found_ || value > best_value_) {
                found_ = true;
                best_value_ = value;
                best_ = chosen_;
            }
            return;
        }
        if (found_) {
            Rational bound = value;
            for (auto v = avail.find_first(); v != Bits::npos; v = avail.find_next(v))
                if (w_[v] > 0) bound += w_[v];
            if (bound <= best_value_) return;
        }
        std::size_t pick = members_.size(), fewest = std::numeric_limits<std::size_t>::max();
        for (std::size_t p = 0; p < members_.size(); ++p) {
            if (covered.test(p)) continue;
            std::size_t count = 0;
            for (std::size_t v : members_[p]) count += avail.test(v);
            if (count == 0) return;
            if (count < fewest) fewest = count, pick = p;
        }
        std::vector<std::size_t> options;
        for (std::size_t v : members_[pick])
            if (avail.test(v)) options.push_back(v);
        std::stable_sort(options.begin(), options.end(), [&](std::size_t a, std::size_t b) { return w_[a] > w_[b]; });
        for (std::size_t v : options) {
            Bits next = avail - conflict_[v];
            next.reset(v);
            Bits cov = covered;
            for (std::size_t p : in_clique_[v]) cov.set(p);
            chosen_.push_back(v);
            branch(next, cov, value + w_[v]);
            chosen_.pop_back();
        }
    }

    const FeasibilityGraph& g_;
    const WeightVector& w_;
    BranchOptions options_;
    std::vector<std::vector<std::size_t>> members_;
    std::vector<std::vector<std::size_t>> in_clique_;
    std::vector<Bits> conflict_;
    std::vector<std::size_t> chosen_, best_;
    Rational best_value_;
    bool found_ = false;
    std::size_t nodes_ = 0;
    bool limited_ = false;
};

}  // namespace

SolveReport solve_deterministic(const FeasibilityGraph& g, const WeightVector& w, const BranchOptions& options) {
    check_shape(g, w);
    const auto start = Clock::now();
    SolveReport report;
    report.mechanism = zero_mechanism(g.types(), options.mode);
    report.objective = 0;
    report.stats.variables = g.vertex_count();
    std::vector<std::size_t> chosen;
    if (options.mode == AllocationMode::may_withhold) {
        WithholdSearch search(g, w, options);
        search.run();
        report.stats.nodes = search.nodes();
        if (search.limited()) {
            report.status = SolveStatus::guard_exceeded;
            report.note = "node guard of " + std::to_string(options.node_guard) + " reached";
            return report;
        }
        chosen = search.best_set();
    } else {
        AllocateSearch search(g, w, options);
        search.run();
        report.stats.nodes = search.nodes();
        if (search.limited()) {
            report.status = SolveStatus::guard_exceeded;
            report.note = "node guard of " + std::to_string(options.node_guard) + " reached";
            return report;
        }
        if (!search.found()) {
            report.status = SolveStatus::infeasible;
            return report;
        }
        chosen = search.best_set();
    }
    for (std::size_t v : chosen) report.mechanism.q(static_cast<Index>(v)) = 1;
    report.objective = utility(w, report.mechanism);
    if (options.timing) report.stats.wall_seconds = seconds_since(start);
    return report;
}

SolveReport solve_deterministic(const Environment& env, const BranchOptions& options) {
    const FeasibilityGraph g(env.types);
    SolveReport report = solve_deterministic(g, weights(env), options);
    if (report.status == SolveStatus::optimal && utility(env, report.mechanism) != report.objective)
        throw std::logic_error("branch-and-bound objective differs from mechanism utility");
    return report;
}

// ---------------------------------------------------------------------------
// Juries and bounds

SolveReport solve_jury(const Environment& env, const JuryOptions& options) {
    const std::size_t n = env.agents();
    SolveReport report;
    if (!options.single_juror_only && n > options.max_agents) {
        report.status = SolveStatus::guard_exceeded;
        report.mechanism = zero_mechanism(env.types, options.mode);
        report.note = "2^" + std::to_string(n) + " juror sets exceed the guard of n <= " +
                      std::to_string(options.max_agents);
        return report;
    }
    std::vector<std::vector<std::size_t>> candidates;
    if (options.single_juror_only) {
        candidates.push_back({});
        for (std::size_t j = 0; j < n; ++j) candidates.push_back({j});
    } else {
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
            std::vector<std::size_t> jurors;
            for (std::size_t j = 0; j < n; ++j)
                if (mask >> j & 1) jurors.push_back(j);
            candidates.push_back(std::move(jurors));
        }
    }
    std::optional<Rational> best;
    std::vector<std::size_t> best_jurors;
    for (const auto& jurors : candidates) {
        if (options.mode == AllocationMode::must_allocate && jurors.size() == n) continue;
        const Rational value = jury_utility(env, jurors, options.mode);
        ++report.stats.nodes;
        if (!best || value > *best) {
            best = value;
            best_jurors = jurors;
        }
    }
    report.mechanism = jury_mechanism_for(env, best_jurors, options.mode);
    report.objective = *best;
    if (utility(env, report.mechanism) != report.objective)
        throw std::logic_error("jury objective differs from mechanism utility");
    report.jurors = best_jurors;
    if (options.single_juror_only) report.note = "restricted to at most one juror";
    return report;
}

Rational upper_bound(const Environment& env, AllocationMode mode) {
    const PeerTable pt = peer_table(env);
    Rational acc = 0;
    for (const auto& entry : env.support) {
        std::optional<Rational> top;
        for (std::size_t i = 0; i < env.agents(); ++i) {
            const Rational& u = pt.value(static_cast<Index>(env.types.vertex(i, entry.theta)));
            if (!top || u > *top) top = u;
        }
        Rational best = *top;
        if (mode == AllocationMode::may_withhold && best < 0) best = 0;
        acc += entry.prob * best;
    }
    return acc;
}

std::vector<GapRow> optimality_gap_report(const Environment& env, std::span<const Rational> p_grid,
                                          const GapOptions& options) {
    LpOptions lp_options;
    lp_options.variable_guard = options.lp_variable_guard;
    const SolveReport lp = solve_lp(env, lp_options);
    JuryOptions jury_options;
    jury_options.max_agents = options.jury_max_agents;
    jury_options.single_juror_only = env.agents() > options.jury_max_agents;
    const SolveReport jury = solve_jury(env, jury_options);
    const Rational upper = upper_bound(env, AllocationMode::may_withhold);
    std::vector<GapRow> rows;
    for (const Rational& p : p_grid) {
        GapRow row;
        row.p = p;
        row.ranking = utility(env, ranking_mechanism(env, p));
        if (lp.status == SolveStatus::optimal) row.lp = lp.objective;
        row.jury = jury.objective;
        row.jury_is_bound = jury_options.single_juror_only;
        row.upper = upper;
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json to_json(const TypeSpaces& types, const SolveReport& report) {
    nlohmann::json doc;
    doc["status"] = to_string(report.status);
    doc["objective"] = to_string(report.objective);
    doc["mechanism"] = to_json(types, report.mechanism);
    nlohmann::json stats;
    stats["pivots"] = report.stats.pivots;
    stats["nodes"] = report.stats.nodes;
    stats["variables"] = report.stats.variables;
    stats["rows"] = report.stats.rows;
    if (report.stats.wall_seconds) stats["wall_seconds"] = *report.stats.wall_seconds;
    doc["stats"] = stats;
    if (report.unique) doc["unique"] = *report.unique;
    if (report.jurors) {
        nlohmann::json jurors = nlohmann::json::array();
        for (std::size_t j : *report.jurors) jurors.push_back(j + 1);
        doc["jurors"] = jurors;
    }
    if (!report.note.empty()) doc["note"] = report.note;
    return doc;
}

}  // namespace peermech
