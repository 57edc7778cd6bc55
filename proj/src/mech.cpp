#include "peermech/mech.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace peermech {

bool Mechanism::deterministic() const {
    for (Index v = 0; v < q.size(); ++v)
        if (q(v) != 0 && q(v) != 1) return false;
    return true;
}

Mechanism zero_mechanism(const TypeSpaces& types, AllocationMode mode) {
    return Mechanism{mode, Vector<Rational>::Zero(static_cast<Index>(types.vertex_count()))};
}

FeasibilityReport check_feasible(const FeasibilityGraph& g, const Mechanism& m) {
    FeasibilityReport out;
    if (static_cast<std::size_t>(m.q.size()) != g.vertex_count()) {
        out.feasible = false;
        out.reason = "mechanism has " + std::to_string(m.q.size()) + " entries, graph has " +
                     std::to_string(g.vertex_count()) + " vertices";
        return out;
    }
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        if (m[v] < 0 || m[v] > 1) {
            out.feasible = false;
            out.reason = "q(" + g.name(v) + ") = " + to_string(m[v]) + " outside [0, 1]";
            return out;
        }
    }
    const auto& types = g.types();
    for (std::uint64_t code = 0; code < types.profile_count(); ++code) {
        const Profile theta = types.decode(code);
        Rational sum = 0;
        for (std::size_t v : g.clique(theta)) sum += m[v];
        const bool ok = m.mode == AllocationMode::must_allocate ? sum == 1 : sum <= 1;
        if (!ok) {
            out.feasible = false;
            out.clique = theta;
            out.clique_sum = sum;
            out.reason = "clique sum " + to_string(sum) +
                         (m.mode == AllocationMode::must_allocate ? " != 1" : " > 1");
            return out;
        }
    }
    return out;
}

Rational utility(const WeightVector& w, const Mechanism& m) {
    if (w.values.size() != m.q.size()) throw InputError("mechanism and weights differ in shape");
    Rational acc = 0;
    for (Index v = 0; v < m.q.size(); ++v)
        if (m.q(v) != 0 && w.values(v) != 0) acc += w.values(v) * m.q(v);
    return acc;
}

Rational utility_by_profiles(const Environment& env, const Mechanism& m) {
    if (static_cast<std::size_t>(m.q.size()) != env.types.vertex_count())
        throw InputError("mechanism and environment differ in shape");
    const PeerTable pt = peer_table(env);
    Rational acc = 0;
    for (const auto& entry : env.support)
        for (std::size_t i = 0; i < env.agents(); ++i) {
            const std::size_t v = env.types.vertex(i, entry.theta);
            if (m[v] != 0) acc += entry.prob * m[v] * pt.value(static_cast<Index>(v));
        }
    return acc;
}

Rational utility(const Environment& env, const Mechanism& m) {
    const Rational a = utility(weights(env), m);
    const Rational b = utility_by_profiles(env, m);
    if (a != b) throw std::logic_error("utility routes disagree: " + to_string(a) + " vs " + to_string(b));
    return a;
}

// ---------------------------------------------------------------------------
// Ranks

std::vector<Rational> ranks(std::span<const Rational> peer_values) {
    const std::size_t n = peer_values.size();
    std::vector<Rational> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t count = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (peer_values[j] > peer_values[i] || (peer_values[j] == peer_values[i] && j <= i)) ++count;
        out[i] = Rational(static_cast<long>(count), static_cast<long>(n));
    }
    return out;
}

namespace {

// Peer values replaced by their order among distinct values, so ranks are
// integer comparisons.
class RankContext {
public:
    explicit RankContext(const Environment& env) : env_(env), table_(peer_table(env)) {
        std::vector<Rational> distinct(table_.value.data(), table_.value.data() + table_.value.size());
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        key_.resize(static_cast<std::size_t>(table_.value.size()));
        for (Index v = 0; v < table_.value.size(); ++v)
            key_[static_cast<std::size_t>(v)] =
                std::lower_bound(distinct.begin(), distinct.end(), table_.value(v)) - distinct.begin();
    }

    const PeerTable& table() const { return table_; }

    // Rank numerator of agent i at theta.
    std::size_t rank(std::size_t i, std::span<const int> theta) const {
        const std::size_t n = env_.agents();
        const long ki = key_[env_.types.vertex(i, theta)];
        std::size_t count = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const long kj = key_[env_.types.vertex(j, theta)];
            if (kj > ki || (kj == ki && j <= i)) ++count;
        }
        return count;
    }

    std::size_t robust_rank(std::size_t i, Profile theta) const {
        std::size_t best = 0;
        for (std::size_t t = 0; t < env_.types.size(i); ++t) {
            theta[i] = static_cast<int>(t);
            best = std::max(best, rank(i, theta));
        }
        return best;
    }

    // Largest swing in i's own rank over i's reports, times n.
    std::size_t swing(std::size_t i, Profile theta) const {
        const std::size_t base = rank(i, theta);
        std::size_t best = 0;
        for (std::size_t t = 0; t < env_.types.size(i); ++t) {
            theta[i] = static_cast<int>(t);
            const std::size_t r = rank(i, theta);
            best = std::max(best, r > base ? r - base : base - r);
        }
        return best;
    }

private:
    const Environment& env_;
    PeerTable table_;
    std::vector<long> key_;
};

Rational frac(std::size_t k, std::size_t n) { return Rational(static_cast<long>(k), static_cast<long>(n)); }

}  // namespace

RankTable rank_table(const Environment& env) {
    const RankContext ctx(env);
    const std::size_t n = env.agents();
    RankTable out;
    for (const auto& entry : env.support) {
        RankRow row;
        row.theta = entry.theta;
        row.prob = entry.prob;
        std::size_t delta = 0;
        for (std::size_t i = 0; i < n; ++i) {
            row.peer.push_back(ctx.table().value(static_cast<Index>(env.types.vertex(i, entry.theta))));
            row.rank.push_back(frac(ctx.rank(i, entry.theta), n));
            row.robust_rank.push_back(frac(ctx.robust_rank(i, entry.theta), n));
            delta = std::max(delta, ctx.swing(i, entry.theta));
        }
        row.delta = frac(delta, n);
        out.rows.push_back(std::move(row));
    }
    return out;
}

std::string rank_table_csv(const Environment& env, const RankTable& table) {
    std::ostringstream out;
    out << "theta,agent,peer_value,rank,robust_rank,delta\n";
    for (const auto& row : table.rows) {
        std::string theta = "(";
        for (std::size_t k = 0; k < row.theta.size(); ++k)
            theta += (k ? " " : "") + env.types.label(k, row.theta[k]);
        theta += ")";
        for (std::size_t i = 0; i < row.peer.size(); ++i)
            out << theta << ',' << i + 1 << ',' << to_string(row.peer[i]) << ',' << to_string(row.rank[i]) << ','
                << to_string(row.robust_rank[i]) << ',' << to_string(row.delta) << '\n';
    }
    return out.str();
}

InformationalSize informational_size_profile(const Environment& env) {
    const RankContext ctx(env);
    const std::size_t n = env.agents();
    InformationalSize out;
    out.max = 0;
    std::map<Rational, Rational> mass;
    for (const auto& entry : env.support) {
        std::size_t delta = 0;
        for (std::size_t i = 0; i < n; ++i) delta = std::max(delta, ctx.swing(i, entry.theta));
        const Rational d = frac(delta, n);
        out.delta.emplace_back(entry.theta, d);
        out.max = std::max(out.max, d);
        mass[d] += entry.prob;
    }
    Rational below = 0;
    for (const auto& [d, m] : mass) {
        below += m;
        out.distribution.emplace_back(d, below, Rational(1 - below));
    }
    return out;
}

Mechanism ranking_mechanism(const Environment& env, const Rational& p) {
    if (p <= 0 || p >= 1) throw std::invalid_argument("threshold p must lie in (0, 1)");
    const RankContext ctx(env);
    const std::size_t n = env.agents();
    const auto& types = env.types;
    Mechanism m = zero_mechanism(types, AllocationMode::may_withhold);
    const Rational share = Rational(1) / (p * static_cast<long>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::uint64_t code = 0; code < types.partial_count(i); ++code) {
            const Index v = static_cast<Index>(types.vertex_offset(i) + code);
            if (ctx.table().mass(v) == 0 || ctx.table().value(v) < 0) continue;
            const Profile minus = types.decode_partial(i, code);
            Profile theta(n, 0);
            for (std::size_t k = 0, pos = 0; k < n; ++k)
                if (k != i) theta[k] = minus[pos++];
            if (frac(ctx.robust_rank(i, theta), n) <= p) m.q(v) = share;
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Juries

namespace {

struct JuryPlan {
    std::vector<std::size_t> jurors;
    std::vector<std::size_t> candidates;
    // theta_J code -> (mass, mass-weighted value per candidate position)
    std::map<std::uint64_t, std::pair<Rational, std::vector<Rational>>> cells;
};

std::uint64_t juror_code(const TypeSpaces& types, const std::vector<std::size_t>& jurors,
                         const auto& type_of) {
    std::uint64_t code = 0;
    for (std::size_t j : jurors) code = code * types.size(j) + static_cast<std::uint64_t>(type_of(j));
    return code;
}

JuryPlan plan_jury(const Environment& env, std::vector<std::size_t> jurors, AllocationMode mode) {
    const std::size_t n = env.agents();
    std::sort(jurors.begin(), jurors.end());
    jurors.erase(std::unique(jurors.begin(), jurors.end()), jurors.end());
    for (std::size_t j : jurors)
        if (j >= n) throw InputError("juror index out of range: " + std::to_string(j + 1));
    if (mode == AllocationMode::must_allocate && jurors.size() == n)
        throw std::invalid_argument("must-allocate jury needs at least one candidate");
    JuryPlan plan;
    plan.jurors = jurors;
    for (std::size_t c = 0; c < n; ++c)
        if (!std::binary_search(jurors.begin(), jurors.end(), c)) plan.candidates.push_back(c);
    for (const auto& entry : env.support) {
        const std::uint64_t code =
            juror_code(env.types, plan.jurors, [&](std::size_t j) { return entry.theta[j]; });
        auto& cell = plan.cells[code];
        if (cell.second.empty()) cell.second.assign(plan.candidates.size(), Rational(0));
        cell.first += entry.prob;
        for (std::size_t k = 0; k < plan.candidates.size(); ++k)
            cell.second[k] += entry.prob * entry.values[plan.candidates[k]];
    }
    return plan;
}

// Position of the winning candidate in plan.candidates, or -1 to withhold.
long winner(const std::vector<Rational>& acc, AllocationMode mode) {
    if (acc.empty()) return -1;
    std::size_t best = 0;
    for (std::size_t k = 1; k < acc.size(); ++k)
        if (acc[k] > acc[best]) best = k;
    if (mode == AllocationMode::may_withhold && acc[best] < 0) return -1;
    return static_cast<long>(best);
}

}  // namespace

Mechanism jury_mechanism_for(const Environment& env, std::vector<std::size_t> jurors, AllocationMode mode) {
    const JuryPlan plan = plan_jury(env, std::move(jurors), mode);
    const auto& types = env.types;
    Mechanism m = zero_mechanism(types, mode);
    std::map<std::uint64_t, long> decision;
    for (const auto& [code, cell] : plan.cells) decision[code] = winner(cell.second, mode);
    const long off_support = mode == AllocationMode::must_allocate ? 0 : -1;
    const FeasibilityGraph g(types, true);
    for (std::size_t k = 0; k < plan.candidates.size(); ++k) {
        const std::size_t c = plan.candidates[k];
        for (std::uint64_t code = 0; code < types.partial_count(c); ++code) {
            const std::size_t v = types.vertex_offset(c) + static_cast<std::size_t>(code);
            const std::uint64_t jc = juror_code(types, plan.jurors, [&](std::size_t j) { return g.type_at(v, j); });
            auto it = decision.find(jc);
            const long w = it == decision.end() ? off_support : it->second;
            if (w == static_cast<long>(k)) m.q(static_cast<Index>(v)) = 1;
        }
    }
    return m;
}

Rational jury_utility(const Environment& env, std::vector<std::size_t> jurors, AllocationMode mode) {
    const JuryPlan plan = plan_jury(env, std::move(jurors), mode);
    Rational acc = 0;
    for (const auto& [code, cell] : plan.cells) {
        const long w = winner(cell.second, mode);
        if (w >= 0) acc += cell.second[static_cast<std::size_t>(w)];
    }
    return acc;
}

JuryWitness is_jury(const FeasibilityGraph& g, const Mechanism& m) {
    const std::size_t n = g.agents();
    const auto& types = g.types();
    JuryWitness out;
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < n; ++i) {
        bool wins = false;
        for (std::uint64_t code = 0; code < types.partial_count(i) && !wins; ++code)
            wins = m[types.vertex_offset(i) + static_cast<std::size_t>(code)] != 0;
        (wins ? candidates : out.jurors).push_back(i);
    }
    for (std::size_t c : candidates) {
        for (std::size_t v = 0; v < g.vertex_count(); ++v) {
            if (g.agent(v) == c) continue;
            VertexId id = g.id(v);
            const std::size_t pos = c < id.agent ? c : c - 1;
            for (std::size_t t = 0; t < types.size(c); ++t) {
                id.theta_minus[pos] = static_cast<int>(t);
                if (m[g.index(id)] != m[v]) {
                    out.reason = "agent " + std::to_string(c + 1) + " wins somewhere and its report changes q at " +
                                 g.name(v);
                    out.jurors.clear();
                    return out;
                }
            }
        }
    }
    out.is_jury = true;
    return out;
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json to_json(const TypeSpaces& types, const Mechanism& m) {
    nlohmann::json doc;
    doc["mode"] = to_string(m.mode);
    nlohmann::json entries = nlohmann::json::array();
    for (std::size_t v = 0; v < static_cast<std::size_t>(m.q.size()); ++v) {
        if (m[v] == 0) continue;
        const std::size_t agent = types.vertex_agent(v);
        const Profile minus = types.decode_partial(agent, v - types.vertex_offset(agent));
        nlohmann::json labels = nlohmann::json::array();
        for (std::size_t k = 0, pos = 0; k < types.agents(); ++k)
            if (k != agent) labels.push_back(types.label(k, minus[pos++]));
        entries.push_back({{"agent", agent + 1}, {"theta_minus", labels}, {"q", to_string(m[v])}});
    }
    doc["entries"] = entries;
    return doc;
}

Mechanism parse_mechanism(const TypeSpaces& types, const nlohmann::json& doc) {
    try {
        Mechanism m = zero_mechanism(types, parse_mode(doc.at("mode").get<std::string>()));
        std::vector<bool> seen(types.vertex_count(), false);
        for (const auto& item : doc.at("entries")) {
            const long long agent1 = item.at("agent").get<long long>();
            if (agent1 < 1 || agent1 > static_cast<long long>(types.agents()))
                throw InputError("agent index out of range in mechanism");
            const std::size_t agent = static_cast<std::size_t>(agent1 - 1);
            const auto& labels = item.at("theta_minus");
            if (!labels.is_array() || labels.size() + 1 != types.agents())
                throw InputError("theta_minus has wrong length");
            Profile minus;
            for (std::size_t k = 0, pos = 0; k < types.agents(); ++k)
                if (k != agent) minus.push_back(types.index_of(k, json_label(labels[pos++])));
            const std::size_t v = types.vertex_offset(agent) + static_cast<std::size_t>(types.encode_partial(agent, minus));
            if (seen[v]) throw InputError("duplicate mechanism entry");
            seen[v] = true;
            m.q(static_cast<Index>(v)) = json_rational(item.at("q"));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed mechanism: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
}

}  // namespace peermech
