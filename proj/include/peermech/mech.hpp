#pragma once

#include "peermech/env.hpp"
#include "peermech/fgraph.hpp"

#include <optional>
#include <string>
#include <vector>

namespace peermech {

/// q(v) for every feasibility-graph vertex, indexed like TypeSpaces::vertex.
struct Mechanism {
    AllocationMode mode = AllocationMode::may_withhold;
    Vector<Rational> q;

    const Rational& operator[](std::size_t v) const { return q(static_cast<Index>(v)); }
    bool deterministic() const;
    bool operator==(const Mechanism& other) const { return mode == other.mode && q == other.q; }
};

Mechanism zero_mechanism(const TypeSpaces& types, AllocationMode mode);

struct FeasibilityReport {
    bool feasible = true;
    std::string reason;
    std::optional<Profile> clique;  // first violated clique, if any
    Rational clique_sum;
};

FeasibilityReport check_feasible(const FeasibilityGraph& g, const Mechanism& m);

/// Sum of w(v) q(v).
Rational utility(const WeightVector& w, const Mechanism& m);
/// Double sum over the support of mu(theta) q_i(theta_{-i}) peer value.
Rational utility_by_profiles(const Environment& env, const Mechanism& m);
/// Computes both forms and throws std::logic_error if they differ.
Rational utility(const Environment& env, const Mechanism& m);

struct RankRow {
    Profile theta;
    Rational prob;
    std::vector<Rational> peer;
    std::vector<Rational> rank;
    std::vector<Rational> robust_rank;
    Rational delta;
};

struct RankTable {
    std::vector<RankRow> rows;  // support order
};

/// r_i at a profile from the n peer values there.
std::vector<Rational> ranks(std::span<const Rational> peer_values);

RankTable rank_table(const Environment& env);
std::string rank_table_csv(const Environment& env, const RankTable& table);

struct InformationalSize {
    std::vector<std::pair<Profile, Rational>> delta;  // per support profile
    Rational max;
    /// (d, mu{delta <= d}, mu{delta > d}) for each distinct value d.
    std::vector<std::tuple<Rational, Rational, Rational>> distribution;
};

InformationalSize informational_size_profile(const Environment& env);

/// q^p: 1/(pn) at vertices with robust rank <= p and nonnegative peer value.
/// Only vertices with positive marginal mass are assigned.
Mechanism ranking_mechanism(const Environment& env, const Rational& p);

/// Jury mechanism with juror set J (0-based agents).
Mechanism jury_mechanism_for(const Environment& env, std::vector<std::size_t> jurors, AllocationMode mode);
/// Expected utility of jury_mechanism_for(env, jurors, mode), summed over juror reports directly.
Rational jury_utility(const Environment& env, std::vector<std::size_t> jurors, AllocationMode mode);

struct JuryWitness {
    bool is_jury = false;
    std::vector<std::size_t> jurors;
    std::string reason;
};

JuryWitness is_jury(const FeasibilityGraph& g, const Mechanism& m);

nlohmann::json to_json(const TypeSpaces& types, const Mechanism& m);
Mechanism parse_mechanism(const TypeSpaces& types, const nlohmann::json& doc);

}  // namespace peermech
