#pragma once

#include "peermech/mech.hpp"
#include "peermech/simplex.hpp"

#include <optional>
#include <string>
#include <vector>

namespace peermech {

enum class SolveStatus { optimal, infeasible, guard_exceeded };

std::string to_string(SolveStatus status);

struct SolveStats {
    std::size_t pivots = 0;
    std::size_t nodes = 0;
    std::size_t variables = 0;
    std::size_t rows = 0;
    std::optional<double> wall_seconds;
};

struct SolveReport {
    SolveStatus status = SolveStatus::optimal;
    Mechanism mechanism;
    Rational objective;
    SolveStats stats;
    std::optional<bool> unique;                       // set when uniqueness was checked
    std::optional<std::vector<std::size_t>> jurors;   // set by solve_jury
    std::string note;
};

struct LpOptions {
    AllocationMode mode = AllocationMode::may_withhold;
    std::size_t variable_guard = 5000;
    bool presolve = true;       // may-withhold only: drop vertices with w <= 0
    bool check_unique = false;  // re-solve over the optimal face, coordinate by coordinate
    bool timing = false;
    SimplexOptions simplex;
};

/// Optimal stochastic DIC mechanism: maximizes w.q over the fractional stable
/// set polytope (clique rows <= 1, or = 1 in must-allocate mode). The returned
/// point is a vertex of the polytope.
SolveReport solve_lp(const FeasibilityGraph& g, const WeightVector& w, const LpOptions& options);
SolveReport solve_lp(const Environment& env, const LpOptions& options);

struct BranchOptions {
    AllocationMode mode = AllocationMode::may_withhold;
    std::size_t node_guard = 10'000'000;
    std::size_t lp_bound_after = 0;  // nodes before the LP bound kicks in; 0 disables it
    bool timing = false;
};

/// Optimal deterministic DIC mechanism by branch and bound over stable sets.
SolveReport solve_deterministic(const FeasibilityGraph& g, const WeightVector& w, const BranchOptions& options);
SolveReport solve_deterministic(const Environment& env, const BranchOptions& options);

struct JuryOptions {
    AllocationMode mode = AllocationMode::may_withhold;
    std::size_t max_agents = 16;
    bool single_juror_only = false;  // restrict to |J| <= 1
};

SolveReport solve_jury(const Environment& env, const JuryOptions& options);

/// may-withhold: sum mu max(0, max_i peer value); must-allocate: no clamp.
Rational upper_bound(const Environment& env, AllocationMode mode);

struct GapRow {
    Rational p;
    Rational ranking;
    std::optional<Rational> lp;
    Rational jury;
    bool jury_is_bound = false;
    Rational upper;
};

struct GapOptions {
    std::size_t lp_variable_guard = 5000;
    std::size_t jury_max_agents = 16;
};

std::vector<GapRow> optimality_gap_report(const Environment& env, std::span<const Rational> p_grid,
                                          const GapOptions& options = {});

nlohmann::json to_json(const TypeSpaces& types, const SolveReport& report);

}  // namespace peermech
