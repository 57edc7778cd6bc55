#pragma once

#include "peermech/mech.hpp"

#include <optional>
#include <string>
#include <vector>

namespace peermech {

/// Constraint tight at a mechanism: q(v) = 0, q(v) = 1, or a clique row at 1.
struct TightConstraint {
    enum class Kind { lower, upper, clique } kind;
    std::size_t vertex = 0;  // lower / upper
    Profile clique;          // clique
};

struct ExtremalityCertificate {
    bool extreme = false;
    std::size_t rank = 0;
    std::size_t dimension = 0;
    std::vector<TightConstraint> tight;
    /// Nonzero d with every tight row zero on d, so q +- eps d stays feasible.
    std::optional<Vector<Rational>> witness;
};

/// Exact rank test on the tight constraints. Throws InputError when m is
/// infeasible for `mode`.
ExtremalityCertificate is_extreme(const FeasibilityGraph& g, const Mechanism& m, AllocationMode mode);

nlohmann::json to_json(const FeasibilityGraph& g, const ExtremalityCertificate& cert);

/// Union of the maximal cliques through consecutive hole vertices.
std::vector<std::size_t> hole_clique_union(const FeasibilityGraph& g, std::span<const std::size_t> hole);
/// The hole together with every vertex adjacent to it.
std::vector<std::size_t> hole_neighborhood(const FeasibilityGraph& g, std::span<const std::size_t> hole);

/// q_{H,S}: 1/2 on H and on S-vertices adjacent to H outside V_H, 1 on S away
/// from H, 0 elsewhere. Throws InputError if H is not an odd hole or S not stable.
Mechanism construct_hole_mechanism(const FeasibilityGraph& g, std::span<const std::size_t> hole,
                                   std::span<const std::size_t> stable_set);

/// Variable limit for vertex enumeration: PEERMECH_GUARD_VERTICES, default 18.
std::size_t default_enumeration_guard();

/// All extreme points of the DIC polytope (must-allocate: the face where
/// every clique row is tight), in lexicographic order of q. Throws
/// GuardExceeded above `guard` variables.
std::vector<Mechanism> enumerate_extreme_points(const FeasibilityGraph& g, AllocationMode mode,
                                                std::size_t guard = default_enumeration_guard());

struct ComponentReport {
    std::vector<std::size_t> vertices;
    std::optional<std::vector<std::size_t>> hole;
};

struct HoleCharacterization {
    std::vector<ComponentReport> components;
    bool stochastic = false;
    bool all_have_holes = true;
    bool half_integral = true;  // q takes values in {0, 1/2, 1}
    bool extreme = false;
    /// Extreme and stochastic implies holes everywhere; for half-integral q
    /// holes everywhere implies extreme.
    bool consistent = true;
};

HoleCharacterization check_hole_characterization(const FeasibilityGraph& g, const Mechanism& m);

nlohmann::json to_json(const FeasibilityGraph& g, const HoleCharacterization& report);

}  // namespace peermech
