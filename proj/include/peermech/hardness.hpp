#pragma once

#include "peermech/fgraph.hpp"

#include <array>
#include <filesystem>
#include <string_view>
#include <vector>

namespace peermech {

/// "u v" per line; a single token declares a vertex; '#' starts a comment.
/// Vertices are numbered in order of first appearance.
SimpleGraph parse_edge_list(std::string_view text);
/// Either a list of [u, v] pairs or {"vertices": [...], "edges": [[u, v], ...]}.
SimpleGraph parse_graph_json(const nlohmann::json& doc);
/// JSON when the file name ends in .json, edge list otherwise.
SimpleGraph load_graph(const std::filesystem::path& path);

struct ReductionPath {
    std::size_t edge = 0;                 // index into the source edge list
    std::array<std::size_t, 4> vertices;  // endpoint, interior, interior, endpoint
};

struct ReductionInstance {
    WeightInstance instance;  // agent 1 types are edges, agents 2 and 3 types are vertices
    std::size_t k_hat = 0;
    std::size_t k = 0;        // k_hat + |E|
    std::vector<ReductionPath> paths;
    /// Endpoint vertices (., v, v) of isolated source vertices, which carry weight 1 as well.
    std::vector<std::size_t> isolated_endpoints;

    FeasibilityGraph graph() const { return FeasibilityGraph(instance.types, true); }
};

/// The three-agent gadget: each source edge e = v v' (v before v' in input
/// order) becomes the unit-weight induced path (.,v,v) (e,v,.) (e,.,v') (.,v',v').
/// An edgeless graph gets a single placeholder edge type for agent 1.
/// Throws InputError for a graph without vertices.
ReductionInstance reduce(const SimpleGraph& source, std::size_t k_hat);

/// Replaces, on every path holding both endpoints, the first endpoint by its
/// neighbouring interior vertex. Weight and stability are preserved.
std::vector<std::size_t> normalize_endpoints(const ReductionInstance& red, std::vector<std::size_t> stable_set);

/// Exhaustive independence number (guard on the vertex count).
std::size_t max_stable_set_size(const SimpleGraph& g, std::size_t guard = 20);

/// Exhaustive maximum-weight stable set over the positive-weight vertices.
Rational max_weight_stable_set(const FeasibilityGraph& g, const WeightVector& w, std::size_t guard = 48);

struct ReductionCheck {
    bool holds = false;
    std::size_t alpha = 0;
    Rational reduced_optimum;
    std::size_t k = 0;
    bool source_side = false;   // alpha >= k_hat
    bool reduced_side = false;  // reduced optimum >= k
};

/// Brute-forces both sides of the equivalence. Throws GuardExceeded above
/// `source_guard` source vertices.
ReductionCheck verify_reduction(const SimpleGraph& source, std::size_t k_hat, std::size_t source_guard = 7);

}  // namespace peermech
