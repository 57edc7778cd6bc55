#pragma once

#include "peermech/env.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace peermech {

/// A feasibility-graph vertex (i, theta_{-i}) in readable form.
struct VertexId {
    std::size_t agent = 0;
    Profile theta_minus;  // n-1 type indices, agents other than `agent` in order

    bool operator==(const VertexId&) const = default;
};

/// Vertices are numbered by TypeSpaces::vertex. Adjacency is evaluated from
/// the structural rule on demand.
class FeasibilityGraph {
public:
    FeasibilityGraph() = default;
    /// allow_singleton admits type spaces of size 1 (used by reduction instances).
    explicit FeasibilityGraph(TypeSpaces types, bool allow_singleton = false);

    const TypeSpaces& types() const { return types_; }
    std::size_t agents() const { return types_.agents(); }
    std::size_t vertex_count() const { return types_.vertex_count(); }
    std::uint64_t clique_count() const { return types_.profile_count(); }

    std::size_t agent(std::size_t v) const { return agent_[v]; }
    /// Type of agent k fixed by vertex v, or -1 when k is the vertex's own agent.
    int type_at(std::size_t v, std::size_t k) const { return coords_[v * agents() + k]; }
    VertexId id(std::size_t v) const;
    std::size_t index(const VertexId& id) const;
    std::size_t vertex(std::size_t agent, std::span<const int> theta) const { return types_.vertex(agent, theta); }

    bool adjacent(std::size_t v, std::size_t w) const;
    /// Vertices of the maximal clique of a full profile, one per agent in order.
    std::vector<std::size_t> clique(std::span<const int> theta) const;
    /// The unique profile whose clique contains both adjacent vertices.
    std::optional<Profile> shared_clique(std::size_t v, std::size_t w) const;
    std::vector<std::size_t> neighbors(std::size_t v) const;

    /// "i:(t1,t2,...)" with 1-based agent and the other agents' labels.
    std::string name(std::size_t v) const;

private:
    TypeSpaces types_;
    std::vector<std::size_t> agent_;
    std::vector<int> coords_;
};

FeasibilityGraph build_graph(const TypeSpaces& types);

/// Plain undirected graph with an adjacency matrix.
class SimpleGraph {
public:
    SimpleGraph() = default;
    explicit SimpleGraph(std::size_t n) : n_(n), adj_(n * n, 0) {}

    std::size_t vertex_count() const { return n_; }
    bool adjacent(std::size_t u, std::size_t v) const { return adj_[u * n_ + v] != 0; }
    void add_edge(std::size_t u, std::size_t v);
    /// Edges (u, v), u < v, in insertion order.
    const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }
    std::vector<std::string> names;

private:
    std::size_t n_ = 0;
    std::vector<char> adj_;
    std::vector<std::pair<std::size_t, std::size_t>> edges_;
};

/// Complement of the subgraph of g induced by `vertices` (positions index into it).
SimpleGraph complement(const FeasibilityGraph& g, std::span<const std::size_t> vertices);

struct HoleSearchOptions {
    std::size_t max_len = 7;
    bool first_only = false;
    std::size_t vertex_guard = 5000;
};

namespace detail {

template <typename Adjacent>
class HoleSearch {
public:
    HoleSearch(std::vector<std::size_t> vertices, Adjacent adj, const HoleSearchOptions& options)
        : vertices_(std::move(vertices)), options_(options) {
        const std::size_t m = vertices_.size();
        matrix_.assign(m * m, 0);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = a + 1; b < m; ++b)
                if (adj(vertices_[a], vertices_[b])) matrix_[a * m + b] = matrix_[b * m + a] = 1;
        in_path_.assign(m, 0);
    }

    std::vector<std::vector<std::size_t>> run() {
        for (std::size_t s = 0; s < vertices_.size() && !done(); ++s) {
            path_ = {s};
            in_path_[s] = 1;
            extend();
            in_path_[s] = 0;
        }
        return std::move(holes_);
    }

private:
    bool adj(std::size_t a, std::size_t b) const { return matrix_[a * vertices_.size() + b] != 0; }
    bool done() const { return options_.first_only && !holes_.empty(); }

    // path_ is an induced path starting at its minimum element path_[0].
    void extend() {
        const std::size_t s = path_.front();
        const std::size_t last = path_.back();
        const std::size_t len = path_.size();
        for (std::size_t u = s + 1; u < vertices_.size() && !done(); ++u) {
            if (in_path_[u] || !adj(last, u)) continue;
            bool chord = false;
            for (std::size_t k = 1; k + 1 < len && !chord; ++k) chord = adj(path_[k], u);
            if (chord) continue;
            if (len >= 2 && adj(s, u)) {
                const std::size_t cycle = len + 1;
                if (cycle >= 5 && cycle % 2 == 1 && path_[1] < u) {
                    std::vector<std::size_t> hole;
                    for (std::size_t k : path_) hole.push_back(vertices_[k]);
                    hole.push_back(vertices_[u]);
                    holes_.push_back(std::move(hole));
                }
                continue;
            }
            if (len + 1 >= options_.max_len) continue;
            path_.push_back(u);
            in_path_[u] = 1;
            extend();
            in_path_[u] = 0;
            path_.pop_back();
        }
    }

    std::vector<std::size_t> vertices_;
    HoleSearchOptions options_;
    std::vector<char> matrix_;
    std::vector<char> in_path_;
    std::vector<std::size_t> path_;
    std::vector<std::vector<std::size_t>> holes_;
};

}  // namespace detail

/// Induced odd cycles of length 5..max_len in the subgraph induced by
/// `vertices`. Each hole starts at its smallest vertex followed by the smaller
/// of that vertex's two hole neighbours. Throws GuardExceeded when the subset
/// is larger than options.vertex_guard.
template <typename Adjacent>
std::vector<std::vector<std::size_t>> find_odd_holes_in(std::vector<std::size_t> vertices, Adjacent adj,
                                                        const HoleSearchOptions& options) {
    if (vertices.size() > options.vertex_guard)
        throw GuardExceeded("hole search over " + std::to_string(vertices.size()) + " vertices exceeds the guard of " +
                            std::to_string(options.vertex_guard));
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    return detail::HoleSearch<Adjacent>(std::move(vertices), adj, options).run();
}

/// Odd holes of the feasibility graph; an empty subset means all vertices.
std::vector<std::vector<std::size_t>> find_odd_holes(const FeasibilityGraph& g, std::vector<std::size_t> subset,
                                                     const HoleSearchOptions& options);
std::vector<std::vector<std::size_t>> find_odd_holes(const SimpleGraph& g, const HoleSearchOptions& options);

/// Checks that `cycle` is an induced cycle of odd length >= 5.
template <typename Adjacent>
bool is_odd_hole(std::span<const std::size_t> cycle, Adjacent adj) {
    const std::size_t k = cycle.size();
    if (k < 5 || k % 2 == 0) return false;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b) {
            if (cycle[a] == cycle[b]) return false;
            const bool consecutive = b == a + 1 || (a == 0 && b == k - 1);
            if (adj(cycle[a], cycle[b]) != consecutive) return false;
        }
    return true;
}

/// Rotates/reflects a cycle so the smallest vertex is first and its smaller neighbour second.
std::vector<std::size_t> canonical_cycle(std::vector<std::size_t> cycle);

template <typename Adjacent>
std::vector<std::vector<std::size_t>> components_in(std::vector<std::size_t> vertices, Adjacent adj) {
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    std::vector<std::vector<std::size_t>> out;
    std::vector<char> seen(vertices.size(), 0);
    for (std::size_t s = 0; s < vertices.size(); ++s) {
        if (seen[s]) continue;
        std::vector<std::size_t> stack{s}, comp;
        seen[s] = 1;
        while (!stack.empty()) {
            const std::size_t a = stack.back();
            stack.pop_back();
            comp.push_back(vertices[a]);
            for (std::size_t b = 0; b < vertices.size(); ++b)
                if (!seen[b] && adj(vertices[a], vertices[b])) {
                    seen[b] = 1;
                    stack.push_back(b);
                }
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
    }
    return out;
}

std::vector<std::vector<std::size_t>> components_of(const FeasibilityGraph& g, std::vector<std::size_t> subset);

std::string to_dot(const FeasibilityGraph& g);
nlohmann::json to_json(const FeasibilityGraph& g);

}  // namespace peermech
