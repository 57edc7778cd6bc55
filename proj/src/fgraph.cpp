#include "peermech/fgraph.hpp"

#include <numeric>
#include <sstream>

namespace peermech {

FeasibilityGraph::FeasibilityGraph(TypeSpaces types, bool allow_singleton) : types_(std::move(types)) {
    const std::size_t n = types_.agents();
    if (n < 2) throw InputError("n < 2");
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t minimum = allow_singleton ? 1 : 2;
        if (types_.size(i) < minimum) throw InputError("type space too small for agent " + std::to_string(i + 1));
    }
    const std::size_t nv = types_.vertex_count();
    agent_.resize(nv);
    coords_.assign(nv * n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::uint64_t code = 0; code < types_.partial_count(i); ++code) {
            const std::size_t v = types_.vertex_offset(i) + static_cast<std::size_t>(code);
            agent_[v] = i;
            const Profile minus = types_.decode_partial(i, code);
            for (std::size_t k = 0, pos = 0; k < n; ++k)
                if (k != i) coords_[v * n + k] = minus[pos++];
        }
    }
}

FeasibilityGraph build_graph(const TypeSpaces& types) { return FeasibilityGraph(types); }

VertexId FeasibilityGraph::id(std::size_t v) const {
    VertexId out{agent_.at(v), {}};
    for (std::size_t k = 0; k < agents(); ++k)
        if (k != out.agent) out.theta_minus.push_back(type_at(v, k));
    return out;
}

std::size_t FeasibilityGraph::index(const VertexId& id) const {
    if (id.agent >= agents()) throw InputError("unknown agent " + std::to_string(id.agent + 1));
    if (id.theta_minus.size() + 1 != agents()) throw InputError("partial profile has wrong length");
    for (std::size_t k = 0, pos = 0; k < agents(); ++k) {
        if (k == id.agent) continue;
        const int t = id.theta_minus[pos++];
        if (t < 0 || static_cast<std::size_t>(t) >= types_.size(k))
            throw InputError("type index outside the type space of agent " + std::to_string(k + 1));
    }
    return types_.vertex_offset(id.agent) + static_cast<std::size_t>(types_.encode_partial(id.agent, id.theta_minus));
}

bool FeasibilityGraph::adjacent(std::size_t v, std::size_t w) const {
    const std::size_t i = agent_[v], j = agent_[w];
    if (i == j) return false;
    const std::size_t n = agents();
    const int* a = &coords_[v * n];
    const int* b = &coords_[w * n];
    for (std::size_t k = 0; k < n; ++k)
        if (k != i && k != j && a[k] != b[k]) return false;
    return true;
}

std::vector<std::size_t> FeasibilityGraph::clique(std::span<const int> theta) const {
    if (theta.size() != agents()) throw InputError("profile has wrong length");
    std::vector<std::size_t> out(agents());
    for (std::size_t i = 0; i < agents(); ++i) out[i] = types_.vertex(i, theta);
    return out;
}

std::optional<Profile> FeasibilityGraph::shared_clique(std::size_t v, std::size_t w) const {
    if (!adjacent(v, w)) return std::nullopt;
    const std::size_t n = agents();
    Profile theta(n);
    for (std::size_t k = 0; k < n; ++k) theta[k] = type_at(v, k) >= 0 ? type_at(v, k) : type_at(w, k);
    return theta;
}

std::vector<std::size_t> FeasibilityGraph::neighbors(std::size_t v) const {
    const std::size_t i = agent_[v], n = agents();
    Profile theta(n);
    for (std::size_t k = 0; k < n; ++k) theta[k] = type_at(v, k);
    std::vector<std::size_t> out;
    for (std::size_t t = 0; t < types_.size(i); ++t) {
        theta[i] = static_cast<int>(t);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) out.push_back(types_.vertex(j, theta));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string FeasibilityGraph::name(std::size_t v) const {
    std::string out = std::to_string(agent_.at(v) + 1) + ":(";
    bool first = true;
    for (std::size_t k = 0; k < agents(); ++k) {
        if (k == agent_[v]) continue;
        if (!first) out += ",";
        out += types_.label(k, type_at(v, k));
        first = false;
    }
    return out + ")";
}

void SimpleGraph::add_edge(std::size_t u, std::size_t v) {
    if (u >= n_ || v >= n_) throw InputError("edge endpoint out of range");
    if (u == v) throw InputError("self-loops are not allowed");
    if (adjacent(u, v)) return;
    adj_[u * n_ + v] = adj_[v * n_ + u] = 1;
    edges_.emplace_back(std::min(u, v), std::max(u, v));
}

SimpleGraph complement(const FeasibilityGraph& g, std::span<const std::size_t> vertices) {
    SimpleGraph out(vertices.size());
    for (std::size_t a = 0; a < vertices.size(); ++a) {
        out.names.push_back(g.name(vertices[a]));
        for (std::size_t b = a + 1; b < vertices.size(); ++b)
            if (!g.adjacent(vertices[a], vertices[b])) out.add_edge(a, b);
    }
    return out;
}

std::vector<std::vector<std::size_t>> find_odd_holes(const FeasibilityGraph& g, std::vector<std::size_t> subset,
                                                     const HoleSearchOptions& options) {
    if (subset.empty()) {
        subset.resize(g.vertex_count());
        std::iota(subset.begin(), subset.end(), std::size_t{0});
    }
    return find_odd_holes_in(std::move(subset), [&g](std::size_t a, std::size_t b) { return g.adjacent(a, b); },
                             options);
}

std::vector<std::vector<std::size_t>> find_odd_holes(const SimpleGraph& g, const HoleSearchOptions& options) {
    std::vector<std::size_t> all(g.vertex_count());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return find_odd_holes_in(std::move(all), [&g](std::size_t a, std::size_t b) { return g.adjacent(a, b); },
                             options);
}

std::vector<std::size_t> canonical_cycle(std::vector<std::size_t> cycle) {
    if (cycle.size() < 3) return cycle;
    auto it = std::min_element(cycle.begin(), cycle.end());
    std::rotate(cycle.begin(), it, cycle.end());
    if (cycle.back() < cycle[1]) std::reverse(cycle.begin() + 1, cycle.end());
    return cycle;
}

std::vector<std::vector<std::size_t>> components_of(const FeasibilityGraph& g, std::vector<std::size_t> subset) {
    return components_in(std::move(subset), [&g](std::size_t a, std::size_t b) { return g.adjacent(a, b); });
}

std::string to_dot(const FeasibilityGraph& g) {
    std::ostringstream out;
    out << "graph feasibility {\n";
    for (std::size_t v = 0; v < g.vertex_count(); ++v) out << "  v" << v << " [label=\"" << g.name(v) << "\"];\n";
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
        for (std::size_t w : g.neighbors(v))
            if (v < w) out << "  v" << v << " -- v" << w << ";\n";
    out << "}\n";
    return out.str();
}

nlohmann::json to_json(const FeasibilityGraph& g) {
    nlohmann::json doc;
    doc["type_spaces"] = g.types().labels();
    nlohmann::json vertices = nlohmann::json::array();
    nlohmann::json adjacency = nlohmann::json::object();
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        vertices.push_back(g.name(v));
        nlohmann::json list = nlohmann::json::array();
        for (std::size_t w : g.neighbors(v)) list.push_back(g.name(w));
        adjacency[g.name(v)] = list;
    }
    doc["vertices"] = vertices;
    doc["adjacency"] = adjacency;
    return doc;
}

}  // namespace peermech
