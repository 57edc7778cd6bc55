#include "peermech/hardness.hpp"

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>

namespace peermech {

namespace {

class GraphBuilder {
public:
    std::size_t vertex(const std::string& name) {
        auto [it, inserted] = index_.emplace(name, names_.size());
        if (inserted) names_.push_back(name);
        return it->second;
    }
    void edge(const std::string& a, const std::string& b) {
        if (a == b) throw InputError("self-loop at vertex " + a);
        const std::size_t u = vertex(a);
        edges_.emplace_back(u, vertex(b));
    }
    SimpleGraph finish() const {
        SimpleGraph g(names_.size());
        g.names = names_;
        for (auto [u, v] : edges_) g.add_edge(u, v);
        return g;
    }

private:
    std::map<std::string, std::size_t> index_;
    std::vector<std::string> names_;
    std::vector<std::pair<std::size_t, std::size_t>> edges_;
};

}  // namespace

SimpleGraph parse_edge_list(std::string_view text) {
    GraphBuilder builder;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::vector<std::string> tokens;
        for (std::string tok; fields >> tok;) tokens.push_back(tok);
        if (tokens.empty()) continue;
        if (tokens.size() == 1)
            builder.vertex(tokens[0]);
        else if (tokens.size() == 2)
            builder.edge(tokens[0], tokens[1]);
        else
            throw InputError("edge list line " + std::to_string(lineno) + ": expected 'u v'");
    }
    return builder.finish();
}

SimpleGraph parse_graph_json(const nlohmann::json& doc) {
    try {
        GraphBuilder builder;
        const nlohmann::json* edges = &doc;
        if (doc.is_object()) {
            if (doc.contains("vertices"))
                for (const auto& v : doc["vertices"]) builder.vertex(json_label(v));
            edges = &doc.at("edges");
        }
        if (!edges->is_array()) throw InputError("graph edges must be an array");
        for (const auto& e : *edges) {
            if (!e.is_array() || e.size() != 2) throw InputError("each edge must be a pair");
            builder.edge(json_label(e[0]), json_label(e[1]));
        }
        return builder.finish();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed graph: ") + e.what());
    }
}

SimpleGraph load_graph(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    if (path.extension() == ".json") {
        try {
            return parse_graph_json(nlohmann::json::parse(buffer.str()));
        } catch (const nlohmann::json::parse_error& e) {
            throw InputError(std::string("parse failure: ") + e.what());
        }
    }
    return parse_edge_list(buffer.str());
}

ReductionInstance reduce(const SimpleGraph& source, std::size_t k_hat) {
    const auto& edges = source.edges();
    if (source.vertex_count() == 0) throw InputError("the source graph has no vertices");
    std::vector<std::string> names = source.names;
    for (std::size_t v = names.size(); v < source.vertex_count(); ++v) names.push_back(std::to_string(v + 1));
    std::vector<Label> edge_labels;
    for (auto [u, v] : edges) edge_labels.push_back(names[u] + "-" + names[v]);
    if (edge_labels.empty()) edge_labels.push_back("-");  // placeholder type when there are no edges

    ReductionInstance red;
    red.instance.types = TypeSpaces({edge_labels, names, names});
    const auto& types = red.instance.types;
    red.instance.weights.values = Vector<Rational>::Zero(static_cast<Index>(types.vertex_count()));
    red.k_hat = k_hat;
    red.k = k_hat + edges.size();

    const auto at = [&](std::size_t agent, int a, int b) {
        const int minus[2] = {a, b};
        return types.vertex_offset(agent) + static_cast<std::size_t>(types.encode_partial(agent, minus));
    };
    std::vector<bool> covered(source.vertex_count(), false);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const int v = static_cast<int>(edges[e].first), w = static_cast<int>(edges[e].second);
        const int ei = static_cast<int>(e);
        ReductionPath path;
        path.edge = e;
        path.vertices = {at(0, v, v), at(2, ei, v), at(1, ei, w), at(0, w, w)};
        for (std::size_t x : path.vertices) red.instance.weights.values(static_cast<Index>(x)) = 1;
        covered[edges[e].first] = covered[edges[e].second] = true;
        red.paths.push_back(path);
    }
    for (std::size_t v = 0; v < source.vertex_count(); ++v) {
        if (covered[v]) continue;
        const std::size_t x = at(0, static_cast<int>(v), static_cast<int>(v));
        red.instance.weights.values(static_cast<Index>(x)) = 1;
        red.isolated_endpoints.push_back(x);
    }
    return red;
}

std::vector<std::size_t> normalize_endpoints(const ReductionInstance& red, std::vector<std::size_t> stable_set) {
    std::sort(stable_set.begin(), stable_set.end());
    const auto has = [&](std::size_t v) { return std::binary_search(stable_set.begin(), stable_set.end(), v); };
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& path : red.paths) {
            if (!has(path.vertices[0]) || !has(path.vertices[3])) continue;
            auto it = std::lower_bound(stable_set.begin(), stable_set.end(), path.vertices[0]);
            stable_set.erase(it);
            stable_set.insert(std::lower_bound(stable_set.begin(), stable_set.end(), path.vertices[1]),
                              path.vertices[1]);
            changed = true;
        }
    }
    return stable_set;
}

namespace {

template <typename F>
void each_stable_set(std::size_t n, const std::vector<std::uint64_t>& adj, F&& visit) {
    std::vector<std::size_t> chosen;
    auto rec = [&](auto&& self, std::size_t k, std::uint64_t blocked) -> void {
        if (k == n) {
            visit(chosen);
            return;
        }
        self(self, k + 1, blocked);
        if (!(blocked >> k & 1)) {
            chosen.push_back(k);
            self(self, k + 1, blocked | adj[k]);
            chosen.pop_back();
        }
    };
    rec(rec, 0, 0);
}

}  // namespace

std::size_t max_stable_set_size(const SimpleGraph& g, std::size_t guard) {
    const std::size_t n = g.vertex_count();
    if (n > guard || n > 64) throw GuardExceeded("source graph too large for exhaustive search");
    std::vector<std::uint64_t> adj(n, 0);
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = 0; v < n; ++v)
            if (g.adjacent(u, v)) adj[u] |= std::uint64_t{1} << v;
    std::size_t best = 0;
    each_stable_set(n, adj, [&](const std::vector<std::size_t>& s) { best = std::max(best, s.size()); });
    return best;
}

Rational max_weight_stable_set(const FeasibilityGraph& g, const WeightVector& w, std::size_t guard) {
    std::vector<std::size_t> pos;
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
        if (w[v] > 0) pos.push_back(v);
    if (pos.size() > guard || pos.size() > 64) throw GuardExceeded("too many positive-weight vertices for exhaustive search");
    std::vector<std::uint64_t> adj(pos.size(), 0);
    for (std::size_t a = 0; a < pos.size(); ++a)
        for (std::size_t b = 0; b < pos.size(); ++b)
            if (g.adjacent(pos[a], pos[b])) adj[a] |= std::uint64_t{1} << b;
    Rational best = 0;
    auto rec = [&](auto&& self, std::size_t k, std::uint64_t blocked, const Rational& total) -> void {
        if (k == pos.size()) {
            if (total > best) best = total;
            return;
        }
        self(self, k + 1, blocked, total);
        if (!(blocked >> k & 1)) self(self, k + 1, blocked | adj[k], total + w[pos[k]]);
    };
    rec(rec, 0, 0, Rational(0));
    return best;
}

ReductionCheck verify_reduction(const SimpleGraph& source, std::size_t k_hat, std::size_t source_guard) {
    if (source.vertex_count() > source_guard)
        throw GuardExceeded(std::to_string(source.vertex_count()) + " source vertices exceed the guard of " +
                            std::to_string(source_guard));
    const ReductionInstance red = reduce(source, k_hat);
    ReductionCheck out;
    out.alpha = max_stable_set_size(source, source_guard);
    out.reduced_optimum = max_weight_stable_set(red.graph(), red.instance.weights);
    out.k = red.k;
    out.source_side = out.alpha >= k_hat;
    out.reduced_side = out.reduced_optimum >= Rational(static_cast<long>(red.k));
    out.holds = out.source_side == out.reduced_side;
    return out;
}

}  // namespace peermech
