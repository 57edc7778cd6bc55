#pragma once

// Brute-force reference computations used to pin down expected values.

#include "peermech/fgraph.hpp"
#include "peermech/mech.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <vector>

namespace oracle {

using peermech::Environment;
using peermech::FeasibilityGraph;
using peermech::Profile;
using peermech::Rational;

/// Two vertices conflict iff some full profile is consistent with both.
inline bool conflict(const FeasibilityGraph& g, std::size_t v, std::size_t w) {
    if (g.agent(v) == g.agent(w)) return false;
    const auto a = g.types().decode_partial(g.agent(v), v - g.types().vertex_offset(g.agent(v)));
    const auto b = g.types().decode_partial(g.agent(w), w - g.types().vertex_offset(g.agent(w)));
    const std::size_t n = g.agents();
    std::vector<int> fa(n, -1), fb(n, -1);
    for (std::size_t k = 0, p = 0; k < n; ++k)
        if (k != g.agent(v)) fa[k] = a[p++];
    for (std::size_t k = 0, p = 0; k < n; ++k)
        if (k != g.agent(w)) fb[k] = b[p++];
    for (std::size_t k = 0; k < n; ++k)
        if (fa[k] >= 0 && fb[k] >= 0 && fa[k] != fb[k]) return false;
    return true;
}

/// Maximum of sum w over all stable sets, by subset enumeration.
inline Rational max_stable_weight(const FeasibilityGraph& g, const std::vector<Rational>& w) {
    const std::size_t n = g.vertex_count();
    Rational best = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        bool ok = true;
        Rational total = 0;
        for (std::size_t a = 0; a < n && ok; ++a) {
            if (!(mask >> a & 1)) continue;
            total += w[a];
            for (std::size_t b = a + 1; b < n && ok; ++b)
                if ((mask >> b & 1) && conflict(g, a, b)) ok = false;
        }
        if (ok && total > best) best = total;
    }
    return best;
}

/// Same with every clique required to be hit (must-allocate); nullopt-like -inf as flag.
inline std::pair<bool, Rational> max_covering_stable_weight(const FeasibilityGraph& g, const std::vector<Rational>& w) {
    const std::size_t n = g.vertex_count();
    bool found = false;
    Rational best = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        bool ok = true;
        Rational total = 0;
        for (std::size_t a = 0; a < n && ok; ++a) {
            if (!(mask >> a & 1)) continue;
            total += w[a];
            for (std::size_t b = a + 1; b < n && ok; ++b)
                if ((mask >> b & 1) && conflict(g, a, b)) ok = false;
        }
        if (!ok) continue;
        for (std::uint64_t code = 0; code < g.types().profile_count() && ok; ++code) {
            const Profile theta = g.types().decode(code);
            bool hit = false;
            for (std::size_t i = 0; i < g.agents(); ++i) hit |= (mask >> g.vertex(i, theta) & 1) != 0;
            ok = hit;
        }
        if (ok && (!found || total > best)) {
            best = total;
            found = true;
        }
    }
    return {found, best};
}

/// Peer value by scanning every profile of the type space and matching theta_{-i}.
inline Rational peer_value(const Environment& env, std::size_t i, const Profile& theta_minus) {
    Rational mass = 0, acc = 0;
    for (const auto& e : env.support) {
        bool match = true;
        for (std::size_t k = 0, p = 0; k < env.agents(); ++k) {
            if (k == i) continue;
            if (e.theta[k] != theta_minus[p++]) match = false;
        }
        if (!match) continue;
        mass += e.prob;
        acc += e.prob * e.values[i];
    }
    return mass == 0 ? Rational(0) : acc / mass;
}

/// Ranks via a stable sort by decreasing value: position / n.
inline std::vector<Rational> ranks(const std::vector<Rational>& u) {
    const std::size_t n = u.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return u[a] > u[b]; });
    std::vector<Rational> r(n);
    for (std::size_t pos = 0; pos < n; ++pos)
        r[order[pos]] = Rational(static_cast<long>(pos + 1), static_cast<long>(n));
    return r;
}

/// Edge bitmask over pairs (a < b) of an n-vertex graph.
inline std::size_t pair_index(std::size_t a, std::size_t b, std::size_t n) {
    std::size_t idx = 0;
    for (std::size_t x = 0; x < a; ++x) idx += n - 1 - x;
    return idx + (b - a - 1);
}

/// One representative edge list per isomorphism class of graphs on exactly n vertices.
inline std::vector<std::vector<std::pair<std::size_t, std::size_t>>> graph_classes(std::size_t n) {
    const std::size_t pairs = n * (n - 1) / 2;
    std::set<std::uint32_t> seen;
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> out;
    for (std::uint32_t mask = 0; mask < (1u << pairs); ++mask) {
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::uint32_t canon = ~0u;
        do {
            std::uint32_t image = 0;
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = a + 1; b < n; ++b)
                    if (mask >> pair_index(a, b, n) & 1) {
                        const std::size_t x = std::min(perm[a], perm[b]), y = std::max(perm[a], perm[b]);
                        image |= 1u << pair_index(x, y, n);
                    }
            canon = std::min(canon, image);
        } while (std::next_permutation(perm.begin(), perm.end()));
        if (!seen.insert(canon).second) continue;
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b)
                if (canon >> pair_index(a, b, n) & 1) edges.emplace_back(a, b);
        out.push_back(edges);
    }
    return out;
}

}  // namespace oracle
