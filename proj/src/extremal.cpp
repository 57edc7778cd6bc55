#include "peermech/extremal.hpp"

#include <boost/dynamic_bitset.hpp>

#include <cstdlib>
#include <numeric>

namespace peermech {

ExtremalityCertificate is_extreme(const FeasibilityGraph& g, const Mechanism& m, AllocationMode mode) {
    Mechanism probe = m;
    probe.mode = mode;
    if (const auto feas = check_feasible(g, probe); !feas.feasible) throw InputError("infeasible input: " + feas.reason);

    const std::size_t nv = g.vertex_count();
    const auto& types = g.types();
    ExtremalityCertificate cert;
    cert.dimension = nv;
    std::vector<std::vector<std::size_t>> supports;
    for (std::size_t v = 0; v < nv; ++v) {
        if (m[v] == 0) cert.tight.push_back({TightConstraint::Kind::lower, v, {}});
        if (m[v] == 1) cert.tight.push_back({TightConstraint::Kind::upper, v, {}});
        if (m[v] == 0 || m[v] == 1) supports.push_back({v});
    }
    for (std::uint64_t code = 0; code < types.profile_count(); ++code) {
        const Profile theta = types.decode(code);
        const auto members = g.clique(theta);
        Rational sum = 0;
        for (std::size_t v : members) sum += m[v];
        if (mode == AllocationMode::must_allocate || sum == 1) {
            cert.tight.push_back({TightConstraint::Kind::clique, 0, theta});
            supports.push_back(members);
        }
    }
    Matrix<Rational> rows = Matrix<Rational>::Zero(static_cast<Index>(supports.size()), static_cast<Index>(nv));
    for (std::size_t r = 0; r < supports.size(); ++r)
        for (std::size_t v : supports[r]) rows(static_cast<Index>(r), static_cast<Index>(v)) = 1;
    const auto ech = reduced_row_echelon(rows);
    cert.rank = ech.pivots.size();
    cert.extreme = cert.rank == nv;
    if (!cert.extreme) {
        const Matrix<Rational> basis = null_space(rows);
        cert.witness = basis.col(0);
    }
    return cert;
}

nlohmann::json to_json(const FeasibilityGraph& g, const ExtremalityCertificate& cert) {
    nlohmann::json doc;
    doc["verdict"] = cert.extreme ? "extreme" : "not-extreme";
    doc["rank"] = cert.rank;
    doc["dimension"] = cert.dimension;
    nlohmann::json tight = nlohmann::json::array();
    for (const auto& t : cert.tight) {
        switch (t.kind) {
            case TightConstraint::Kind::lower: tight.push_back("q(" + g.name(t.vertex) + ") = 0"); break;
            case TightConstraint::Kind::upper: tight.push_back("q(" + g.name(t.vertex) + ") = 1"); break;
            case TightConstraint::Kind::clique: {
                std::string s = "clique(";
                for (std::size_t k = 0; k < t.clique.size(); ++k)
                    s += (k ? "," : "") + g.types().label(k, t.clique[k]);
                tight.push_back(s + ") = 1");
                break;
            }
        }
    }
    doc["tight"] = tight;
    if (cert.witness) {
        nlohmann::json witness = nlohmann::json::object();
        for (std::size_t v = 0; v < g.vertex_count(); ++v) {
            const Rational& d = (*cert.witness)(static_cast<Index>(v));
            if (d != 0) witness[g.name(v)] = to_string(d);
        }
        doc["witness"] = witness;
    }
    return doc;
}

// ---------------------------------------------------------------------------
// Hole mechanisms

std::vector<std::size_t> hole_clique_union(const FeasibilityGraph& g, std::span<const std::size_t> hole) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < hole.size(); ++k) {
        const auto theta = g.shared_clique(hole[k], hole[(k + 1) % hole.size()]);
        if (!theta) throw InputError("consecutive hole vertices are not adjacent");
        for (std::size_t v : g.clique(*theta)) out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::size_t> hole_neighborhood(const FeasibilityGraph& g, std::span<const std::size_t> hole) {
    std::vector<std::size_t> out(hole.begin(), hole.end());
    for (std::size_t h : hole)
        for (std::size_t v : g.neighbors(h)) out.push_back(v);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Mechanism construct_hole_mechanism(const FeasibilityGraph& g, std::span<const std::size_t> hole,
                                   std::span<const std::size_t> stable_set) {
    const auto adj = [&g](std::size_t a, std::size_t b) { return g.adjacent(a, b); };
    for (std::size_t v : hole)
        if (v >= g.vertex_count()) throw InputError("hole vertex out of range");
    for (std::size_t v : stable_set)
        if (v >= g.vertex_count()) throw InputError("stable-set vertex out of range");
    if (!is_odd_hole(hole, adj)) throw InputError("H is not an odd hole");
    for (std::size_t a = 0; a < stable_set.size(); ++a)
        for (std::size_t b = a + 1; b < stable_set.size(); ++b)
            if (stable_set[a] == stable_set[b] || adj(stable_set[a], stable_set[b]))
                throw InputError("S is not a stable set");

    const auto vh = hole_clique_union(g, hole);
    const auto nh = hole_neighborhood(g, hole);
    const auto in = [](const std::vector<std::size_t>& sorted, std::size_t v) {
        return std::binary_search(sorted.begin(), sorted.end(), v);
    };
    Mechanism m = zero_mechanism(g.types(), AllocationMode::may_withhold);
    const Rational half(1, 2);
    for (std::size_t h : hole) m.q(static_cast<Index>(h)) = half;
    for (std::size_t s : stable_set) {
        if (!in(nh, s))
            m.q(static_cast<Index>(s)) = 1;
        else if (!in(vh, s))
            m.q(static_cast<Index>(s)) = half;
    }
    return m;
}

// ---------------------------------------------------------------------------
// Vertex enumeration (double description on the homogenized cone)

std::size_t default_enumeration_guard() {
    if (const char* text = std::getenv("PEERMECH_GUARD_VERTICES")) {
        char* end = nullptr;
        const unsigned long value = std::strtoul(text, &end, 10);
        if (end != text && *end == '\0' && value > 0) return static_cast<std::size_t>(value);
    }
    return 18;
}

namespace {

using Bits = boost::dynamic_bitset<>;

struct Ray {
    std::vector<Integer> x;  // coordinates, last one is the homogenizing t
    Bits zero;               // processed constraints tight at the ray
};

void normalize(std::vector<Integer>& x) {
    Integer g = 0;
    for (const auto& v : x) g = gcd(g, abs(v));
    if (g > 1)
        for (auto& v : x) v /= g;
}

}  // namespace

std::vector<Mechanism> enumerate_extreme_points(const FeasibilityGraph& g, AllocationMode mode, std::size_t guard) {
    const std::size_t nv = g.vertex_count();
    if (nv > guard)
        throw GuardExceeded(std::to_string(nv) + " variables exceed the enumeration guard of " + std::to_string(guard));
    const auto& types = g.types();
    const std::size_t np = static_cast<std::size_t>(types.profile_count());
    const std::size_t d = nv + 1;
    const std::size_t total = d + np;

    // Start from the orthant x >= 0, t >= 0: rays are the unit vectors.
    std::vector<Ray> rays;
    for (std::size_t k = 0; k < d; ++k) {
        Ray r{std::vector<Integer>(d, Integer(0)), Bits(total)};
        r.x[k] = 1;
        for (std::size_t c = 0; c < d; ++c)
            if (c != k) r.zero.set(c);
        rays.push_back(std::move(r));
    }

    for (std::size_t p = 0; p < np; ++p) {
        const std::size_t index = d + p;
        const auto members = g.clique(types.decode(p));
        // Row: t - sum_{v in clique} x_v (>= 0, or = 0 when allocation is mandatory).
        std::vector<Integer> h(rays.size());
        std::vector<std::size_t> pos, neg;
        std::vector<Ray> next;
        for (std::size_t r = 0; r < rays.size(); ++r) {
            Integer value = rays[r].x[nv];
            for (std::size_t v : members) value -= rays[r].x[v];
            h[r] = value;
            if (value > 0)
                pos.push_back(r);
            else if (value < 0)
                neg.push_back(r);
        }
        for (std::size_t r = 0; r < rays.size(); ++r) {
            if (h[r] == 0) {
                Ray kept = rays[r];
                kept.zero.set(index);
                next.push_back(std::move(kept));
            } else if (h[r] > 0 && mode == AllocationMode::may_withhold) {
                next.push_back(rays[r]);
            }
        }
        for (std::size_t a : pos) {
            for (std::size_t b : neg) {
                const Bits common = rays[a].zero & rays[b].zero;
                if (common.count() + 2 < d) continue;
                bool adjacent = true;
                for (std::size_t r = 0; r < rays.size() && adjacent; ++r) {
                    if (r == a || r == b) continue;
                    if (common.is_subset_of(rays[r].zero)) adjacent = false;
                }
                if (!adjacent) continue;
                Ray made{std::vector<Integer>(d), common};
                const Integer ha = h[a], hb = -h[b];
                for (std::size_t k = 0; k < d; ++k) made.x[k] = ha * rays[b].x[k] + hb * rays[a].x[k];
                normalize(made.x);
                made.zero.set(index);
                next.push_back(std::move(made));
            }
        }
        rays = std::move(next);
    }

    std::vector<Mechanism> out;
    for (const auto& r : rays) {
        if (r.x[nv] == 0) continue;
        Mechanism m = zero_mechanism(types, mode);
        const Rational t(r.x[nv]);
        for (std::size_t v = 0; v < nv; ++v) m.q(static_cast<Index>(v)) = Rational(r.x[v]) / t;
        out.push_back(std::move(m));
    }
    std::sort(out.begin(), out.end(), [](const Mechanism& a, const Mechanism& b) {
        return std::lexicographical_compare(a.q.data(), a.q.data() + a.q.size(), b.q.data(), b.q.data() + b.q.size());
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Hole characterization

HoleCharacterization check_hole_characterization(const FeasibilityGraph& g, const Mechanism& m) {
    HoleCharacterization out;
    const Rational half(1, 2);
    std::vector<std::size_t> stochastic;
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        if (m[v] > 0 && m[v] < 1) stochastic.push_back(v);
        if (m[v] != 0 && m[v] != 1 && m[v] != half) out.half_integral = false;
    }
    out.stochastic = !stochastic.empty();
    out.extreme = is_extreme(g, m, m.mode).extreme;
    for (auto& comp : components_of(g, stochastic)) {
        ComponentReport report;
        HoleSearchOptions options;
        options.first_only = true;
        options.max_len = comp.size() % 2 == 1 ? comp.size() : comp.size() - 1;
        if (options.max_len >= 5) {
            auto holes = find_odd_holes(g, comp, options);
            if (!holes.empty()) report.hole = holes.front();
        }
        if (!report.hole) out.all_have_holes = false;
        report.vertices = std::move(comp);
        out.components.push_back(std::move(report));
    }
    const bool forward = !out.extreme || !out.stochastic || out.all_have_holes;
    const bool converse = !(out.half_integral && out.stochastic && out.all_have_holes) || out.extreme;
    out.consistent = forward && converse;
    return out;
}

nlohmann::json to_json(const FeasibilityGraph& g, const HoleCharacterization& report) {
    nlohmann::json doc;
    doc["stochastic"] = report.stochastic;
    doc["extreme"] = report.extreme;
    doc["half_integral"] = report.half_integral;
    doc["all_components_have_holes"] = report.all_have_holes;
    doc["consistent"] = report.consistent;
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : report.components) {
        nlohmann::json item;
        nlohmann::json vertices = nlohmann::json::array();
        for (std::size_t v : c.vertices) vertices.push_back(g.name(v));
        item["vertices"] = vertices;
        if (c.hole) {
            nlohmann::json hole = nlohmann::json::array();
            for (std::size_t v : *c.hole) hole.push_back(g.name(v));
            item["hole"] = hole;
        } else {
            item["hole"] = nullptr;
        }
        comps.push_back(item);
    }
    doc["components"] = comps;
    return doc;
}

}  // namespace peermech
