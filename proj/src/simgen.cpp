#include "peermech/simgen.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace peermech {

namespace {

Rational sum_of(const std::vector<Rational>& xs) {
    Rational s = 0;
    for (const auto& x : xs) s += x;
    return s;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        if (k) out += sep;
        out += parts[k];
    }
    return out;
}

// Base hole vertices (agent, partial profile over the other two agents), type indices 0..2.
constexpr int kHole[9][3] = {{0, 0, 0}, {1, 1, 0}, {2, 1, 1}, {0, 1, 1}, {1, 2, 1},
                             {2, 2, 2}, {0, 2, 2}, {1, 0, 2}, {2, 0, 0}};

bool in_base_hole(std::size_t agent, int a, int b) {
    for (const auto& h : kHole)
        if (static_cast<std::size_t>(h[0]) == agent && h[1] == a && h[2] == b) return true;
    return false;
}

// Base support T: the profiles traversed by the hole.
std::vector<Profile> base_support() {
    return {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {1, 1, 1}, {2, 1, 1}, {2, 2, 1}, {2, 2, 2}, {0, 2, 2}, {0, 0, 2}};
}

std::vector<Rational> base_values(const Profile& t) {
    return {Rational(in_base_hole(0, t[1], t[2]) ? 1 : 0), Rational(in_base_hole(1, t[0], t[2]) ? 1 : 0),
            Rational(in_base_hole(2, t[0], t[1]) ? 1 : 0)};
}

// Environments where each agent's value is observed independently through
// per-observer channels; agent j's type is the tuple of its observations.
struct Channel {
    std::size_t observer;
    const SignalKernel* kernel;
};

struct Subject {
    const ValueDistribution* f;
    std::vector<Channel> channels;  // ascending observer
};

struct ObservationVector {
    std::vector<int> signals;  // one per channel
    Rational mass;             // P(signals)
    Rational value;            // E[u 1{signals}]
};

struct ProductLayout {
    // layout[j] lists (subject, alphabet size) in the order they appear in j's type.
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> layout;

    std::vector<int> decode(std::size_t agent, int type) const {
        const auto& entries = layout[agent];
        std::vector<int> out(entries.size());
        for (std::size_t k = entries.size(); k-- > 0;) {
            out[k] = type % static_cast<int>(entries[k].second);
            type /= static_cast<int>(entries[k].second);
        }
        return out;
    }
};

std::vector<ObservationVector> observation_vectors(const Subject& s) {
    std::vector<std::size_t> radix;
    for (const auto& c : s.channels) radix.push_back(c.kernel->signals.size());
    std::vector<ObservationVector> out;
    std::vector<int> sig(radix.size(), 0);
    while (true) {
        ObservationVector ov;
        ov.signals = sig;
        ov.mass = 0;
        ov.value = 0;
        for (std::size_t u = 0; u < s.f->support.size(); ++u) {
            Rational p = s.f->prob[u];
            for (std::size_t c = 0; c < radix.size() && p != 0; ++c)
                p *= s.channels[c].kernel->prob[u][static_cast<std::size_t>(sig[c])];
            ov.mass += p;
            ov.value += p * s.f->support[u];
        }
        if (ov.mass > 0) out.push_back(std::move(ov));
        std::size_t k = radix.size();
        while (k > 0) {
            --k;
            if (++sig[k] < static_cast<int>(radix[k])) break;
            sig[k] = 0;
            if (k == 0) return out;
        }
        if (radix.empty()) return out;
    }
}

std::pair<Environment, ProductLayout> build_product_env(const std::vector<Subject>& subjects, std::uint64_t guard) {
    const std::size_t n = subjects.size();
    ProductLayout layout;
    layout.layout.resize(n);
    // place[i][c]: place value of channel c of subject i inside its observer's type code
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> slot(n);
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& c : subjects[i].channels) {
            slot[i].emplace_back(c.observer, layout.layout[c.observer].size());
            layout.layout[c.observer].emplace_back(i, c.kernel->signals.size());
        }
    std::vector<std::vector<Label>> labels(n);
    std::vector<std::vector<std::size_t>> place(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& entries = layout.layout[j];
        place[j].assign(entries.size(), 1);
        std::uint64_t count = 1;
        for (std::size_t k = entries.size(); k-- > 0;) {
            place[j][k] = count;
            count *= entries[k].second;
            if (count > guard) throw GuardExceeded("type space of agent " + std::to_string(j + 1) + " exceeds the guard");
        }
        std::vector<std::vector<Label>> alphabets;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < subjects[i].channels.size(); ++c)
                if (slot[i][c].first == j) alphabets.push_back(subjects[i].channels[c].kernel->signals);
        if (entries.empty()) {
            labels[j] = {"-"};
            continue;
        }
        for (std::uint64_t code = 0; code < count; ++code) {
            std::vector<std::string> parts(entries.size());
            std::uint64_t rest = code;
            for (std::size_t k = entries.size(); k-- > 0;) {
                parts[k] = alphabets[k][rest % entries[k].second];
                rest /= entries[k].second;
            }
            labels[j].push_back(join(parts, ","));
        }
    }

    std::vector<std::vector<ObservationVector>> obs(n);
    std::uint64_t support_size = 1;
    for (std::size_t i = 0; i < n; ++i) {
        obs[i] = observation_vectors(subjects[i]);
        support_size *= obs[i].size();
        if (support_size > guard)
            throw GuardExceeded("support exceeds the guard of " + std::to_string(guard) + " profiles");
    }

    Environment env;
    env.types = TypeSpaces(labels);
    env.support.reserve(support_size);
    std::vector<std::size_t> pick(n, 0);
    while (true) {
        SupportEntry entry;
        entry.theta.assign(n, 0);
        entry.prob = 1;
        entry.values.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const ObservationVector& ov = obs[i][pick[i]];
            entry.prob *= ov.mass;
            entry.values[i] = ov.value / ov.mass;
            for (std::size_t c = 0; c < ov.signals.size(); ++c) {
                const auto [j, k] = slot[i][c];
                entry.theta[j] += ov.signals[c] * static_cast<int>(place[j][k]);
            }
        }
        env.support.push_back(std::move(entry));
        std::size_t k = n;
        bool done = true;
        while (k > 0) {
            --k;
            if (++pick[k] < obs[k].size()) {
                done = false;
                break;
            }
            pick[k] = 0;
        }
        if (done) break;
    }
    std::sort(env.support.begin(), env.support.end(),
              [](const SupportEntry& a, const SupportEntry& b) { return a.theta < b.theta; });
    if (auto problems = validate(env); !problems.empty()) throw InputError(join(problems, "; "));
    return {std::move(env), std::move(layout)};
}

std::vector<Subject> ci_subjects(const InfoStructure& s, std::size_t n) {
    std::vector<Subject> subjects(n);
    for (std::size_t i = 0; i < n; ++i) {
        subjects[i].f = &s.values[i];
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) subjects[i].channels.push_back({j, &s.kernels[i][j]});
    }
    return subjects;
}

Rational posterior(const ValueDistribution& f, const std::vector<const SignalKernel*>& kernels,
                   const std::vector<int>& signals) {
    Rational mass = 0, value = 0;
    for (std::size_t u = 0; u < f.support.size(); ++u) {
        Rational p = f.prob[u];
        for (std::size_t c = 0; c < kernels.size(); ++c) p *= kernels[c]->prob[u][static_cast<std::size_t>(signals[c])];
        mass += p;
        value += p * f.support[u];
    }
    return mass == 0 ? Rational(0) : value / mass;
}

bool same_kernel(const SignalKernel& a, const SignalKernel& b) { return a.signals == b.signals && a.prob == b.prob; }

bool same_distribution(const ValueDistribution& a, const ValueDistribution& b) {
    return a.support == b.support && a.prob == b.prob;
}

ValueDistribution parse_distribution(const nlohmann::json& doc) {
    ValueDistribution f;
    for (const auto& v : doc.at("support")) f.support.push_back(json_rational(v));
    for (const auto& p : doc.at("prob")) f.prob.push_back(json_rational(p));
    return f;
}

SignalKernel parse_kernel(const nlohmann::json& doc) {
    SignalKernel k;
    for (const auto& s : doc.at("signals")) k.signals.push_back(json_label(s));
    for (const auto& row : doc.at("prob")) {
        k.prob.emplace_back();
        for (const auto& p : row) k.prob.back().push_back(json_rational(p));
    }
    return k;
}

nlohmann::json rationals_json(const std::vector<Rational>& xs) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& x : xs) out.push_back(to_string(x));
    return out;
}

nlohmann::json kernel_json(const SignalKernel& k) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : k.prob) rows.push_back(rationals_json(row));
    return {{"signals", k.signals}, {"prob", rows}};
}

Rational random_fraction(std::mt19937_64& rng, int denominator) {
    return Rational(1 + static_cast<long>(rng() % static_cast<std::uint64_t>(denominator - 1)), denominator);
}

}  // namespace

Environment gen_group_env(std::size_t groups) {
    if (groups == 0) throw InputError("at least one group is required");
    const std::vector<Profile> base = base_support();
    std::vector<std::vector<Label>> labels(3 * groups, {"1", "2", "3"});
    Environment env;
    env.types = TypeSpaces(labels);
    std::uint64_t total = 1;
    for (std::size_t g = 0; g < groups; ++g) {
        total *= base.size();
        if (total > 1'000'000) throw GuardExceeded("group environment too large");
    }
    const Rational prob = Rational(1) / Rational(static_cast<long>(total));
    std::vector<std::size_t> pick(groups, 0);
    for (std::uint64_t code = 0; code < total; ++code) {
        SupportEntry entry;
        entry.prob = prob;
        for (std::size_t g = 0; g < groups; ++g) {
            const Profile& t = base[pick[g]];
            entry.theta.insert(entry.theta.end(), t.begin(), t.end());
            const auto vals = base_values(t);
            entry.values.insert(entry.values.end(), vals.begin(), vals.end());
        }
        env.support.push_back(std::move(entry));
        for (std::size_t g = groups; g-- > 0;) {
            if (++pick[g] < base.size()) break;
            pick[g] = 0;
        }
    }
    return env;
}

std::vector<std::string> InfoStructure::check() const {
    std::vector<std::string> out;
    if (capacity < 2) out.push_back("capacity must be at least 2");
    if (values.size() != capacity) out.push_back("expected one value distribution per agent");
    if (kernels.size() != capacity) out.push_back("expected one kernel row per agent");
    if (!out.empty()) return out;
    for (std::size_t i = 0; i < capacity; ++i) {
        const auto& f = values[i];
        const std::string who = "agent " + std::to_string(i + 1);
        if (f.support.empty() || f.support.size() != f.prob.size())
            out.push_back(who + ": value support and probabilities differ in length");
        for (const auto& u : f.support)
            if (u < -1 || u > 1) out.push_back(who + ": value out of range [-1, 1]");
        for (const auto& p : f.prob)
            if (p < 0) out.push_back(who + ": negative value probability");
        if (sum_of(f.prob) != 1) out.push_back(who + ": value probabilities not summing to 1");
        if (kernels[i].size() != capacity) {
            out.push_back(who + ": expected one kernel per observer");
            continue;
        }
        for (std::size_t j = 0; j < capacity; ++j) {
            if (j == i) continue;
            const auto& k = kernels[i][j];
            const std::string where = "kernel (" + std::to_string(i + 1) + ", " + std::to_string(j + 1) + ")";
            if (k.signals.empty()) out.push_back(where + ": empty signal alphabet");
            if (std::set<Label>(k.signals.begin(), k.signals.end()).size() != k.signals.size())
                out.push_back(where + ": duplicate signal labels");
            if (k.prob.size() != f.support.size()) {
                out.push_back(where + ": expected one row per value");
                continue;
            }
            for (const auto& row : k.prob) {
                if (row.size() != k.signals.size()) out.push_back(where + ": row length differs from the alphabet");
                if (std::any_of(row.begin(), row.end(), [](const Rational& p) { return p < 0; }))
                    out.push_back(where + ": negative probability");
                if (sum_of(row) != 1) out.push_back(where + ": row not summing to 1");
            }
        }
    }
    if (!out.empty()) return out;
    if (exchangeable_suppliers)
        for (std::size_t i = 0; i < capacity; ++i) {
            const std::size_t ref = i == 0 ? 1 : 0;
            for (std::size_t j = 0; j < capacity; ++j)
                if (j != i && !same_kernel(kernels[i][j], kernels[i][ref]))
                    out.push_back("exchangeable-suppliers flag set but kernels about agent " + std::to_string(i + 1) +
                                  " depend on the observer");
        }
    if (exchangeable_recipients) {
        for (std::size_t i = 1; i < capacity; ++i)
            if (!same_distribution(values[i], values[0]))
                out.push_back("exchangeable-recipients flag set but value distributions differ");
        for (std::size_t j = 0; j < capacity; ++j) {
            const std::size_t ref = j == 0 ? 1 : 0;
            for (std::size_t i = 0; i < capacity; ++i)
                if (i != j && !same_kernel(kernels[i][j], kernels[ref][j]))
                    out.push_back("exchangeable-recipients flag set but kernels of observer " + std::to_string(j + 1) +
                                  " depend on the subject");
        }
    }
    return out;
}

InfoStructure InfoStructure::suppliers(std::vector<ValueDistribution> f, std::vector<SignalKernel> per_subject) {
    InfoStructure s;
    s.capacity = f.size();
    s.values = std::move(f);
    s.kernels.assign(s.capacity, std::vector<SignalKernel>(s.capacity));
    for (std::size_t i = 0; i < s.capacity; ++i)
        for (std::size_t j = 0; j < s.capacity; ++j)
            if (j != i) s.kernels[i][j] = per_subject.at(i);
    s.exchangeable_suppliers = true;
    return s;
}

InfoStructure InfoStructure::recipients(ValueDistribution f, std::vector<SignalKernel> per_observer) {
    InfoStructure s;
    s.capacity = per_observer.size();
    s.values.assign(s.capacity, f);
    s.kernels.assign(s.capacity, std::vector<SignalKernel>(s.capacity));
    for (std::size_t i = 0; i < s.capacity; ++i)
        for (std::size_t j = 0; j < s.capacity; ++j)
            if (j != i) s.kernels[i][j] = per_observer[j];
    s.exchangeable_recipients = true;
    return s;
}

InfoStructure parse_info_structure(const nlohmann::json& doc) {
    try {
        InfoStructure s;
        s.exchangeable_suppliers = doc.value("exchangeable_suppliers", false);
        s.exchangeable_recipients = doc.value("exchangeable_recipients", false);
        std::size_t capacity = doc.value("capacity", std::size_t{0});
        const auto& values = doc.at("values");
        if (doc.contains("supplier_kernels") && capacity == 0) capacity = doc["supplier_kernels"].size();
        if (doc.contains("recipient_kernels") && capacity == 0) capacity = doc["recipient_kernels"].size();
        if (doc.contains("kernels") && capacity == 0) capacity = doc["kernels"].size();
        if (values.is_array() && capacity == 0) capacity = values.size();
        s.capacity = capacity;
        if (values.is_object())
            s.values.assign(capacity, parse_distribution(values));
        else
            for (const auto& v : values) s.values.push_back(parse_distribution(v));
        s.kernels.assign(capacity, std::vector<SignalKernel>(capacity));
        if (doc.contains("kernels")) {
            const auto& rows = doc["kernels"];
            if (rows.size() != capacity) throw InputError("expected one kernel row per agent");
            for (std::size_t i = 0; i < capacity; ++i) {
                if (rows[i].size() != capacity) throw InputError("expected one kernel per observer");
                for (std::size_t j = 0; j < capacity; ++j)
                    if (j != i) s.kernels[i][j] = parse_kernel(rows[i][j]);
            }
        } else if (doc.contains("supplier_kernels")) {
            const auto& ks = doc["supplier_kernels"];
            for (std::size_t i = 0; i < capacity; ++i)
                for (std::size_t j = 0; j < capacity; ++j)
                    if (j != i) s.kernels[i][j] = parse_kernel(ks.at(i));
        } else if (doc.contains("recipient_kernels")) {
            const auto& ks = doc["recipient_kernels"];
            for (std::size_t i = 0; i < capacity; ++i)
                for (std::size_t j = 0; j < capacity; ++j)
                    if (j != i) s.kernels[i][j] = parse_kernel(ks.at(j));
        } else {
            throw InputError("missing kernels");
        }
        if (auto problems = s.check(); !problems.empty()) throw InputError(join(problems, "; "));
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed information structure: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("malformed information structure: ") + e.what());
    }
}

nlohmann::json to_json(const InfoStructure& s) {
    nlohmann::json values = nlohmann::json::array();
    for (const auto& f : s.values) values.push_back({{"support", rationals_json(f.support)}, {"prob", rationals_json(f.prob)}});
    nlohmann::json kernels = nlohmann::json::array();
    for (std::size_t i = 0; i < s.capacity; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < s.capacity; ++j) row.push_back(j == i ? nlohmann::json(nullptr) : kernel_json(s.kernels[i][j]));
        kernels.push_back(row);
    }
    return {{"capacity", s.capacity},
            {"exchangeable_suppliers", s.exchangeable_suppliers},
            {"exchangeable_recipients", s.exchangeable_recipients},
            {"values", values},
            {"kernels", kernels}};
}

Environment gen_ci_env(const InfoStructure& s, std::size_t n, const GenGuards& guards) {
    if (auto problems = s.check(); !problems.empty()) throw InputError(join(problems, "; "));
    if (n < 2 || n > s.capacity)
        throw InputError("structure describes " + std::to_string(s.capacity) + " agents, " + std::to_string(n) +
                         " requested");
    return build_product_env(ci_subjects(s, n), guards.support).first;
}

Environment gen_network_env(const std::vector<std::vector<std::size_t>>& neighbors,
                            const std::vector<Rational>& levels, const Rational& noise, std::uint64_t seed,
                            const NetworkOptions& options) {
    const std::size_t n = neighbors.size();
    if (levels.size() < 2) throw InputError("at least two value levels are required");
    if (std::set<Rational>(levels.begin(), levels.end()).size() != levels.size())
        throw InputError("duplicate value levels");
    for (const auto& u : levels)
        if (u < -1 || u > 1) throw InputError("value level out of range [-1, 1]");
    if (noise < 0 || noise > 1) throw InputError("noise must lie in [0, 1]");
    const std::size_t L = levels.size();
    ValueDistribution f;
    f.support = levels;
    f.prob.assign(L, Rational(1) / Rational(static_cast<long>(L)));
    std::vector<Label> names;
    for (const auto& u : levels) names.push_back(to_string(u));

    const auto channel = [&](const Rational& nu) {
        SignalKernel k;
        k.signals = names;
        k.prob.assign(L, std::vector<Rational>(L));
        for (std::size_t u = 0; u < L; ++u)
            for (std::size_t s = 0; s < L; ++s)
                k.prob[u][s] = nu / Rational(static_cast<long>(L)) + (u == s ? Rational(1) - nu : Rational(0));
        return k;
    };
    std::mt19937_64 rng(seed);
    std::vector<std::vector<SignalKernel>> kernels(n);
    std::vector<std::vector<std::size_t>> observers(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t> obs = neighbors[i];
        for (std::size_t j : obs)
            if (j >= n || j == i) throw InputError("bad neighbor of agent " + std::to_string(i + 1));
        if (options.observe_own) obs.push_back(i);
        std::sort(obs.begin(), obs.end());
        if (std::adjacent_find(obs.begin(), obs.end()) != obs.end())
            throw InputError("duplicate neighbor of agent " + std::to_string(i + 1));
        kernels[i].reserve(obs.size());
        for (std::size_t j : obs) {
            if (j == i) {
                kernels[i].push_back(channel(Rational(0)));
            } else {
                const Rational nu = (rng() & 1) ? noise : noise / 2;
                kernels[i].push_back(channel(nu));
            }
        }
        observers[i] = std::move(obs);
    }
    std::vector<Subject> subjects(n);
    for (std::size_t i = 0; i < n; ++i) {
        subjects[i].f = &f;
        for (std::size_t c = 0; c < observers[i].size(); ++c) subjects[i].channels.push_back({observers[i][c], &kernels[i][c]});
    }
    return build_product_env(subjects, options.guards.support).first;
}

std::vector<std::vector<std::size_t>> ring_network(std::size_t n) {
    if (n < 3) throw InputError("a ring needs at least 3 agents");
    std::vector<std::vector<std::size_t>> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = {(i + n - 1) % n, (i + 1) % n};
        std::sort(out[i].begin(), out[i].end());
    }
    return out;
}

std::vector<std::vector<std::size_t>> star_network(std::size_t n) {
    if (n < 2) throw InputError("a star needs at least 2 agents");
    std::vector<std::vector<std::size_t>> out(n);
    for (std::size_t i = 1; i < n; ++i) {
        out[0].push_back(i);
        out[i].push_back(0);
    }
    return out;
}

InfoStructure random_ci_structure(std::size_t capacity, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<ValueDistribution> f(capacity);
    std::vector<SignalKernel> k(capacity);
    for (std::size_t i = 0; i < capacity; ++i) {
        const Rational lo = Rational(-static_cast<long>(rng() % 3), 2), hi = Rational(1 + static_cast<long>(rng() % 2), 2);
        const Rational p = random_fraction(rng, 4);
        f[i].support = {lo, hi};
        f[i].prob = {p, 1 - p};
        const Rational a = random_fraction(rng, 8), b = random_fraction(rng, 8);
        k[i].signals = {"0", "1"};
        k[i].prob = {{a, 1 - a}, {b, 1 - b}};
    }
    return InfoStructure::suppliers(std::move(f), std::move(k));
}

ReplicationReport jury_replication_check(const InfoStructure& s, std::size_t n, const GenGuards& guards) {
    if (!s.exchangeable_suppliers && !s.exchangeable_recipients)
        throw InputError("structure is flagged neither exchangeable-suppliers nor exchangeable-recipients");
    return jury_replication_check(s, n, s.exchangeable_suppliers, guards);
}

ReplicationReport jury_replication_check(const InfoStructure& s, std::size_t n, bool suppliers_case,
                                         const GenGuards& guards) {
    if (suppliers_case ? !s.exchangeable_suppliers : !s.exchangeable_recipients)
        throw InputError(std::string("structure is not flagged ") +
                         (suppliers_case ? "exchangeable-suppliers" : "exchangeable-recipients"));
    if (auto problems = s.check(); !problems.empty()) throw InputError(join(problems, "; "));
    if (n < 2 || 2 * n > s.capacity)
        throw InputError("replication needs a structure describing at least " + std::to_string(2 * n) + " agents");

    ReplicationReport report;
    report.kind = suppliers_case ? "suppliers" : "recipients";
    report.n = n;
    report.target = upper_bound(gen_ci_env(s, n, guards), AllocationMode::must_allocate);

    auto [env, layout] = build_product_env(ci_subjects(s, 2 * n), guards.support);
    const TypeSpaces& types = env.types;
    const std::size_t candidate_base = suppliers_case ? 0 : n;
    const std::size_t juror_base = suppliers_case ? n : 0;

    // signal of juror (juror_base + j) about agent `subject`
    const auto signal_of = [&](const std::vector<std::vector<int>>& juror_signals, std::size_t j, std::size_t subject) {
        const auto& entries = layout.layout[juror_base + j];
        for (std::size_t k = 0; k < entries.size(); ++k)
            if (entries[k].first == subject) return juror_signals[j][k];
        throw std::logic_error("juror does not observe the subject");
    };

    Mechanism m = zero_mechanism(types, AllocationMode::must_allocate);
    // Winner for each juror type profile, cached by its code.
    std::map<std::vector<int>, std::size_t> winner_of;
    for (std::size_t c = 0; c < n; ++c) {
        const std::size_t agent = candidate_base + c;
        for (std::uint64_t code = 0; code < types.partial_count(agent); ++code) {
            const Profile minus = types.decode_partial(agent, code);
            std::vector<int> jurors;
            for (std::size_t a = 0, k = 0; a < 2 * n; ++a) {
                if (a == agent) continue;
                if (a >= juror_base && a < juror_base + n) jurors.push_back(minus[k]);
                ++k;
            }
            auto it = winner_of.find(jurors);
            if (it == winner_of.end()) {
                std::vector<std::vector<int>> sig(n);
                for (std::size_t j = 0; j < n; ++j) sig[j] = layout.decode(juror_base + j, jurors[j]);
                std::optional<Rational> best;
                std::size_t arg = 0;
                for (std::size_t k = 0; k < n; ++k) {
                    // q^n's conditional value for agent k from the n-1 signals of the others
                    std::vector<const SignalKernel*> kernels;
                    std::vector<int> signals;
                    for (std::size_t j = 0; j < n; ++j) {
                        if (j == k) continue;
                        kernels.push_back(&s.kernels[k][j]);
                        signals.push_back(signal_of(sig, j, candidate_base + k));
                    }
                    const Rational v = posterior(s.values[k], kernels, signals);
                    if (!best || v > *best) {
                        best = v;
                        arg = k;
                    }
                }
                it = winner_of.emplace(jurors, arg).first;
            }
            if (it->second == c) m.q(static_cast<Index>(types.vertex_offset(agent) + code)) = 1;
        }
    }
    report.jury = utility(env, m);
    report.equal = report.jury == report.target;
    report.mechanism = std::move(m);
    report.replicated = std::move(env);
    return report;
}

SymmetricEnvironment gen_symmetric_env(std::size_t n, const std::vector<Label>& alphabet, std::uint64_t seed,
                                       std::size_t max_agents) {
    if (n < 2) throw InputError("n < 2");
    if (n > max_agents)
        throw GuardExceeded(std::to_string(n) + "! permutations exceed the guard of n <= " + std::to_string(max_agents));
    if (alphabet.size() < 2) throw InputError("type alphabet needs at least two labels");
    const Rational levels[3] = {Rational(-1), Rational(0), Rational(1)};
    std::mt19937_64 rng(seed);
    const std::size_t m = alphabet.size();
    const std::size_t atoms = 3 + static_cast<std::size_t>(rng() % 4);

    // key: value-level indices followed by type indices
    std::map<std::vector<int>, long> weight;
    std::vector<std::size_t> perm(n);
    for (std::size_t a = 0; a < atoms; ++a) {
        std::vector<int> u(n), t(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = static_cast<int>(rng() % 3);
        for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<int>(rng() % m);
        const long w = 1 + static_cast<long>(rng() % 9);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        do {
            std::vector<int> key(2 * n);
            for (std::size_t i = 0; i < n; ++i) {
                key[i] = u[perm[i]];
                key[n + i] = t[perm[i]];
            }
            weight[key] += w;
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    long total = 0;
    for (const auto& [key, w] : weight) total += w;

    SymmetricEnvironment out;
    out.env.types = TypeSpaces(std::vector<std::vector<Label>>(n, alphabet));
    std::map<Profile, std::pair<Rational, std::vector<Rational>>> by_theta;
    for (const auto& [key, w] : weight) {
        JointAtom atom;
        for (std::size_t i = 0; i < n; ++i) atom.values.push_back(levels[key[i]]);
        atom.theta.assign(key.begin() + static_cast<long>(n), key.end());
        atom.prob = Rational(w, total);
        auto& cell = by_theta[atom.theta];
        if (cell.second.empty()) cell.second.assign(n, Rational(0));
        cell.first += atom.prob;
        for (std::size_t i = 0; i < n; ++i) cell.second[i] += atom.prob * atom.values[i];
        out.joint.push_back(std::move(atom));
    }
    for (auto& [theta, cell] : by_theta) {
        SupportEntry entry;
        entry.theta = theta;
        entry.prob = cell.first;
        for (auto& v : cell.second) entry.values.push_back(v / cell.first);
        out.env.support.push_back(std::move(entry));
    }
    return out;
}

Environment gen_random_env(const std::vector<std::size_t>& shape, std::uint64_t seed) {
    std::vector<std::vector<Label>> labels;
    for (std::size_t k : shape) {
        labels.emplace_back();
        for (std::size_t t = 0; t < k; ++t) labels.back().push_back(std::to_string(t));
    }
    Environment env;
    env.types = TypeSpaces(labels);
    if (env.types.profile_count() > 100'000) throw GuardExceeded("too many profiles for a random environment");
    std::mt19937_64 rng(seed);
    const Rational levels[5] = {Rational(-1), Rational(-1, 2), Rational(0), Rational(1, 2), Rational(1)};
    std::vector<std::pair<std::uint64_t, long>> picked;
    long total = 0;
    for (std::uint64_t code = 0; code < env.types.profile_count(); ++code) {
        if (rng() % 4 == 0) continue;
        const long w = 1 + static_cast<long>(rng() % 6);
        picked.emplace_back(code, w);
        total += w;
    }
    if (picked.empty()) {
        picked.emplace_back(rng() % env.types.profile_count(), 1);
        total = 1;
    }
    for (auto [code, w] : picked) {
        SupportEntry entry;
        entry.theta = env.types.decode(code);
        entry.prob = Rational(w, total);
        for (std::size_t i = 0; i < shape.size(); ++i) entry.values.push_back(levels[rng() % 5]);
        env.support.push_back(std::move(entry));
    }
    return env;
}

std::vector<std::pair<Rational, Rational>> estimate_regularity(const Environment& env, const Rational& eps,
                                                               std::vector<Rational> grid) {
    const std::size_t n = env.agents();
    if (grid.empty())
        for (std::size_t k = 1; k <= n; ++k) grid.emplace_back(static_cast<long>(k), static_cast<long>(n));
    const PeerTable pt = peer_table(env);
    std::vector<std::pair<Rational, Rational>> out;
    for (const auto& eta : grid) out.emplace_back(eta, Rational(0));
    for (const auto& entry : env.support) {
        std::vector<Rational> u(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = pt.value(static_cast<Index>(env.types.vertex(i, entry.theta)));
        const Rational top = *std::max_element(u.begin(), u.end());
        long near = 0;
        for (const auto& x : u)
            if (x + eps >= top) ++near;
        const Rational fraction(near, static_cast<long>(n));
        for (auto& [eta, mass] : out)
            if (fraction >= eta) mass += entry.prob;
    }
    return out;
}

Rational ranking_lower_bound(const Environment& env, const Rational& p) {
    const std::size_t n = env.agents();
    const Rational nr(static_cast<long>(n));
    const RankTable table = rank_table(env);
    Rational value = 0, covered = 0;
    for (const auto& row : table.rows) {
        std::optional<Rational> low;
        for (std::size_t i = 0; i < n; ++i)
            if (row.rank[i] <= p && (!low || row.peer[i] < *low)) low = row.peer[i];
        const Rational u = low.value_or(Rational(0));
        if (u > 0) value += row.prob * u;
        covered += row.prob * Rational(floor(nr * (p - row.delta))) / (nr * p);
    }
    return value - (1 - covered);
}

ExperimentConfig parse_experiment_config(const nlohmann::json& doc) {
    try {
        ExperimentConfig c;
        c.generator = doc.value("generator", c.generator);
        if (doc.contains("n_grid")) c.n_grid = doc["n_grid"].get<std::vector<std::size_t>>();
        if (doc.contains("p_grid")) {
            c.p_grid.clear();
            for (const auto& p : doc["p_grid"]) c.p_grid.push_back(json_rational(p));
        }
        c.seed = doc.value("seed", c.seed);
        c.replications = doc.value("replications", c.replications);
        c.jobs = doc.value("jobs", c.jobs);
        c.output = doc.value("output", c.output);
        if (doc.contains("levels")) {
            c.levels.clear();
            for (const auto& u : doc["levels"]) c.levels.push_back(json_rational(u));
        }
        if (doc.contains("noise")) c.noise = json_rational(doc["noise"]);
        c.observe_own = doc.value("observe_own", c.observe_own);
        if (doc.contains("eps")) c.eps = json_rational(doc["eps"]);
        c.lp_variable_guard = doc.value("lp_variable_guard", c.lp_variable_guard);
        c.jury_max_agents = doc.value("jury_max_agents", c.jury_max_agents);
        for (const auto& p : c.p_grid)
            if (p <= 0 || p >= 1) throw InputError("p must lie in (0, 1)");
        if (c.replications == 0) throw InputError("replications must be positive");
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed experiment config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("malformed experiment config: ") + e.what());
    }
}

std::uint64_t cell_seed(std::uint64_t seed, std::size_t n, std::size_t replication) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(replication)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (std::uint64_t{words[0]} << 32) | words[1];
}

Environment experiment_environment(const ExperimentConfig& config, std::size_t n, std::uint64_t seed) {
    const std::string& g = config.generator;
    if (g == "group") {
        if (n % 3 != 0 || n == 0) throw InputError("group generator needs n divisible by 3");
        return gen_group_env(n / 3);
    }
    NetworkOptions net;
    net.observe_own = config.observe_own;
    if (g == "ring") return gen_network_env(ring_network(n), config.levels, config.noise, seed, net);
    if (g == "star") return gen_network_env(star_network(n), config.levels, config.noise, seed, net);
    if (g == "ci") return gen_ci_env(random_ci_structure(n, seed), n);
    throw InputError("unknown generator '" + g + "'");
}

std::vector<ExperimentRow> run_scaling_experiment(const ExperimentConfig& config) {
    struct Cell {
        std::size_t n, replication;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (std::size_t n : config.n_grid)
        for (std::size_t r = 0; r < config.replications; ++r) cells.push_back({n, r, cell_seed(config.seed, n, r)});
    std::vector<std::vector<ExperimentRow>> results(cells.size());
    std::vector<std::exception_ptr> errors(cells.size());

    const auto run_cell = [&](std::size_t idx) {
        const Cell& cell = cells[idx];
        const Environment env = experiment_environment(config, cell.n, cell.seed);
        GapOptions gap;
        gap.lp_variable_guard = config.lp_variable_guard;
        gap.jury_max_agents = config.jury_max_agents;
        const auto gaps = optimality_gap_report(env, config.p_grid, gap);
        const Rational max_delta = informational_size_profile(env).max;
        for (const auto& row : gaps) {
            ExperimentRow out;
            out.generator = config.generator;
            out.n = cell.n;
            out.p = row.p;
            out.seed = cell.seed;
            out.ranking = row.ranking;
            out.jury = row.jury;
            out.jury_is_bound = row.jury_is_bound;
            out.lp = row.lp;
            out.upper = row.upper;
            out.max_delta = max_delta;
            out.regularity = estimate_regularity(env, config.eps, {row.p}).front().second;
            out.analytic_lb = ranking_lower_bound(env, row.p);
            if (out.analytic_lb > out.ranking)
                throw std::logic_error("analytic lower bound exceeds the ranking utility at n = " +
                                       std::to_string(cell.n));
            results[idx].push_back(std::move(out));
        }
    };

    const std::size_t jobs = std::max<std::size_t>(1, std::min(config.jobs, cells.size()));
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t idx; (idx = next.fetch_add(1)) < cells.size();) {
            try {
                run_cell(idx);
            } catch (...) {
                errors[idx] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::vector<ExperimentRow> rows;
    for (auto& r : results)
        for (auto& row : r) rows.push_back(std::move(row));
    return rows;
}

std::string experiment_csv(const std::vector<ExperimentRow>& rows) {
    std::ostringstream out;
    out << "generator,n,p,seed,ranking_utility,jury_value,jury_is_bound,lp_value,upper_bound,max_delta,"
           "regularity_mass,analytic_lb\n";
    for (const auto& r : rows) {
        out << r.generator << ',' << r.n << ',' << to_string(r.p) << ',' << r.seed << ',' << to_string(r.ranking)
            << ',' << to_string(r.jury) << ',' << (r.jury_is_bound ? "true" : "false") << ','
            << (r.lp ? to_string(*r.lp) : "") << ',' << to_string(r.upper) << ',' << to_string(r.max_delta) << ','
            << to_string(r.regularity) << ',' << to_string(r.analytic_lb) << '\n';
    }
    return out.str();
}

}  // namespace peermech
