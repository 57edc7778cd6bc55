#include "peermech/env.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace peermech {

using nlohmann::json;

std::string to_string(AllocationMode mode) {
    return mode == AllocationMode::may_withhold ? "may-withhold" : "must-allocate";
}

AllocationMode parse_mode(std::string_view text) {
    if (text == "may-withhold") return AllocationMode::may_withhold;
    if (text == "must-allocate") return AllocationMode::must_allocate;
    throw std::invalid_argument("unknown mode '" + std::string(text) + "' (expected may-withhold or must-allocate)");
}

// ---------------------------------------------------------------------------
// TypeSpaces

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    if (b != 0 && a > std::numeric_limits<std::uint64_t>::max() / 4 / b)
        throw InputError("type space product too large to index");
    return a * b;
}

}  // namespace

TypeSpaces::TypeSpaces(std::vector<std::vector<Label>> labels) : labels_(std::move(labels)) {
    const std::size_t n = labels_.size();
    lookup_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t t = 0; t < labels_[i].size(); ++t) {
            if (!lookup_[i].emplace(labels_[i][t], static_cast<int>(t)).second)
                throw InputError("duplicate type label '" + labels_[i][t] + "' for agent " + std::to_string(i + 1));
        }
    }
    place_.assign(n, 1);
    profile_count_ = 1;
    for (std::size_t k = n; k-- > 0;) {
        place_[k] = profile_count_;
        profile_count_ = checked_mul(profile_count_, labels_[k].size());
    }
    partial_count_.assign(n, 1);
    offsets_.assign(n, 0);
    vertex_count_ = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t count = 1;
        for (std::size_t k = 0; k < n; ++k)
            if (k != i) count = checked_mul(count, labels_[k].size());
        partial_count_[i] = count;
        offsets_[i] = vertex_count_;
        vertex_count_ += static_cast<std::size_t>(count);
    }
}

int TypeSpaces::index_of(std::size_t agent, std::string_view label) const {
    if (agent >= agents()) throw InputError("unknown agent " + std::to_string(agent + 1));
    auto it = lookup_[agent].find(std::string(label));
    if (it == lookup_[agent].end())
        throw InputError("unknown type label '" + std::string(label) + "' for agent " + std::to_string(agent + 1));
    return it->second;
}

std::uint64_t TypeSpaces::encode(std::span<const int> theta) const {
    std::uint64_t code = 0;
    for (std::size_t k = 0; k < agents(); ++k) code += place_[k] * static_cast<std::uint64_t>(theta[k]);
    return code;
}

Profile TypeSpaces::decode(std::uint64_t code) const {
    Profile theta(agents());
    for (std::size_t k = 0; k < agents(); ++k) {
        theta[k] = static_cast<int>(code / place_[k]);
        code %= place_[k];
    }
    return theta;
}

std::uint64_t TypeSpaces::encode_minus(std::size_t agent, std::span<const int> theta) const {
    std::uint64_t code = 0;
    for (std::size_t k = 0; k < agents(); ++k) {
        if (k == agent) continue;
        code = code * labels_[k].size() + static_cast<std::uint64_t>(theta[k]);
    }
    return code;
}

std::uint64_t TypeSpaces::encode_partial(std::size_t agent, std::span<const int> theta_minus) const {
    std::uint64_t code = 0;
    std::size_t pos = 0;
    for (std::size_t k = 0; k < agents(); ++k) {
        if (k == agent) continue;
        code = code * labels_[k].size() + static_cast<std::uint64_t>(theta_minus[pos++]);
    }
    return code;
}

Profile TypeSpaces::decode_partial(std::size_t agent, std::uint64_t code) const {
    Profile out(agents() - 1);
    std::size_t pos = out.size();
    for (std::size_t k = agents(); k-- > 0;) {
        if (k == agent) continue;
        const std::uint64_t m = labels_[k].size();
        out[--pos] = static_cast<int>(code % m);
        code /= m;
    }
    return out;
}

std::size_t TypeSpaces::vertex_agent(std::size_t vertex) const {
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), vertex);
    return static_cast<std::size_t>(it - offsets_.begin()) - 1;
}

// ---------------------------------------------------------------------------
// Validation

std::vector<std::string> validate(const Environment& env) {
    std::vector<std::string> out;
    const std::size_t n = env.agents();
    if (n < 2) out.push_back("n < 2");
    for (std::size_t i = 0; i < n; ++i)
        if (env.types.size(i) < 2) out.push_back("type space too small for agent " + std::to_string(i + 1));

    std::set<Profile> seen;
    Rational total = 0;
    for (std::size_t e = 0; e < env.support.size(); ++e) {
        const auto& entry = env.support[e];
        const std::string where = "support entry " + std::to_string(e + 1);
        if (entry.theta.size() != n) {
            out.push_back(where + ": profile has wrong length");
            continue;
        }
        bool labels_ok = true;
        for (std::size_t i = 0; i < n; ++i)
            if (entry.theta[i] < 0 || static_cast<std::size_t>(entry.theta[i]) >= env.types.size(i)) labels_ok = false;
        if (!labels_ok) out.push_back(where + ": type label outside the type space");
        if (!seen.insert(entry.theta).second) out.push_back(where + ": duplicate profile");
        if (entry.prob <= 0 || entry.prob > 1) out.push_back(where + ": probability outside (0, 1]");
        if (entry.values.size() != n) {
            out.push_back(where + ": wrong number of values");
        } else {
            for (const auto& v : entry.values)
                if (v < -1 || v > 1) {
                    out.push_back(where + ": value out of range [-1, 1]");
                    break;
                }
        }
        total += entry.prob;
    }
    if (total != 1) out.push_back("probabilities not summing to 1 (sum = " + to_string(total) + ")");
    return out;
}

// ---------------------------------------------------------------------------
// JSON

Rational json_rational(const json& value) {
    if (value.is_string()) return parse_rational(value.get<std::string>());
    if (value.is_number_integer()) return Rational(value.get<long long>());
    throw InputError("expected a number given as \"p/q\", a decimal string, or an integer; got " + value.dump());
}

Label json_label(const json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_number_integer()) return value.dump();
    throw InputError("type labels must be strings or integers; got " + value.dump());
}

TypeSpaces parse_type_spaces(const json& doc) {
    if (!doc.is_object()) throw InputError("expected a JSON object");
    if (!doc.contains("type_spaces") || !doc["type_spaces"].is_array()) throw InputError("missing \"type_spaces\" array");
    std::vector<std::vector<Label>> labels;
    for (const auto& space : doc["type_spaces"]) {
        if (!space.is_array()) throw InputError("each type space must be an array of labels");
        auto& dst = labels.emplace_back();
        for (const auto& l : space) dst.push_back(json_label(l));
    }
    if (doc.contains("agents")) {
        if (!doc["agents"].is_number_integer() || doc["agents"].get<long long>() != static_cast<long long>(labels.size()))
            throw InputError("\"agents\" does not match the number of type spaces");
    }
    return TypeSpaces(std::move(labels));
}

namespace {

Profile parse_profile(const TypeSpaces& types, const json& arr, std::size_t skip_agent) {
    if (!arr.is_array()) throw InputError("profile must be an array of labels");
    const std::size_t n = types.agents();
    const std::size_t expect = skip_agent < n ? n - 1 : n;
    if (arr.size() != expect) throw InputError("profile " + arr.dump() + " has wrong length");
    Profile out;
    std::size_t pos = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k == skip_agent) continue;
        out.push_back(types.index_of(k, json_label(arr[pos++])));
    }
    return out;
}

json profile_json(const TypeSpaces& types, std::span<const int> theta, std::size_t skip_agent) {
    json arr = json::array();
    std::size_t pos = 0;
    for (std::size_t k = 0; k < types.agents(); ++k) {
        if (k == skip_agent) continue;
        arr.push_back(types.label(k, theta[pos++]));
    }
    return arr;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t k = 0; k < items.size(); ++k) out += (k ? "; " : "") + items[k];
    return out;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InputError("parse failure in " + path.string() + ": " + e.what());
    }
}

}  // namespace

Environment parse_environment(const json& doc) {
    try {
        Environment env;
        env.types = parse_type_spaces(doc);
        if (!doc.contains("support") || !doc["support"].is_array()) throw InputError("missing \"support\" array");
        const std::size_t n = env.types.agents();
        for (const auto& item : doc["support"]) {
            if (!item.is_object()) throw InputError("support entries must be objects");
            SupportEntry entry;
            entry.theta = parse_profile(env.types, item.at("theta"), n);
            entry.prob = json_rational(item.at("prob"));
            for (const auto& v : item.at("values")) entry.values.push_back(json_rational(v));
            env.support.push_back(std::move(entry));
        }
        if (auto problems = validate(env); !problems.empty()) throw InputError(join(problems));
        return env;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed environment: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
}

Environment load_environment(const std::filesystem::path& path) { return parse_environment(read_json_file(path)); }

Environment load_environment_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("parse failure: ") + e.what());
    }
    return parse_environment(doc);
}

json to_json(const Environment& env) {
    json doc;
    doc["agents"] = env.agents();
    doc["type_spaces"] = env.types.labels();
    json support = json::array();
    for (const auto& entry : env.support) {
        json values = json::array();
        for (const auto& v : entry.values) values.push_back(to_string(v));
        support.push_back({{"theta", profile_json(env.types, entry.theta, env.agents())},
                           {"prob", to_string(entry.prob)},
                           {"values", values}});
    }
    doc["support"] = support;
    return doc;
}

WeightInstance parse_weight_instance(const json& doc) {
    try {
        WeightInstance inst;
        inst.types = parse_type_spaces(doc);
        const std::size_t n = inst.types.agents();
        if (n < 2) throw InputError("n < 2");
        for (std::size_t i = 0; i < n; ++i)
            if (inst.types.size(i) < 1) throw InputError("empty type space for agent " + std::to_string(i + 1));
        inst.weights.values = Vector<Rational>::Zero(static_cast<Index>(inst.types.vertex_count()));
        std::vector<bool> seen(inst.types.vertex_count(), false);
        if (!doc.contains("weights") || !doc["weights"].is_array()) throw InputError("missing \"weights\" array");
        for (const auto& item : doc["weights"]) {
            const long long agent1 = item.at("agent").get<long long>();
            if (agent1 < 1 || agent1 > static_cast<long long>(n)) throw InputError("agent index out of range in weights");
            const std::size_t agent = static_cast<std::size_t>(agent1 - 1);
            Profile minus = parse_profile(inst.types, item.at("theta_minus"), agent);
            const std::size_t v = inst.types.vertex_offset(agent) +
                                  static_cast<std::size_t>(inst.types.encode_partial(agent, minus));
            if (seen[v]) throw InputError("duplicate weight entry for agent " + std::to_string(agent1));
            seen[v] = true;
            inst.weights.values(static_cast<Index>(v)) = json_rational(item.at("w"));
        }
        return inst;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed weight file: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
}

json to_json(const WeightInstance& inst) {
    json doc;
    doc["agents"] = inst.types.agents();
    doc["type_spaces"] = inst.types.labels();
    json arr = json::array();
    for (std::size_t v = 0; v < inst.types.vertex_count(); ++v) {
        if (inst.weights[v] == 0) continue;
        const std::size_t agent = inst.types.vertex_agent(v);
        const Profile minus = inst.types.decode_partial(agent, v - inst.types.vertex_offset(agent));
        arr.push_back({{"agent", agent + 1},
                       {"theta_minus", profile_json(inst.types, minus, agent)},
                       {"w", to_string(inst.weights[v])}});
    }
    doc["weights"] = arr;
    return doc;
}

// ---------------------------------------------------------------------------
// Peer values

PeerTable peer_table(const Environment& env) {
    const Index nv = static_cast<Index>(env.types.vertex_count());
    PeerTable table{Vector<Rational>::Zero(nv), Vector<Rational>::Zero(nv), Vector<Rational>::Zero(nv)};
    for (const auto& entry : env.support) {
        for (std::size_t i = 0; i < env.agents(); ++i) {
            const Index v = static_cast<Index>(env.types.vertex(i, entry.theta));
            table.mass(v) += entry.prob;
            table.weight(v) += entry.prob * entry.values[i];
        }
    }
    for (Index v = 0; v < nv; ++v)
        if (table.mass(v) != 0) table.value(v) = table.weight(v) / table.mass(v);
    return table;
}

Rational peer_value(const Environment& env, std::size_t agent, std::span<const int> theta_minus) {
    const std::size_t n = env.agents();
    if (agent >= n) throw InputError("unknown agent " + std::to_string(agent + 1));
    if (theta_minus.size() + 1 != n) throw InputError("partial profile has wrong length");
    for (std::size_t k = 0, pos = 0; k < n; ++k) {
        if (k == agent) continue;
        if (theta_minus[pos] < 0 || static_cast<std::size_t>(theta_minus[pos]) >= env.types.size(k))
            throw InputError("type index outside the type space of agent " + std::to_string(k + 1));
        ++pos;
    }
    Rational mass = 0, acc = 0;
    for (const auto& entry : env.support) {
        bool match = true;
        for (std::size_t k = 0, pos = 0; k < n && match; ++k) {
            if (k == agent) continue;
            match = entry.theta[k] == theta_minus[pos++];
        }
        if (!match) continue;
        mass += entry.prob;
        acc += entry.prob * entry.values[agent];
    }
    return mass == 0 ? Rational(0) : Rational(acc / mass);
}

WeightVector weights(const Environment& env) { return WeightVector{peer_table(env).weight}; }

Rational conditional_value(const Environment& env, std::size_t candidate, std::span<const std::size_t> jurors,
                           std::span<const int> theta_jurors) {
    if (candidate >= env.agents()) throw InputError("unknown agent " + std::to_string(candidate + 1));
    if (std::find(jurors.begin(), jurors.end(), candidate) != jurors.end())
        throw std::invalid_argument("candidate must not be a juror");
    if (jurors.size() != theta_jurors.size()) throw InputError("juror profile has wrong length");
    Rational mass = 0, acc = 0;
    for (const auto& entry : env.support) {
        bool match = true;
        for (std::size_t k = 0; k < jurors.size() && match; ++k) match = entry.theta[jurors[k]] == theta_jurors[k];
        if (!match) continue;
        mass += entry.prob;
        acc += entry.prob * entry.values[candidate];
    }
    return mass == 0 ? Rational(0) : Rational(acc / mass);
}

Rational expected_value(const Environment& env, std::size_t agent) {
    Rational acc = 0;
    for (const auto& entry : env.support) acc += entry.prob * entry.values.at(agent);
    return acc;
}

}  // namespace peermech
