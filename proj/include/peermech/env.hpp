#pragma once

#include "peermech/linalg.hpp"
#include "peermech/rational.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace peermech {

using Label = std::string;
/// Type index per agent (full profile) or per listed agent (partial profile).
using Profile = std::vector<int>;

/// Raised for malformed or invariant-violating input data.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an instance exceeds a configured size limit.
class GuardExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class AllocationMode { may_withhold, must_allocate };

std::string to_string(AllocationMode mode);
AllocationMode parse_mode(std::string_view text);

/// Finite type spaces plus the mixed-radix numbering of full profiles,
/// partial profiles theta_{-i}, and feasibility-graph vertices (i, theta_{-i}).
/// Agent 0 is the most significant digit, so numbering is lexicographic.
class TypeSpaces {
public:
    TypeSpaces() = default;
    explicit TypeSpaces(std::vector<std::vector<Label>> labels);

    std::size_t agents() const { return labels_.size(); }
    std::size_t size(std::size_t agent) const { return labels_.at(agent).size(); }
    const std::vector<std::vector<Label>>& labels() const { return labels_; }
    const Label& label(std::size_t agent, int type) const { return labels_.at(agent).at(static_cast<std::size_t>(type)); }
    int index_of(std::size_t agent, std::string_view label) const;

    std::uint64_t profile_count() const { return profile_count_; }
    std::uint64_t encode(std::span<const int> theta) const;
    Profile decode(std::uint64_t code) const;

    std::uint64_t partial_count(std::size_t agent) const { return partial_count_.at(agent); }
    /// Code of theta_{-agent} taken from a full profile.
    std::uint64_t encode_minus(std::size_t agent, std::span<const int> theta) const;
    /// Code of a partial profile listing the n-1 types of the other agents in order.
    std::uint64_t encode_partial(std::size_t agent, std::span<const int> theta_minus) const;
    Profile decode_partial(std::size_t agent, std::uint64_t code) const;

    std::size_t vertex_count() const { return vertex_count_; }
    std::size_t vertex_offset(std::size_t agent) const { return offsets_.at(agent); }
    std::size_t vertex(std::size_t agent, std::span<const int> theta) const {
        return offsets_[agent] + static_cast<std::size_t>(encode_minus(agent, theta));
    }
    std::size_t vertex_agent(std::size_t vertex) const;

    bool operator==(const TypeSpaces& other) const { return labels_ == other.labels_; }

private:
    std::vector<std::vector<Label>> labels_;
    std::vector<std::unordered_map<std::string, int>> lookup_;
    std::vector<std::uint64_t> place_;  // place value of each agent in a full profile code
    std::uint64_t profile_count_ = 0;
    std::vector<std::uint64_t> partial_count_;
    std::vector<std::size_t> offsets_;
    std::size_t vertex_count_ = 0;
};

struct SupportEntry {
    Profile theta;
    Rational prob;
    std::vector<Rational> values;  // E[u_i | theta] per agent
};

struct Environment {
    TypeSpaces types;
    std::vector<SupportEntry> support;

    std::size_t agents() const { return types.agents(); }
};

/// Vertex weights w_i(theta_{-i}), indexed by TypeSpaces vertex numbering.
struct WeightVector {
    Vector<Rational> values;

    const Rational& operator[](std::size_t v) const { return values(static_cast<Index>(v)); }
};

/// An instance given directly by vertex weights, bypassing the distribution.
struct WeightInstance {
    TypeSpaces types;
    WeightVector weights;
};

/// Per-vertex marginal mass mu(theta_{-i}), weight mu(theta_{-i}) * peer value,
/// and peer value (0 off the marginal support).
struct PeerTable {
    Vector<Rational> mass;
    Vector<Rational> weight;
    Vector<Rational> value;
};

std::vector<std::string> validate(const Environment& env);

Environment parse_environment(const nlohmann::json& doc);
Environment load_environment(const std::filesystem::path& path);
Environment load_environment_text(std::string_view text);
nlohmann::json to_json(const Environment& env);

WeightInstance parse_weight_instance(const nlohmann::json& doc);
nlohmann::json to_json(const WeightInstance& instance);

/// Type spaces from the "type_spaces" field; also checks "agents" agrees.
TypeSpaces parse_type_spaces(const nlohmann::json& doc);
/// Parses a JSON number field given as "p/q", a decimal string, or an integer.
Rational json_rational(const nlohmann::json& value);
/// Labels may be strings or integers in JSON.
Label json_label(const nlohmann::json& value);

PeerTable peer_table(const Environment& env);

/// Direct summation over the support; 0 when mu(theta_{-i}) = 0.
Rational peer_value(const Environment& env, std::size_t agent, std::span<const int> theta_minus);

WeightVector weights(const Environment& env);

/// E[u_c | theta_J] for juror set J (ascending agent indices, c not in J),
/// theta_J listing one type per juror. Returns 0 when mu(theta_J) = 0.
Rational conditional_value(const Environment& env, std::size_t candidate, std::span<const std::size_t> jurors,
                           std::span<const int> theta_jurors);

/// Unconditional E[u_i].
Rational expected_value(const Environment& env, std::size_t agent);

}  // namespace peermech
