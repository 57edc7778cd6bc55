#pragma once

#include "peermech/solve.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace peermech {

/// Independent copies of the three-agent 9-hole environment, one per group of
/// three consecutive agents.
Environment gen_group_env(std::size_t groups);

struct ValueDistribution {
    std::vector<Rational> support;
    std::vector<Rational> prob;
};

/// Signal distribution given each value of the observed agent: prob[u][s].
struct SignalKernel {
    std::vector<Label> signals;
    std::vector<std::vector<Rational>> prob;
};

/// Conditionally independent signals: values[i] is f_i, kernels[i][j] is
/// g_i^j (what agent j observes about agent i). Described for `capacity` agents.
struct InfoStructure {
    std::size_t capacity = 0;
    std::vector<ValueDistribution> values;
    std::vector<std::vector<SignalKernel>> kernels;
    bool exchangeable_suppliers = false;
    bool exchangeable_recipients = false;

    /// Invariant violations, including flags that the data does not support.
    std::vector<std::string> check() const;

    /// g_i^j = per_subject[i] for all j.
    static InfoStructure suppliers(std::vector<ValueDistribution> f, std::vector<SignalKernel> per_subject);
    /// f_i = f and g_i^j = per_observer[j] for all i.
    static InfoStructure recipients(ValueDistribution f, std::vector<SignalKernel> per_observer);
};

InfoStructure parse_info_structure(const nlohmann::json& doc);
nlohmann::json to_json(const InfoStructure& s);

struct GenGuards {
    std::uint64_t support = 1'000'000;  // support profiles
};

/// n-agent environment of the structure; agent j's type lists its signals
/// about the other agents in agent order.
Environment gen_ci_env(const InfoStructure& s, std::size_t n, const GenGuards& guards = {});

struct NetworkOptions {
    bool observe_own = true;  // agent types also carry the agent's own value
    GenGuards guards;
};

/// u_i uniform on `levels`; every j in neighbors[i] sees u_i through a
/// mislabeling channel (correct with probability 1 - nu, otherwise uniform),
/// with nu in {noise/2, noise} drawn per pair from the seed.
Environment gen_network_env(const std::vector<std::vector<std::size_t>>& neighbors,
                            const std::vector<Rational>& levels, const Rational& noise, std::uint64_t seed,
                            const NetworkOptions& options = {});

std::vector<std::vector<std::size_t>> ring_network(std::size_t n);
std::vector<std::vector<std::size_t>> star_network(std::size_t n);

/// Random binary structure with exchangeable suppliers.
InfoStructure random_ci_structure(std::size_t capacity, std::uint64_t seed);

struct ReplicationReport {
    std::string kind;  // "suppliers" or "recipients"
    std::size_t n = 0;
    Rational target;   // highest-peer-value benchmark in the n-agent environment
    Rational jury;     // replicated jury mechanism in the 2n-agent environment
    bool equal = false;
    Mechanism mechanism;
    Environment replicated;
};

/// Uses the suppliers construction when that flag is set, the recipients one otherwise.
ReplicationReport jury_replication_check(const InfoStructure& s, std::size_t n, const GenGuards& guards = {});
ReplicationReport jury_replication_check(const InfoStructure& s, std::size_t n, bool suppliers_case,
                                         const GenGuards& guards = {});

struct JointAtom {
    std::vector<Rational> values;
    Profile theta;
    Rational prob;
};

struct SymmetricEnvironment {
    Environment env;
    std::vector<JointAtom> joint;
};

/// Random joint over (values, types) averaged over all simultaneous agent permutations.
SymmetricEnvironment gen_symmetric_env(std::size_t n, const std::vector<Label>& alphabet, std::uint64_t seed,
                                       std::size_t max_agents = 5);

/// Random environment on the given type-space shape (tests and experiments).
Environment gen_random_env(const std::vector<std::size_t>& shape, std::uint64_t seed);

/// For each eta in the grid (default 1/n, ..., 1): mu-mass of profiles where
/// a fraction >= eta of agents is within eps of the top peer value.
std::vector<std::pair<Rational, Rational>> estimate_regularity(const Environment& env, const Rational& eps,
                                                               std::vector<Rational> grid = {});

/// sum mu max(0, u(p, theta)) - (1 - sum mu floor(n (p - delta)) / (n p)).
Rational ranking_lower_bound(const Environment& env, const Rational& p);

struct ExperimentConfig {
    std::string generator = "group";  // group | ring | star | ci
    std::vector<std::size_t> n_grid{3, 6, 9};
    std::vector<Rational> p_grid{Rational(2, 3)};
    std::uint64_t seed = 1;
    std::size_t replications = 1;
    std::size_t jobs = 1;
    std::string output;
    std::vector<Rational> levels{Rational(-1), Rational(1)};
    Rational noise{1, 4};
    bool observe_own = false;
    Rational eps{1, 10};
    std::size_t lp_variable_guard = 5000;
    std::size_t jury_max_agents = 16;
};

ExperimentConfig parse_experiment_config(const nlohmann::json& doc);

struct ExperimentRow {
    std::string generator;
    std::size_t n = 0;
    Rational p;
    std::uint64_t seed = 0;
    Rational ranking;
    Rational jury;
    bool jury_is_bound = false;
    std::optional<Rational> lp;
    Rational upper;
    Rational max_delta;
    Rational regularity;
    Rational analytic_lb;
};

std::uint64_t cell_seed(std::uint64_t seed, std::size_t n, std::size_t replication);
Environment experiment_environment(const ExperimentConfig& config, std::size_t n, std::uint64_t seed);
std::vector<ExperimentRow> run_scaling_experiment(const ExperimentConfig& config);
std::string experiment_csv(const std::vector<ExperimentRow>& rows);

}  // namespace peermech
