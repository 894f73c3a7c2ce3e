#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "codirector/backends.hpp"
#include "codirector/bandit.hpp"

namespace codirector {

// Search policies compared in offline optimization experiments:
//   Mab      factored UCB1 with warm-start priors (true values + noise)
//   MabCold  factored UCB1 from a cold start
//   Scalar   UCB1 fed the aggregate score on every dimension (cold start)
//   Random   uniform sampling of the creative space
enum class PolicyKind { Mab, MabCold, Scalar, Random };

std::string policy_kind_name(PolicyKind k);
PolicyKind policy_kind_from(const std::string& name);  // throws ConfigError

struct ExperimentOptions {
    int iterations = 10;
    int repeats = 200;
    uint64_t seed = 0;
    double exploration_constant = 1.41421356;
    double warm_sigma = 10.0;    // noise added to true values for warm priors
    double prior_weight = 1.0;   // pseudo-pulls per warm prior
};

struct ExperimentReport {
    PolicyKind policy = PolicyKind::Mab;
    int iterations = 0;
    int repeats = 0;
    uint64_t seed = 0;
    std::string env_hash;
    // Mean over repeats of the running maximum of the noiseless aggregate of
    // the configs tried so far; index t-1 is iteration t.
    std::vector<double> mean_cumulative_best;
    // Fraction of repeats whose final best-arm estimate matches the
    // environment's true best arm, per dimension.
    std::array<double, 3> best_arm_accuracy{0.0, 0.0, 0.0};
    double mean_accuracy() const;

    nlohmann::json to_json() const;
};

// Runs the policy against sim_reward for `iterations` steps on `repeats`
// independently seeded replicas of the environment.
ExperimentReport run_policy_experiment(const SimEnvironment& env, PolicyKind kind,
                                       const ExperimentOptions& options);

}  // namespace codirector
