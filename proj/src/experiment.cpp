#include "codirector/experiment.hpp"

#include <algorithm>
#include <cmath>

#include "codirector/errors.hpp"

namespace codirector {

using nlohmann::json;

std::string policy_kind_name(PolicyKind k) {
    switch (k) {
        case PolicyKind::Mab: return "mab";
        case PolicyKind::MabCold: return "mab-cold";
        case PolicyKind::Scalar: return "scalar";
        case PolicyKind::Random: return "random";
    }
    return "mab";
}

PolicyKind policy_kind_from(const std::string& name) {
    if (name == "mab") return PolicyKind::Mab;
    if (name == "mab-cold") return PolicyKind::MabCold;
    if (name == "scalar") return PolicyKind::Scalar;
    if (name == "random") return PolicyKind::Random;
    throw ConfigError("unknown policy '" + name + "' (expected mab|mab-cold|scalar|random)");
}

double ExperimentReport::mean_accuracy() const {
    return (best_arm_accuracy[0] + best_arm_accuracy[1] + best_arm_accuracy[2]) / 3.0;
}

json ExperimentReport::to_json() const {
    json dims = json::object();
    for (std::size_t i = 0; i < kAllDimensions.size(); ++i) {
        dims[dimension_name(kAllDimensions[i])] = best_arm_accuracy[i];
    }
    return {{"policy", policy_kind_name(policy)},
            {"iterations", iterations},
            {"repeats", repeats},
            {"seed", seed},
            {"env_hash", env_hash},
            {"mean_cumulative_best", mean_cumulative_best},
            {"best_arm_accuracy", dims},
            {"mean_best_arm_accuracy", mean_accuracy()}};
}

namespace {

std::vector<WarmStartPrior> noisy_priors(const SimEnvironment& env, uint64_t rep_seed,
                                         double sigma, double weight) {
    std::vector<WarmStartPrior> priors;
    int global_arm = 0;
    for (CreativeDimension d : kAllDimensions) {
        for (int a = 0; a < arm_count(d); ++a, ++global_arm) {
            WarmStartPrior p;
            p.dimension = d;
            p.arm_index = a;
            p.prior_value = std::clamp(
                env.true_value(d, a) + sigma * gaussian01(rep_seed, 9000 + global_arm, 7), 0.0,
                100.0);
            p.prior_weight = weight;
            priors.push_back(p);
        }
    }
    return priors;
}

CreativeConfig random_config(uint64_t rep_seed, int t) {
    std::array<int, 3> indices{};
    for (std::size_t d = 0; d < kAllDimensions.size(); ++d) {
        const uint64_t key = mix64(rep_seed ^ (static_cast<uint64_t>(t) * 0x100000001b3ULL) ^
                                   (static_cast<uint64_t>(d) << 56));
        const int count = arm_count(kAllDimensions[d]);
        indices[d] = std::min(count - 1, static_cast<int>(uniform01(key) * count));
    }
    return CreativeConfig::from_indices(indices[0], indices[1], indices[2]);
}

}  // namespace

ExperimentReport run_policy_experiment(const SimEnvironment& env, PolicyKind kind,
                                       const ExperimentOptions& options) {
    env.validate();
    if (options.iterations <= 0) throw ConfigError("iterations must be positive");
    if (options.repeats <= 0) throw ConfigError("repeats must be positive");

    ExperimentReport report;
    report.policy = kind;
    report.iterations = options.iterations;
    report.repeats = options.repeats;
    report.seed = options.seed;
    report.env_hash = sha256_hex(env.to_json().dump());
    report.mean_cumulative_best.assign(options.iterations, 0.0);

    std::array<int, 3> true_best{};
    for (std::size_t d = 0; d < kAllDimensions.size(); ++d) {
        true_best[d] = env.true_best_arm(kAllDimensions[d]);
    }
    std::array<long, 3> correct{0, 0, 0};

    for (int rep = 0; rep < options.repeats; ++rep) {
        const uint64_t rep_seed =
            mix64(options.seed + static_cast<uint64_t>(rep) * 0x9e3779b97f4a7c15ULL);
        SimEnvironment rep_env = env;
        rep_env.seed = rep_seed;

        const RewardMode mode =
            kind == PolicyKind::Scalar ? RewardMode::Scalar : RewardMode::Factored;
        BanditPolicy policy = BanditPolicy::create(options.exploration_constant, mode);
        if (kind == PolicyKind::Mab) {
            policy.warm_start(
                noisy_priors(env, rep_seed, options.warm_sigma, options.prior_weight));
        }

        double running_best = 0.0;
        CreativeConfig best_config = CreativeConfig::from_indices(0, 0, 0);
        bool have_best = false;
        for (int t = 0; t < options.iterations; ++t) {
            const CreativeConfig config =
                kind == PolicyKind::Random ? random_config(rep_seed, t) : policy.select();
            const FactoredReward reward = sim_reward(config, rep_env, t);
            if (kind != PolicyKind::Random) policy.update(config, reward);

            const double quality = env.noiseless_aggregate(config);
            if (!have_best || quality > running_best) {
                running_best = quality;
                best_config = config;
                have_best = true;
            }
            report.mean_cumulative_best[t] += running_best;
        }

        for (std::size_t d = 0; d < kAllDimensions.size(); ++d) {
            const int estimated = kind == PolicyKind::Random
                                      ? best_config.arm(kAllDimensions[d]).index
                                      : policy.best_arm(kAllDimensions[d]).index;
            if (estimated == true_best[d]) ++correct[d];
        }
    }

    for (double& v : report.mean_cumulative_best) v /= options.repeats;
    for (std::size_t d = 0; d < 3; ++d) {
        report.best_arm_accuracy[d] =
            static_cast<double>(correct[d]) / static_cast<double>(options.repeats);
    }
    return report;
}

}  // namespace codirector
