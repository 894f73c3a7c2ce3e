#pragma once

#include <array>
#include <vector>

#include <nlohmann/json.hpp>

#include "codirector/creative_space.hpp"

namespace codirector {

enum class RewardMode { Factored, Scalar };

std::string reward_mode_name(RewardMode m);
RewardMode reward_mode_from_name(const std::string& name);

struct ArmStats {
    double pulls = 0.0;   // pseudo-counts allowed, so real-valued
    double value = 0.0;   // normalized mean reward in [0,1]
};

// Per-dimension efficacy components plus the holistic score, all on [0,100].
struct FactoredReward {
    double r_cs = 0.0;
    double r_nm = 0.0;
    double r_aa = 0.0;
    double aggregate = 0.0;

    double component(CreativeDimension d) const;
};

struct WarmStartPrior {
    CreativeDimension dimension;
    int arm_index = 0;
    double prior_value = 0.0;   // [0,100] scale, normalized on application
    double prior_weight = 1.0;  // pseudo-pull count, must be > 0
};

// Standard UCB1 index. Untried arms get +infinity so they are always explored
// first.
double ucb_index(double value, double pulls, double total_pulls, double c);

// Factored UCB1 policy over the three creative dimensions. select() and
// update() must be externally serialized (single writer); const accessors may
// run concurrently with no writer.
class BanditPolicy {
public:
    static BanditPolicy create(double exploration_constant, RewardMode mode);

    void warm_start(const std::vector<WarmStartPrior>& priors);

    // Per dimension, argmax of the UCB index; ties broken by lowest arm index.
    CreativeConfig select() const;

    // Factored mode: each selected arm absorbs its own reward component.
    // Scalar mode: all three selected arms absorb the aggregate.
    void update(const CreativeConfig& config, const FactoredReward& reward);

    // Empirical-value argmax among pulled arms; throws if the whole dimension
    // is untried.
    Arm best_arm(CreativeDimension d) const;

    const ArmStats& stats(CreativeDimension d, int arm_index) const;
    double total_pulls(CreativeDimension d) const;
    double exploration_constant() const { return exploration_constant_; }
    RewardMode mode() const { return mode_; }

    nlohmann::json to_json() const;
    static BanditPolicy from_json(const nlohmann::json& doc);

private:
    BanditPolicy() = default;

    std::array<std::vector<ArmStats>, 3> per_dimension_;
    std::array<double, 3> total_pulls_{0.0, 0.0, 0.0};
    double exploration_constant_ = 0.0;
    RewardMode mode_ = RewardMode::Factored;

    static std::size_t dim_slot(CreativeDimension d);
};

}  // namespace codirector
