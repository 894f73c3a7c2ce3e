#include "codirector/bandit.hpp"

#include <cmath>
#include <limits>

#include "codirector/errors.hpp"

namespace codirector {

std::string reward_mode_name(RewardMode m) {
    return m == RewardMode::Factored ? "factored" : "scalar";
}

RewardMode reward_mode_from_name(const std::string& name) {
    if (name == "factored") return RewardMode::Factored;
    if (name == "scalar") return RewardMode::Scalar;
    throw ValidationError("unknown reward mode: " + name);
}

double FactoredReward::component(CreativeDimension d) const {
    switch (d) {
        case CreativeDimension::CreativeStrategy: return r_cs;
        case CreativeDimension::NarrativeMode: return r_nm;
        case CreativeDimension::AestheticArchetype: return r_aa;
    }
    throw ValidationError("unknown creative dimension");
}

double ucb_index(double value, double pulls, double total_pulls, double c) {
    if (pulls <= 0.0) return std::numeric_limits<double>::infinity();
    return value + c * std::sqrt(std::log(total_pulls) / pulls);
}

std::size_t BanditPolicy::dim_slot(CreativeDimension d) {
    return static_cast<std::size_t>(d);
}

BanditPolicy BanditPolicy::create(double exploration_constant, RewardMode mode) {
    if (!(exploration_constant > 0.0)) {
        throw ValidationError("exploration constant must be positive");
    }
    BanditPolicy p;
    p.exploration_constant_ = exploration_constant;
    p.mode_ = mode;
    for (auto d : kAllDimensions) {
        p.per_dimension_[dim_slot(d)].assign(arm_count(d), ArmStats{});
    }
    return p;
}

void BanditPolicy::warm_start(const std::vector<WarmStartPrior>& priors) {
    for (const auto& prior : priors) {
        auto& arms = per_dimension_[dim_slot(prior.dimension)];
        if (prior.arm_index < 0 || prior.arm_index >= static_cast<int>(arms.size())) {
            throw ValidationError("warm-start prior references unknown arm " +
                                  std::to_string(prior.arm_index) + " in " +
                                  dimension_name(prior.dimension));
        }
        if (!(prior.prior_weight > 0.0)) {
            throw ValidationError("warm-start prior weight must be positive");
        }
        if (prior.prior_value < 0.0 || prior.prior_value > 100.0) {
            throw ValidationError("warm-start prior value must lie in [0,100]");
        }
        auto& stats = arms[prior.arm_index];
        total_pulls_[dim_slot(prior.dimension)] += prior.prior_weight - stats.pulls;
        stats.value = prior.prior_value / 100.0;
        stats.pulls = prior.prior_weight;
    }
}

CreativeConfig BanditPolicy::select() const {
    std::array<int, 3> chosen{};
    for (auto d : kAllDimensions) {
        const auto& arms = per_dimension_[dim_slot(d)];
        const double total = total_pulls_[dim_slot(d)];
        int best = 0;
        double best_index = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < static_cast<int>(arms.size()); ++i) {
            const double idx = ucb_index(arms[i].value, arms[i].pulls, total,
                                         exploration_constant_);
            if (idx > best_index) {
                best_index = idx;
                best = i;
            }
        }
        chosen[dim_slot(d)] = best;
    }
    return CreativeConfig::from_indices(chosen[0], chosen[1], chosen[2]);
}

void BanditPolicy::update(const CreativeConfig& config, const FactoredReward& reward) {
    for (double r : {reward.r_cs, reward.r_nm, reward.r_aa, reward.aggregate}) {
        if (r < 0.0 || r > 100.0) {
            throw ValidationError("reward component outside [0,100]");
        }
    }
    for (auto d : kAllDimensions) {
        const double raw =
            mode_ == RewardMode::Factored ? reward.component(d) : reward.aggregate;
        const double sample = raw / 100.0;
        auto& stats = per_dimension_[dim_slot(d)][config.index(d)];
        stats.value = (stats.value * stats.pulls + sample) / (stats.pulls + 1.0);
        stats.pulls += 1.0;
        total_pulls_[dim_slot(d)] += 1.0;
    }
}

Arm BanditPolicy::best_arm(CreativeDimension d) const {
    const auto& arms = per_dimension_[dim_slot(d)];
    int best = -1;
    double best_value = -1.0;
    for (int i = 0; i < static_cast<int>(arms.size()); ++i) {
        if (arms[i].pulls > 0.0 && arms[i].value > best_value) {
            best_value = arms[i].value;
            best = i;
        }
    }
    if (best < 0) {
        throw ValidationError("best arm not yet determined: no pulled arms in " +
                              dimension_name(d));
    }
    return arm_at(d, best);
}

const ArmStats& BanditPolicy::stats(CreativeDimension d, int arm_index) const {
    const auto& arms = per_dimension_[dim_slot(d)];
    if (arm_index < 0 || arm_index >= static_cast<int>(arms.size())) {
        throw ValidationError("arm index out of range");
    }
    return arms[arm_index];
}

double BanditPolicy::total_pulls(CreativeDimension d) const {
    return total_pulls_[dim_slot(d)];
}

nlohmann::json BanditPolicy::to_json() const {
    nlohmann::json doc;
    doc["version"] = 1;
    doc["arm_registry_version"] = kArmRegistryVersion;
    doc["exploration_constant"] = exploration_constant_;
    doc["mode"] = reward_mode_name(mode_);
    for (auto d : kAllDimensions) {
        nlohmann::json dim;
        dim["total_pulls"] = total_pulls_[dim_slot(d)];
        for (const auto& stats : per_dimension_[dim_slot(d)]) {
            dim["arms"].push_back({{"pulls", stats.pulls}, {"value", stats.value}});
        }
        doc["dimensions"][dimension_name(d)] = dim;
    }
    return doc;
}

BanditPolicy BanditPolicy::from_json(const nlohmann::json& doc) {
    if (!doc.contains("version") || doc.at("version").get<int>() != 1) {
        throw SchemaError("unsupported policy document version");
    }
    auto p = create(doc.at("exploration_constant").get<double>(),
                    reward_mode_from_name(doc.at("mode").get<std::string>()));
    for (auto d : kAllDimensions) {
        const auto& dim = doc.at("dimensions").at(dimension_name(d));
        const auto& arms = dim.at("arms");
        if (static_cast<int>(arms.size()) != arm_count(d)) {
            throw SchemaError("policy document arm count mismatch in " + dimension_name(d));
        }
        for (int i = 0; i < static_cast<int>(arms.size()); ++i) {
            auto& stats = p.per_dimension_[dim_slot(d)][i];
            stats.pulls = arms[i].at("pulls").get<double>();
            stats.value = arms[i].at("value").get<double>();
        }
        p.total_pulls_[dim_slot(d)] = dim.at("total_pulls").get<double>();
    }
    return p;
}

}  // namespace codirector
