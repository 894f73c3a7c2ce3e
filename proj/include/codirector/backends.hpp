#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "codirector/bandit.hpp"
#include "codirector/creative_space.hpp"

namespace codirector {

enum class Capability { Text, Image, Video, Speech, Music, Judge };

std::string capability_name(Capability c);
Capability capability_from_name(const std::string& name);

struct CapabilityRequest {
    Capability capability = Capability::Text;
    std::string prompt;
    std::vector<std::string> attachments;  // blob references
    std::map<std::string, std::string> params;
};

struct CapabilityResponse {
    std::string text;  // structured document, or stub media content
};

class Backend {
public:
    virtual ~Backend() = default;
    // Must be safe to call from concurrent scene-level tasks.
    virtual CapabilityResponse invoke(const CapabilityRequest& request) = 0;
};

// --- deterministic primitives -------------------------------------------------

std::string sha256_hex(std::string_view data);

// Counter-based generator: the noise for a given (seed, draw, stream) is
// independent of call order, so concurrent scene tasks stay reproducible.
uint64_t mix64(uint64_t x);
double uniform01(uint64_t key);
double gaussian01(uint64_t seed, uint64_t draw, uint64_t stream);

// Stable content hash of a request, used as the simulation key.
std::string request_fingerprint(const CapabilityRequest& request);

// --- simulation environment ---------------------------------------------------

// Parametric ground-truth reward environment standing in for the judge in
// offline experiments. aggregate = clip(bias + w . r, 0, 100); the default
// weights make it the plain mean of the three components.
struct SimEnvironment {
    std::array<std::vector<double>, 3> true_values;  // per dimension, [0,100]
    double context_modifier = 0.0;
    double noise_sigma = 0.0;
    uint64_t seed = 0;
    std::array<double, 3> aggregate_weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    double aggregate_bias = 0.0;

    void validate() const;  // list lengths must match arm counts (3,3,4)
    double true_value(CreativeDimension d, int arm_index) const;
    int true_best_arm(CreativeDimension d) const;
    double noiseless_aggregate(const CreativeConfig& config) const;

    nlohmann::json to_json() const;
    static SimEnvironment from_json(const nlohmann::json& doc);
    static SimEnvironment load(const std::string& path);
};

FactoredReward sim_reward(const CreativeConfig& config, const SimEnvironment& env,
                          long draw_index);

// Emits a schema-valid final-video report whose efficacy triple equals the
// sim_reward components and whose breakdown sums exactly to the aggregate.
std::string sim_judge_document(const CreativeConfig& config, const SimEnvironment& env,
                               long draw_index);

// --- simulation backend -------------------------------------------------------

// Pure function of (request fingerprint, env seed), with small test hooks for
// scripting judge behavior.
class SimBackend : public Backend {
public:
    explicit SimBackend(SimEnvironment env);

    CapabilityResponse invoke(const CapabilityRequest& request) override;

    const SimEnvironment& environment() const { return env_; }

    // Test hooks: consumed front-first by judge tasks; empty means the
    // deterministic path.
    std::deque<double> scripted_judge_scores;
    std::deque<std::vector<int>> scripted_flags;
    int malform_next_judge = 0;  // emit non-JSON for the next N judge calls

private:
    SimEnvironment env_;

    CapabilityResponse handle_text(const CapabilityRequest& request);
    CapabilityResponse handle_judge(const CapabilityRequest& request);
    CapabilityResponse stub_media(const CapabilityRequest& request, const char* kind);
    double next_judge_score(const CapabilityRequest& request, double lo, double hi);
};

// --- HTTP backend -------------------------------------------------------------

struct CapabilityEndpoint {
    std::string endpoint;  // full URL
    std::string model;
    double timeout_s = 120.0;
    int retries = 3;       // total attempt budget
    int max_in_flight = 4;
    std::string api_key_env;  // credentials only ever come from the environment
};

struct HttpBackendConfig {
    std::map<Capability, CapabilityEndpoint> capabilities;
    double backoff_initial_s = 0.5;
    double backoff_factor = 2.0;

    static HttpBackendConfig from_json(const nlohmann::json& doc);
    static HttpBackendConfig load(const std::string& path);
};

class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig config);
    ~HttpBackend() override;

    CapabilityResponse invoke(const CapabilityRequest& request) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace codirector
