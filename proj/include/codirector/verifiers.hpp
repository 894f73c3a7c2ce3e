#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "codirector/bandit.hpp"

namespace codirector {

// Parsed judge output for the storyline, keyframe, and final-video rubrics.
struct VerifierReport {
    struct Efficacy {
        double creative_strategy = 0.0;
        double narrative_mode = 0.0;
        double aesthetic_archetype = 0.0;
    };

    std::map<std::string, double> breakdown;  // dimension name -> [0,20]
    double score = 0.0;                       // must equal sum of breakdown
    std::string feedback;
    std::string actionable_feedback;
    std::optional<std::string> primary_fault;  // "storyline" | "image" | "video"
    std::optional<Efficacy> efficacy;
    std::optional<std::map<std::string, std::string>> efficacy_justifications;
    std::optional<std::vector<int>> flagged_indices;  // keyframe reports only
};

struct BenchScores {
    double vaf = 0.0, da = 0.0, ma = 0.0, vq = 0.0;
    std::string vaf_reasoning, da_reasoning, ma_reasoning, vq_reasoning;
};

// Strips code fences / leading prose down to the first balanced top-level
// JSON object. Judges are told to emit bare objects but stochastically
// disobey.
std::string extract_json_object(const std::string& document);

VerifierReport parse_storyline_report(const std::string& document);
VerifierReport parse_keyframe_report(const std::string& document);
VerifierReport parse_video_report(const std::string& document);
BenchScores parse_bench_report(const std::string& document);

nlohmann::json serialize_storyline_report(const VerifierReport& report);
nlohmann::json serialize_keyframe_report(const VerifierReport& report);
nlohmann::json serialize_video_report(const VerifierReport& report);
nlohmann::json serialize_bench_report(const BenchScores& scores);

// Pulls the bandit reward out of a final-video report. Throws ContractError
// if the efficacy triple is absent.
FactoredReward extract_reward(const VerifierReport& report);

// Rubric dimension names, in canonical order.
const std::vector<std::string>& storyline_breakdown_keys();
const std::vector<std::string>& video_breakdown_keys();

}  // namespace codirector
