#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "codirector/artifacts.hpp"
#include "codirector/backends.hpp"
#include "codirector/context.hpp"
#include "codirector/store.hpp"
#include "codirector/verifiers.hpp"

namespace codirector {

struct RefinementConfig {
    double threshold = 75.0;  // tau on the 0-100 scale
    int max_retries = 3;
};

enum class Termination { ThresholdMet, BudgetExhausted };

std::string termination_name(Termination t);

struct RefinementAttempt {
    std::string artifact;  // artifact content or reference
    VerifierReport report;
    std::string revised_prompt;  // prompt that produced the NEXT attempt; empty on the last
};

struct RefinementTrace {
    std::vector<RefinementAttempt> attempts;
    int best_index = 0;  // maximal score; ties go to the earliest attempt
    Termination terminated_by = Termination::ThresholdMet;

    double best_score() const { return attempts.at(best_index).report.score; }
    nlohmann::json to_json() const;
};

using ArtifactGenerator = std::function<std::string(const std::string& prompt)>;
using ArtifactVerifier = std::function<VerifierReport(const std::string& artifact)>;

// Threshold-gated generate -> verify -> revise loop returning the best
// attempt. Trace length never exceeds max_retries + 1.
std::pair<std::string, RefinementTrace> refine(const std::string& initial_prompt,
                                               const ArtifactGenerator& generate,
                                               const ArtifactVerifier& verify,
                                               const RefinementConfig& config);

// Builds the next-iteration prompt from the verifier's actionable feedback.
std::string revise_prompt(const std::string& initial_prompt, const VerifierReport& report);

std::pair<Storyline, RefinementTrace> refine_storyline(const CreativeBrief& brief,
                                                       const AgentDirectives& directives,
                                                       const ConditioningContext& context,
                                                       Backend& backend,
                                                       const RefinementConfig& config);

// Joint verification each round; only flagged frames are regenerated, and a
// failing round with no flags conservatively regenerates everything.
std::pair<std::vector<Keyframe>, RefinementTrace> refine_keyframes(
    std::vector<Keyframe> keyframes, const std::vector<VisualAsset>& assets,
    const ConditioningContext& context, const AgentDirectives& directives, Backend& backend,
    BlobStore& store, const RefinementConfig& config);

// Invokes the judge once, and on malformed output re-asks exactly once with a
// format reminder before giving up.
VerifierReport judged_with_one_reask(
    Backend& backend, CapabilityRequest request,
    const std::function<VerifierReport(const std::string&)>& parse);

}  // namespace codirector
