#include "codirector/refinement.hpp"

#include <algorithm>

#include "codirector/errors.hpp"

namespace codirector {

using nlohmann::json;

std::string termination_name(Termination t) {
    return t == Termination::ThresholdMet ? "threshold_met" : "budget_exhausted";
}

json RefinementTrace::to_json() const {
    json doc;
    doc["best_index"] = best_index;
    doc["terminated_by"] = termination_name(terminated_by);
    doc["attempts"] = json::array();
    for (const auto& attempt : attempts) {
        doc["attempts"].push_back({{"artifact", attempt.artifact},
                                   {"score", attempt.report.score},
                                   {"feedback", attempt.report.feedback},
                                   {"actionable_feedback", attempt.report.actionable_feedback},
                                   {"revised_prompt", attempt.revised_prompt}});
    }
    return doc;
}

std::string revise_prompt(const std::string& initial_prompt, const VerifierReport& report) {
    return initial_prompt + "\n\nRevision guidance from the last review: " +
           report.actionable_feedback;
}

namespace {

int best_attempt_index(const std::vector<RefinementAttempt>& attempts) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(attempts.size()); ++i) {
        if (attempts[i].report.score > attempts[best].report.score) best = i;
    }
    return best;
}

}  // namespace

std::pair<std::string, RefinementTrace> refine(const std::string& initial_prompt,
                                               const ArtifactGenerator& generate,
                                               const ArtifactVerifier& verify,
                                               const RefinementConfig& config) {
    if (config.max_retries < 0) throw ValidationError("max_retries must be non-negative");
    RefinementTrace trace;
    std::string prompt = initial_prompt;
    while (true) {
        RefinementAttempt attempt;
        attempt.artifact = generate(prompt);
        attempt.report = verify(attempt.artifact);
        trace.attempts.push_back(std::move(attempt));
        if (trace.attempts.back().report.score >= config.threshold) {
            trace.terminated_by = Termination::ThresholdMet;
            break;
        }
        if (static_cast<int>(trace.attempts.size()) >= config.max_retries + 1) {
            trace.terminated_by = Termination::BudgetExhausted;
            break;
        }
        prompt = revise_prompt(initial_prompt, trace.attempts.back().report);
        trace.attempts.back().revised_prompt = prompt;
    }
    trace.best_index = best_attempt_index(trace.attempts);
    return {trace.attempts[trace.best_index].artifact, trace};
}

VerifierReport judged_with_one_reask(
    Backend& backend, CapabilityRequest request,
    const std::function<VerifierReport(const std::string&)>& parse) {
    const auto first = backend.invoke(request);
    try {
        return parse(first.text);
    } catch (const SchemaError&) {
        request.prompt +=
            "\n\nREMINDER: respond with a single bare JSON object matching the documented "
            "schema, with no markdown fences or prose.";
        const auto second = backend.invoke(request);
        return parse(second.text);
    }
}

std::pair<Storyline, RefinementTrace> refine_storyline(const CreativeBrief& brief,
                                                       const AgentDirectives& directives,
                                                       const ConditioningContext& context,
                                                       Backend& backend,
                                                       const RefinementConfig& config) {
    if (brief.text.empty()) throw ValidationError("creative brief is empty");

    const std::string initial_prompt =
        directives.storyline_directive + "\n\nBrief:\n" + brief.text;

    ArtifactGenerator generate = [&](const std::string& prompt) {
        CapabilityRequest request;
        request.capability = Capability::Text;
        request.prompt = prompt;
        request.params = {{"task", "storyline"},
                          {"product", context.constraints.product},
                          {"brand", context.constraints.brand}};
        const auto response = backend.invoke(request);
        // validate eagerly so a malformed generation surfaces here
        Storyline::from_json(json::parse(extract_json_object(response.text)));
        return response.text;
    };

    ArtifactVerifier verify = [&](const std::string& artifact) {
        CapabilityRequest request;
        request.capability = Capability::Judge;
        request.prompt = "Evaluate this storyline against the user prompt.\n\nStoryline:\n" +
                         artifact + "\n\nDirective:\n" + directives.storyline_directive;
        request.params = {{"task", "judge_storyline"}};
        return judged_with_one_reask(backend, request, parse_storyline_report);
    };

    auto [artifact, trace] = refine(initial_prompt, generate, verify, config);
    return {Storyline::from_json(json::parse(extract_json_object(artifact))), std::move(trace)};
}

std::pair<std::vector<Keyframe>, RefinementTrace> refine_keyframes(
    std::vector<Keyframe> keyframes, const std::vector<VisualAsset>& assets,
    const ConditioningContext& context, const AgentDirectives& directives, Backend& backend,
    BlobStore& store, const RefinementConfig& config) {
    if (keyframes.empty()) throw ValidationError("keyframe sequence is empty");
    if (config.max_retries < 0) throw ValidationError("max_retries must be non-negative");

    RefinementTrace trace;
    std::vector<std::vector<Keyframe>> snapshots;

    auto verify_round = [&]() {
        CapabilityRequest request;
        request.capability = Capability::Judge;
        request.prompt =
            "Jointly evaluate this keyframe sequence for consistency and narrative flow.\n\n"
            "Directive:\n" +
            directives.keyframe_directive;
        for (const auto& frame : keyframes) request.attachments.push_back(frame.image_ref);
        request.params = {{"task", "judge_keyframes"}};
        return judged_with_one_reask(backend, request, parse_keyframe_report);
    };

    while (true) {
        VerifierReport report = verify_round();
        std::vector<int> flags = report.flagged_indices.value_or(std::vector<int>{});
        for (int idx : flags) {
            if (idx < 0 || idx >= static_cast<int>(keyframes.size())) {
                throw SchemaError("flagged keyframe index " + std::to_string(idx) +
                                  " outside sequence of " + std::to_string(keyframes.size()));
            }
        }

        RefinementAttempt attempt;
        for (const auto& frame : keyframes) attempt.artifact += frame.image_ref + "\n";
        attempt.report = report;
        snapshots.push_back(keyframes);
        trace.attempts.push_back(std::move(attempt));

        if (report.score >= config.threshold) {
            trace.terminated_by = Termination::ThresholdMet;
            break;
        }
        if (static_cast<int>(trace.attempts.size()) >= config.max_retries + 1) {
            trace.terminated_by = Termination::BudgetExhausted;
            break;
        }

        // A failing round with an empty flag set is a verifier inconsistency;
        // regenerate everything.
        if (flags.empty()) {
            flags.resize(keyframes.size());
            for (int i = 0; i < static_cast<int>(flags.size()); ++i) flags[i] = i;
        }
        for (int idx : flags) {
            Keyframe& frame = keyframes[idx];
            frame.prompt = revise_prompt(frame.prompt, report);
            CapabilityRequest request;
            request.capability = Capability::Image;
            request.prompt = frame.prompt;
            for (const auto& asset : assets) {
                for (const auto& ref : asset.image_refs) request.attachments.push_back(ref);
            }
            frame.image_ref = store.put(backend.invoke(request).text);
        }
        trace.attempts.back().revised_prompt = revise_prompt("keyframe sequence", report);
    }

    trace.best_index = 0;
    for (int i = 1; i < static_cast<int>(trace.attempts.size()); ++i) {
        if (trace.attempts[i].report.score > trace.attempts[trace.best_index].report.score) {
            trace.best_index = i;
        }
    }
    return {snapshots[trace.best_index], std::move(trace)};
}

}  // namespace codirector
