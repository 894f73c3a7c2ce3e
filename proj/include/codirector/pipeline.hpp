#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "codirector/artifacts.hpp"
#include "codirector/backends.hpp"
#include "codirector/bandit.hpp"
#include "codirector/context.hpp"
#include "codirector/directions.hpp"
#include "codirector/refinement.hpp"
#include "codirector/store.hpp"
#include "codirector/verifiers.hpp"

namespace codirector {

struct ImageInput {
    std::string ref;          // blob reference (already stored)
    std::string hint = "other";  // annotation hint: product, logo, ...
};

struct PipelineOptions {
    int scenes = 4;          // N shots
    double runtime_s = 12.0; // total video length
    RefinementConfig storyline_refinement{75.0, 3};
    RefinementConfig keyframe_refinement{75.0, 3};
    // External muxer invocation with {manifest} and {output} placeholders;
    // unset means the final video carries the manifest only.
    std::optional<std::string> muxer_command;
};

// One optimization iteration with all intermediates.
struct RunRecord {
    int iteration = 0;
    CreativeConfig config;
    AgentDirectives directives;
    CreativeBrief brief;
    Storyline storyline;
    RefinementTrace storyline_trace;
    Storyboard storyboard;
    std::vector<VisualAsset> assets;
    std::vector<Keyframe> keyframes;
    RefinementTrace keyframe_trace;
    std::vector<Clip> clips;
    AudioTrack audio;
    FinalVideo final_video;
    VerifierReport report;
    FactoredReward reward;
    uint64_t seed = 0;
    bool failed = false;
    std::string error;
};

std::pair<StructuredConstraints, std::vector<AnnotatedVisual>> ingest(
    const std::string& user_prompt, const std::vector<ImageInput>& images, Backend& backend);

CreativeBrief make_brief(const ConditioningContext& context, Backend& backend);

Storyboard make_storyboard(const Storyline& storyline, const CreativeConfig& config,
                           const AgentDirectives& directives, Backend& backend,
                           const PipelineOptions& options);

// Entities mentioned by the storyline but not matched (case-insensitive
// substring) against the annotated reference visuals are generated.
std::vector<VisualAsset> build_assets(const Storyline& storyline,
                                      const ConditioningContext& context, Backend& backend,
                                      BlobStore& store);

std::vector<Keyframe> gen_keyframes(const Storyboard& board,
                                    const std::vector<VisualAsset>& assets,
                                    const ConditioningContext& context,
                                    const AgentDirectives& directives, Backend& backend,
                                    BlobStore& store);

std::vector<Clip> gen_clips(const Storyboard& board, const std::vector<Keyframe>& keyframes,
                            const ConditioningContext& context,
                            const AgentDirectives& directives, Backend& backend,
                            BlobStore& store);

AudioTrack gen_audio(const Storyboard& board, const ConditioningContext& context,
                     Backend& tts_backend, Backend& music_backend, BlobStore& store);

FinalVideo assemble(const Storyboard& board, std::vector<Clip> clips, const AudioTrack& audio,
                    BlobStore& store, const std::optional<std::string>& muxer_command);

// Structural checks (artifact DAG, entity closure, duration conservation) on
// a successful record; throws ValidationError on any violation.
void validate_run_record(const RunRecord& record, const PipelineOptions& options,
                         const std::vector<AnnotatedVisual>& reference_visuals);

struct ScenarioInput {
    std::string user_prompt;
    std::vector<ImageInput> images;
};

struct RunResult {
    std::vector<RunRecord> records;
    int best_index = -1;  // argmax aggregate among judged iterations, earliest tie
    StructuredConstraints constraints;
    std::vector<AnnotatedVisual> visuals;
};

// The T-iteration global optimization loop: select -> synthesize directions
// -> pre-production -> production -> assembly -> judge -> update. Stage
// failures abort the iteration without a bandit update.
RunResult run(const ScenarioInput& input, int iterations, BanditPolicy& policy,
              Backend& backend, const PipelineOptions& options, uint64_t seed,
              const std::filesystem::path& run_dir, bool warm_start_enabled);

// Parses a warm-start prior document ({"priors": [...]}).
std::vector<WarmStartPrior> parse_warm_start_priors(const std::string& document,
                                                    double prior_weight = 1.0);

}  // namespace codirector
