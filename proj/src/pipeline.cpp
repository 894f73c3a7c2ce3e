#include "codirector/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include "codirector/errors.hpp"

namespace codirector {

using nlohmann::json;

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

json parse_backend_json(const std::string& text, const char* what) {
    json doc = json::parse(extract_json_object(text), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw SchemaError(std::string(what) + " output is not a JSON object");
    }
    return doc;
}

}  // namespace

std::pair<StructuredConstraints, std::vector<AnnotatedVisual>> ingest(
    const std::string& user_prompt, const std::vector<ImageInput>& images, Backend& backend) {
    if (user_prompt.empty()) throw IngestionError("user prompt is empty");

    CapabilityRequest request;
    request.capability = Capability::Text;
    request.prompt = user_prompt;
    request.params = {{"task", "extract_constraints"}};
    const auto response = backend.invoke(request);
    auto constraints =
        StructuredConstraints::from_json(parse_backend_json(response.text, "constraint extraction"));
    constraints.validate();

    std::vector<AnnotatedVisual> visuals;
    for (const auto& image : images) {
        CapabilityRequest annotate;
        annotate.capability = Capability::Text;
        annotate.prompt = "Caption this reference visual and assign its semantic role.";
        annotate.attachments = {image.ref};
        annotate.params = {{"task", "annotate"}, {"hint", image.hint}};
        const auto annotated = backend.invoke(annotate);
        const json doc = parse_backend_json(annotated.text, "visual annotation");
        AnnotatedVisual visual;
        visual.image_ref = image.ref;
        visual.caption = doc.at("caption").get<std::string>();
        visual.role = visual_role_from_name(doc.value("role", "other"));
        visuals.push_back(std::move(visual));
    }
    return {std::move(constraints), std::move(visuals)};
}

CreativeBrief make_brief(const ConditioningContext& context, Backend& backend) {
    context.constraints.validate();
    CapabilityRequest request;
    request.capability = Capability::Text;
    request.prompt = "Research this product and audience, expanding the constraints into "
                     "localized cultural resonance.";
    request.params = {{"task", "brief"},
                      {"brand", context.constraints.brand},
                      {"product", context.constraints.product},
                      {"gender", context.constraints.gender},
                      {"age", context.constraints.age},
                      {"location", context.constraints.location},
                      {"interest", context.constraints.interest}};
    const auto response = backend.invoke(request);
    return CreativeBrief::from_json(parse_backend_json(response.text, "brief"));
}

Storyboard make_storyboard(const Storyline& storyline, const CreativeConfig& config,
                           const AgentDirectives& directives, Backend& backend,
                           const PipelineOptions& options) {
    storyline.validate();
    CapabilityRequest request;
    request.capability = Capability::Text;
    request.prompt = "Expand this storyline into a storyboard.\n\nStoryline:\n" +
                     storyline.to_json().dump() + "\n\nDirective:\n" +
                     directives.keyframe_directive;
    request.params = {{"task", "storyboard"},
                      {"n_scenes", std::to_string(options.scenes)},
                      {"runtime_s", std::to_string(options.runtime_s)},
                      {"aa_label", config.aa.label},
                      {"entities", json(storyline.entities).dump()},
                      {"product", storyline.entities.size() > 1 ? storyline.entities[1] : ""}};

    auto parse = [](const std::string& text) {
        return Storyboard::from_json(parse_backend_json(text, "storyboard"));
    };
    try {
        return parse(backend.invoke(request).text);
    } catch (const SchemaError&) {
        request.prompt += "\n\nREMINDER: respond with a single bare JSON object matching the "
                          "storyboard schema.";
        return parse(backend.invoke(request).text);
    }
}

std::vector<VisualAsset> build_assets(const Storyline& storyline,
                                      const ConditioningContext& context, Backend& backend,
                                      BlobStore& store) {
    std::vector<VisualAsset> assets;
    std::set<std::string> seen;
    for (const auto& entity : storyline.entities) {
        if (!seen.insert(entity).second) continue;
        VisualAsset asset;
        asset.entity = entity;
        asset.kind = lower(entity).find("protagonist") != std::string::npos
                         ? AssetKind::Character
                         : AssetKind::Prop;
        const std::string needle = lower(entity);
        for (const auto& visual : context.visuals) {
            if (lower(visual.caption).find(needle) != std::string::npos ||
                visual_role_name(visual.role) == needle) {
                asset.image_refs.push_back(visual.image_ref);
            }
        }
        if (asset.image_refs.empty()) {
            // Absent from the reference visuals: generate a multi-angle
            // reference collage as one composite image request.
            CapabilityRequest request;
            request.capability = Capability::Image;
            request.prompt = "Multi-angle reference collage of '" + entity + "' for " +
                             context.constraints.product + " targeting " +
                             context.constraints.gender + " aged " + context.constraints.age +
                             " in " + context.constraints.location + ".";
            request.params = {{"entity", entity}};
            asset.image_refs.push_back(store.put(backend.invoke(request).text));
            asset.generated = true;
        }
        assets.push_back(std::move(asset));
    }
    return assets;
}

namespace {

const VisualAsset* find_asset(const std::vector<VisualAsset>& assets,
                              const std::string& entity) {
    for (const auto& asset : assets) {
        if (asset.entity == entity) return &asset;
    }
    return nullptr;
}

}  // namespace

std::vector<Keyframe> gen_keyframes(const Storyboard& board,
                                    const std::vector<VisualAsset>& assets,
                                    const ConditioningContext& context,
                                    const AgentDirectives& directives, Backend& backend,
                                    BlobStore& store) {
    board.validate();
    std::vector<Keyframe> keyframes;
    for (const auto& scene : board.scenes) {
        try {
            Keyframe frame;
            frame.scene_index = scene.index;
            frame.prompt = directives.keyframe_directive + "\n\nScene: " + scene.descriptors +
                           "\nCamera: " + scene.camera;
            CapabilityRequest request;
            request.capability = Capability::Image;
            for (const auto& entity : scene.entity_flags) {
                if (const VisualAsset* asset = find_asset(assets, entity)) {
                    for (const auto& ref : asset->image_refs) {
                        request.attachments.push_back(ref);
                    }
                }
                for (const auto& visual : context.visuals) {
                    if (lower(visual.caption).find(lower(entity)) != std::string::npos) {
                        frame.prompt += "\nReference: " + visual.caption;
                    }
                }
                if (const VisualAsset* asset = find_asset(assets, entity); asset != nullptr) {
                    frame.prompt += "\nEntity asset: " + entity + " (" +
                                    asset_kind_name(asset->kind) + ")";
                }
            }
            request.prompt = frame.prompt;
            frame.image_ref = store.put(backend.invoke(request).text);
            keyframes.push_back(std::move(frame));
        } catch (const std::exception& e) {
            throw TransportError("keyframe generation failed for scene " +
                                 std::to_string(scene.index) + ": " + e.what());
        }
    }
    return keyframes;
}

std::vector<Clip> gen_clips(const Storyboard& board, const std::vector<Keyframe>& keyframes,
                            const ConditioningContext& context,
                            const AgentDirectives& directives, Backend& backend,
                            BlobStore& store) {
    (void)context;
    board.validate();
    std::vector<Clip> clips;
    for (const auto& scene : board.scenes) {
        const auto it = std::find_if(keyframes.begin(), keyframes.end(), [&](const Keyframe& k) {
            return k.scene_index == scene.index;
        });
        if (it == keyframes.end()) {
            throw ValidationError("missing keyframe for scene " + std::to_string(scene.index));
        }
        try {
            CapabilityRequest request;
            request.capability = Capability::Video;
            request.prompt = directives.video_directive + "\n\nScene: " + scene.descriptors +
                             "\nCamera: " + scene.camera +
                             "\nDuration: " + std::to_string(scene.duration_s) + "s";
            request.attachments = {it->image_ref};
            request.params = {{"duration_s", std::to_string(scene.duration_s)}};
            Clip clip;
            clip.scene_index = scene.index;
            clip.duration_s = scene.duration_s;
            clip.video_ref = store.put(backend.invoke(request).text);
            clips.push_back(std::move(clip));
        } catch (const std::exception& e) {
            throw TransportError("clip generation failed for scene " +
                                 std::to_string(scene.index) + ": " + e.what());
        }
    }
    return clips;
}

AudioTrack gen_audio(const Storyboard& board, const ConditioningContext& context,
                     Backend& tts_backend, Backend& music_backend, BlobStore& store) {
    AudioTrack track;
    const auto& directives = board.audio_directives;
    if (directives.voiceover.empty() && directives.tempo.empty() && directives.mood.empty()) {
        throw ValidationError("storyboard carries no audio directives");
    }
    const double total = board.total_duration_s();

    const bool has_voiceover = !directives.voiceover.empty();
    if (has_voiceover) {
        try {
            CapabilityRequest request;
            request.capability = Capability::Speech;
            request.prompt = directives.voiceover;
            // voice-selection hints for the TTS backend; the demographic
            // mapping itself is a deployment concern
            request.params = {{"gender_hint", context.constraints.gender},
                              {"age_hint", context.constraints.age}};
            track.voiceover_ref = store.put(tts_backend.invoke(request).text);
        } catch (const std::exception& e) {
            throw TransportError(std::string("voiceover synthesis failed: ") + e.what());
        }
    }
    try {
        CapabilityRequest request;
        request.capability = Capability::Music;
        request.prompt = "Global music bed, tempo " + directives.tempo + ", mood " +
                         directives.mood + ", length " + std::to_string(total) + "s.";
        track.music_ref = store.put(music_backend.invoke(request).text);
    } catch (const std::exception& e) {
        throw TransportError(std::string("music synthesis failed: ") + e.what());
    }

    track.mix_manifest = {{"total_s", total},
                          {"voiceover_present", has_voiceover},
                          {"segments",
                           json::array({json{{"kind", "music"}, {"in_s", 0.0}, {"out_s", total}}})}};
    if (has_voiceover) {
        track.mix_manifest["segments"].push_back(
            {{"kind", "voiceover"}, {"in_s", 0.0}, {"out_s", total}});
    }
    return track;
}

FinalVideo assemble(const Storyboard& board, std::vector<Clip> clips, const AudioTrack& audio,
                    BlobStore& store, const std::optional<std::string>& muxer_command) {
    std::sort(clips.begin(), clips.end(),
              [](const Clip& a, const Clip& b) { return a.scene_index < b.scene_index; });

    json manifest;
    manifest["timeline"] = json::array();
    double cursor = 0.0;
    for (const auto& clip : clips) {
        manifest["timeline"].push_back({{"scene_index", clip.scene_index},
                                        {"clip_ref", clip.video_ref},
                                        {"in_s", cursor},
                                        {"out_s", cursor + clip.duration_s}});
        cursor += clip.duration_s;
    }
    manifest["total_s"] = cursor;
    manifest["audio_overlay"] = audio.to_json();
    manifest["audio_directives"] = {{"voiceover", board.audio_directives.voiceover},
                                    {"tempo", board.audio_directives.tempo},
                                    {"mood", board.audio_directives.mood}};

    FinalVideo final_video;
    final_video.manifest_ref = store.put(manifest.dump(2));

    if (muxer_command) {
        std::string command = *muxer_command;
        const std::string manifest_path = store.path_of(final_video.manifest_ref).string();
        const std::string output_path =
            (store.root() / ("final-" + final_video.manifest_ref.substr(0, 12) + ".mp4")).string();
        auto substitute = [&](const std::string& placeholder, const std::string& value) {
            for (auto pos = command.find(placeholder); pos != std::string::npos;
                 pos = command.find(placeholder)) {
                command.replace(pos, placeholder.size(), value);
            }
        };
        substitute("{manifest}", manifest_path);
        substitute("{output}", output_path);
        const int status = std::system(command.c_str());
        if (status != 0) {
            throw AssemblyError("muxer command failed with status " + std::to_string(status) +
                                ": " + command);
        }
        std::ifstream out(output_path, std::ios::binary);
        const std::string content{std::istreambuf_iterator<char>(out),
                                  std::istreambuf_iterator<char>()};
        final_video.video_ref = store.put(content);
    }
    return final_video;
}

void validate_run_record(const RunRecord& record, const PipelineOptions& options,
                         const std::vector<AnnotatedVisual>& reference_visuals) {
    if (record.failed) throw ValidationError("record marks a failed iteration");
    // artifact DAG
    if (record.storyline_trace.attempts.empty()) {
        throw ValidationError("storyboard exists without a storyline refinement trace");
    }
    std::set<int> keyframe_indices;
    for (const auto& frame : record.keyframes) keyframe_indices.insert(frame.scene_index);
    for (const auto& clip : record.clips) {
        if (!keyframe_indices.count(clip.scene_index)) {
            throw ValidationError("clip for scene " + std::to_string(clip.scene_index) +
                                  " has no matching keyframe");
        }
    }
    if (record.keyframes.size() != record.storyboard.scenes.size() ||
        record.clips.size() != record.storyboard.scenes.size()) {
        throw ValidationError("keyframe/clip cardinality does not match the storyboard");
    }
    // entity closure
    for (const auto& scene : record.storyboard.scenes) {
        for (const auto& entity : scene.entity_flags) {
            int matches = find_asset(record.assets, entity) != nullptr ? 1 : 0;
            if (matches == 0) {
                for (const auto& visual : reference_visuals) {
                    if (lower(visual.caption).find(lower(entity)) != std::string::npos) {
                        matches = 1;
                        break;
                    }
                }
            }
            if (matches != 1) {
                throw ValidationError("entity flag '" + entity + "' in scene " +
                                      std::to_string(scene.index) +
                                      " does not resolve to an asset");
            }
        }
    }
    // duration conservation
    double clip_total = 0.0;
    for (const auto& clip : record.clips) {
        const auto& scene = record.storyboard.scenes.at(clip.scene_index);
        if (std::abs(clip.duration_s - scene.duration_s) > 0.25) {
            throw ValidationError("clip duration diverges from scene " +
                                  std::to_string(clip.scene_index));
        }
        clip_total += clip.duration_s;
    }
    if (std::abs(clip_total - options.runtime_s) > 0.25) {
        throw ValidationError("clip durations sum to " + std::to_string(clip_total) +
                              ", expected " + std::to_string(options.runtime_s));
    }
}

std::vector<WarmStartPrior> parse_warm_start_priors(const std::string& document,
                                                    double prior_weight) {
    const json doc = json::parse(extract_json_object(document), nullptr, false);
    if (doc.is_discarded() || !doc.contains("priors") || !doc.at("priors").is_array()) {
        throw SchemaError("warm-start document has no 'priors' array");
    }
    std::vector<WarmStartPrior> priors;
    for (const auto& entry : doc.at("priors")) {
        WarmStartPrior prior;
        prior.dimension = dimension_from_name(entry.at("dimension").get<std::string>());
        prior.arm_index = entry.at("arm_index").get<int>();
        prior.prior_value = entry.at("score").get<double>();
        prior.prior_weight = prior_weight;
        priors.push_back(prior);
    }
    return priors;
}

namespace {

void persist_iteration(const std::filesystem::path& dir, const RunRecord& record) {
    write_file(dir / "directives.json",
               json{{"storyline_directive", record.directives.storyline_directive},
                    {"keyframe_directive", record.directives.keyframe_directive},
                    {"video_directive", record.directives.video_directive}}
                   .dump(2));
    write_file(dir / "brief.json", record.brief.to_json().dump(2));
    write_file(dir / "storyline.json", record.storyline.to_json().dump(2));
    write_file(dir / "storyline_trace.json", record.storyline_trace.to_json().dump(2));
    write_file(dir / "storyboard.json", record.storyboard.to_json().dump(2));
    write_file(dir / "keyframe_trace.json", record.keyframe_trace.to_json().dump(2));
    json frames = json::array();
    for (const auto& frame : record.keyframes) frames.push_back(frame.to_json());
    write_file(dir / "keyframes" / "keyframes.json", frames.dump(2));
    json clips = json::array();
    for (const auto& clip : record.clips) clips.push_back(clip.to_json());
    write_file(dir / "clips" / "clips.json", clips.dump(2));
    write_file(dir / "audio" / "audio.json", record.audio.to_json().dump(2));
    write_file(dir / "manifest.json",
               json{{"manifest_ref", record.final_video.manifest_ref},
                    {"video_ref", record.final_video.video_ref
                                      ? json(*record.final_video.video_ref)
                                      : json(nullptr)}}
                   .dump(2));
    write_file(dir / "report.json", serialize_video_report(record.report).dump(2));
}

}  // namespace

RunResult run(const ScenarioInput& input, int iterations, BanditPolicy& policy,
              Backend& backend, const PipelineOptions& options, uint64_t seed,
              const std::filesystem::path& run_dir, bool warm_start_enabled) {
    if (iterations < 1) throw ValidationError("iteration count must be >= 1");
    std::filesystem::create_directories(run_dir);
    BlobStore store(run_dir / "blobs");

    auto [constraints, visuals] = ingest(input.user_prompt, input.images, backend);

    if (warm_start_enabled) {
        CapabilityRequest request;
        request.capability = Capability::Text;
        request.prompt = "Score each creative arm for this product and audience, 0-100.";
        request.params = {{"task", "warm_start"},
                          {"product", constraints.product},
                          {"gender", constraints.gender},
                          {"age", constraints.age},
                          {"location", constraints.location},
                          {"interest", constraints.interest}};
        policy.warm_start(parse_warm_start_priors(backend.invoke(request).text));
    }
    write_file(run_dir / "policy.json", policy.to_json().dump(2));

    RunResult result;
    result.constraints = constraints;
    result.visuals = visuals;

    for (int t = 0; t < iterations; ++t) {
        RunRecord record;
        record.iteration = t;
        record.seed = seed;
        const auto iter_dir = run_dir / ("iter-" + std::to_string(t));
        try {
            record.config = policy.select();
            ConditioningContext context{constraints, visuals, record.config};

            record.directives = synthesize_directions(record.config, context, backend);
            record.brief = make_brief(context, backend);
            std::tie(record.storyline, record.storyline_trace) = refine_storyline(
                record.brief, record.directives, context, backend,
                options.storyline_refinement);
            record.storyboard = make_storyboard(record.storyline, record.config,
                                                record.directives, backend, options);
            record.assets = build_assets(record.storyline, context, backend, store);
            auto keyframes = gen_keyframes(record.storyboard, record.assets, context,
                                           record.directives, backend, store);
            std::tie(record.keyframes, record.keyframe_trace) =
                refine_keyframes(std::move(keyframes), record.assets, context,
                                 record.directives, backend, store,
                                 options.keyframe_refinement);
            record.clips = gen_clips(record.storyboard, record.keyframes, context,
                                     record.directives, backend, store);
            record.audio = gen_audio(record.storyboard, context, backend, backend, store);
            record.final_video = assemble(record.storyboard, record.clips, record.audio, store,
                                          options.muxer_command);

            CapabilityRequest judge;
            judge.capability = Capability::Judge;
            judge.prompt = "Evaluate the final video against the user prompt and creative "
                           "hypothesis.\n\nManifest: " +
                           record.final_video.manifest_ref;
            judge.attachments = {record.final_video.manifest_ref};
            judge.params = {{"task", "judge_video"},
                            {"cs", std::to_string(record.config.cs.index)},
                            {"nm", std::to_string(record.config.nm.index)},
                            {"aa", std::to_string(record.config.aa.index)},
                            {"draw", std::to_string(t)}};
            record.report = judged_with_one_reask(backend, judge, parse_video_report);
            record.reward = extract_reward(record.report);

            validate_run_record(record, options, visuals);

            policy.update(record.config, record.reward);
            write_file(run_dir / "policy.json", policy.to_json().dump(2));
            persist_iteration(iter_dir, record);
        } catch (const std::exception& e) {
            record.failed = true;
            record.error = e.what();
            write_file(iter_dir / "error.json",
                       json{{"iteration", t}, {"error", record.error}}.dump(2));
        }
        result.records.push_back(std::move(record));
    }

    for (int t = 0; t < static_cast<int>(result.records.size()); ++t) {
        const auto& record = result.records[t];
        if (record.failed) continue;
        if (result.best_index < 0 ||
            record.report.score > result.records[result.best_index].report.score) {
            result.best_index = t;
        }
    }
    return result;
}

}  // namespace codirector
