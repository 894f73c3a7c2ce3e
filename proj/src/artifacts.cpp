#include "codirector/artifacts.hpp"

#include <cmath>

#include "codirector/errors.hpp"

namespace codirector {

using nlohmann::json;

json CreativeBrief::to_json() const {
    return {{"text", text}, {"cultural_notes", cultural_notes}};
}

CreativeBrief CreativeBrief::from_json(const json& doc) {
    CreativeBrief brief;
    brief.text = doc.at("text").get<std::string>();
    brief.cultural_notes = doc.value("cultural_notes", "");
    if (brief.text.empty()) throw SchemaError("creative brief text is empty");
    return brief;
}

void Storyline::validate() const {
    if (scenes.empty()) throw SchemaError("storyline has no scenes");
}

json Storyline::to_json() const {
    return {{"logline", logline}, {"scenes", scenes}, {"entities", entities}};
}

Storyline Storyline::from_json(const json& doc) {
    Storyline line;
    line.logline = doc.at("logline").get<std::string>();
    line.scenes = doc.at("scenes").get<std::vector<std::string>>();
    line.entities = doc.value("entities", std::vector<std::string>{});
    line.validate();
    return line;
}

std::string asset_kind_name(AssetKind kind) {
    switch (kind) {
        case AssetKind::Character: return "character";
        case AssetKind::Prop: return "prop";
        case AssetKind::Environment: return "environment";
    }
    throw ValidationError("unknown asset kind");
}

json VisualAsset::to_json() const {
    return {{"entity", entity},
            {"kind", asset_kind_name(kind)},
            {"image_refs", image_refs},
            {"generated", generated}};
}

json Scene::to_json() const {
    return {{"index", index},
            {"descriptors", descriptors},
            {"camera", camera},
            {"duration_s", duration_s},
            {"entity_flags", entity_flags}};
}

Scene Scene::from_json(const json& doc) {
    Scene scene;
    scene.index = doc.at("index").get<int>();
    scene.descriptors = doc.at("descriptors").get<std::string>();
    scene.camera = doc.at("camera").get<std::string>();
    scene.duration_s = doc.at("duration_s").get<double>();
    scene.entity_flags = doc.value("entity_flags", std::vector<std::string>{});
    if (!(scene.duration_s > 0.0)) throw SchemaError("scene duration must be positive");
    return scene;
}

void Storyboard::validate() const {
    for (int i = 0; i < static_cast<int>(scenes.size()); ++i) {
        if (scenes[i].index != i) {
            throw SchemaError("storyboard scene indices are not contiguous at position " +
                              std::to_string(i));
        }
    }
}

double Storyboard::total_duration_s() const {
    double total = 0.0;
    for (const auto& scene : scenes) total += scene.duration_s;
    return total;
}

json Storyboard::to_json() const {
    json doc;
    doc["scenes"] = json::array();
    for (const auto& scene : scenes) doc["scenes"].push_back(scene.to_json());
    doc["audio_directives"] = {{"voiceover", audio_directives.voiceover},
                               {"tempo", audio_directives.tempo},
                               {"mood", audio_directives.mood}};
    return doc;
}

Storyboard Storyboard::from_json(const json& doc) {
    Storyboard board;
    for (const auto& entry : doc.at("scenes")) board.scenes.push_back(Scene::from_json(entry));
    const auto& audio = doc.at("audio_directives");
    board.audio_directives.voiceover = audio.value("voiceover", "");
    board.audio_directives.tempo = audio.value("tempo", "");
    board.audio_directives.mood = audio.value("mood", "");
    board.validate();
    return board;
}

json Keyframe::to_json() const {
    return {{"scene_index", scene_index}, {"image_ref", image_ref}, {"prompt", prompt}};
}

json Clip::to_json() const {
    return {{"scene_index", scene_index}, {"video_ref", video_ref}, {"duration_s", duration_s}};
}

json AudioTrack::to_json() const {
    return {{"voiceover_ref", voiceover_ref},
            {"music_ref", music_ref},
            {"mix_manifest", mix_manifest}};
}

}  // namespace codirector
