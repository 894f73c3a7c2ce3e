#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace codirector {

struct CreativeBrief {
    std::string text;
    std::string cultural_notes;

    nlohmann::json to_json() const;
    static CreativeBrief from_json(const nlohmann::json& doc);
};

struct Storyline {
    std::string logline;
    std::vector<std::string> scenes;  // must be non-empty
    std::vector<std::string> entities;

    void validate() const;
    nlohmann::json to_json() const;
    static Storyline from_json(const nlohmann::json& doc);
};

enum class AssetKind { Character, Prop, Environment };

std::string asset_kind_name(AssetKind kind);

struct VisualAsset {
    std::string entity;
    AssetKind kind = AssetKind::Prop;
    std::vector<std::string> image_refs;
    bool generated = false;  // true only for entities absent from reference visuals

    nlohmann::json to_json() const;
};

struct Scene {
    int index = 0;
    std::string descriptors;
    std::string camera;  // scale + movement
    double duration_s = 0.0;
    std::vector<std::string> entity_flags;

    nlohmann::json to_json() const;
    static Scene from_json(const nlohmann::json& doc);
};

struct AudioDirectives {
    std::string voiceover;
    std::string tempo;
    std::string mood;
};

struct Storyboard {
    std::vector<Scene> scenes;  // indices 0..N-1 contiguous
    AudioDirectives audio_directives;

    void validate() const;
    double total_duration_s() const;
    nlohmann::json to_json() const;
    static Storyboard from_json(const nlohmann::json& doc);
};

struct Keyframe {
    int scene_index = 0;
    std::string image_ref;
    std::string prompt;

    nlohmann::json to_json() const;
};

struct Clip {
    int scene_index = 0;
    std::string video_ref;
    double duration_s = 0.0;

    nlohmann::json to_json() const;
};

struct AudioTrack {
    std::string voiceover_ref;  // empty when the voiceover directive is empty
    std::string music_ref;
    nlohmann::json mix_manifest;

    nlohmann::json to_json() const;
};

struct FinalVideo {
    std::optional<std::string> video_ref;  // set only when a muxer ran
    std::string manifest_ref;
};

}  // namespace codirector
