#pragma once

#include <array>
#include <string>
#include <vector>

namespace codirector {

// The three orthogonal creative axes steering the pipeline.
enum class CreativeDimension { CreativeStrategy, NarrativeMode, AestheticArchetype };

inline constexpr std::array<CreativeDimension, 3> kAllDimensions = {
    CreativeDimension::CreativeStrategy,
    CreativeDimension::NarrativeMode,
    CreativeDimension::AestheticArchetype,
};

std::string dimension_name(CreativeDimension d);
CreativeDimension dimension_from_name(const std::string& name);

struct Arm {
    CreativeDimension dimension;
    int index = 0;
    std::string label;
    std::string description;
};

// Fixed, ordered arm registry. The index <-> label mapping is versioned and
// must stay stable because persisted bandit state refers to arms by index.
inline constexpr int kArmRegistryVersion = 1;

const std::vector<Arm>& enumerate_arms(CreativeDimension d);
int arm_count(CreativeDimension d);
int config_space_size();

// Looks up an arm by index; throws ValidationError on out-of-range.
const Arm& arm_at(CreativeDimension d, int index);
// Looks up an arm by label within a dimension; throws ValidationError if unknown.
const Arm& arm_by_label(CreativeDimension d, const std::string& label);

// One point in the 36-config creative space: the bandit's action.
struct CreativeConfig {
    Arm cs;  // CreativeStrategy
    Arm nm;  // NarrativeMode
    Arm aa;  // AestheticArchetype

    // Validating constructors; reject cross-dimension arms.
    static CreativeConfig from_arms(const Arm& cs, const Arm& nm, const Arm& aa);
    static CreativeConfig from_indices(int cs, int nm, int aa);

    const Arm& arm(CreativeDimension d) const;
    int index(CreativeDimension d) const { return arm(d).index; }
    std::string short_label() const;  // "Informational/Vignette/ClarityEnergy"
};

struct AgentDirectives {
    std::string storyline_directive;
    std::string keyframe_directive;
    std::string video_directive;
};

}  // namespace codirector
