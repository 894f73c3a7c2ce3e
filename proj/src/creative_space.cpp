#include "codirector/creative_space.hpp"

#include "codirector/errors.hpp"

namespace codirector {

namespace {

const std::vector<Arm>& registry(CreativeDimension d) {
    static const std::vector<Arm> creative_strategy = {
        {CreativeDimension::CreativeStrategy, 0, "Informational",
         "focus on functional utility, factual evidence, and logical advantages"},
        {CreativeDimension::CreativeStrategy, 1, "Transformational",
         "drive psychological experience, lifestyle appeal, and social meaning"},
        {CreativeDimension::CreativeStrategy, 2, "Comparative",
         "position against a known standard or competitor to highlight unique value"},
    };
    static const std::vector<Arm> narrative_mode = {
        {CreativeDimension::NarrativeMode, 0, "Analytical",
         "argument-based delivery without a story arc"},
        {CreativeDimension::NarrativeMode, 1, "Vignette",
         "atmospheric slices-of-life prioritizing mood over plot"},
        {CreativeDimension::NarrativeMode, 2, "NarrativeDrama",
         "character-driven sequence of conflict and resolution"},
    };
    static const std::vector<Arm> aesthetic_archetype = {
        {CreativeDimension::AestheticArchetype, 0, "ClarityEnergy",
         "high-key lighting, fast-cut motion, high-tempo audio"},
        {CreativeDimension::AestheticArchetype, 1, "CinematicPremium",
         "chiaroscuro lighting, slow reflective camera work, orchestral audio"},
        {CreativeDimension::AestheticArchetype, 2, "MinimalistFocus",
         "bright backgrounds, micro-movements, ASMR-style foley"},
        {CreativeDimension::AestheticArchetype, 3, "KineticGrit",
         "low-key lighting, handheld/FPV drone motion, electronic synth audio"},
    };
    switch (d) {
        case CreativeDimension::CreativeStrategy: return creative_strategy;
        case CreativeDimension::NarrativeMode: return narrative_mode;
        case CreativeDimension::AestheticArchetype: return aesthetic_archetype;
    }
    throw ValidationError("unknown creative dimension");
}

}  // namespace

std::string dimension_name(CreativeDimension d) {
    switch (d) {
        case CreativeDimension::CreativeStrategy: return "creative_strategy";
        case CreativeDimension::NarrativeMode: return "narrative_mode";
        case CreativeDimension::AestheticArchetype: return "aesthetic_archetype";
    }
    throw ValidationError("unknown creative dimension");
}

CreativeDimension dimension_from_name(const std::string& name) {
    for (auto d : kAllDimensions) {
        if (dimension_name(d) == name) return d;
    }
    throw ValidationError("unknown creative dimension name: " + name);
}

const std::vector<Arm>& enumerate_arms(CreativeDimension d) { return registry(d); }

int arm_count(CreativeDimension d) { return static_cast<int>(registry(d).size()); }

int config_space_size() {
    int n = 1;
    for (auto d : kAllDimensions) n *= arm_count(d);
    return n;
}

const Arm& arm_at(CreativeDimension d, int index) {
    const auto& arms = registry(d);
    if (index < 0 || index >= static_cast<int>(arms.size())) {
        throw ValidationError("arm index " + std::to_string(index) + " out of range for " +
                              dimension_name(d));
    }
    return arms[index];
}

const Arm& arm_by_label(CreativeDimension d, const std::string& label) {
    for (const auto& arm : registry(d)) {
        if (arm.label == label) return arm;
    }
    throw ValidationError("unknown arm label '" + label + "' in " + dimension_name(d));
}

namespace {
void require_dimension(const Arm& arm, CreativeDimension expected) {
    if (arm.dimension != expected) {
        throw ValidationError("arm '" + arm.label + "' does not belong to " +
                              dimension_name(expected));
    }
}
}  // namespace

CreativeConfig CreativeConfig::from_arms(const Arm& cs, const Arm& nm, const Arm& aa) {
    require_dimension(cs, CreativeDimension::CreativeStrategy);
    require_dimension(nm, CreativeDimension::NarrativeMode);
    require_dimension(aa, CreativeDimension::AestheticArchetype);
    return CreativeConfig{arm_at(cs.dimension, cs.index), arm_at(nm.dimension, nm.index),
                          arm_at(aa.dimension, aa.index)};
}

CreativeConfig CreativeConfig::from_indices(int cs, int nm, int aa) {
    return CreativeConfig{arm_at(CreativeDimension::CreativeStrategy, cs),
                          arm_at(CreativeDimension::NarrativeMode, nm),
                          arm_at(CreativeDimension::AestheticArchetype, aa)};
}

const Arm& CreativeConfig::arm(CreativeDimension d) const {
    switch (d) {
        case CreativeDimension::CreativeStrategy: return cs;
        case CreativeDimension::NarrativeMode: return nm;
        case CreativeDimension::AestheticArchetype: return aa;
    }
    throw ValidationError("unknown creative dimension");
}

std::string CreativeConfig::short_label() const {
    return cs.label + "/" + nm.label + "/" + aa.label;
}

}  // namespace codirector
