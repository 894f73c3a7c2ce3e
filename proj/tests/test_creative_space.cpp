#include <doctest.h>

#include <set>

#include "codirector/creative_space.hpp"
#include "codirector/errors.hpp"

using namespace codirector;

TEST_CASE("arm registry cardinalities") {
    CHECK(arm_count(CreativeDimension::CreativeStrategy) == 3);
    CHECK(arm_count(CreativeDimension::NarrativeMode) == 3);
    CHECK(arm_count(CreativeDimension::AestheticArchetype) == 4);
    CHECK(config_space_size() == 36);
}

TEST_CASE("arm labels are stable and unique per dimension") {
    CHECK(arm_at(CreativeDimension::CreativeStrategy, 0).label == "Informational");
    CHECK(arm_at(CreativeDimension::CreativeStrategy, 1).label == "Transformational");
    CHECK(arm_at(CreativeDimension::CreativeStrategy, 2).label == "Comparative");
    CHECK(arm_at(CreativeDimension::NarrativeMode, 0).label == "Analytical");
    CHECK(arm_at(CreativeDimension::NarrativeMode, 1).label == "Vignette");
    CHECK(arm_at(CreativeDimension::NarrativeMode, 2).label == "NarrativeDrama");
    CHECK(arm_at(CreativeDimension::AestheticArchetype, 0).label == "ClarityEnergy");
    CHECK(arm_at(CreativeDimension::AestheticArchetype, 1).label == "CinematicPremium");
    CHECK(arm_at(CreativeDimension::AestheticArchetype, 2).label == "MinimalistFocus");
    CHECK(arm_at(CreativeDimension::AestheticArchetype, 3).label == "KineticGrit");

    for (auto d : kAllDimensions) {
        std::set<std::string> labels;
        for (const auto& arm : enumerate_arms(d)) {
            CHECK(labels.insert(arm.label).second);
            CHECK(arm_by_label(d, arm.label).index == arm.index);
            CHECK_FALSE(arm.description.empty());
        }
    }
}

TEST_CASE("lookups reject out-of-range and unknown labels") {
    CHECK_THROWS_AS(arm_at(CreativeDimension::CreativeStrategy, 3), ValidationError);
    CHECK_THROWS_AS(arm_at(CreativeDimension::AestheticArchetype, -1), ValidationError);
    CHECK_THROWS_AS(arm_by_label(CreativeDimension::NarrativeMode, "Informational"),
                    ValidationError);
}

TEST_CASE("configs reject cross-dimension arms") {
    const Arm& cs = arm_at(CreativeDimension::CreativeStrategy, 0);
    const Arm& nm = arm_at(CreativeDimension::NarrativeMode, 1);
    const Arm& aa = arm_at(CreativeDimension::AestheticArchetype, 2);
    const CreativeConfig config = CreativeConfig::from_arms(cs, nm, aa);
    CHECK(config.short_label() == "Informational/Vignette/MinimalistFocus");
    CHECK(config.index(CreativeDimension::AestheticArchetype) == 2);

    CHECK_THROWS_AS(CreativeConfig::from_arms(nm, cs, aa), ValidationError);
    CHECK_THROWS_AS(CreativeConfig::from_indices(0, 0, 4), ValidationError);
}

TEST_CASE("every config in the space enumerates distinctly") {
    std::set<std::string> labels;
    for (int cs = 0; cs < 3; ++cs) {
        for (int nm = 0; nm < 3; ++nm) {
            for (int aa = 0; aa < 4; ++aa) {
                labels.insert(CreativeConfig::from_indices(cs, nm, aa).short_label());
            }
        }
    }
    CHECK(static_cast<int>(labels.size()) == config_space_size());
}
