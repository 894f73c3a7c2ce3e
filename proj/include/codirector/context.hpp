#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "codirector/creative_space.hpp"

namespace codirector {

// The six-point prompt: the benchmark's structured input tuple.
struct StructuredConstraints {
    std::string brand;
    std::string product;
    std::string gender;
    std::string age;
    std::string location;
    std::string interest;

    // Throws IngestionError naming every empty field.
    void validate() const;
    nlohmann::json to_json() const;
    static StructuredConstraints from_json(const nlohmann::json& doc);
};

enum class VisualRole { Product, Logo, Protagonist, Prop, Environment, Other };

std::string visual_role_name(VisualRole role);
VisualRole visual_role_from_name(const std::string& name);

struct AnnotatedVisual {
    std::string image_ref;  // content-addressed blob reference
    std::string caption;
    VisualRole role = VisualRole::Other;

    nlohmann::json to_json() const;
    static AnnotatedVisual from_json(const nlohmann::json& doc);
};

// Global conditioning context propagated to every downstream agent.
struct ConditioningContext {
    StructuredConstraints constraints;
    std::vector<AnnotatedVisual> visuals;
    CreativeConfig config;
};

}  // namespace codirector
