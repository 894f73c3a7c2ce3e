#include "codirector/directions.hpp"

#include "codirector/errors.hpp"

namespace codirector {

AgentDirectives synthesize_directions(const CreativeConfig& config,
                                      const ConditioningContext& context, Backend& backend) {
    context.constraints.validate();

    CapabilityRequest request;
    request.capability = Capability::Text;
    request.prompt = "Synthesize the selected creative configuration into one storyline, one "
                     "keyframe, and one video directive.";
    request.params = {
        {"task", "directions"},
        {"cs_label", config.cs.label},   {"cs_desc", config.cs.description},
        {"nm_label", config.nm.label},   {"nm_desc", config.nm.description},
        {"aa_label", config.aa.label},   {"aa_desc", config.aa.description},
        {"brand", context.constraints.brand},
        {"product", context.constraints.product},
        {"gender", context.constraints.gender},
        {"age", context.constraints.age},
        {"location", context.constraints.location},
        {"interest", context.constraints.interest},
    };
    for (const auto& visual : context.visuals) request.attachments.push_back(visual.image_ref);

    const auto response = backend.invoke(request);
    nlohmann::json doc = nlohmann::json::parse(response.text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw SchemaError("direction synthesis did not return a JSON object");
    }
    AgentDirectives directives;
    auto field = [&](const char* name) {
        if (!doc.contains(name) || !doc.at(name).is_string() ||
            doc.at(name).get<std::string>().empty()) {
            throw SchemaError(std::string("direction synthesis output is missing '") + name +
                              "'");
        }
        return doc.at(name).get<std::string>();
    };
    directives.storyline_directive = field("storyline_directive");
    directives.keyframe_directive = field("keyframe_directive");
    directives.video_directive = field("video_directive");
    return directives;
}

}  // namespace codirector
