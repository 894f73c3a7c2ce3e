#include "codirector/context.hpp"

#include "codirector/errors.hpp"

namespace codirector {

void StructuredConstraints::validate() const {
    std::string missing;
    auto check = [&](const std::string& value, const char* name) {
        if (value.empty()) {
            if (!missing.empty()) missing += ", ";
            missing += name;
        }
    };
    check(brand, "brand");
    check(product, "product");
    check(gender, "gender");
    check(age, "age");
    check(location, "location");
    check(interest, "interest");
    if (!missing.empty()) {
        throw IngestionError("six-point prompt is missing fields: " + missing);
    }
}

nlohmann::json StructuredConstraints::to_json() const {
    return {{"brand", brand},       {"product", product}, {"gender", gender},
            {"age", age},           {"location", location}, {"interest", interest}};
}

StructuredConstraints StructuredConstraints::from_json(const nlohmann::json& doc) {
    StructuredConstraints c;
    c.brand = doc.value("brand", "");
    c.product = doc.value("product", "");
    c.gender = doc.value("gender", "");
    c.age = doc.value("age", "");
    c.location = doc.value("location", "");
    c.interest = doc.value("interest", "");
    return c;
}

std::string visual_role_name(VisualRole role) {
    switch (role) {
        case VisualRole::Product: return "product";
        case VisualRole::Logo: return "logo";
        case VisualRole::Protagonist: return "protagonist";
        case VisualRole::Prop: return "prop";
        case VisualRole::Environment: return "environment";
        case VisualRole::Other: return "other";
    }
    throw ValidationError("unknown visual role");
}

VisualRole visual_role_from_name(const std::string& name) {
    for (auto role : {VisualRole::Product, VisualRole::Logo, VisualRole::Protagonist,
                      VisualRole::Prop, VisualRole::Environment, VisualRole::Other}) {
        if (visual_role_name(role) == name) return role;
    }
    throw ValidationError("unknown visual role name: " + name);
}

nlohmann::json AnnotatedVisual::to_json() const {
    return {{"image_ref", image_ref}, {"caption", caption}, {"role", visual_role_name(role)}};
}

AnnotatedVisual AnnotatedVisual::from_json(const nlohmann::json& doc) {
    AnnotatedVisual v;
    v.image_ref = doc.at("image_ref").get<std::string>();
    v.caption = doc.at("caption").get<std::string>();
    v.role = visual_role_from_name(doc.at("role").get<std::string>());
    return v;
}

}  // namespace codirector
