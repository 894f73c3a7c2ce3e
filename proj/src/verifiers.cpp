#include "codirector/verifiers.hpp"

#include <cmath>

#include "codirector/errors.hpp"

namespace codirector {

namespace {

using nlohmann::json;

json parse_document(const std::string& document) {
    const std::string body = extract_json_object(document);
    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw SchemaError("verifier output is not a JSON object");
    }
    return doc;
}

double require_number(const json& doc, const std::string& key, double lo, double hi) {
    if (!doc.contains(key)) throw SchemaError("missing field '" + key + "'");
    const auto& v = doc.at(key);
    if (!v.is_number()) throw SchemaError("field '" + key + "' is not numeric");
    const double x = v.get<double>();
    if (x < lo || x > hi) {
        throw SchemaError("field '" + key + "' value " + std::to_string(x) +
                          " outside [" + std::to_string(lo) + "," + std::to_string(hi) + "]");
    }
    return x;
}

std::string require_string(const json& doc, const std::string& key) {
    if (!doc.contains(key)) throw SchemaError("missing field '" + key + "'");
    if (!doc.at(key).is_string()) throw SchemaError("field '" + key + "' is not a string");
    return doc.at(key).get<std::string>();
}

void parse_breakdown_and_score(const json& doc, const std::vector<std::string>& keys,
                               VerifierReport& report) {
    if (!doc.contains("breakdown") || !doc.at("breakdown").is_object()) {
        throw SchemaError("missing field 'breakdown'");
    }
    const auto& bd = doc.at("breakdown");
    double sum = 0.0;
    for (const auto& key : keys) {
        const double v = require_number(bd, key, 0.0, 20.0);
        report.breakdown[key] = v;
        sum += v;
    }
    report.score = require_number(doc, "score", 0.0, 100.0);
    if (std::abs(report.score - sum) > 1e-6) {
        throw SchemaError("field 'score' (" + std::to_string(report.score) +
                          ") does not equal the sum of breakdown values (" +
                          std::to_string(sum) + ")");
    }
}

VerifierReport::Efficacy parse_efficacy(const json& obj) {
    VerifierReport::Efficacy e;
    e.creative_strategy = require_number(obj, "creative_strategy", 0.0, 100.0);
    e.narrative_mode = require_number(obj, "narrative_mode", 0.0, 100.0);
    e.aesthetic_archetype = require_number(obj, "aesthetic_archetype", 0.0, 100.0);
    return e;
}

void parse_optional_justifications(const json& doc, VerifierReport& report) {
    if (!doc.contains("mab_efficacy_justifications")) return;
    const auto& j = doc.at("mab_efficacy_justifications");
    if (!j.is_object()) {
        throw SchemaError("field 'mab_efficacy_justifications' is not an object");
    }
    std::map<std::string, std::string> out;
    for (const auto& [key, value] : j.items()) {
        if (!value.is_string()) {
            throw SchemaError("field 'mab_efficacy_justifications." + key +
                              "' is not a string");
        }
        out[key] = value.get<std::string>();
    }
    report.efficacy_justifications = std::move(out);
}

std::string parse_fault(const json& doc) {
    const std::string fault = require_string(doc, "primary_fault");
    if (fault != "storyline" && fault != "image" && fault != "video") {
        throw SchemaError("field 'primary_fault' value '" + fault +
                          "' not one of 'storyline', 'image', 'video'");
    }
    return fault;
}

std::vector<int> parse_flagged_indices(const json& doc) {
    // Flags may arrive as a top-level array or nested inside a structured
    // actionable_feedback object.
    const json* arr = nullptr;
    if (doc.contains("flagged_indices")) {
        arr = &doc.at("flagged_indices");
    } else if (doc.contains("actionable_feedback") &&
               doc.at("actionable_feedback").is_object() &&
               doc.at("actionable_feedback").contains("flagged_indices")) {
        arr = &doc.at("actionable_feedback").at("flagged_indices");
    }
    std::vector<int> flags;
    if (arr == nullptr) return flags;
    if (!arr->is_array()) throw SchemaError("field 'flagged_indices' is not an array");
    for (const auto& v : *arr) {
        if (!v.is_number_integer()) {
            throw SchemaError("field 'flagged_indices' contains a non-integer entry");
        }
        flags.push_back(v.get<int>());
    }
    return flags;
}

std::string actionable_feedback_text(const json& doc) {
    if (!doc.contains("actionable_feedback")) {
        throw SchemaError("missing field 'actionable_feedback'");
    }
    const auto& v = doc.at("actionable_feedback");
    if (v.is_string()) return v.get<std::string>();
    if (v.is_object() && v.contains("command") && v.at("command").is_string()) {
        return v.at("command").get<std::string>();
    }
    throw SchemaError("field 'actionable_feedback' is neither a string nor a command object");
}

}  // namespace

std::string extract_json_object(const std::string& document) {
    const auto start = document.find('{');
    if (start == std::string::npos) {
        throw SchemaError("no JSON object found in verifier output");
    }
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < document.size(); ++i) {
        const char c = document[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return document.substr(start, i - start + 1);
        }
    }
    throw SchemaError("unbalanced JSON object in verifier output");
}

const std::vector<std::string>& storyline_breakdown_keys() {
    static const std::vector<std::string> keys = {
        "hook_quality", "narrative_arc", "product_integration", "engagement",
        "prompt_adherence"};
    return keys;
}

const std::vector<std::string>& video_breakdown_keys() {
    static const std::vector<std::string> keys = {
        "coherence", "visual_quality", "engagement", "prompt_adherence",
        "logical_consistency"};
    return keys;
}

VerifierReport parse_storyline_report(const std::string& document) {
    const json doc = parse_document(document);
    VerifierReport report;
    parse_breakdown_and_score(doc, storyline_breakdown_keys(), report);
    report.feedback = require_string(doc, "feedback");
    report.actionable_feedback = require_string(doc, "actionable_feedback");
    return report;
}

VerifierReport parse_keyframe_report(const std::string& document) {
    const json doc = parse_document(document);
    VerifierReport report;
    parse_breakdown_and_score(doc, video_breakdown_keys(), report);
    report.feedback = require_string(doc, "feedback");
    report.actionable_feedback = actionable_feedback_text(doc);
    if (doc.contains("mab_efficacy_scores")) {
        report.efficacy = parse_efficacy(doc.at("mab_efficacy_scores"));
    }
    parse_optional_justifications(doc, report);
    if (doc.contains("primary_fault")) report.primary_fault = parse_fault(doc);
    report.flagged_indices = parse_flagged_indices(doc);
    return report;
}

VerifierReport parse_video_report(const std::string& document) {
    const json doc = parse_document(document);
    VerifierReport report;
    parse_breakdown_and_score(doc, video_breakdown_keys(), report);
    report.feedback = require_string(doc, "feedback");
    report.actionable_feedback = actionable_feedback_text(doc);
    if (!doc.contains("mab_efficacy_scores")) {
        throw SchemaError("missing field 'mab_efficacy_scores'");
    }
    report.efficacy = parse_efficacy(doc.at("mab_efficacy_scores"));
    parse_optional_justifications(doc, report);
    report.primary_fault = parse_fault(doc);
    return report;
}

BenchScores parse_bench_report(const std::string& document) {
    const json doc = parse_document(document);
    BenchScores s;
    s.vaf_reasoning = require_string(doc, "VAF_reasoning");
    s.vaf = require_number(doc, "VAF_score", 0.0, 100.0);
    s.da_reasoning = require_string(doc, "DA_reasoning");
    s.da = require_number(doc, "DA_score", 0.0, 100.0);
    s.ma_reasoning = require_string(doc, "MA_reasoning");
    s.ma = require_number(doc, "MA_score", 0.0, 100.0);
    s.vq_reasoning = require_string(doc, "VQ_reasoning");
    s.vq = require_number(doc, "VQ_score", 0.0, 100.0);
    return s;
}

namespace {

json breakdown_json(const VerifierReport& report, const std::vector<std::string>& keys) {
    json bd = json::object();
    for (const auto& key : keys) bd[key] = report.breakdown.at(key);
    return bd;
}

void append_efficacy(json& doc, const VerifierReport& report) {
    if (report.efficacy) {
        doc["mab_efficacy_scores"] = {
            {"creative_strategy", report.efficacy->creative_strategy},
            {"narrative_mode", report.efficacy->narrative_mode},
            {"aesthetic_archetype", report.efficacy->aesthetic_archetype},
        };
    }
    if (report.efficacy_justifications) {
        doc["mab_efficacy_justifications"] = *report.efficacy_justifications;
    }
}

}  // namespace

json serialize_storyline_report(const VerifierReport& report) {
    json doc;
    doc["breakdown"] = breakdown_json(report, storyline_breakdown_keys());
    doc["score"] = report.score;
    doc["score_out_of"] = 100;
    doc["feedback"] = report.feedback;
    doc["actionable_feedback"] = report.actionable_feedback;
    return doc;
}

json serialize_keyframe_report(const VerifierReport& report) {
    json doc;
    doc["breakdown"] = breakdown_json(report, video_breakdown_keys());
    append_efficacy(doc, report);
    doc["feedback"] = report.feedback;
    if (report.primary_fault) doc["primary_fault"] = *report.primary_fault;
    doc["actionable_feedback"] = report.actionable_feedback;
    doc["flagged_indices"] = report.flagged_indices.value_or(std::vector<int>{});
    doc["score"] = report.score;
    return doc;
}

json serialize_video_report(const VerifierReport& report) {
    json doc;
    doc["breakdown"] = breakdown_json(report, video_breakdown_keys());
    append_efficacy(doc, report);
    doc["feedback"] = report.feedback;
    doc["primary_fault"] = report.primary_fault.value_or("video");
    doc["actionable_feedback"] = report.actionable_feedback;
    doc["score"] = report.score;
    return doc;
}

json serialize_bench_report(const BenchScores& s) {
    json doc;
    doc["VAF_reasoning"] = s.vaf_reasoning;
    doc["VAF_score"] = s.vaf;
    doc["DA_reasoning"] = s.da_reasoning;
    doc["DA_score"] = s.da;
    doc["MA_reasoning"] = s.ma_reasoning;
    doc["MA_score"] = s.ma;
    doc["VQ_reasoning"] = s.vq_reasoning;
    doc["VQ_score"] = s.vq;
    return doc;
}

FactoredReward extract_reward(const VerifierReport& report) {
    if (!report.efficacy) {
        throw ContractError("report carries no efficacy triple; cannot form a reward");
    }
    FactoredReward r;
    r.r_cs = report.efficacy->creative_strategy;
    r.r_nm = report.efficacy->narrative_mode;
    r.r_aa = report.efficacy->aesthetic_archetype;
    r.aggregate = report.score;
    return r;
}

}  // namespace codirector
