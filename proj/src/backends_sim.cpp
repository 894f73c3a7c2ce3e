#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <openssl/evp.h>

#include "codirector/backends.hpp"
#include "codirector/errors.hpp"
#include "codirector/verifiers.hpp"

namespace codirector {

namespace {
using nlohmann::json;
}

std::string capability_name(Capability c) {
    switch (c) {
        case Capability::Text: return "text";
        case Capability::Image: return "image";
        case Capability::Video: return "video";
        case Capability::Speech: return "speech";
        case Capability::Music: return "music";
        case Capability::Judge: return "judge";
    }
    throw ValidationError("unknown capability");
}

Capability capability_from_name(const std::string& name) {
    for (auto c : {Capability::Text, Capability::Image, Capability::Video,
                   Capability::Speech, Capability::Music, Capability::Judge}) {
        if (capability_name(c) == name) return c;
    }
    throw ValidationError("unknown capability name: " + name);
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

uint64_t mix64(uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double uniform01(uint64_t key) {
    // 53-bit mantissa, shifted into (0,1)
    const uint64_t bits = mix64(key) >> 11;
    return (static_cast<double>(bits) + 0.5) / 9007199254740992.0;
}

double gaussian01(uint64_t seed, uint64_t draw, uint64_t stream) {
    const uint64_t key = mix64(seed) ^ mix64(draw * 0x7f4a7c15ULL + 1) ^
                         mix64(stream * 0x2545f4914f6cdd1dULL + 2);
    const double u1 = uniform01(key);
    const double u2 = uniform01(mix64(key) + 0x6a09e667f3bcc909ULL);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::string request_fingerprint(const CapabilityRequest& request) {
    std::ostringstream os;
    os << capability_name(request.capability) << '\n' << request.prompt << '\n';
    for (const auto& a : request.attachments) os << "att:" << a << '\n';
    for (const auto& [k, v] : request.params) os << k << '=' << v << '\n';
    return sha256_hex(os.str());
}

// --- SimEnvironment -----------------------------------------------------------

void SimEnvironment::validate() const {
    for (auto d : kAllDimensions) {
        const auto& values = true_values[static_cast<std::size_t>(d)];
        if (static_cast<int>(values.size()) != arm_count(d)) {
            throw ValidationError("sim environment has " + std::to_string(values.size()) +
                                  " true values for " + dimension_name(d) + ", expected " +
                                  std::to_string(arm_count(d)));
        }
        for (double v : values) {
            if (v < 0.0 || v > 100.0) {
                throw ValidationError("sim environment true value outside [0,100]");
            }
        }
    }
    if (noise_sigma < 0.0) throw ValidationError("noise sigma must be non-negative");
}

double SimEnvironment::true_value(CreativeDimension d, int arm_index) const {
    const auto& values = true_values[static_cast<std::size_t>(d)];
    if (arm_index < 0 || arm_index >= static_cast<int>(values.size())) {
        throw ValidationError("arm index out of range for sim environment");
    }
    return values[arm_index];
}

int SimEnvironment::true_best_arm(CreativeDimension d) const {
    const auto& values = true_values[static_cast<std::size_t>(d)];
    int best = 0;
    for (int i = 1; i < static_cast<int>(values.size()); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

double SimEnvironment::noiseless_aggregate(const CreativeConfig& config) const {
    double agg = aggregate_bias;
    for (auto d : kAllDimensions) {
        const auto slot = static_cast<std::size_t>(d);
        agg += aggregate_weights[slot] *
               std::clamp(true_values[slot][config.index(d)] + context_modifier, 0.0, 100.0);
    }
    return std::clamp(agg, 0.0, 100.0);
}

json SimEnvironment::to_json() const {
    json doc;
    for (auto d : kAllDimensions) {
        doc["true_values"][dimension_name(d)] = true_values[static_cast<std::size_t>(d)];
    }
    doc["context_modifier"] = context_modifier;
    doc["noise_sigma"] = noise_sigma;
    doc["seed"] = seed;
    doc["aggregate_weights"] = aggregate_weights;
    doc["aggregate_bias"] = aggregate_bias;
    return doc;
}

SimEnvironment SimEnvironment::from_json(const json& doc) {
    SimEnvironment env;
    for (auto d : kAllDimensions) {
        env.true_values[static_cast<std::size_t>(d)] =
            doc.at("true_values").at(dimension_name(d)).get<std::vector<double>>();
    }
    env.context_modifier = doc.value("context_modifier", 0.0);
    env.noise_sigma = doc.value("noise_sigma", 0.0);
    env.seed = doc.value("seed", uint64_t{0});
    if (doc.contains("aggregate_weights")) {
        env.aggregate_weights = doc.at("aggregate_weights").get<std::array<double, 3>>();
    }
    env.aggregate_bias = doc.value("aggregate_bias", 0.0);
    env.validate();
    return env;
}

SimEnvironment SimEnvironment::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open sim environment file: " + path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("sim environment file is not valid JSON: " + path);
    return from_json(doc);
}

FactoredReward sim_reward(const CreativeConfig& config, const SimEnvironment& env,
                          long draw_index) {
    FactoredReward r;
    double components[3];
    for (auto d : kAllDimensions) {
        const auto slot = static_cast<std::size_t>(d);
        const double noise =
            env.noise_sigma > 0.0
                ? gaussian01(env.seed, static_cast<uint64_t>(draw_index), slot) * env.noise_sigma
                : 0.0;
        components[slot] = std::clamp(
            env.true_value(d, config.index(d)) + env.context_modifier + noise, 0.0, 100.0);
    }
    r.r_cs = components[0];
    r.r_nm = components[1];
    r.r_aa = components[2];
    double agg = env.aggregate_bias;
    for (std::size_t i = 0; i < 3; ++i) agg += env.aggregate_weights[i] * components[i];
    r.aggregate = std::clamp(agg, 0.0, 100.0);
    return r;
}

namespace {

// Builds a final-video report document around a given score/efficacy triple.
// The aggregate is split evenly across the five 0-20 slots so the sum is exact.
json video_report_doc(double score, double e_cs, double e_nm, double e_aa,
                      const std::string& tag, const std::vector<int>* flags) {
    VerifierReport report;
    for (const auto& key : video_breakdown_keys()) report.breakdown[key] = score / 5.0;
    report.score = score;
    report.feedback = "Simulated critique (" + tag + ").";
    report.actionable_feedback = "Simulated revision directive (" + tag + ").";
    report.primary_fault = "video";
    report.efficacy = VerifierReport::Efficacy{e_cs, e_nm, e_aa};
    if (flags) report.flagged_indices = *flags;
    return flags ? serialize_keyframe_report(report) : serialize_video_report(report);
}

}  // namespace

std::string sim_judge_document(const CreativeConfig& config, const SimEnvironment& env,
                               long draw_index) {
    const FactoredReward r = sim_reward(config, env, draw_index);
    return video_report_doc(r.aggregate, r.r_cs, r.r_nm, r.r_aa,
                            "draw " + std::to_string(draw_index), nullptr)
        .dump(2);
}

// --- SimBackend ---------------------------------------------------------------

SimBackend::SimBackend(SimEnvironment env) : env_(std::move(env)) { env_.validate(); }

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

// "Brand builds Product (detail), targeting Gender ... aged Age in Location
// who are interested in Interest." -> six fields. Also accepts the inline
// "brand=...;product=...;..." form.
json extract_six_point(const std::string& prompt) {
    json fields = json::object();
    if (prompt.find('=') != std::string::npos && prompt.find(" builds ") == std::string::npos) {
        std::stringstream ss(prompt);
        std::string part;
        while (std::getline(ss, part, ';')) {
            const auto eq = part.find('=');
            if (eq == std::string::npos) continue;
            fields[trim(part.substr(0, eq))] = trim(part.substr(eq + 1));
        }
        return fields;
    }
    const auto builds = prompt.find(" builds ");
    if (builds == std::string::npos) return fields;
    fields["brand"] = trim(prompt.substr(0, builds));
    const auto targeting = prompt.find(", targeting ", builds);
    if (targeting == std::string::npos) return fields;
    std::string product = trim(prompt.substr(builds + 8, targeting - builds - 8));
    if (const auto paren = product.find(" ("); paren != std::string::npos) {
        product = product.substr(0, paren);
    }
    fields["product"] = product;
    const auto after_targeting = targeting + 12;
    const auto gender_end = prompt.find(' ', after_targeting);
    if (gender_end == std::string::npos) return fields;
    fields["gender"] = trim(prompt.substr(after_targeting, gender_end - after_targeting));
    const auto aged = prompt.find(" aged ", gender_end);
    if (aged == std::string::npos) return fields;
    const auto age_start = aged + 6;
    const auto age_end = prompt.find(" in ", age_start);
    if (age_end == std::string::npos) return fields;
    fields["age"] = trim(prompt.substr(age_start, age_end - age_start));
    const auto interested = prompt.find(" who are interested in ", age_end);
    if (interested == std::string::npos) return fields;
    fields["location"] = trim(prompt.substr(age_end + 4, interested - age_end - 4));
    std::string interest = trim(prompt.substr(interested + 23));
    if (!interest.empty() && interest.back() == '.') interest.pop_back();
    fields["interest"] = interest;
    return fields;
}

std::string param(const CapabilityRequest& request, const std::string& key,
                  const std::string& fallback = "") {
    const auto it = request.params.find(key);
    return it == request.params.end() ? fallback : it->second;
}

std::string camera_for(const std::string& aa_label, int scene_index) {
    const char* scale = scene_index % 2 == 0 ? "wide" : "close-up";
    std::string movement = "steady pan";
    if (aa_label == "ClarityEnergy") movement = "fast tracking";
    if (aa_label == "CinematicPremium") movement = "slow dolly-in";
    if (aa_label == "MinimalistFocus") movement = "static macro";
    if (aa_label == "KineticGrit") movement = "handheld follow";
    return std::string(scale) + ", " + movement;
}

}  // namespace

double SimBackend::next_judge_score(const CapabilityRequest& request, double lo, double hi) {
    if (!scripted_judge_scores.empty()) {
        const double s = scripted_judge_scores.front();
        scripted_judge_scores.pop_front();
        return s;
    }
    const uint64_t key =
        std::stoull(request_fingerprint(request).substr(0, 15), nullptr, 16) ^ mix64(env_.seed);
    return lo + (hi - lo) * uniform01(key);
}

CapabilityResponse SimBackend::invoke(const CapabilityRequest& request) {
    switch (request.capability) {
        case Capability::Text: return handle_text(request);
        case Capability::Judge: return handle_judge(request);
        case Capability::Image: return stub_media(request, "image");
        case Capability::Video: return stub_media(request, "video");
        case Capability::Speech: return stub_media(request, "speech");
        case Capability::Music: return stub_media(request, "music");
    }
    throw ValidationError("unknown capability");
}

CapabilityResponse SimBackend::stub_media(const CapabilityRequest& request, const char* kind) {
    const std::string fp = request_fingerprint(request);
    std::string content = std::string("sim-") + kind + ":" +
                          sha256_hex(fp + std::to_string(env_.seed));
    for (const auto& a : request.attachments) content += " src:" + a;
    return {content};
}

CapabilityResponse SimBackend::handle_text(const CapabilityRequest& request) {
    const std::string task = param(request, "task");
    const std::string fp = request_fingerprint(request);
    const std::string motif = sha256_hex(fp + std::to_string(env_.seed)).substr(0, 8);

    if (task == "extract_constraints") {
        return {extract_six_point(request.prompt).dump()};
    }
    if (task == "annotate") {
        const std::string hint = param(request, "hint", "other");
        json doc = {{"caption", "reference " + hint + " visual (" + motif + ")"},
                    {"role", hint}};
        return {doc.dump()};
    }
    if (task == "brief") {
        const std::string location = param(request, "location");
        const std::string interest = param(request, "interest");
        json doc = {
            {"text", "Creative brief: ground the campaign in " + location +
                         ", speaking to an audience interested in " + interest +
                         ". Motif " + motif + "."},
            {"cultural_notes",
             "Lean on locally resonant settings and routines around " + location + "."}};
        return {doc.dump()};
    }
    if (task == "directions") {
        const std::string cs = param(request, "cs_label"), nm = param(request, "nm_label"),
                          aa = param(request, "aa_label");
        const std::string product = param(request, "product"), brand = param(request, "brand");
        const std::string audience = param(request, "gender") + " aged " + param(request, "age") +
                                     " in " + param(request, "location") + " interested in " +
                                     param(request, "interest");
        json doc;
        doc["storyline_directive"] =
            "Develop a script following the " + cs + " creative strategy (" +
            param(request, "cs_desc") + ") delivered in the " + nm + " narrative mode (" +
            param(request, "nm_desc") + "), realized with the " + aa + " aesthetic, for " +
            product + " by " + brand + ", targeting " + audience + ".";
        doc["keyframe_directive"] =
            "Generate keyframes in the " + aa + " aesthetic (" + param(request, "aa_desc") +
            ") supporting a " + cs + " strategy told as a " + nm + " narrative, featuring " +
            product + " for " + audience + ".";
        doc["video_directive"] =
            "Execute cinematography and pacing matching the " + aa + " archetype (" +
            param(request, "aa_desc") + "), keeping the " + cs + " strategy and " + nm +
            " structure coherent for " + product + ".";
        return {doc.dump()};
    }
    if (task == "storyline") {
        const std::string product = param(request, "product", "the product");
        const int n = std::stoi(param(request, "n_scenes", "4"));
        json doc;
        doc["logline"] = "A protagonist's routine is transformed by " + product +
                         " (variant " + motif + ").";
        for (int i = 0; i < n; ++i) {
            doc["scenes"].push_back("Scene " + std::to_string(i + 1) +
                                    ": the protagonist encounters " + product +
                                    " (beat " + motif + ").");
        }
        doc["entities"] = {"protagonist", product};
        return {doc.dump()};
    }
    if (task == "storyboard") {
        const int n = std::stoi(param(request, "n_scenes", "4"));
        const double runtime = std::stod(param(request, "runtime_s", "12"));
        const std::string aa = param(request, "aa_label");
        std::vector<std::string> entities;
        if (request.params.contains("entities")) {
            entities = json::parse(param(request, "entities")).get<std::vector<std::string>>();
        }
        json doc;
        for (int i = 0; i < n; ++i) {
            json scene;
            scene["index"] = i;
            scene["descriptors"] = "Shot " + std::to_string(i + 1) + " of " +
                                   param(request, "product", "the product") + " (" + motif + ")";
            scene["camera"] = camera_for(aa, i);
            scene["duration_s"] = runtime / n;
            // every scene shows the product; the protagonist appears in all but
            // the closing shot
            json flags = json::array();
            for (std::size_t e = 0; e < entities.size(); ++e) {
                if (e == 0 && i == n - 1) continue;
                flags.push_back(entities[e]);
            }
            scene["entity_flags"] = flags;
            doc["scenes"].push_back(scene);
        }
        doc["audio_directives"] = {
            {"voiceover", "Voiceover for " + param(request, "product", "the product") +
                              " (" + motif + ")"},
            {"tempo", aa == "ClarityEnergy" || aa == "KineticGrit" ? "fast" : "slow"},
            {"mood", aa == "CinematicPremium" ? "orchestral" : "bright"}};
        return {doc.dump()};
    }
    if (task == "warm_start") {
        const double sigma = std::stod(param(request, "sigma", "10"));
        json doc;
        for (auto d : kAllDimensions) {
            const auto slot = static_cast<std::size_t>(d);
            for (int i = 0; i < arm_count(d); ++i) {
                const double noise =
                    gaussian01(env_.seed ^ 0x77a57ULL, slot * 16 + i, 7) * sigma;
                doc["priors"].push_back(
                    {{"dimension", dimension_name(d)},
                     {"arm_index", i},
                     {"score", std::clamp(env_.true_value(d, i) + noise, 0.0, 100.0)}});
            }
        }
        return {doc.dump()};
    }
    // Free-form text: deterministic stub.
    return {"sim-text:" + motif};
}

CapabilityResponse SimBackend::handle_judge(const CapabilityRequest& request) {
    if (malform_next_judge > 0) {
        --malform_next_judge;
        return {"I could not produce the requested JSON this time."};
    }
    const std::string task = param(request, "task");
    const std::string fp = request_fingerprint(request);
    const std::string motif = sha256_hex(fp + std::to_string(env_.seed)).substr(0, 8);

    if (task == "judge_storyline") {
        const double score = next_judge_score(request, 55.0, 95.0);
        VerifierReport report;
        for (const auto& key : storyline_breakdown_keys()) report.breakdown[key] = score / 5.0;
        report.score = score;
        report.feedback = "Simulated storyline critique (" + motif + ").";
        report.actionable_feedback =
            "Sharpen the opening hook and product integration (" + motif + ").";
        return {serialize_storyline_report(report).dump(2)};
    }
    if (task == "judge_keyframes") {
        const double score = next_judge_score(request, 55.0, 95.0);
        std::vector<int> flags;
        if (!scripted_flags.empty()) {
            flags = scripted_flags.front();
            scripted_flags.pop_front();
        }
        return {video_report_doc(score, score, score, score, motif, &flags).dump(2)};
    }
    if (task == "judge_video") {
        const auto config = CreativeConfig::from_indices(std::stoi(param(request, "cs", "0")),
                                                         std::stoi(param(request, "nm", "0")),
                                                         std::stoi(param(request, "aa", "0")));
        const long draw = std::stol(param(request, "draw", "0"));
        if (!scripted_judge_scores.empty()) {
            const double score = scripted_judge_scores.front();
            scripted_judge_scores.pop_front();
            return {video_report_doc(score, score, score, score, motif, nullptr).dump(2)};
        }
        return {sim_judge_document(config, env_, draw)};
    }
    if (task == "bench_judge") {
        const uint64_t key =
            std::stoull(fp.substr(0, 15), nullptr, 16) ^ mix64(env_.seed ^ 0xbe0cULL);
        BenchScores s;
        s.vaf = 50.0 + 45.0 * uniform01(key + 1);
        s.da = 50.0 + 45.0 * uniform01(key + 2);
        s.ma = 50.0 + 45.0 * uniform01(key + 3);
        s.vq = 50.0 + 45.0 * uniform01(key + 4);
        s.vaf_reasoning = "Simulated asset-fidelity reasoning (" + motif + ").";
        s.da_reasoning = "Simulated demographic-alignment reasoning (" + motif + ").";
        s.ma_reasoning = "Simulated marketing-appeal reasoning (" + motif + ").";
        s.vq_reasoning = "Simulated visual-quality reasoning (" + motif + ").";
        return {serialize_bench_report(s).dump(2)};
    }
    throw ValidationError("sim judge does not understand task '" + task + "'");
}

}  // namespace codirector
