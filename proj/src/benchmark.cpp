#include "codirector/benchmark.hpp"

#include <array>
#include <fstream>
#include <map>
#include <sstream>

#include "codirector/errors.hpp"

namespace codirector {

using nlohmann::json;

std::string demographic_type_name(DemographicType t) {
    return t == DemographicType::Stereotypical ? "Stereotypical" : "Unconventional";
}

DemographicType demographic_type_from(const std::string& name) {
    if (name == "Stereotypical") return DemographicType::Stereotypical;
    if (name == "Unconventional") return DemographicType::Unconventional;
    throw ValidationError("unknown demographic_type: " + name);
}

std::string split_name(Split s) {
    switch (s) {
        case Split::Hillclimb: return "Hillclimb";
        case Split::ValidationInDomain: return "ValidationInDomain";
        case Split::ValidationOOD: return "ValidationOOD";
    }
    return "Hillclimb";
}

Split split_from(const std::string& name) {
    if (name == "Hillclimb") return Split::Hillclimb;
    if (name == "ValidationInDomain") return Split::ValidationInDomain;
    if (name == "ValidationOOD") return Split::ValidationOOD;
    throw ValidationError("unknown split: " + name);
}

std::string Scenario::prompt() const {
    return brand + " builds " + product + ", targeting " + gender + " aged " + age + " in " +
           location + " who are interested in " + interest + ".";
}

json Scenario::to_json() const {
    return {{"id", id},
            {"brand", brand},
            {"product", product},
            {"gender", gender},
            {"age", age},
            {"location", location},
            {"interest", interest},
            {"demographic_type", demographic_type_name(demographic_type)},
            {"logo_ref", logo_ref},
            {"product_ref", product_ref},
            {"split", split_name(split)}};
}

Scenario Scenario::from_json(const json& doc) {
    Scenario s;
    for (const char* field : {"brand", "product", "gender", "age", "location", "interest",
                              "demographic_type", "logo_ref", "product_ref", "split"}) {
        if (!doc.contains(field) || !doc[field].is_string()) {
            throw ValidationError(std::string("scenario missing string field '") + field + "'");
        }
    }
    if (!doc.contains("id") || !doc["id"].is_number_integer()) {
        throw ValidationError("scenario missing integer field 'id'");
    }
    s.id = doc["id"].get<int>();
    s.brand = doc["brand"].get<std::string>();
    s.product = doc["product"].get<std::string>();
    s.gender = doc["gender"].get<std::string>();
    s.age = doc["age"].get<std::string>();
    s.location = doc["location"].get<std::string>();
    s.interest = doc["interest"].get<std::string>();
    s.demographic_type = demographic_type_from(doc["demographic_type"].get<std::string>());
    s.logo_ref = doc["logo_ref"].get<std::string>();
    s.product_ref = doc["product_ref"].get<std::string>();
    s.split = split_from(doc["split"].get<std::string>());
    return s;
}

std::vector<Scenario> parse_scenarios(const std::string& text) {
    std::vector<Scenario> scenarios;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            scenarios.push_back(Scenario::from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": malformed scenario JSON: " + e.what());
        } catch (const ValidationError& e) {
            throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }

    // Every (brand, product) must come in a Stereotypical/Unconventional pair.
    std::map<std::pair<std::string, std::string>, std::array<int, 2>> pair_counts;
    std::map<int, int> id_counts;
    for (const auto& s : scenarios) {
        pair_counts[{s.brand, s.product}][static_cast<int>(s.demographic_type)] += 1;
        if (++id_counts[s.id] > 1) {
            throw ValidationError("duplicate scenario id " + std::to_string(s.id));
        }
    }
    for (const auto& [key, counts] : pair_counts) {
        if (counts[0] != counts[1]) {
            throw ValidationError("product '" + key.second + "' of brand '" + key.first +
                                  "' lacks a matched demographic pair (" +
                                  std::to_string(counts[0]) + " Stereotypical vs " +
                                  std::to_string(counts[1]) + " Unconventional)");
        }
    }
    return scenarios;
}

std::vector<Scenario> load_scenarios(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario file: " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_scenarios(buffer.str());
}

json BenchAggregate::to_json() const {
    return {{"VAF", vaf}, {"DA", da}, {"MA", ma}, {"VQ", vq}, {"Avg", avg}};
}

BenchAggregate aggregate(const std::vector<BenchScores>& results) {
    if (results.empty()) throw ValidationError("cannot aggregate an empty result list");
    BenchAggregate out;
    for (const auto& r : results) {
        out.vaf += r.vaf;
        out.da += r.da;
        out.ma += r.ma;
        out.vq += r.vq;
    }
    const double n = static_cast<double>(results.size());
    out.vaf /= n;
    out.da /= n;
    out.ma /= n;
    out.vq /= n;
    out.avg = (out.vaf + out.da + out.ma + out.vq) / 4.0;
    return out;
}

}  // namespace codirector
