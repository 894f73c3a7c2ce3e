#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "codirector/backends.hpp"
#include "codirector/bandit.hpp"
#include "codirector/benchmark.hpp"
#include "codirector/creative_space.hpp"
#include "codirector/errors.hpp"
#include "codirector/experiment.hpp"
#include "codirector/pipeline.hpp"
#include "codirector/stats.hpp"
#include "codirector/verifiers.hpp"

namespace py = pybind11;
using namespace codirector;
using nlohmann::json;

namespace {

CreativeDimension dim_arg(const std::string& name) { return dimension_from_name(name); }

AlphaMetric alpha_metric_arg(const std::string& name) {
    if (name == "nominal") return AlphaMetric::Nominal;
    if (name == "ordinal") return AlphaMetric::Ordinal;
    if (name == "interval") return AlphaMetric::Interval;
    throw ValidationError("unknown alpha metric: " + name);
}

RatingsMatrix matrix_arg(const std::vector<std::vector<std::optional<int>>>& rows) {
    RatingsMatrix m;
    m.ratings = rows;
    m.validate();
    return m;
}

}  // namespace

PYBIND11_MODULE(_codirector, m) {
    m.doc() = "Bandit-steered video advertisement generation engine";

    py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    // creative space
    m.def("dimensions", []() {
        std::vector<std::string> names;
        for (auto d : kAllDimensions) names.push_back(dimension_name(d));
        return names;
    });
    m.def("arms", [](const std::string& dimension) {
        std::vector<std::pair<int, std::string>> out;
        for (const auto& arm : enumerate_arms(dim_arg(dimension))) {
            out.emplace_back(arm.index, arm.label);
        }
        return out;
    });
    m.def("config_space_size", &config_space_size);

    // bandit
    m.def("ucb_index", &ucb_index, py::arg("value"), py::arg("pulls"), py::arg("total_pulls"),
          py::arg("c"));

    py::class_<BanditPolicy>(m, "BanditPolicy")
        .def_static(
            "create",
            [](double c, const std::string& mode) {
                return BanditPolicy::create(c, reward_mode_from_name(mode));
            },
            py::arg("exploration_constant") = 1.41421356, py::arg("mode") = "factored")
        .def("warm_start",
             [](BanditPolicy& self,
                const std::vector<std::tuple<std::string, int, double, double>>& priors) {
                 std::vector<WarmStartPrior> parsed;
                 for (const auto& [dim, arm, value, weight] : priors) {
                     parsed.push_back({dim_arg(dim), arm, value, weight});
                 }
                 self.warm_start(parsed);
             })
        .def("select",
             [](const BanditPolicy& self) {
                 const CreativeConfig config = self.select();
                 return std::make_tuple(config.cs.index, config.nm.index, config.aa.index);
             })
        .def("update",
             [](BanditPolicy& self, std::tuple<int, int, int> config,
                std::tuple<double, double, double> components, double aggregate) {
                 const auto [cs, nm, aa] = config;
                 const auto [r_cs, r_nm, r_aa] = components;
                 self.update(CreativeConfig::from_indices(cs, nm, aa),
                             FactoredReward{r_cs, r_nm, r_aa, aggregate});
             })
        .def("best_arm",
             [](const BanditPolicy& self, const std::string& dimension) {
                 return self.best_arm(dim_arg(dimension)).label;
             })
        .def("state_json", [](const BanditPolicy& self) { return self.to_json().dump(); });

    // verifier schemas; every parser returns the normalized report as a JSON string
    m.def("extract_json_object", &extract_json_object);
    m.def("parse_storyline_report", [](const std::string& doc) {
        return serialize_storyline_report(parse_storyline_report(doc)).dump();
    });
    m.def("parse_keyframe_report", [](const std::string& doc) {
        return serialize_keyframe_report(parse_keyframe_report(doc)).dump();
    });
    m.def("parse_video_report", [](const std::string& doc) {
        return serialize_video_report(parse_video_report(doc)).dump();
    });
    m.def("parse_bench_report", [](const std::string& doc) {
        return serialize_bench_report(parse_bench_report(doc)).dump();
    });

    // simulation and experiments
    m.def("run_experiment",
          [](const std::string& env_json, const std::string& policy, int iterations,
             int repeats, uint64_t seed) {
              const SimEnvironment env = SimEnvironment::from_json(json::parse(env_json));
              ExperimentOptions options;
              options.iterations = iterations;
              options.repeats = repeats;
              options.seed = seed;
              return run_policy_experiment(env, policy_kind_from(policy), options)
                  .to_json()
                  .dump();
          },
          py::arg("env_json"), py::arg("policy") = "mab", py::arg("iterations") = 10,
          py::arg("repeats") = 200, py::arg("seed") = 0);

    m.def("run_pipeline",
          [](const std::string& prompt, int iterations, uint64_t seed,
             const std::string& run_dir, const std::string& env_json) {
              SimEnvironment env = env_json.empty()
                                       ? SimEnvironment::from_json(json::parse(
                                             R"({"true_values":{"creative_strategy":[62,78,55],
                                                 "narrative_mode":[70,58,66],
                                                 "aesthetic_archetype":[60,72,50,65]},
                                                 "noise_sigma":3.0})"))
                                       : SimEnvironment::from_json(json::parse(env_json));
              env.seed = seed;
              SimBackend backend(env);
              BanditPolicy policy = BanditPolicy::create(1.41421356, RewardMode::Factored);
              const RunResult result = run({prompt, {}}, iterations, policy, backend, {}, seed,
                                           run_dir, true);
              json doc = {{"best_index", result.best_index},
                          {"iterations", result.records.size()}};
              if (result.best_index >= 0) {
                  const auto& best = result.records[result.best_index];
                  doc["best"] = {{"config", best.config.short_label()},
                                 {"score", best.report.score}};
              }
              return doc.dump();
          },
          py::arg("prompt"), py::arg("iterations") = 4, py::arg("seed") = 0,
          py::arg("run_dir") = "runs/py", py::arg("env_json") = "");

    // agreement statistics
    m.def("krippendorff_alpha",
          [](const std::vector<std::vector<std::optional<int>>>& rows,
             const std::string& metric) {
              return krippendorff_alpha(matrix_arg(rows), alpha_metric_arg(metric));
          },
          py::arg("ratings"), py::arg("metric") = "interval");
    m.def("pairwise_kappa", [](const std::vector<std::vector<std::optional<int>>>& rows) {
        return pairwise_kappa(matrix_arg(rows));
    });
    m.def("pearson", &pearson);
    m.def("spearman", &spearman);
    m.def("mean_absolute_error", &mean_absolute_error);
    m.def("scale_to_likert", &scale_to_likert);
    m.def("correlation_suite", [](const std::vector<double>& judge,
                                  const std::vector<double>& mos) {
        const CorrelationSuite suite = correlation_suite(judge, mos);
        py::dict out;
        out["pearson"] = suite.pearson;
        out["spearman"] = suite.spearman;
        out["mae"] = suite.mae;
        return out;
    });

    // benchmark scenarios
    m.def("parse_scenarios", [](const std::string& text) {
        std::vector<std::string> out;
        for (const auto& s : parse_scenarios(text)) out.push_back(s.to_json().dump());
        return out;
    });
    m.def("aggregate_bench",
          [](const std::vector<std::tuple<double, double, double, double>>& results) {
              std::vector<BenchScores> scores;
              for (const auto& [vaf, da, ma, vq] : results) {
                  BenchScores s;
                  s.vaf = vaf;
                  s.da = da;
                  s.ma = ma;
                  s.vq = vq;
                  scores.push_back(s);
              }
              const BenchAggregate agg = aggregate(scores);
              py::dict out;
              out["VAF"] = agg.vaf;
              out["DA"] = agg.da;
              out["MA"] = agg.ma;
              out["VQ"] = agg.vq;
              out["Avg"] = agg.avg;
              return out;
          });
}
