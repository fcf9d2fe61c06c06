#ifndef CUSPLAB_EXPERIMENTS_HPP
#define CUSPLAB_EXPERIMENTS_HPP

#include "cusplab/bootstrap.hpp"
#include "cusplab/config.hpp"

#include <map>
#include <string>
#include <vector>

namespace cusplab {

/// Solved planted boundary-value instance: h = (embedded variation) +
/// seeded contamination, f = L h under the configured perturbed operator.
struct PlantedInstance {
    TensorField h;
    TensorField f;
    TrivialEinsteinVariation v;
};
PlantedInstance make_planted_instance(const PipelineSetup& setup,
                                      const TrivialEinsteinVariation& v, double contamination,
                                      std::uint64_t seed);

struct ExperimentResult {
    nlohmann::ordered_json report;
    std::map<std::string, std::string> csv; // filename -> content
    bool pass = false;
};

/// Runs the configured experiment; pure function of (config), no I/O.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// One run per axis value, headline constants per row, deterministic order.
ExperimentResult sweep(const ExperimentConfig& config, const std::string& axis,
                       const std::vector<double>& values);

/// Writes report.json and the CSV artefacts into out_dir (created if needed).
void write_artifacts(const ExperimentResult& result, const std::string& out_dir);

/// Serialises the report with the volatile timestamp field removed; two runs
/// with equal config and seed produce byte-identical strings.
std::string report_without_timestamp(const nlohmann::ordered_json& report);

} // namespace cusplab

#endif
