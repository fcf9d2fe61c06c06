#ifndef CUSPLAB_CONFIG_HPP
#define CUSPLAB_CONFIG_HPP

#include "cusplab/bootstrap.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>

namespace cusplab {

/// One experiment run, fully described by a single JSON document. Every
/// field has a default (see schema/experiment_config.schema.json); unknown
/// keys are rejected.
struct ExperimentConfig {
    std::string experiment = "compat"; // compat|bootstrap|ode-lemma|poincare-sweep|norms-sweep
    std::uint64_t seed = 1;
    std::string out_dir = "out";

    // geometry
    double gram11 = 1.0, gram12 = 0.0, gram22 = 1.0;
    double R = 20.0;
    double dr = 0.01;
    int K = 8;

    // model parameters
    double lambda = 0.5;
    double eta = 1.5;
    double epsilon0 = 1e-3;
    double sigma_margin = 0.05;
    double growing_coeff_tol = 1e-6;
    double trace_tol = 1e-4;
    double kernel_tol = 1e-6;
    double step_factor = 0.9;
    double rate_slack = 0.05;
    double rate_fit_window = 5.0;

    // sample counts
    int compat_samples = 4;
    int poincare_tori = 100;
    int poincare_fields = 20;
    int fd_eigensolve_tori = 20;
    int fd_grid = 64;
    int ode_instances = 100;
    int ode_sweep_instances = 8;
    int norms_sigma_steps = 9;

    // planted instance (bootstrap experiment)
    double plant_v11 = 0.3;
    double plant_v12 = 0.0;
    double plant_contamination = 0.5;

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::string& path);
    nlohmann::ordered_json to_json() const;

    void validate() const;

    FlatTorusMetric torus() const { return {gram11, gram12, gram22}; }
    RadialGrid grid() const { return {R, dr}; }
    PipelineSetup setup() const;
};

} // namespace cusplab

#endif
