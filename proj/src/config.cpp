#include "cusplab/config.hpp"

#include "cusplab/errors.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace cusplab {

namespace {

void expect_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                 const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key()))
            throw ParameterError("config: unknown key '" + it.key() + "' in " + where);
    }
}

template <class T>
void read(const nlohmann::json& j, const char* key, T& dst) {
    if (j.contains(key)) dst = j.at(key).get<T>();
}

} // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    expect_keys(j, {"experiment", "seed", "out_dir", "geometry", "params", "samples", "plant"},
                "top level");
    read(j, "experiment", c.experiment);
    read(j, "seed", c.seed);
    read(j, "out_dir", c.out_dir);
    if (j.contains("geometry")) {
        const auto& g = j.at("geometry");
        expect_keys(g, {"gram", "R", "dr", "K"}, "geometry");
        if (g.contains("gram")) {
            const auto& m = g.at("gram");
            if (!m.is_array() || m.size() != 2 || m.at(0).size() != 2 || m.at(1).size() != 2)
                throw ParameterError("config: gram must be a 2x2 matrix");
            c.gram11 = m.at(0).at(0).get<double>();
            c.gram12 = m.at(0).at(1).get<double>();
            c.gram22 = m.at(1).at(1).get<double>();
            if (m.at(1).at(0).get<double>() != c.gram12)
                throw ParameterError("config: gram must be symmetric");
        }
        read(g, "R", c.R);
        read(g, "dr", c.dr);
        read(g, "K", c.K);
    }
    if (j.contains("params")) {
        const auto& p = j.at("params");
        expect_keys(p,
                    {"lambda", "eta", "epsilon0", "sigma_margin", "growing_coeff_tol", "trace_tol",
                     "kernel_tol", "step_factor", "rate_slack", "rate_fit_window"},
                    "params");
        read(p, "lambda", c.lambda);
        read(p, "eta", c.eta);
        read(p, "epsilon0", c.epsilon0);
        read(p, "sigma_margin", c.sigma_margin);
        read(p, "growing_coeff_tol", c.growing_coeff_tol);
        read(p, "trace_tol", c.trace_tol);
        read(p, "kernel_tol", c.kernel_tol);
        read(p, "step_factor", c.step_factor);
        read(p, "rate_slack", c.rate_slack);
        read(p, "rate_fit_window", c.rate_fit_window);
    }
    if (j.contains("samples")) {
        const auto& s = j.at("samples");
        expect_keys(s,
                    {"compat", "poincare_tori", "poincare_fields", "fd_eigensolve_tori", "fd_grid",
                     "ode_instances", "ode_sweep_instances", "norms_sigma_steps"},
                    "samples");
        read(s, "compat", c.compat_samples);
        read(s, "poincare_tori", c.poincare_tori);
        read(s, "poincare_fields", c.poincare_fields);
        read(s, "fd_eigensolve_tori", c.fd_eigensolve_tori);
        read(s, "fd_grid", c.fd_grid);
        read(s, "ode_instances", c.ode_instances);
        read(s, "ode_sweep_instances", c.ode_sweep_instances);
        read(s, "norms_sigma_steps", c.norms_sigma_steps);
    }
    if (j.contains("plant")) {
        const auto& p = j.at("plant");
        expect_keys(p, {"v11", "v12", "contamination"}, "plant");
        read(p, "v11", c.plant_v11);
        read(p, "v12", c.plant_v12);
        read(p, "contamination", c.plant_contamination);
    }
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("config: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("config: JSON parse error: ") + e.what());
    }
    return from_json(j);
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
    nlohmann::ordered_json j;
    j["experiment"] = experiment;
    j["seed"] = seed;
    j["out_dir"] = out_dir;
    j["geometry"] = {{"gram", {{gram11, gram12}, {gram12, gram22}}},
                     {"R", R},
                     {"dr", dr},
                     {"K", K}};
    j["params"] = {{"lambda", lambda},
                   {"eta", eta},
                   {"epsilon0", epsilon0},
                   {"sigma_margin", sigma_margin},
                   {"growing_coeff_tol", growing_coeff_tol},
                   {"trace_tol", trace_tol},
                   {"kernel_tol", kernel_tol},
                   {"step_factor", step_factor},
                   {"rate_slack", rate_slack},
                   {"rate_fit_window", rate_fit_window}};
    j["samples"] = {{"compat", compat_samples},
                    {"poincare_tori", poincare_tori},
                    {"poincare_fields", poincare_fields},
                    {"fd_eigensolve_tori", fd_eigensolve_tori},
                    {"fd_grid", fd_grid},
                    {"ode_instances", ode_instances},
                    {"ode_sweep_instances", ode_sweep_instances},
                    {"norms_sigma_steps", norms_sigma_steps}};
    j["plant"] = {{"v11", plant_v11}, {"v12", plant_v12}, {"contamination", plant_contamination}};
    return j;
}

void ExperimentConfig::validate() const {
    static const std::set<std::string> kinds = {"compat", "bootstrap", "ode-lemma",
                                                "poincare-sweep", "norms-sweep"};
    if (!kinds.count(experiment))
        throw ParameterError("config: unknown experiment kind '" + experiment + "'");
    if (!(lambda > 0.0 && lambda < 1.0)) throw ParameterError("config: lambda must lie in (0,1)");
    if (!(eta > 1.0)) throw ParameterError("config: eta must be > 1");
    if (!(epsilon0 >= 0.0)) throw ParameterError("config: epsilon0 must be >= 0");
    if (!(dr > 0.0)) throw ParameterError("config: dr must be positive");
    if (!(R >= 5.0 * dr)) throw ParameterError("config: R must be at least 5*dr");
    if (K < 0) throw ParameterError("config: K must be nonnegative");
    if (!(sigma_margin > 0.0 && sigma_margin < lambda))
        throw ParameterError("config: sigma_margin must lie in (0, lambda)");
    if (!(step_factor > 0.0 && step_factor < 1.0))
        throw ParameterError("config: step_factor must lie in (0,1)");
    // a margin too wide for the sigma step surfaces as a ParameterError from
    // the bootstrap iteration itself; it does not invalidate other experiments
    // gram positivity via the metric constructor
    (void)FlatTorusMetric(gram11, gram12, gram22);
    if (compat_samples < 1 || poincare_tori < 1 || poincare_fields < 1 || ode_instances < 1 ||
        ode_sweep_instances < 1 || norms_sigma_steps < 2 || fd_eigensolve_tori < 0)
        throw ParameterError("config: sample counts must be positive");
    if (fd_grid < 8) throw ParameterError("config: fd_grid must be at least 8");
}

PipelineSetup ExperimentConfig::setup() const {
    WeightParams w(lambda, eta, sigma_margin);
    PipelineParams p(w);
    p.epsilon0 = epsilon0;
    p.seed = seed;
    p.growing_coeff_tol = growing_coeff_tol;
    p.trace_tol = trace_tol;
    p.kernel_tol = kernel_tol;
    p.step_factor = step_factor;
    p.rate_slack = rate_slack;
    p.rate_fit_window = rate_fit_window;
    return PipelineSetup(CuspMetric(torus(), R), grid(), K, p);
}

} // namespace cusplab
