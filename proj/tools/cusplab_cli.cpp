#include "cusplab/errors.hpp"
#include "cusplab/experiments.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>
#include <sstream>

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

cusplab::ExperimentConfig load_config(const CommonOpts& opts, const std::string& kind) {
    cusplab::ExperimentConfig config;
    if (!opts.config_path.empty())
        config = cusplab::ExperimentConfig::from_file(opts.config_path);
    config.experiment = kind;
    if (opts.seed_set) config.seed = opts.seed;
    if (const char* env = std::getenv("CUSPLAB_OUT_DIR")) config.out_dir = env;
    if (!opts.out_dir.empty()) config.out_dir = opts.out_dir;
    config.validate();
    return config;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON config file");
    cmd->add_option("--out", opts.out_dir, "output directory (overrides config and env)");
    cmd->add_option("--seed", opts.seed, "seed override")->each([&](const std::string&) {
        opts.seed_set = true;
    });
}

int finish(const cusplab::ExperimentResult& result, const std::string& out_dir) {
    cusplab::write_artifacts(result, out_dir);
    std::cout << (result.pass ? "PASS" : "FAIL") << "  report: " << out_dir << "/report.json\n";
    return result.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cusplab: verification experiments for the cusp ODE model"};
    app.require_subcommand(1);

    const std::vector<std::string> kinds = {"compat", "bootstrap", "ode-lemma", "poincare-sweep",
                                            "norms-sweep"};
    struct SubState {
        CommonOpts opts;
    };
    std::map<std::string, SubState> subs;
    for (const auto& kind : kinds) {
        auto& state = subs[kind];
        CLI::App* cmd = app.add_subcommand(kind, "run the " + kind + " experiment");
        add_common(cmd, state.opts);
    }

    CommonOpts sweep_opts;
    std::string sweep_axis;
    std::string sweep_values;
    std::string sweep_kind = "compat";
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run one experiment per parameter value");
    add_common(sweep_cmd, sweep_opts);
    sweep_cmd->add_option("--axis", sweep_axis, "parameter to sweep")->required();
    sweep_cmd->add_option("--values", sweep_values, "comma-separated values")->required();
    sweep_cmd->add_option("--experiment", sweep_kind, "experiment kind to run per value");

    CLI11_PARSE(app, argc, argv);

    try {
        for (const auto& kind : kinds) {
            if (app.got_subcommand(kind)) {
                const auto config = load_config(subs[kind].opts, kind);
                return finish(cusplab::run_experiment(config), config.out_dir);
            }
        }
        if (app.got_subcommand("sweep")) {
            const auto config = load_config(sweep_opts, sweep_kind);
            std::vector<double> values;
            std::stringstream ss(sweep_values);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                if (!tok.empty()) values.push_back(std::stod(tok));
            }
            return finish(cusplab::sweep(config, sweep_axis, values), config.out_dir);
        }
    } catch (const cusplab::ParameterError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const cusplab::DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "certification failure: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
