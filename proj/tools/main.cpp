// Command-line entry point for the normalized Dirac solitary-wave solver.
#include <CLI11.hpp>

#include <normdirac/cli.hpp>

int main(int argc, char** argv) {
    CLI::App app{"normdirac: normalized stationary states of the nonlinear "
                 "Dirac equation on a periodic box"};
    app.require_subcommand(1);

    normdirac::RunManifest manifest;
    const std::vector<std::string> names = {"solve",          "verify",
                                            "sweep-epsilon",  "sweep-lambda",
                                            "estimate-constants", "check-gamma"};
    const std::vector<std::string> descriptions = {
        "converge one normalized stationary state and write its report",
        "run the inequality scorecard for the configured problem",
        "dilation asymptotics of the Gaussian seed family",
        "minimal energy e(lambda) over a grid of mass levels",
        "estimate the Sobolev constants and derived coupling bounds",
        "test a coupling against the admissibility inequalities"};

    for (std::size_t i = 0; i < names.size(); ++i) {
        CLI::App* sub = app.add_subcommand(names[i], descriptions[i]);
        sub->add_option("-c,--config", manifest.config_path,
                        "key = value configuration file");
        sub->add_option("-o,--out", manifest.output_dir,
                        "output directory (default: $NORMDIRAC_OUT or ./normdirac-out)");
        sub->add_option("-s,--seed", manifest.rng_seed, "run seed, recorded in reports");
        sub->add_flag("--recompute-constants", manifest.recompute_constants,
                      "ignore the cached constants table");
        sub->add_flag("--trace", manifest.trace, "write per-iteration CSV traces");
        if (names[i] == "check-gamma")
            sub->add_option("--gamma", manifest.gamma_override,
                            "coupling to test (overrides the config)");
        sub->callback([&manifest, name = names[i]] { manifest.subcommand = name; });
    }

    CLI11_PARSE(app, argc, argv);
    return normdirac::run(manifest);
}
