// Subcommand dispatch behind the command-line tool: wires configs to the
// solver and verification suites and writes reports to the output
// directory.  Exit codes: 0 success, 1 solver failure, 2 failed checks,
// 3 invalid configuration.
#pragma once

#include <iostream>

#include "normdirac/io.hpp"

namespace normdirac {

struct RunManifest {
    std::string subcommand;
    std::string config_path;
    std::string output_dir;  // empty: $NORMDIRAC_OUT or ./normdirac-out
    std::uint64_t rng_seed = 1;
    bool recompute_constants = false;
    double gamma_override = -1.0;  // check-gamma without a config edit
    bool trace = false;
};

namespace cli_detail {

inline std::string resolve_output_dir(const RunManifest& m) {
    if (!m.output_dir.empty()) return m.output_dir;
    if (const char* env = std::getenv("NORMDIRAC_OUT")) return env;
    return "normdirac-out";
}

inline ConstantsTable obtain_constants(const RunConfig& rc, const std::string& outdir,
                                       bool force) {
    const std::string cache = outdir + "/constants_cache.json";
    if (!force && !rc.recompute_constants) {
        if (auto hit = load_cached_constants(cache, rc.grid, rc.nonlinearity))
            return *hit;
    }
    ConstantsTable t = build_constants_table(rc.grid, rc.nonlinearity, rc.ascent);
    store_cached_constants(cache, rc.grid, rc.nonlinearity, t);
    return t;
}

inline void write_outer_trace_csv(const std::string& path,
                                  const std::vector<OuterTraceSample>& samples) {
    std::ofstream out(path);
    out << "iteration,E,grad_norm,omega,eta_norm_sq\n" << std::setprecision(17);
    for (const auto& s : samples)
        out << s.iteration << ',' << s.E << ',' << s.grad_norm << ',' << s.omega << ','
            << s.eta_norm_sq << '\n';
}

}  // namespace cli_detail

inline int run(const RunManifest& manifest) {
    using namespace cli_detail;
    try {
        const std::string outdir = resolve_output_dir(manifest);
        std::filesystem::create_directories(outdir);

        RunConfig rc;
        if (!manifest.config_path.empty())
            rc = load_run_config(ConfigFile::parse_file(manifest.config_path));
        else
            rc = RunConfig{};
        rc.solve.rng_seed = manifest.rng_seed;

        if (manifest.subcommand == "estimate-constants") {
            const ConstantsTable t = obtain_constants(rc, outdir, /*force=*/true);
            json out = to_json(t);
            out["constants_key"] = constants_cache_key(rc.grid, rc.nonlinearity);
            out["rng_seed"] = manifest.rng_seed;
            out["code_version"] = version_string;
            write_json_file(outdir + "/constants.json", out);
            const HypothesisReport hyp =
                validate_hypotheses(rc.nonlinearity, 4000, manifest.rng_seed);
            json hyp_out = to_json(hyp);
            hyp_out["rng_seed"] = manifest.rng_seed;
            hyp_out["code_version"] = version_string;
            write_json_file(outdir + "/hypotheses.json", hyp_out);
            std::cerr << "constants written, gamma0 = " << t.gamma0() << "\n";
            return 0;
        }

        const ConstantsTable table =
            obtain_constants(rc, outdir, manifest.recompute_constants);

        if (manifest.subcommand == "check-gamma") {
            const double gamma = manifest.gamma_override > 0.0
                                     ? manifest.gamma_override
                                     : rc.resolve_gamma(table.gamma0());
            if (!(gamma > 0.0)) {
                std::cerr << "check-gamma: gamma must be positive\n";
                return 3;
            }
            AdmissibilityReport rep =
                check_gamma_admissible(gamma, table, table.mu, table.alpha);
            json out = to_json(rep);
            out["rng_seed"] = manifest.rng_seed;
            out["code_version"] = version_string;
            write_json_file(outdir + "/gamma_admissibility.json", out);
            std::cerr << "gamma = " << gamma << (rep.admissible ? " admissible"
                                                                : " NOT admissible")
                      << " (gamma0 = " << rep.gamma0 << ")\n";
            return rep.admissible ? 0 : 2;
        }

        if (manifest.subcommand == "solve") {
            SolveConfig cfg = rc.solve;
            cfg.gamma = rc.resolve_gamma(table.gamma0());
            if (!rc.seed_field_path.empty())
                cfg.seed_field = import_field_binary(rc.seed_field_path);
            std::vector<OuterTraceSample> samples;
            auto sink = [&](const OuterTraceSample& s) { samples.push_back(s); };
            const SolveReport rep = minimize_outer(
                cfg, table,
                manifest.trace ? std::function<void(const OuterTraceSample&)>(sink)
                               : std::function<void(const OuterTraceSample&)>{});
            json rep_json = to_json(rep);
            rep_json["constants_key"] = constants_cache_key(rc.grid, rc.nonlinearity);
            write_json_file(outdir + "/solve_report.json", rep_json);
            export_field_binary(rep.psi, outdir + "/psi.bin");
            export_field_csv(rep.psi, outdir + "/psi.csv");
            if (manifest.trace) {
                write_outer_trace_csv(outdir + "/outer_trace.csv", samples);
                // inner trace at the converged w: iter, J, grad_norm, |eta|^2
                std::ofstream inner_csv(outdir + "/inner_trace.csv");
                inner_csv << "iteration,J,grad_norm,eta_norm_sq\n"
                          << std::setprecision(17);
                InnerOptions iopt;
                iopt.max_iterations = cfg.max_inner_iterations;
                iopt.trace = [&](int it, double J, double gn, double esq) {
                    inner_csv << it << ',' << J << ',' << gn << ',' << esq << '\n';
                };
                maximize_inner(rep.w, cfg.lambda, cfg.gamma, cfg.tol_inner,
                               cfg.nonlinearity, iopt);
            }
            bool all_pass = rep.success;
            for (const auto& c : rep.checks) all_pass = all_pass && c.pass;
            std::cerr << "solve: E = " << std::setprecision(12) << rep.E_value
                      << ", omega = " << rep.omega << ", residual = " << rep.residual
                      << "\n";
            return all_pass ? 0 : 2;
        }

        if (manifest.subcommand == "verify") {
            ScorecardOptions opt = rc.scorecard;
            opt.seed = manifest.rng_seed;
            SolveConfig cfg = rc.solve;
            cfg.gamma = rc.resolve_gamma(table.gamma0());
            const Scorecard card = run_scorecard(cfg, table, opt);
            json out;
            out["checks"] = json::array();
            for (const auto& c : card.results) out["checks"].push_back(to_json(c));
            out["solve"] = to_json(card.solve);
            out["all_conclusive_pass"] = card.all_conclusive_pass;
            out["rng_seed"] = manifest.rng_seed;
            out["code_version"] = version_string;
            write_json_file(outdir + "/scorecard.json", out);
            const std::string text = scorecard_text(card.results);
            std::ofstream(outdir + "/scorecard.txt") << text;
            std::cerr << text;
            return card.all_conclusive_pass ? 0 : 2;
        }

        if (manifest.subcommand == "sweep-epsilon") {
            const SeedSweepResult sweep = run_seed_sweep(
                rc.sweep_epsilons, rc.sweep_n, rc.sweep_box_scale, rc.grid.mass);
            json out = {{"epsilons", sweep.epsilons},
                        {"h_excess", sweep.h_excess},
                        {"l2_dist", sweep.l2_dist},
                        {"slope_h_excess", sweep.slope_h_excess},
                        {"slope_l2_dist", sweep.slope_l2_dist},
                        {"n", rc.sweep_n},
                        {"box_scale", rc.sweep_box_scale},
                        {"rng_seed", manifest.rng_seed},
                        {"code_version", version_string}};
            write_json_file(outdir + "/seed_sweep.json", out);
            std::ofstream csv(outdir + "/seed_sweep.csv");
            csv << "epsilon,h_excess,l2_dist\n" << std::setprecision(17);
            for (std::size_t i = 0; i < sweep.epsilons.size(); ++i)
                csv << sweep.epsilons[i] << ',' << sweep.h_excess[i] << ','
                    << sweep.l2_dist[i] << '\n';
            std::cerr << "seed sweep: slopes " << sweep.slope_h_excess << " (H excess), "
                      << sweep.slope_l2_dist << " (L2 distance)\n";
            return 0;
        }

        if (manifest.subcommand == "sweep-lambda") {
            SolveConfig cfg = rc.solve;
            cfg.gamma = rc.resolve_gamma(table.gamma0());
            json rows = json::array();
            std::ofstream csv(outdir + "/lambda_sweep.csv");
            csv << "lambda,E,omega,residual\n" << std::setprecision(17);
            double prev_E = -std::numeric_limits<double>::infinity();
            bool monotone = true;
            for (double lambda : rc.sweep_lambdas) {
                SolveConfig c = cfg;
                c.lambda = lambda;
                const SolveReport rep = minimize_outer(c, table);
                rows.push_back({{"lambda", lambda},
                                {"E", rep.E_value},
                                {"omega", rep.omega},
                                {"residual", rep.residual}});
                csv << lambda << ',' << rep.E_value << ',' << rep.omega << ','
                    << rep.residual << '\n';
                monotone = monotone && rep.E_value >= prev_E - 1e-12;
                prev_E = rep.E_value;
            }
            json out = {{"rows", rows},
                        {"monotone_nondecreasing", monotone},
                        {"rng_seed", manifest.rng_seed},
                        {"code_version", version_string}};
            write_json_file(outdir + "/lambda_sweep.json", out);
            return 0;
        }

        std::cerr << "unknown subcommand: " << manifest.subcommand << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 3;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace normdirac
