#include "nfsde/pipeline.hpp"
#include "nfsde/errors.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>

using nlohmann::json;

namespace nfsde {

namespace {

int guard(const std::function<int()>& body) {
    try {
        return body();
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const validation_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeFailure;
    }
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
}

json hypothesis_to_json(const HypothesisReport& rep, const ContractionReport& con) {
    json j;
    j["sector"] = {{"pass", rep.sector.pass},
                   {"angle_ok", rep.sector.angle_ok},
                   {"angle_limit", rep.sector.angle_limit},
                   {"basis_condition", rep.sector.basis_condition}};
    auto eigs = json::array();
    for (const auto& e : rep.sector.eigenvalue_checks)
        eigs.push_back({{"value", e.value}, {"within", e.within}});
    j["sector"]["eigenvalues"] = eigs;
    j["k0"] = {{"declared", rep.declared_k0},
               {"analytic_bound", rep.analytic_k0},
               {"in_range", rep.k0_in_range}};
    j["L"] = {{"declared", rep.declared_L}, {"analytic_bound", rep.analytic_L}};
    j["trace_q"] = rep.trace_q;
    j["zero_at_zero"] = {{"residual_max", rep.zero_residual_max}, {"ok", rep.zero_at_zero_ok}};
    auto quots = json::array();
    for (const auto& q : rep.quotients)
        quots.push_back({{"name", q.name},
                         {"max_quotient", q.max_quotient},
                         {"declared", q.declared},
                         {"flagged", q.flagged}});
    j["quotients"] = quots;
    j["pass"] = rep.pass;
    j["contraction"] = {{"kappa1", con.kappa1_value},
                        {"kappa2_paper", con.kappa2_value.paper_value},
                        {"kappa2_quadrature", con.kappa2_value.quadrature_value},
                        {"b", con.b},
                        {"theta_paper", con.theta_paper},
                        {"theta_quadrature", con.theta_quadrature},
                        {"pass_paper", con.pass_paper},
                        {"pass_quadrature", con.pass_quadrature},
                        {"margin_paper", con.margin_paper},
                        {"margin_quadrature", con.margin_quadrature}};
    return j;
}

} // namespace

std::filesystem::path resolve_out_dir(const std::filesystem::path& cli_out,
                                      const std::string& subcommand) {
    if (!cli_out.empty()) return cli_out;
    if (const char* root = std::getenv("NFSDE_OUT_ROOT"))
        return std::filesystem::path(root) / subcommand;
    throw config_error("no --out given and NFSDE_OUT_ROOT is not set");
}

int cmd_ml_eval(double alpha, double beta, double z) {
    return guard([&] {
        std::printf("%.17g\n", ml_eval(alpha, beta, z));
        return kOk;
    });
}

int cmd_op_table(const std::filesystem::path& config, const std::filesystem::path& grid_out) {
    return guard([&] {
        const LoadedConfig cfg = load_config(config);
        const int n = cfg.solver.main_steps();
        const int d = cfg.model.dim();
        OperatorTable table(cfg.model.sectorial, cfg.solver.step_h, n);
        std::FILE* f = std::fopen(grid_out.c_str(), "w");
        if (!f) throw std::runtime_error("cannot open " + grid_out.string());
        std::fputs("t", f);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) std::fprintf(f, ",S_%d%d", r, c);
        std::fputc('\n', f);
        for (int j = 0; j <= n; ++j) {
            std::fprintf(f, "%.17g", j * cfg.solver.step_h);
            const Eigen::MatrixXd S = table.matrix(j);
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c) std::fprintf(f, ",%.17g", S(r, c));
            std::fputc('\n', f);
        }
        std::fclose(f);
        return kOk;
    });
}

int cmd_check(const std::filesystem::path& config, const std::filesystem::path& json_out,
              std::uint64_t seed) {
    return guard([&] {
        const LoadedConfig cfg = load_config(config);
        const HypothesisReport rep =
            validate_hypotheses(cfg.model, cfg.analysis.validation_budget, seed);
        const ContractionReport con = check_contraction(cfg.model);
        std::cout << rep.table() << "\n" << con.table();
        if (!con.pass_paper || !con.pass_quadrature)
            std::cout << "note: Theta >= 1 under at least one variant; Theorem-4.4 style "
                         "uniqueness is not certified for this preset\n";
        if (!json_out.empty()) {
            std::ofstream out(json_out);
            if (!out) throw std::runtime_error("cannot open " + json_out.string());
            out << hypothesis_to_json(rep, con).dump(2) << "\n";
        }
        return rep.pass ? kOk : kHypothesisFailure;
    });
}

int cmd_simulate(const SimulateOptions& opt) {
    return guard([&] {
        const auto t_start = std::chrono::steady_clock::now();
        LoadedConfig cfg = load_config(opt.config);
        if (opt.scheme) {
            if (*opt.scheme == "time_step")
                cfg.solver.scheme = SolverConfig::Scheme::TimeStep;
            else if (*opt.scheme == "picard")
                cfg.solver.scheme = SolverConfig::Scheme::Picard;
            else
                throw config_error("unknown scheme override: " + *opt.scheme);
        }
        const int n_paths = opt.paths.value_or(cfg.analysis.paths);
        const std::filesystem::path out = resolve_out_dir(opt.out, "runs");
        ensure_dir(out);

        const Ensemble ens =
            run_ensemble(cfg.model, cfg.solver, n_paths, opt.seed, opt.threads);

        RunManifest manifest;
        manifest.config_echo = cfg.echo;
        manifest.master_seed = opt.seed;
        manifest.n_paths = n_paths;
        manifest.scheme = cfg.solver.scheme == SolverConfig::Scheme::Picard ? "picard" : "time_step";
        manifest.step_h = cfg.solver.step_h;
        manifest.horizon_T = cfg.solver.horizon_T;
        manifest.grid_points = ens.paths.empty() ? 0 : ens.paths.front().points();
        manifest.version = kArtifactVersion;

        write_trajectories_csv(out / "trajectories.csv", ens);
        manifest.file_hashes.emplace_back("trajectories.csv",
                                          hash_hex(fnv1a64_file(out / "trajectories.csv")));
        if (cfg.solver.scheme == SolverConfig::Scheme::Picard) {
            write_picard_csv(out / "picard.csv", ens);
            manifest.file_hashes.emplace_back("picard.csv", hash_hex(fnv1a64_file(out / "picard.csv")));
        }
        if (opt.dump_noise) {
            std::vector<double> grid(static_cast<std::size_t>(cfg.solver.main_steps()) + 1);
            for (std::size_t j = 0; j < grid.size(); ++j)
                grid[j] = static_cast<double>(j) * cfg.solver.step_h;
            write_noise_csv(out / "noise_wiener.csv", out / "noise_jumps.csv", cfg.model.noise,
                            ens.path_seeds, grid);
            manifest.file_hashes.emplace_back("noise_wiener.csv",
                                              hash_hex(fnv1a64_file(out / "noise_wiener.csv")));
            manifest.file_hashes.emplace_back("noise_jumps.csv",
                                              hash_hex(fnv1a64_file(out / "noise_jumps.csv")));
        }
        manifest.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        std::ofstream mf(out / "manifest.json");
        mf << manifest.to_json() << "\n";
        std::cout << "wrote " << (out / "manifest.json").string() << " (" << n_paths
                  << " paths)\n";
        return kOk;
    });
}

int cmd_analyze(const AnalyzeOptionsCli& opt) {
    return guard([&] {
        const RunManifest manifest = RunManifest::from_json_file(opt.runs / "manifest.json");
        const LoadedConfig cfg = parse_config(json::parse(manifest.config_echo),
                                              (opt.runs / "manifest.json").string());
        const double omega = opt.omega.value_or(cfg.model.omega);

        Ensemble ens = read_trajectories_csv(opt.runs / "trajectories.csv", cfg.model, cfg.solver);
        AnalyzeOptions aopt;
        aopt.checkpoints = opt.checkpoints.value_or(cfg.analysis.checkpoints);
        aopt.decay_fraction = cfg.analysis.decay_fraction;
        aopt.dist.cloud_size = cfg.analysis.cloud_size;
        aopt.dist.bootstrap = cfg.analysis.bootstrap;
        aopt.dist.lp_cap = cfg.analysis.lp_cap;
        aopt.dist.seed = opt.seed;
        aopt.dist.n_workers = opt.threads;

        const PeriodicityReport rep = analyze_ensemble(ens, omega, aopt);

        const std::filesystem::path out = resolve_out_dir(opt.out, "report");
        ensure_dir(out);
        write_report_csv(out / "report.csv", rep);
        {
            std::ofstream jf(out / "report.json");
            jf << report_to_json(rep) << "\n";
        }
        std::vector<double> ms, ms_se, bl, bl_se, tr, tr_se;
        for (const auto& g : rep.ms_gaps) {
            ms.push_back(g.estimate);
            ms_se.push_back(g.std_error);
        }
        for (const auto& g : rep.trunc_bounds) {
            tr.push_back(g.estimate);
            tr_se.push_back(g.std_error);
        }
        for (const auto& g : rep.bl_gaps) {
            bl.push_back(g.estimate);
            bl_se.push_back(g.bootstrap_std_error);
        }
        write_gap_dat(out / "gaps_ms.dat", rep.t_checkpoints, ms, ms_se);
        write_gap_dat(out / "gaps_trunc.dat", rep.t_checkpoints, tr, tr_se);
        write_gap_dat(out / "gaps_bl.dat", rep.t_checkpoints, bl, bl_se);
        std::cout << "square-mean verdict: " << to_string(rep.ms_verdict)
                  << ", distribution verdict: " << to_string(rep.bl_verdict) << "\n";
        return kOk;
    });
}

int cmd_report(const ReportOptions& opt) {
    return guard([&] {
        const RunManifest manifest = RunManifest::from_json_file(opt.runs / "manifest.json");
        const LoadedConfig cfg = parse_config(json::parse(manifest.config_echo),
                                              (opt.runs / "manifest.json").string());
        const HypothesisReport hyp = validate_hypotheses(cfg.model, cfg.analysis.validation_budget, 7);
        const ContractionReport con = check_contraction(cfg.model);

        std::ifstream rf(opt.analysis / "report.json");
        if (!rf) throw std::runtime_error("cannot open " + (opt.analysis / "report.json").string());
        const json analysis = json::parse(rf);

        const std::filesystem::path out = resolve_out_dir(opt.out, "summary");
        ensure_dir(out);

        json summary;
        summary["version"] = kArtifactVersion;
        summary["hypotheses"] = hypothesis_to_json(hyp, con);
        summary["periodicity"] = analysis;
        const std::string ms_verdict = analysis.value("ms_verdict", "INCONCLUSIVE");
        const std::string bl_verdict = analysis.value("bl_verdict", "INCONCLUSIVE");
        summary["overall"] = {{"hypotheses_pass", hyp.pass},
                              {"ms_verdict", ms_verdict},
                              {"bl_verdict", bl_verdict}};
        {
            std::ofstream jf(out / "summary.json");
            jf << summary.dump(2) << "\n";
        }
        {
            std::ofstream tf(out / "summary.txt");
            tf << hyp.table() << "\n" << con.table() << "\n";
            tf << "square-mean SAP verdict:      " << ms_verdict << "\n";
            tf << "distribution SAP verdict:     " << bl_verdict << "\n";
        }
        std::cout << "hypotheses: " << (hyp.pass ? "pass" : "FAIL") << ", ms: " << ms_verdict
                  << ", bl: " << bl_verdict << "\n";
        if (!hyp.pass) return static_cast<int>(kHypothesisFailure);
        if (ms_verdict == "FAIL" || bl_verdict == "FAIL") return static_cast<int>(kVerdictFail);
        return static_cast<int>(kOk);
    });
}

} // namespace nfsde
