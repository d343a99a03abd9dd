#include "nfsde/pipeline.hpp"

#include <CLI11.hpp>

#include <string>
#include <vector>

int main(int argc, char** argv) {
    CLI::App app{"simulation and verification of neutral fractional stochastic delay equations"};
    app.require_subcommand(1);

    // ml-eval
    double alpha = 1.5, beta = 1.0, z = 0.0;
    auto* ml = app.add_subcommand("ml-eval", "evaluate the two-parameter Mittag-Leffler function");
    ml->add_option("--alpha", alpha, "first parameter, in (0,2]")->required();
    ml->add_option("--beta", beta, "second parameter, > 0")->required();
    ml->add_option("--z", z, "argument")->required();

    // op-table
    std::string config, grid_out;
    auto* op = app.add_subcommand("op-table", "write S_alpha(t) on the solver grid as CSV");
    op->add_option("--config", config, "config file")->required();
    op->add_option("--grid-out", grid_out, "output CSV path")->required();

    // check
    std::string check_config, check_json;
    std::uint64_t check_seed = 7;
    auto* check = app.add_subcommand("check", "validate (H1)-(H3) and print both contraction constants");
    check->add_option("--config", check_config, "config file")->required();
    check->add_option("--json", check_json, "also write the report as JSON");
    check->add_option("--seed", check_seed, "sampling seed for the empirical Lipschitz quotients");

    // simulate / picard
    nfsde::SimulateOptions sim;
    std::string sim_config, sim_out, sim_scheme;
    int sim_paths = -1;
    auto add_sim_flags = [&](CLI::App* cmd, bool allow_scheme) {
        cmd->add_option("--config", sim_config, "config file")->required();
        if (allow_scheme)
            cmd->add_option("--scheme", sim_scheme, "time_step | picard (overrides the config)");
        cmd->add_option("--paths", sim_paths, "number of Monte Carlo paths");
        cmd->add_option("--seed", sim.seed, "master seed");
        cmd->add_option("--out", sim_out, "output directory (default $NFSDE_OUT_ROOT/runs)");
        cmd->add_option("--threads", sim.threads, "worker threads (does not affect results)");
        cmd->add_flag("--dump-noise", sim.dump_noise, "also write noise increment and jump CSVs");
    };
    auto* simulate = app.add_subcommand("simulate", "run the mild-solution solver over an ensemble");
    add_sim_flags(simulate, true);
    auto* picard = app.add_subcommand("picard", "run the successive-approximation scheme");
    add_sim_flags(picard, false);

    // analyze
    nfsde::AnalyzeOptionsCli an;
    std::string an_runs, an_out, an_checkpoints;
    double an_omega = -1.0;
    auto* analyze = app.add_subcommand("analyze", "estimate periodicity gaps from a simulate run");
    analyze->add_option("--runs", an_runs, "simulate output directory")->required();
    analyze->add_option("--omega", an_omega, "period override (default: model omega)");
    analyze->add_option("--checkpoints", an_checkpoints, "comma-separated checkpoint times");
    analyze->add_option("--out", an_out, "output directory (default $NFSDE_OUT_ROOT/report)");
    analyze->add_option("--threads", an.threads, "bootstrap worker threads");
    analyze->add_option("--seed", an.seed, "bootstrap resampling seed");

    // report
    nfsde::ReportOptions rep;
    std::string rep_runs, rep_analysis, rep_out;
    auto* report = app.add_subcommand("report", "collate check + analyze outputs into one summary");
    report->add_option("--runs", rep_runs, "simulate output directory")->required();
    report->add_option("--analysis", rep_analysis, "analyze output directory")->required();
    report->add_option("--out", rep_out, "output directory (default $NFSDE_OUT_ROOT/summary)");

    CLI11_PARSE(app, argc, argv);

    if (ml->parsed()) return nfsde::cmd_ml_eval(alpha, beta, z);
    if (op->parsed()) return nfsde::cmd_op_table(config, grid_out);
    if (check->parsed()) return nfsde::cmd_check(check_config, check_json, check_seed);
    if (simulate->parsed() || picard->parsed()) {
        sim.config = sim_config;
        sim.out = sim_out;
        if (picard->parsed())
            sim.scheme = "picard";
        else if (!sim_scheme.empty())
            sim.scheme = sim_scheme;
        if (sim_paths > 0) sim.paths = sim_paths;
        return nfsde::cmd_simulate(sim);
    }
    if (analyze->parsed()) {
        an.runs = an_runs;
        an.out = an_out;
        if (an_omega > 0.0) an.omega = an_omega;
        if (!an_checkpoints.empty()) {
            std::vector<double> cps;
            std::string token;
            std::stringstream ss(an_checkpoints);
            while (std::getline(ss, token, ',')) cps.push_back(std::stod(token));
            an.checkpoints = cps;
        }
        return nfsde::cmd_analyze(an);
    }
    if (report->parsed()) {
        rep.runs = rep_runs;
        rep.analysis = rep_analysis;
        rep.out = rep_out;
        return nfsde::cmd_report(rep);
    }
    return 1;
}
