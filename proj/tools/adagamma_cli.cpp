// Command-line front end: training runs, seed sweeps, the tabular theory
// certificates, the collapse experiment, and learned-discount dumps.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "adagamma/harness/config.hpp"
#include "adagamma/harness/experiments.hpp"
#include "adagamma/harness/run_log.hpp"
#include "adagamma/harness/snapshot.hpp"
#include "adagamma/theory/certificates.hpp"

extern char** environ;

namespace {

using namespace adagamma;
using nlohmann::json;

harness::RunConfig load(const std::string& path) {
    return harness::load_config(path, environ);
}

int cmd_train(const std::string& config_path, long seed_override) {
    harness::RunConfig cfg = load(config_path);
    const std::uint64_t seed = seed_override >= 0 ? static_cast<std::uint64_t>(seed_override)
                                                  : cfg.seeds.front();
    std::filesystem::create_directories(cfg.out_dir);
    const std::string base =
        (std::filesystem::path(cfg.out_dir) / ("seed_" + std::to_string(seed))).string();
    {
        std::ofstream echo(std::filesystem::path(cfg.out_dir) / "config_echo.cfg");
        echo << harness::effective_config_text(cfg);
    }
    RunLog log(base + ".csv");
    const harness::RunOutput out = harness::train_once(cfg, seed, &log);
    harness::save_snapshot(base + ".snapshot", out.snapshot);
    std::printf("run complete: steps=%ld episodes=%ld final_eval=%.6g +- %.6g\n",
                out.result.steps, out.result.episodes, out.result.final_eval_mean,
                out.result.final_eval_std);
    if (out.result.skipped_optimizer_steps > 0)
        std::printf("note: %ld optimizer steps skipped on non-finite gradients\n",
                    out.result.skipped_optimizer_steps);
    std::printf("log: %s.csv\nsnapshot: %s.snapshot\n", base.c_str(), base.c_str());
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& seeds_csv) {
    harness::RunConfig cfg = load(config_path);
    if (!seeds_csv.empty()) cfg.seeds = harness::detail::to_seeds("seeds", seeds_csv);
    const harness::SweepSummary summary = harness::run_sweep(cfg);
    for (const harness::SeedResult& r : summary.seeds) {
        if (r.ok)
            std::printf("seed %llu: final_eval=%.6g +- %.6g (steps %ld%s)\n",
                        static_cast<unsigned long long>(r.seed), r.final_eval_mean,
                        r.final_eval_std, r.steps, r.early_stopped ? ", early stop" : "");
        else
            std::printf("seed %llu: FAILED (%s)\n", static_cast<unsigned long long>(r.seed),
                        r.error.c_str());
    }
    std::printf("aggregate over %zu seeds: %.6g +- %.6g\n", summary.seeds.size(), summary.mean,
                summary.stddev);
    std::printf("outputs in %s\n", cfg.out_dir.c_str());
    return summary.failed == 0 ? 0 : 1;
}

int cmd_theory_check(int instances, int states, int actions, std::uint64_t seed,
                     const std::string& out_path) {
    theory::CampaignConfig cc;
    cc.instances = instances;
    cc.max_states = states;
    cc.max_actions = actions;
    cc.seed = seed;

    const theory::ContractionReport contraction = theory::contraction_campaign(cc);
    const theory::ImprovementReport improvement = theory::improvement_campaign(cc);
    theory::CampaignConfig it_cc = cc;
    it_cc.instances = std::max(1, instances / 5);
    const theory::IterationReport iteration = theory::iteration_campaign(it_cc);
    const theory::ErrorGapReport gap = theory::error_gap_campaign(cc);

    json report;
    report["config"] = {{"instances", cc.instances},
                        {"max_states", cc.max_states},
                        {"max_actions", cc.max_actions},
                        {"seed", cc.seed}};
    report["soft_policy_evaluation"] = {{"pass", contraction.pass},
                                        {"instances", contraction.instances},
                                        {"q_pairs_per_instance", contraction.pairs_per_instance},
                                        {"worst_modulus_excess", contraction.worst_excess},
                                        {"worst_eval_gap", contraction.worst_eval_gap}};
    report["soft_policy_improvement"] = {{"pass", improvement.pass},
                                         {"instances", improvement.instances},
                                         {"worst_violation", improvement.worst_violation}};
    report["soft_policy_iteration"] = {{"pass", iteration.pass},
                                       {"instances", iteration.instances},
                                       {"comparison_policies", iteration.comparison_policies},
                                       {"all_converged", iteration.all_converged},
                                       {"max_iterations_seen", iteration.max_iterations_seen},
                                       {"worst_monotonicity", iteration.worst_monotonicity},
                                       {"worst_domination", iteration.worst_domination}};
    report["error_gap_bound"] = {{"pass", gap.pass},
                                 {"instances", gap.instances},
                                 {"violations", gap.violations},
                                 {"worst_violation", gap.worst_violation},
                                 {"tightness",
                                  {{"min", gap.tightness_min},
                                   {"median", gap.tightness_median},
                                   {"mean", gap.tightness_mean},
                                   {"max", gap.tightness_max}}}};
    const bool all_pass = contraction.pass && improvement.pass && iteration.pass && gap.pass;
    report["all_pass"] = all_pass;

    const std::string text = report.dump(2);
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        out << text << '\n';
    }
    std::cout << text << std::endl;
    return all_pass ? 0 : 1;
}

int cmd_collapse(const std::string& config_path) {
    harness::RunConfig cfg = load(config_path);
    const harness::CollapseReport report = harness::collapse_experiment(cfg);
    for (const harness::CollapseArm& arm : report.naive)
        std::printf("naive-td seed %llu: final mean gamma %.4f (threshold %.4f)\n",
                    static_cast<unsigned long long>(arm.seed), arm.final_mean_gamma,
                    report.naive_threshold);
    for (const harness::CollapseArm& arm : report.rc)
        std::printf("adagamma-rc seed %llu: min post-warmup mean gamma %.4f (threshold %.2f)\n",
                    static_cast<unsigned long long>(arm.seed), arm.min_post_warmup_mean,
                    report.rc_threshold);
    std::printf("naive arm collapsed: %s\n", report.naive_collapsed ? "yes" : "no");
    std::printf("rc arm held up: %s\n", report.rc_held ? "yes" : "no");
    std::printf("dichotomy verdict: %s\n", report.pass ? "PASS" : "FAIL");
    return report.pass ? 0 : 1;
}

int cmd_gamma_dump(const std::string& snapshot_path, const std::string& config_path,
                   int samples, std::uint64_t seed, std::string out_base) {
    const harness::Snapshot snap = harness::load_snapshot(snapshot_path);
    const harness::RunConfig cfg = load(config_path);
    std::unique_ptr<Env> env = harness::make_env(cfg);
    const harness::GammaAnalysis analysis = harness::gamma_analysis(snap, *env, seed, samples);
    if (out_base.empty()) out_base = snapshot_path + ".gamma";
    harness::write_gamma_dump(analysis, out_base + ".csv", out_base + ".summary.csv");
    std::printf("samples=%zu mean_gamma=%.6f min=%.6f max=%.6f\n", analysis.gammas.size(),
                analysis.mean, analysis.min, analysis.max);
    std::printf("dump: %s.csv\nsummary: %s.summary.csv\n", out_base.c_str(), out_base.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"AdaGamma: state-dependent discounting for actor-critic RL"};
    app.require_subcommand(1);

    std::string config_path, seeds_csv, out_path, snapshot_path;
    long seed_override = -1;
    int instances = 1000, states = 20, actions = 5, samples = 2000;
    std::uint64_t seed = 0;

    CLI::App* train = app.add_subcommand("train", "run one seeded training run");
    train->add_option("config", config_path, "config file")->required();
    train->add_option("--seed", seed_override, "override the config's first seed");

    CLI::App* sweep = app.add_subcommand("sweep", "run all seeds and aggregate");
    sweep->add_option("config", config_path, "config file")->required();
    sweep->add_option("--seeds", seeds_csv, "comma-separated seed list override");

    CLI::App* theory = app.add_subcommand("theory-check",
                                          "randomized operator certificates (JSON report)");
    theory->add_option("--instances", instances, "instances per certificate");
    theory->add_option("--states", states, "max states per instance");
    theory->add_option("--actions", actions, "max actions per instance");
    theory->add_option("--seed", seed, "campaign seed");
    theory->add_option("--out", out_path, "write the JSON report here");

    CLI::App* collapse = app.add_subcommand("collapse",
                                            "matched naive-TD vs return-consistency pairs");
    collapse->add_option("config", config_path, "config file")->required();

    CLI::App* dump = app.add_subcommand("gamma-dump",
                                        "per-state discount dump for a trained snapshot");
    dump->add_option("snapshot", snapshot_path, "agent snapshot")->required();
    dump->add_option("config", config_path, "config file (environment choice)")->required();
    dump->add_option("--samples", samples, "minimum visited states to record");
    dump->add_option("--seed", seed, "rollout seed");
    dump->add_option("--out", out_path, "output base path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train) return cmd_train(config_path, seed_override);
        if (*sweep) return cmd_sweep(config_path, seeds_csv);
        if (*theory) return cmd_theory_check(instances, states, actions, seed, out_path);
        if (*collapse) return cmd_collapse(config_path);
        if (*dump) return cmd_gamma_dump(snapshot_path, config_path, samples, seed, out_path);
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 2;
    }
    return 2;
}
