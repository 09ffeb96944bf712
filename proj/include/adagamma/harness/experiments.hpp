#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "adagamma/harness/config.hpp"
#include "adagamma/harness/run_log.hpp"
#include "adagamma/harness/snapshot.hpp"
#include "adagamma/ppo/train.hpp"
#include "adagamma/sac/train.hpp"

namespace adagamma::harness {

inline sac::TrainSettings train_settings(const RunConfig& cfg, double early_stop) {
    sac::TrainSettings ts;
    ts.max_steps = cfg.max_steps;
    ts.eval_interval = cfg.eval_interval;
    ts.eval_episodes = cfg.eval_episodes;
    ts.early_stop_return = early_stop;
    return ts;
}

struct RunOutput {
    sac::TrainResult result;
    Snapshot snapshot;
};

/// One seeded training run of the configured algorithm/env/variant.
inline RunOutput train_once(const RunConfig& cfg, std::uint64_t seed, RunLog* log,
                            double early_stop = std::numeric_limits<double>::quiet_NaN()) {
    std::unique_ptr<Env> env = make_env(cfg);
    const sac::TrainSettings ts = train_settings(cfg, early_stop);
    RunOutput out;
    if (cfg.algorithm == "sac") {
        sac::Agent agent(cfg.sac, env->obs_size(), env->action_size(), env->action_low(),
                         env->action_high(), seed);
        out.result = sac::train(agent, *env, ts, seed, log);
        out.snapshot = make_snapshot(agent, env->action_low(), env->action_high());
    } else {
        ppo::Agent agent(cfg.ppo, env->obs_size(), env->action_size(), env->action_low(),
                         env->action_high(), seed);
        out.result = ppo::train(agent, *env, ts, seed, log);
        out.snapshot = make_snapshot(agent, env->action_low(), env->action_high());
    }
    return out;
}

struct SeedResult {
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double final_eval_mean = std::numeric_limits<double>::quiet_NaN();
    double final_eval_std = 0.0;
    long steps = 0;
    bool early_stopped = false;
};

struct SweepSummary {
    std::vector<SeedResult> seeds;
    double mean = std::numeric_limits<double>::quiet_NaN();
    double stddev = 0.0; // population std over seeds
    int failed = 0;
};

inline SweepSummary aggregate(const std::vector<SeedResult>& seeds) {
    SweepSummary s;
    s.seeds = seeds;
    double sum = 0.0;
    int n = 0;
    for (const SeedResult& r : seeds) {
        if (!r.ok) {
            s.failed += 1;
            continue;
        }
        sum += r.final_eval_mean;
        n += 1;
    }
    if (n == 0) return s;
    s.mean = sum / n;
    double var = 0.0;
    for (const SeedResult& r : seeds)
        if (r.ok) var += (r.final_eval_mean - s.mean) * (r.final_eval_mean - s.mean);
    s.stddev = std::sqrt(var / n);
    return s;
}

/// Per-seed runs, each with its own log and snapshot under out_dir, followed
/// by a mean +- std aggregate of the final evaluation returns. A failed seed
/// is recorded and the rest proceed.
inline SweepSummary run_sweep(const RunConfig& cfg,
                              double early_stop = std::numeric_limits<double>::quiet_NaN()) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    {
        std::ofstream echo(fs::path(cfg.out_dir) / "config_echo.cfg");
        echo << effective_config_text(cfg);
    }
    std::vector<SeedResult> results;
    for (std::uint64_t seed : cfg.seeds) {
        SeedResult r;
        r.seed = seed;
        const std::string base = (fs::path(cfg.out_dir) / ("seed_" + std::to_string(seed))).string();
        try {
            RunLog log(base + ".csv");
            const RunOutput out = train_once(cfg, seed, &log, early_stop);
            save_snapshot(base + ".snapshot", out.snapshot);
            r.ok = true;
            r.final_eval_mean = out.result.final_eval_mean;
            r.final_eval_std = out.result.final_eval_std;
            r.steps = out.result.steps;
            r.early_stopped = out.result.early_stopped;
        } catch (const std::exception& ex) {
            r.ok = false;
            r.error = ex.what();
        }
        results.push_back(std::move(r));
    }
    const SweepSummary summary = aggregate(results);
    std::ofstream out(fs::path(cfg.out_dir) / "summary.csv");
    out << "seed,status,final_eval_mean,final_eval_std,steps,early_stopped\n";
    out.precision(9);
    for (const SeedResult& r : summary.seeds) {
        out << r.seed << ',' << (r.ok ? "ok" : "failed") << ',' << r.final_eval_mean << ','
            << r.final_eval_std << ',' << r.steps << ',' << (r.early_stopped ? 1 : 0) << '\n';
    }
    out << "aggregate,mean_std," << summary.mean << ',' << summary.stddev << ",,\n";
    return summary;
}

struct GammaAnalysis {
    Matrix states;
    Vec gammas;
    double mean = 0.0;
    double min = 1.0;
    double max = 0.0;
    std::vector<int> histogram; // 20 bins across [gamma_min, gamma_max]
};

/// Per-state discount dump over the snapshot policy's own visitation
/// distribution: roll episodes, record gamma(s) at every visited state.
inline GammaAnalysis gamma_analysis(const Snapshot& snap, Env& env, std::uint64_t seed,
                                    int min_samples = 2000) {
    Rng rng(seed);
    GammaAnalysis out;
    out.histogram.assign(20, 0);
    std::vector<Vec> states;
    std::vector<double> gammas;
    while (static_cast<int>(states.size()) < min_samples) {
        Vec s = env.reset(rng);
        while (true) {
            const Vec a = snap.act_stochastic(s, rng);
            const double g = snap.gamma_of(s, a);
            states.push_back(s);
            gammas.push_back(g);
            const EnvStep step = env.step(a, rng);
            s = step.next_state;
            if (step.terminal || step.truncated) break;
        }
    }
    out.states = Matrix(states.size(), states.front().size());
    out.gammas.resize(gammas.size());
    const double lo = snap.gamma_min;
    const double width = std::max(1e-12, snap.gamma_max - snap.gamma_min);
    for (std::size_t i = 0; i < states.size(); ++i) {
        for (std::size_t j = 0; j < states[i].size(); ++j) out.states(i, j) = states[i][j];
        const double g = gammas[i];
        out.gammas[i] = g;
        out.mean += g;
        out.min = std::min(out.min, g);
        out.max = std::max(out.max, g);
        const int bin = std::min(19, std::max(0, static_cast<int>((g - lo) / width * 20.0)));
        out.histogram[bin] += 1;
    }
    out.mean /= static_cast<double>(out.gammas.size());
    if (out.min == out.max) out.mean = out.min;
    return out;
}

inline void write_gamma_dump(const GammaAnalysis& a, const std::string& csv_path,
                             const std::string& summary_path) {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("write_gamma_dump: cannot open " + csv_path);
    for (std::size_t j = 0; j < a.states.cols; ++j) csv << "state_" << j << ',';
    csv << "gamma\n";
    csv.precision(9);
    for (std::size_t i = 0; i < a.states.rows; ++i) {
        for (std::size_t j = 0; j < a.states.cols; ++j) csv << a.states(i, j) << ',';
        csv << a.gammas[i] << '\n';
    }
    std::ofstream sum(summary_path);
    sum.precision(9);
    sum << "samples," << a.gammas.size() << "\n";
    sum << "mean_gamma," << a.mean << "\n";
    sum << "min_gamma," << a.min << "\n";
    sum << "max_gamma," << a.max << "\n";
    sum << "histogram";
    for (int c : a.histogram) sum << ',' << c;
    sum << "\n";
}

struct CollapseArm {
    std::uint64_t seed = 0;
    GammaVariant variant;
    double final_mean_gamma = 0.0;
    double min_post_warmup_mean = 1.0; // over post-warmup log rows
    std::vector<LogRow> rows;
};

/// Verdicts: the naive arm must REACH the floor neighborhood at some point
/// within the budget (the collapse is a transient chase: once the critics
/// re-converge to the collapsed discount the TD pressure fades), while the
/// return-consistency arm must never leave the healthy band.

struct CollapseReport {
    std::vector<CollapseArm> naive;
    std::vector<CollapseArm> rc;
    double naive_threshold = 0.0; // gamma_min + 0.005
    double rc_threshold = 0.95;
    bool naive_collapsed = false; // every naive seed ended below the threshold
    bool rc_held = false;         // every rc seed stayed above 0.95 post-warmup
    bool pass = false;
};

/// Matched-pair collapse experiment: identical configs and seeds, with only
/// the gamma objective switched between the naive TD loss and the full
/// return-consistency objective. The dichotomy is the verdict.
inline CollapseReport collapse_experiment(RunConfig cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    CollapseReport report;
    report.naive_threshold = cfg.gamma.gamma_min + 0.005;

    for (GammaVariant variant : {GammaVariant::kNaiveTd, GammaVariant::kAdaGammaRc}) {
        RunConfig arm_cfg = cfg;
        arm_cfg.variant = variant;
        arm_cfg.sac.gamma.variant = variant;
        arm_cfg.ppo.gamma.variant = variant;
        for (std::uint64_t seed : cfg.seeds) {
            const std::string name = std::string(variant == GammaVariant::kNaiveTd ? "naive" : "rc") +
                                     "_seed_" + std::to_string(seed) + ".csv";
            RunLog log((fs::path(cfg.out_dir) / name).string());
            train_once(arm_cfg, seed, &log);
            CollapseArm arm;
            arm.seed = seed;
            arm.variant = variant;
            arm.rows = log.rows();
            arm.final_mean_gamma = arm.rows.empty() ? 0.0 : arm.rows.back().mean_gamma;
            for (const LogRow& row : arm.rows)
                if (row.step > cfg.gamma.warmup_steps)
                    arm.min_post_warmup_mean = std::min(arm.min_post_warmup_mean, row.mean_gamma);
            (variant == GammaVariant::kNaiveTd ? report.naive : report.rc).push_back(std::move(arm));
        }
    }

    report.naive_collapsed = !report.naive.empty();
    for (const CollapseArm& arm : report.naive)
        report.naive_collapsed =
            report.naive_collapsed && arm.min_post_warmup_mean <= report.naive_threshold;
    report.rc_held = !report.rc.empty();
    for (const CollapseArm& arm : report.rc)
        report.rc_held = report.rc_held && arm.min_post_warmup_mean >= report.rc_threshold;
    report.pass = report.naive_collapsed && report.rc_held;

    std::ofstream out(fs::path(cfg.out_dir) / "collapse_report.csv");
    out << "arm,seed,final_mean_gamma,min_post_warmup_mean,verdict\n";
    out.precision(9);
    for (const CollapseArm& arm : report.naive)
        out << "naive-td," << arm.seed << ',' << arm.final_mean_gamma << ','
            << arm.min_post_warmup_mean << ','
            << (arm.min_post_warmup_mean <= report.naive_threshold ? "collapsed" : "no-collapse")
            << '\n';
    for (const CollapseArm& arm : report.rc)
        out << "adagamma-rc," << arm.seed << ',' << arm.final_mean_gamma << ','
            << arm.min_post_warmup_mean << ','
            << (arm.min_post_warmup_mean >= report.rc_threshold ? "held" : "dropped") << '\n';
    out << "dichotomy,,,," << (report.pass ? "pass" : "fail") << '\n';
    return report;
}

} // namespace adagamma::harness
