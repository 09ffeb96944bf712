#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "adagamma/theory/soft_mdp.hpp"

namespace adagamma::theory {

/// Shared knobs for the randomized certificate campaigns.
struct CampaignConfig {
    int instances = 1000;
    int max_states = 20;
    int max_actions = 5;
    std::uint64_t seed = 0;
    double gamma_lo = 0.2;
    double gamma_hi = 0.9; // keeps iterated backups convergent in 500 steps
    double alpha_lo = 0.05;
    double alpha_hi = 1.0;
};

namespace detail {

inline TabularMdp random_instance(const CampaignConfig& cfg, Rng& rng, int* out_actions) {
    const int s = static_cast<int>(rng.uniform_int(2, cfg.max_states));
    const int a = static_cast<int>(rng.uniform_int(2, cfg.max_actions));
    if (out_actions) *out_actions = a;
    const double sparsity = rng.uniform(0.0, 0.5);
    return random_mdp(s, a, sparsity, -1.0, 1.0, cfg.gamma_lo, cfg.gamma_hi, rng);
}

} // namespace detail

struct ContractionReport {
    int instances = 0;
    int pairs_per_instance = 0;
    double worst_excess = -1.0;   // max over instances of (modulus - beta)
    double worst_eval_gap = 0.0;  // iterated backup vs exact solve, sup-norm
    bool pass = false;
};

/// Lemma-level contraction certificate: measured modulus <= beta + 1e-12 on
/// every instance, and 500 backup iterations land within 1e-9 of the exact
/// linear-solve fixed point.
inline ContractionReport contraction_campaign(const CampaignConfig& cfg, int pairs = 100) {
    Rng master(cfg.seed);
    ContractionReport rep;
    rep.instances = cfg.instances;
    rep.pairs_per_instance = pairs;
    for (int i = 0; i < cfg.instances; ++i) {
        Rng rng = master.fork(i);
        int actions = 0;
        const TabularMdp mdp = detail::random_instance(cfg, rng, &actions);
        const SoftPolicy pi = random_policy(mdp.n_states, actions,
                                            rng.uniform(cfg.alpha_lo, cfg.alpha_hi), rng);
        const double modulus = contraction_certificate(mdp, pi, pairs, rng);
        rep.worst_excess = std::max(rep.worst_excess, modulus - mdp.beta());

        const Matrix exact = exact_soft_eval(mdp, pi);
        Matrix q(mdp.n_states, mdp.n_actions);
        for (int k = 0; k < 500; ++k) q = soft_backup(mdp, pi, q);
        rep.worst_eval_gap = std::max(rep.worst_eval_gap, sup_norm_diff(q, exact));
    }
    rep.pass = rep.worst_excess <= 1e-12 && rep.worst_eval_gap <= 1e-9;
    return rep;
}

struct ImprovementReport {
    int instances = 0;
    double worst_violation = 0.0; // max over (s,a) of Q_old - Q_new
    bool pass = false;
};

/// Lemma-level improvement certificate: one Boltzmann improvement never
/// decreases any Q entry beyond 1e-9.
inline ImprovementReport improvement_campaign(const CampaignConfig& cfg) {
    Rng master(cfg.seed + 0x1001);
    ImprovementReport rep;
    rep.instances = cfg.instances;
    for (int i = 0; i < cfg.instances; ++i) {
        Rng rng = master.fork(i);
        int actions = 0;
        const TabularMdp mdp = detail::random_instance(cfg, rng, &actions);
        const SoftPolicy pi_old = random_policy(mdp.n_states, actions,
                                                rng.uniform(cfg.alpha_lo, cfg.alpha_hi), rng);
        const Matrix q_old = exact_soft_eval(mdp, pi_old);
        const SoftPolicy pi_new = soft_policy_improve(q_old, pi_old.alpha);
        const Matrix q_new = exact_soft_eval(mdp, pi_new);
        for (std::size_t k = 0; k < q_old.data.size(); ++k)
            rep.worst_violation = std::max(rep.worst_violation, q_old.data[k] - q_new.data[k]);
    }
    rep.pass = rep.worst_violation <= 1e-9;
    return rep;
}

struct IterationReport {
    int instances = 0;
    int comparison_policies = 0;
    int max_iterations_seen = 0;
    double worst_monotonicity = 0.0; // most negative elementwise Q step
    double worst_domination = 0.0;   // max over comparisons of Q_cmp - Q*
    bool all_converged = true;
    bool pass = false;
};

/// Soft policy iteration converges with a monotone Q sequence and its limit
/// weakly dominates random comparison policies.
inline IterationReport iteration_campaign(const CampaignConfig& cfg, int comparisons = 50,
                                          double tol = 1e-8, int max_iters = 1000) {
    Rng master(cfg.seed + 0x2002);
    IterationReport rep;
    rep.instances = cfg.instances;
    rep.comparison_policies = comparisons;
    for (int i = 0; i < cfg.instances; ++i) {
        Rng rng = master.fork(i);
        int actions = 0;
        const TabularMdp mdp = detail::random_instance(cfg, rng, &actions);
        const double alpha = rng.uniform(cfg.alpha_lo, cfg.alpha_hi);
        const SoftPolicy init = random_policy(mdp.n_states, actions, alpha, rng);
        const PolicyIterationResult res = soft_policy_iteration(mdp, init, max_iters, tol);
        rep.all_converged = rep.all_converged && res.converged;
        rep.max_iterations_seen = std::max(rep.max_iterations_seen, res.iterations);
        rep.worst_monotonicity = std::min(rep.worst_monotonicity, res.worst_monotonicity);
        for (int c = 0; c < comparisons; ++c) {
            const SoftPolicy cmp = random_policy(mdp.n_states, actions, alpha, rng);
            const Matrix q_cmp = exact_soft_eval(mdp, cmp);
            for (std::size_t k = 0; k < q_cmp.data.size(); ++k)
                rep.worst_domination = std::max(rep.worst_domination, q_cmp.data[k] - res.q.data[k]);
        }
    }
    rep.pass = rep.all_converged && rep.worst_monotonicity >= -1e-9 &&
               rep.worst_domination <= 1e-8;
    return rep;
}

struct ErrorGapReport {
    int instances = 0;
    int violations = 0;
    double worst_violation = 0.0; // max of lhs - rhs
    // tightness = lhs / rhs over instances with a nonzero bound
    double tightness_min = 0.0;
    double tightness_median = 0.0;
    double tightness_mean = 0.0;
    double tightness_max = 0.0;
    bool pass = false;
};

/// Error-gap certificate: the measured sup-norm gap between state-dependent
/// and fixed-discount soft Q never exceeds the linear-deviation bound.
inline ErrorGapReport error_gap_campaign(const CampaignConfig& cfg) {
    Rng master(cfg.seed + 0x3003);
    ErrorGapReport rep;
    rep.instances = cfg.instances;
    std::vector<double> tightness;
    for (int i = 0; i < cfg.instances; ++i) {
        Rng rng = master.fork(i);
        int actions = 0;
        const TabularMdp mdp = detail::random_instance(cfg, rng, &actions);
        const SoftPolicy pi = random_policy(mdp.n_states, actions,
                                            rng.uniform(cfg.alpha_lo, cfg.alpha_hi), rng);
        const double fixed_gamma = rng.uniform(0.0, cfg.gamma_hi);
        const ErrorGapResult r = error_gap_certificate(mdp, fixed_gamma, pi);
        if (r.lhs > r.rhs + 1e-9) {
            rep.violations += 1;
            rep.worst_violation = std::max(rep.worst_violation, r.lhs - r.rhs);
        }
        if (r.rhs > 1e-15) tightness.push_back(r.lhs / r.rhs);
    }
    if (!tightness.empty()) {
        std::sort(tightness.begin(), tightness.end());
        rep.tightness_min = tightness.front();
        rep.tightness_max = tightness.back();
        rep.tightness_median = tightness[tightness.size() / 2];
        double sum = 0.0;
        for (double t : tightness) sum += t;
        rep.tightness_mean = sum / static_cast<double>(tightness.size());
    }
    rep.pass = rep.violations == 0;
    return rep;
}

} // namespace adagamma::theory
