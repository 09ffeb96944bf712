#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "adagamma/env/tabular.hpp"
#include "adagamma/numerics/matrix.hpp"

namespace adagamma::theory {

/// Tabular stochastic policy with entropy temperature. Rows are strictly
/// positive and normalized; min_prob() is the epsilon in the error-gap bound.
struct SoftPolicy {
    Matrix probs; // S x A
    double alpha = 0.2;

    double min_prob() const {
        double m = 1.0;
        for (double p : probs.data) m = std::min(m, p);
        return m;
    }

    void validate() const {
        for (std::size_t s = 0; s < probs.rows; ++s) {
            double sum = 0.0;
            for (std::size_t a = 0; a < probs.cols; ++a) {
                if (probs(s, a) <= 0.0)
                    throw std::invalid_argument("SoftPolicy: probabilities must be positive");
                sum += probs(s, a);
            }
            if (std::abs(sum - 1.0) > 1e-12)
                throw std::invalid_argument("SoftPolicy: row not normalized");
        }
    }
};

/// V(s) = E_{a~pi}[Q(s,a) - alpha log pi(a|s)].
inline Vec soft_state_values(const SoftPolicy& pi, const Matrix& q) {
    Vec v(q.rows, 0.0);
    for (std::size_t s = 0; s < q.rows; ++s)
        for (std::size_t a = 0; a < q.cols; ++a)
            v[s] += pi.probs(s, a) * (q(s, a) - pi.alpha * std::log(pi.probs(s, a)));
    return v;
}

/// One application of the soft backup with state-dependent discount:
/// (TQ)(s,a) = r(s,a) + gamma(s) * E_{s'}[V(s')].
inline Matrix soft_backup(const TabularMdp& mdp, const SoftPolicy& pi, const Matrix& q) {
    if (static_cast<int>(q.rows) != mdp.n_states || static_cast<int>(q.cols) != mdp.n_actions)
        throw std::invalid_argument("soft_backup: Q shape mismatch");
    const Vec v = soft_state_values(pi, q);
    Matrix out(mdp.n_states, mdp.n_actions);
    for (int s = 0; s < mdp.n_states; ++s) {
        for (int a = 0; a < mdp.n_actions; ++a) {
            double ev = 0.0;
            for (int s2 = 0; s2 < mdp.n_states; ++s2) ev += mdp.p(s, a, s2) * v[s2];
            out(s, a) = mdp.rewards(s, a) + mdp.gamma[s] * ev;
        }
    }
    return out;
}

/// How the entropy term is folded into the linear system for exact policy
/// evaluation. Both assemblies must produce the same soft Q; their equality
/// is asserted in the test suite.
enum class EvalAssembly {
    /// Solve (I - Gamma P_pi) x = r - alpha log pi, then Q = x + alpha log pi.
    kEntropyAtCurrent,
    /// Solve (I - Gamma P_pi) Q = r + Gamma P_pi (-alpha log pi) directly.
    kEntropyAtSuccessor,
};

/// Exact soft Q^pi by a linear solve over the (s,a)-indexed system.
/// Requires beta = max_s gamma(s) < 1, which makes the system nonsingular.
inline Matrix exact_soft_eval(const TabularMdp& mdp, const SoftPolicy& pi,
                              EvalAssembly assembly = EvalAssembly::kEntropyAtCurrent) {
    if (mdp.beta() >= 1.0)
        throw std::invalid_argument("exact_soft_eval: max gamma(s) must be < 1");
    const int ns = mdp.n_states, na = mdp.n_actions;
    const int dim = ns * na;

    Matrix system(dim, dim);
    for (int s = 0; s < ns; ++s) {
        for (int a = 0; a < na; ++a) {
            const int row = s * na + a;
            system(row, row) += 1.0;
            for (int s2 = 0; s2 < ns; ++s2) {
                const double pr = mdp.p(s, a, s2);
                if (pr == 0.0) continue;
                for (int a2 = 0; a2 < na; ++a2)
                    system(row, s2 * na + a2) -= mdp.gamma[s] * pr * pi.probs(s2, a2);
            }
        }
    }

    Vec rhs(dim, 0.0);
    if (assembly == EvalAssembly::kEntropyAtCurrent) {
        for (int s = 0; s < ns; ++s)
            for (int a = 0; a < na; ++a)
                rhs[s * na + a] = mdp.rewards(s, a) - pi.alpha * std::log(pi.probs(s, a));
    } else {
        // entropy of the successor-state policy, weighted by Gamma P_pi
        Vec entropy(ns, 0.0);
        for (int s = 0; s < ns; ++s)
            for (int a = 0; a < na; ++a)
                entropy[s] -= pi.probs(s, a) * std::log(pi.probs(s, a));
        for (int s = 0; s < ns; ++s) {
            for (int a = 0; a < na; ++a) {
                double eh = 0.0;
                for (int s2 = 0; s2 < ns; ++s2) eh += mdp.p(s, a, s2) * entropy[s2];
                rhs[s * na + a] = mdp.rewards(s, a) + mdp.gamma[s] * pi.alpha * eh;
            }
        }
    }

    Vec solution = solve_linear(system, rhs);
    Matrix q(ns, na);
    for (int s = 0; s < ns; ++s)
        for (int a = 0; a < na; ++a)
            q(s, a) = solution[s * na + a] +
                      (assembly == EvalAssembly::kEntropyAtCurrent
                           ? pi.alpha * std::log(pi.probs(s, a))
                           : 0.0);
    return q;
}

/// KL projection of exp(Q/alpha) onto the full simplex: the Boltzmann
/// policy, computed row-wise in log space.
inline SoftPolicy soft_policy_improve(const Matrix& q, double alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("soft_policy_improve: alpha must be positive");
    SoftPolicy next;
    next.alpha = alpha;
    next.probs = Matrix(q.rows, q.cols);
    for (std::size_t s = 0; s < q.rows; ++s) {
        double mx = q(s, 0);
        for (std::size_t a = 1; a < q.cols; ++a) mx = std::max(mx, q(s, a));
        double z = 0.0;
        for (std::size_t a = 0; a < q.cols; ++a) {
            next.probs(s, a) = std::exp((q(s, a) - mx) / alpha);
            z += next.probs(s, a);
        }
        for (std::size_t a = 0; a < q.cols; ++a) next.probs(s, a) /= z;
    }
    return next;
}

inline double sup_norm_diff(const Matrix& a, const Matrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

/// Worst measured ratio ||TQ1 - TQ2||_inf / ||Q1 - Q2||_inf over random
/// Q-pairs; the contraction property says this never exceeds beta.
inline double contraction_certificate(const TabularMdp& mdp, const SoftPolicy& pi, int trials,
                                      Rng& rng) {
    if (trials < 1) throw std::invalid_argument("contraction_certificate: trials must be >= 1");
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        Matrix q1(mdp.n_states, mdp.n_actions), q2(mdp.n_states, mdp.n_actions);
        for (auto& v : q1.data) v = rng.uniform(-10.0, 10.0);
        for (auto& v : q2.data) v = rng.uniform(-10.0, 10.0);
        const double denom = sup_norm_diff(q1, q2);
        if (denom == 0.0) continue; // measure-zero with continuous draws
        const double num = sup_norm_diff(soft_backup(mdp, pi, q1), soft_backup(mdp, pi, q2));
        worst = std::max(worst, num / denom);
    }
    return worst;
}

struct PolicyIterationResult {
    SoftPolicy policy;
    Matrix q;
    int iterations = 0;
    bool converged = false;
    /// sup-norm Q change per iteration; carried in full on non-convergence.
    Vec gap_history;
    /// most negative elementwise Q step observed (should be >= -1e-9)
    double worst_monotonicity = 0.0;
};

/// Alternates exact soft evaluation and Boltzmann improvement until the Q
/// iterates stop moving. Non-convergence is reported, not thrown.
inline PolicyIterationResult soft_policy_iteration(const TabularMdp& mdp, SoftPolicy pi,
                                                   int max_iters, double tol) {
    PolicyIterationResult res;
    Matrix q = exact_soft_eval(mdp, pi);
    for (int it = 0; it < max_iters; ++it) {
        pi = soft_policy_improve(q, pi.alpha);
        Matrix q_next = exact_soft_eval(mdp, pi);
        double gap = 0.0, worst = 0.0;
        for (std::size_t i = 0; i < q.data.size(); ++i) {
            const double d = q_next.data[i] - q.data[i];
            gap = std::max(gap, std::abs(d));
            worst = std::min(worst, d);
        }
        res.gap_history.push_back(gap);
        res.worst_monotonicity = std::min(res.worst_monotonicity, worst);
        q = std::move(q_next);
        res.iterations = it + 1;
        if (gap < tol) {
            res.converged = true;
            break;
        }
    }
    res.policy = std::move(pi);
    res.q = std::move(q);
    return res;
}

struct ErrorGapResult {
    double lhs = 0.0; // measured sup-norm gap
    double rhs = 0.0; // the bound
};

/// Compares the exact soft Q under the state-dependent discount against the
/// one under a single fixed discount, and evaluates the linear-deviation
/// bound (R + alpha log(1/eps)) * max_s|gamma(s)-gamma| / ((1-beta)(1-gamma)).
inline ErrorGapResult error_gap_certificate(const TabularMdp& mdp, double fixed_gamma,
                                            const SoftPolicy& pi) {
    if (!(fixed_gamma >= 0.0 && fixed_gamma < 1.0))
        throw std::invalid_argument("error_gap_certificate: fixed gamma must be in [0,1)");
    const Matrix q_state = exact_soft_eval(mdp, pi);
    TabularMdp flat = mdp;
    for (double& g : flat.gamma) g = fixed_gamma;
    const Matrix q_fixed = exact_soft_eval(flat, pi);

    double max_dev = 0.0;
    for (double g : mdp.gamma) max_dev = std::max(max_dev, std::abs(g - fixed_gamma));

    ErrorGapResult res;
    res.lhs = sup_norm_diff(q_state, q_fixed);
    res.rhs = max_dev * (mdp.max_abs_reward() + pi.alpha * std::log(1.0 / pi.min_prob())) /
              ((1.0 - mdp.beta()) * (1.0 - fixed_gamma));
    return res;
}

/// Random policy with a probability floor, keeping log(1/eps) moderate in
/// the error-gap campaigns.
inline SoftPolicy random_policy(int n_states, int n_actions, double alpha, Rng& rng,
                                double floor = 1e-4) {
    SoftPolicy pi;
    pi.alpha = alpha;
    pi.probs = Matrix(n_states, n_actions);
    for (int s = 0; s < n_states; ++s) {
        double sum = 0.0;
        for (int a = 0; a < n_actions; ++a) {
            pi.probs(s, a) = -std::log(1.0 - rng.uniform());
            sum += pi.probs(s, a);
        }
        for (int a = 0; a < n_actions; ++a)
            pi.probs(s, a) = floor + (1.0 - n_actions * floor) * pi.probs(s, a) / sum;
    }
    return pi;
}

} // namespace adagamma::theory
