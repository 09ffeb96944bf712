#include <gtest/gtest.h>

#include <cmath>

#include "adagamma/theory/certificates.hpp"
#include "adagamma/theory/soft_mdp.hpp"

using namespace adagamma;
using namespace adagamma::theory;

namespace {

TabularMdp small_random_mdp(int s, int a, Rng& rng, double glo = 0.2, double ghi = 0.9) {
    return random_mdp(s, a, 0.2, -1.0, 1.0, glo, ghi, rng);
}

// Test-local Gauss-Jordan, independent of the library's pivoted elimination.
Vec gauss_jordan(Matrix a, Vec b) {
    const std::size_t n = a.rows;
    for (std::size_t k = 0; k < n; ++k) {
        const double piv = a(k, k);
        for (std::size_t j = 0; j < n; ++j) a(k, j) /= piv;
        b[k] /= piv;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            const double f = a(i, k);
            for (std::size_t j = 0; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    return b;
}

} // namespace

TEST(SoftBackup, ZeroDiscountReturnsReward) {
    Rng rng(1);
    TabularMdp mdp = small_random_mdp(4, 3, rng);
    for (double& g : mdp.gamma) g = 0.0;
    const SoftPolicy pi = random_policy(4, 3, 0.3, rng);
    Matrix q(4, 3);
    for (double& v : q.data) v = rng.uniform(-5.0, 5.0);
    const Matrix out = soft_backup(mdp, pi, q);
    for (int s = 0; s < 4; ++s)
        for (int a = 0; a < 3; ++a) EXPECT_DOUBLE_EQ(out(s, a), mdp.rewards(s, a));
}

TEST(SoftBackup, SingleStateClosedForm) {
    // one state, uniform reward r: Q = (r + gamma*alpha*H(pi)) / (1 - gamma)
    TabularMdp mdp;
    mdp.n_states = 1;
    mdp.n_actions = 2;
    mdp.transitions = {1.0, 1.0}; // both actions self-loop
    mdp.rewards = Matrix(1, 2);
    mdp.rewards(0, 0) = mdp.rewards(0, 1) = 0.7;
    mdp.gamma = {0.8};
    mdp.validate();

    SoftPolicy pi;
    pi.alpha = 0.2;
    pi.probs = Matrix(1, 2);
    pi.probs(0, 0) = 1.0 - 1e-6;
    pi.probs(0, 1) = 1e-6;
    pi.validate();

    const double entropy = -(pi.probs(0, 0) * std::log(pi.probs(0, 0)) +
                             pi.probs(0, 1) * std::log(pi.probs(0, 1)));
    const double expected = (0.7 + 0.8 * 0.2 * entropy) / (1.0 - 0.8);
    const Matrix q = exact_soft_eval(mdp, pi);
    EXPECT_NEAR(q(0, 0), expected, 1e-9);
    EXPECT_NEAR(q(0, 1), expected, 1e-9);
}

TEST(SoftBackup, FixedPointIsIdempotent) {
    Rng rng(2);
    const TabularMdp mdp = small_random_mdp(6, 3, rng);
    const SoftPolicy pi = random_policy(6, 3, 0.4, rng);
    const Matrix qstar = exact_soft_eval(mdp, pi);
    const Matrix backed = soft_backup(mdp, pi, qstar);
    EXPECT_LT(sup_norm_diff(backed, qstar), 1e-9);
}

TEST(ExactSoftEval, ZeroDiscountReturnsReward) {
    Rng rng(3);
    TabularMdp mdp = small_random_mdp(5, 2, rng);
    for (double& g : mdp.gamma) g = 0.0;
    const SoftPolicy pi = random_policy(5, 2, 0.25, rng);
    const Matrix q = exact_soft_eval(mdp, pi);
    for (int s = 0; s < 5; ++s)
        for (int a = 0; a < 2; ++a) EXPECT_NEAR(q(s, a), mdp.rewards(s, a), 1e-12);
}

TEST(ExactSoftEval, AgreesWithIteratedBackup) {
    Rng rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        const TabularMdp mdp = small_random_mdp(8, 4, rng);
        const SoftPolicy pi = random_policy(8, 4, rng.uniform(0.05, 1.0), rng);
        const Matrix exact = exact_soft_eval(mdp, pi);
        Matrix q(8, 4);
        for (int k = 0; k < 500; ++k) q = soft_backup(mdp, pi, q);
        EXPECT_LT(sup_norm_diff(q, exact), 1e-9);
    }
}

TEST(ExactSoftEval, BothAssembliesAgree) {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const TabularMdp mdp = small_random_mdp(7, 3, rng, 0.1, 0.97);
        const SoftPolicy pi = random_policy(7, 3, rng.uniform(0.05, 1.0), rng);
        const Matrix q1 = exact_soft_eval(mdp, pi, EvalAssembly::kEntropyAtCurrent);
        const Matrix q2 = exact_soft_eval(mdp, pi, EvalAssembly::kEntropyAtSuccessor);
        EXPECT_LT(sup_norm_diff(q1, q2), 1e-9);
    }
}

TEST(ExactSoftEval, TwoStateHandInstanceMatchesBruteForce) {
    TabularMdp mdp;
    mdp.n_states = 2;
    mdp.n_actions = 2;
    mdp.transitions = {
        0.75, 0.25, // s0,a0
        0.10, 0.90, // s0,a1
        0.50, 0.50, // s1,a0
        1.00, 0.00, // s1,a1
    };
    mdp.rewards = Matrix(2, 2);
    mdp.rewards(0, 0) = 1.0;
    mdp.rewards(0, 1) = -0.5;
    mdp.rewards(1, 0) = 0.25;
    mdp.rewards(1, 1) = 2.0;
    mdp.gamma = {0.9, 0.6};
    mdp.validate();

    SoftPolicy pi;
    pi.alpha = 0.5;
    pi.probs = Matrix(2, 2);
    pi.probs(0, 0) = 0.3;
    pi.probs(0, 1) = 0.7;
    pi.probs(1, 0) = 0.6;
    pi.probs(1, 1) = 0.4;
    pi.validate();

    // independent brute-force assembly of (I - Gamma P_pi) Q = r - alpha Gamma P_pi log pi
    Matrix system = Matrix::identity(4);
    Vec rhs(4);
    for (int s = 0; s < 2; ++s) {
        for (int a = 0; a < 2; ++a) {
            const int row = s * 2 + a;
            rhs[row] = mdp.rewards(s, a);
            for (int s2 = 0; s2 < 2; ++s2) {
                for (int a2 = 0; a2 < 2; ++a2) {
                    const double w = mdp.gamma[s] * mdp.p(s, a, s2) * pi.probs(s2, a2);
                    system(row, s2 * 2 + a2) -= w;
                    rhs[row] -= w * pi.alpha * std::log(pi.probs(s2, a2));
                }
            }
        }
    }
    const Vec flat = gauss_jordan(system, rhs);
    const Matrix q = exact_soft_eval(mdp, pi);
    for (int s = 0; s < 2; ++s)
        for (int a = 0; a < 2; ++a) EXPECT_NEAR(q(s, a), flat[s * 2 + a], 1e-10);
}

TEST(Contraction, ConstantGammaBoundedByThatConstant) {
    Rng rng(6);
    TabularMdp mdp = small_random_mdp(6, 3, rng);
    for (double& g : mdp.gamma) g = 0.7;
    const SoftPolicy pi = random_policy(6, 3, 0.3, rng);
    const double modulus = contraction_certificate(mdp, pi, 200, rng);
    EXPECT_LE(modulus, 0.7 + 1e-12);
}

TEST(Contraction, GeometricConvergenceRate) {
    Rng rng(7);
    const TabularMdp mdp = small_random_mdp(6, 3, rng, 0.5, 0.8);
    const SoftPolicy pi = random_policy(6, 3, 0.4, rng);
    const Matrix exact = exact_soft_eval(mdp, pi);
    Matrix q(6, 3);
    double prev = sup_norm_diff(q, exact);
    // after burn-in the error contracts at least as fast as beta each sweep
    for (int k = 0; k < 60; ++k) {
        q = soft_backup(mdp, pi, q);
        const double err = sup_norm_diff(q, exact);
        if (k > 5 && prev > 1e-12) {
            EXPECT_LE(err, mdp.beta() * prev * (1.0 + 1e-9));
        }
        prev = err;
    }
}

TEST(PolicyImprove, ConstantRowGivesUniform) {
    Matrix q(2, 3);
    for (int a = 0; a < 3; ++a) {
        q(0, a) = 1.5;
        q(1, a) = -2.0;
    }
    const SoftPolicy pi = soft_policy_improve(q, 0.2);
    for (int s = 0; s < 2; ++s)
        for (int a = 0; a < 3; ++a) EXPECT_NEAR(pi.probs(s, a), 1.0 / 3.0, 1e-14);
}

TEST(PolicyImprove, SmallAlphaConcentratesOnArgmax) {
    Matrix q(1, 4);
    q(0, 0) = 0.3;
    q(0, 1) = 0.9;
    q(0, 2) = 0.7;
    q(0, 3) = -0.2;
    const SoftPolicy pi = soft_policy_improve(q, 1e-3);
    EXPECT_GT(pi.probs(0, 1), 0.999);
    // ranking preserved
    EXPECT_GT(pi.probs(0, 1), pi.probs(0, 2));
    EXPECT_GT(pi.probs(0, 2), pi.probs(0, 0));
    EXPECT_GT(pi.probs(0, 0), pi.probs(0, 3));
}

TEST(PolicyImprove, Lemma2HoldsOnRandomInstances) {
    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const TabularMdp mdp = small_random_mdp(5, 3, rng);
        const SoftPolicy pi_old = random_policy(5, 3, rng.uniform(0.05, 1.0), rng);
        const Matrix q_old = exact_soft_eval(mdp, pi_old);
        const SoftPolicy pi_new = soft_policy_improve(q_old, pi_old.alpha);
        const Matrix q_new = exact_soft_eval(mdp, pi_new);
        for (std::size_t i = 0; i < q_old.data.size(); ++i)
            ASSERT_GE(q_new.data[i], q_old.data[i] - 1e-9);
    }
}

TEST(PolicyIteration, SingleStateConvergesInTwoIterations) {
    Rng rng(9);
    const TabularMdp mdp = small_random_mdp(1, 3, rng);
    const SoftPolicy init = random_policy(1, 3, 0.3, rng);
    const PolicyIterationResult res = soft_policy_iteration(mdp, init, 50, 1e-10);
    EXPECT_TRUE(res.converged);
    EXPECT_LE(res.iterations, 2);
}

TEST(PolicyIteration, MonotoneAndSelfConsistent) {
    Rng rng(10);
    for (int trial = 0; trial < 20; ++trial) {
        const TabularMdp mdp = small_random_mdp(6, 4, rng);
        const double alpha = rng.uniform(0.1, 0.8);
        const SoftPolicy init = random_policy(6, 4, alpha, rng);
        const PolicyIterationResult res = soft_policy_iteration(mdp, init, 500, 1e-10);
        ASSERT_TRUE(res.converged);
        EXPECT_GE(res.worst_monotonicity, -1e-9);
        // the final policy is the Boltzmann policy of its own Q
        const SoftPolicy self = soft_policy_improve(res.q, alpha);
        EXPECT_LT(sup_norm_diff(self.probs, res.policy.probs), 1e-9);
    }
}

TEST(PolicyIteration, NonConvergenceReportedWithHistory) {
    Rng rng(11);
    const TabularMdp mdp = small_random_mdp(8, 4, rng);
    const SoftPolicy init = random_policy(8, 4, 0.3, rng);
    const PolicyIterationResult res = soft_policy_iteration(mdp, init, 2, 1e-16);
    EXPECT_FALSE(res.converged);
    EXPECT_EQ(res.gap_history.size(), 2u);
}

TEST(ErrorGap, ZeroDeviationGivesZeroBothSides) {
    Rng rng(12);
    TabularMdp mdp = small_random_mdp(5, 3, rng);
    for (double& g : mdp.gamma) g = 0.75;
    const SoftPolicy pi = random_policy(5, 3, 0.3, rng);
    const ErrorGapResult r = error_gap_certificate(mdp, 0.75, pi);
    EXPECT_NEAR(r.lhs, 0.0, 1e-10);
    EXPECT_DOUBLE_EQ(r.rhs, 0.0);
}

TEST(ErrorGap, BoundLinearInDeviation) {
    Rng rng(13);
    TabularMdp mdp = small_random_mdp(4, 2, rng);
    // beta pinned at 0.9 by state 0; deviation driven by state 1
    const double fixed_gamma = 0.9;
    mdp.gamma = {0.9, 0.9 - 0.02, 0.9, 0.9};
    const SoftPolicy pi = random_policy(4, 2, 0.3, rng);
    const double rhs1 = error_gap_certificate(mdp, fixed_gamma, pi).rhs;
    mdp.gamma[1] = 0.9 - 0.04;
    const double rhs2 = error_gap_certificate(mdp, fixed_gamma, pi).rhs;
    EXPECT_NEAR(rhs2, 2.0 * rhs1, 1e-12);
}

TEST(ErrorGap, HoldsOnRandomInstances) {
    Rng rng(14);
    for (int trial = 0; trial < 100; ++trial) {
        const TabularMdp mdp = small_random_mdp(6, 3, rng, 0.1, 0.9);
        const SoftPolicy pi = random_policy(6, 3, rng.uniform(0.05, 1.0), rng);
        const double fixed_gamma = rng.uniform(0.0, 0.9);
        const ErrorGapResult r = error_gap_certificate(mdp, fixed_gamma, pi);
        ASSERT_LE(r.lhs, r.rhs + 1e-9);
    }
}

// (I - Gamma P_pi) with max gamma < 1 is always nonsingular; the pivoted
// solve must succeed without diagonal dominance.
TEST(ExactSoftEval, DiscountedSystemsAlwaysSolvable) {
    Rng rng(15);
    for (int trial = 0; trial < 50; ++trial) {
        const TabularMdp mdp = small_random_mdp(8, 3, rng, 0.0, 0.99);
        const SoftPolicy pi = random_policy(8, 3, rng.uniform(0.05, 1.0), rng);
        EXPECT_NO_THROW({
            const Matrix q = exact_soft_eval(mdp, pi);
            const Matrix backed = soft_backup(mdp, pi, q);
            EXPECT_LT(sup_norm_diff(backed, q), 1e-8);
        });
    }
}

TEST(Campaigns, SmokeAllPassAtSmallScale) {
    CampaignConfig cfg;
    cfg.instances = 25;
    cfg.seed = 1234;
    EXPECT_TRUE(contraction_campaign(cfg, 20).pass);
    EXPECT_TRUE(improvement_campaign(cfg).pass);
    CampaignConfig it_cfg = cfg;
    it_cfg.instances = 10;
    EXPECT_TRUE(iteration_campaign(it_cfg, 10).pass);
    const ErrorGapReport gap = error_gap_campaign(cfg);
    EXPECT_TRUE(gap.pass);
    EXPECT_GT(gap.tightness_max, 0.0);
    EXPECT_LE(gap.tightness_max, 1.0 + 1e-12);
}
