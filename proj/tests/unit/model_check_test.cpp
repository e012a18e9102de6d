#include <gtest/gtest.h>

#include "generators.hpp"
#include "hqmc/io.hpp"
#include "hqmc/model_check.hpp"

namespace hqmc {
namespace {

using testing::Rng;

std::string fixture(std::string const& name) { return std::string(HQMC_MODELS_DIR) + "/" + name; }

SLHqMC load_sl(std::string const& name) { return std::get<SLHqMC>(load_model(fixture(name))); }
Dfa load_dfa(std::string const& name) { return std::get<Dfa>(load_model(fixture(name))); }

std::vector<std::vector<StateIndex>> extensions(HqMC const& m, std::vector<StateIndex> const& prefix,
                                                std::size_t depth) {
    std::vector<std::vector<StateIndex>> out{prefix};
    for (std::size_t i = 0; i < depth; ++i) {
        std::vector<std::vector<StateIndex>> next;
        for (auto const& p : out) {
            for (StateIndex t = 0; t < m.num_states(); ++t) {
                auto q = p;
                q.push_back(t);
                next.push_back(std::move(q));
            }
        }
        out = std::move(next);
    }
    return out;
}

TEST(PathSuperop, Examples) {
    auto const m = load_sl("interference_quantum.json").chain;
    std::vector<StateIndex> const single{2};
    EXPECT_LT(max_abs(path_superop(m, single).rep - Matrix::Identity(4, 4)), 1e-15);
    std::vector<StateIndex> const blocked{0, 2, 3};
    EXPECT_TRUE(path_superop(m, blocked).rep.isZero(0.0));
    std::vector<StateIndex> const bad{0, 7};
    EXPECT_THROW(path_superop(m, bad), LookupError);
    EXPECT_THROW(path_superop(m, std::vector<StateIndex>{}), Error);
}

TEST(PathSuperop, TraceNonincreasingAndMultiplicative) {
    Rng rng(60);
    for (int trial = 0; trial < 50; ++trial) {
        auto const m = testing::random_hqmc(rng, 3, 2);
        std::vector<StateIndex> p1{static_cast<StateIndex>(testing::uniform_int(rng, 0, 2))};
        for (int i = 0; i < 3; ++i) {
            p1.push_back(static_cast<StateIndex>(testing::uniform_int(rng, 0, 2)));
        }
        std::vector<StateIndex> p2{p1.back()};
        for (int i = 0; i < 2; ++i) {
            p2.push_back(static_cast<StateIndex>(testing::uniform_int(rng, 0, 2)));
        }
        auto joined = p1;
        joined.insert(joined.end(), p2.begin() + 1, p2.end());
        auto const q = path_superop(m, joined);
        EXPECT_LT(max_abs(q.rep - path_superop(m, p2).rep * path_superop(m, p1).rep), 1e-12);
        Matrix const rho = testing::random_density(rng, 2);
        double const tr = q.trace_on(rho);
        EXPECT_GE(tr, -1e-12);
        EXPECT_LE(tr, 1.0 + 1e-12);
        EXPECT_TRUE(is_positive_semidefinite(Matrix(Matrix::Identity(2, 2) - q.completeness_sum()), 1e-9));
    }
}

TEST(CylinderMeasure, Additivity) {
    Rng rng(61);
    for (int trial = 0; trial < 30; ++trial) {
        auto const m = testing::random_hqmc(rng, 3, 2);
        Matrix const rho = testing::random_density(rng, 2);
        StateIndex const s = static_cast<StateIndex>(testing::uniform_int(rng, 0, 2));
        std::vector<StateIndex> const root{s};
        EXPECT_NEAR(cylinder_measure(m, s, root, rho), 1.0, 1e-12);
        double one_step = 0;
        for (auto const& p : extensions(m, root, 1)) {
            one_step += cylinder_measure(m, s, p, rho);
        }
        EXPECT_NEAR(one_step, 1.0, 1e-10);
        // A proper subset of depth-2 cylinders has mass at most 1.
        double partial = 0;
        auto const depth2 = extensions(m, root, 2);
        for (std::size_t i = 0; i < depth2.size(); i += 2) {
            partial += cylinder_measure(m, s, depth2[i], rho);
        }
        EXPECT_LE(partial, 1.0 + 1e-10);
    }
    auto const m = testing::random_hqmc(rng, 3, 2);
    std::vector<StateIndex> const wrong{1, 0};
    EXPECT_THROW(cylinder_measure(m, 0, wrong, Matrix::Identity(2, 2) / 2.0), Error);
}

TEST(Reach, TargetStatesGetIdentity) {
    Rng rng(62);
    auto const m = testing::random_hqmc(rng, 3, 2);
    auto const r = reach_measure(m, {1});
    EXPECT_LT(max_abs(r.measures[1].rep - Matrix::Identity(4, 4)), 1e-15);
    auto const all = reach_measure(m, {0, 1, 2});
    for (auto const& q : all.measures) {
        EXPECT_LT(max_abs(q.rep - Matrix::Identity(4, 4)), 1e-15);
    }
    EXPECT_THROW(reach_measure(m, {3}), LookupError);
}

TEST(Reach, InterferenceBlocksQuantumButNotClassical) {
    auto const quantum = load_sl("interference_quantum.json").chain;
    auto const classical = load_sl("interference_classical.json").chain;
    Rng rng(63);
    for (bool direct : {true, false}) {
        ReachOptions options;
        options.try_direct = direct;
        auto const rq = reach_measure(quantum, {3}, options);
        auto const rc = reach_measure(classical, {3}, options);
        EXPECT_EQ(rq.method, direct ? ReachMethod::Direct : ReachMethod::Kleene);
        for (int k = 0; k < 50; ++k) {
            Matrix const rho = testing::random_density(rng, 2);
            EXPECT_LE(std::abs(rq.measures[0].trace_on(rho)), 1e-12);
            EXPECT_NEAR(rc.measures[0].trace_on(rho), 0.25, 1e-9);
        }
    }
}

TEST(Reach, DirectAndKleeneAgreeWithTruncatedOracle) {
    Rng rng(64);
    for (int trial = 0; trial < 30; ++trial) {
        auto const m = testing::random_hqmc(rng, 4, 2);
        std::vector<bool> flags(4, false);
        flags[3] = true;
        ReachOptions kleene;
        kleene.try_direct = false;
        auto const direct = reach_measure(m, {3});
        auto const iter = reach_measure(m, {3}, kleene);
        EXPECT_LE(direct.residual, 1e-10);
        EXPECT_LE(iter.residual, 1e-10);
        for (StateIndex s = 0; s < 4; ++s) {
            Matrix const rho = testing::random_density(rng, 2);
            double const a = direct.measures[s].trace_on(rho);
            double const b = iter.measures[s].trace_on(rho);
            EXPECT_NEAR(a, b, 1e-7);
            auto const oracle = testing::truncated_reach(m, flags, s, rho, 200);
            EXPECT_GE(a, oracle.reached - 1e-9);
            EXPECT_LE(a, oracle.reached + oracle.remaining + 1e-9);
        }
    }
}

TEST(Reach, KleeneIteratesAreMonotone) {
    Rng rng(65);
    for (int trial = 0; trial < 10; ++trial) {
        auto const m = testing::random_hqmc(rng, 3, 2);
        ReachSystem const system(m, {false, false, true});
        Matrix const rho = testing::random_density(rng, 2);
        auto iterate = system.initial_iterate();
        std::vector<double> last(3, 0.0);
        for (int k = 0; k < 40; ++k) {
            for (StateIndex s = 0; s < 3; ++s) {
                double const tr = unvec(iterate[s] * vec(rho)).trace().real();
                EXPECT_GE(tr, last[s] - 1e-12);
                EXPECT_LE(tr, 1.0 + 1e-9);
                last[s] = tr;
            }
            iterate = system.sweep(iterate);
        }
    }
}

TEST(Reach, NonConvergenceIsReportedNotThrown) {
    auto const m = load_sl("interference_classical.json").chain;
    ReachOptions options;
    options.try_direct = false;
    options.max_iter = 1;
    auto const r = reach_measure(m, {3}, options);
    EXPECT_EQ(r.iterations, 1u);
    EXPECT_GT(r.residual, options.tol);
    EXPECT_FALSE(r.converged(options.tol));
}

TEST(Reach, GraphConnectedButQuantumBlockedStateIsNotPruned) {
    auto const m = load_sl("interference_quantum.json").chain;
    ReachSystem const system(m, {false, false, false, true});
    // s1 has no edge towards s3; s0 and s2 do, even though no mass gets through.
    EXPECT_EQ(system.unknowns(), (std::vector<StateIndex>{0, 2}));
}

TEST(Safety, InterferenceFixturesNeverBad) {
    auto const dfa = load_dfa("never_bad_dfa.json");
    auto const quantum = load_sl("interference_quantum.json");
    auto const classical = load_sl("interference_classical.json");
    Matrix const rho = quantum.chain.init[0];
    auto const q = check_safety(quantum, dfa, 0, rho);
    auto const c = check_safety(classical, dfa, 0, rho);
    EXPECT_NEAR(q.probability_satisfy, 1.0, 1e-12);
    EXPECT_NEAR(c.probability_satisfy, 0.75, 1e-9);
    EXPECT_FALSE(q.empty_property);
    EXPECT_EQ(q.per_state.size(), 4u);
    // Starting in the bad state violates immediately.
    EXPECT_NEAR(c.per_state[3].violate.trace_on(rho), 1.0, 1e-12);
}

TEST(Safety, NoBadPrefixesMeansCertainSatisfaction) {
    auto const fixed = load_sl("interference_classical.json");
    auto const none = load_dfa("no_bad_prefix_dfa.json");
    EXPECT_NEAR(check_safety(fixed, none, 0, fixed.chain.init[0]).probability_satisfy, 1.0, 1e-12);
    Rng rng(66);
    for (int trial = 0; trial < 10; ++trial) {
        auto const m = testing::random_slhqmc(rng, 3, 2, 1);
        auto dfa = testing::random_dfa(rng, m.ap, 2);
        dfa.accepting.assign(dfa.states.size(), false);
        auto const r = check_safety(m, dfa, 0, testing::random_density(rng, 2));
        EXPECT_NEAR(r.probability_satisfy, 1.0, 1e-12);
        EXPECT_LT(max_abs(r.satisfy.rep - Matrix::Identity(4, 4)), 1e-12);
    }
}

TEST(Safety, EmptyWordBadPrefixIsFlagged) {
    auto const dfa = load_dfa("every_prefix_bad_dfa.json");
    auto const m = load_sl("interference_classical.json");
    auto const r = check_safety(m, dfa, 0, m.chain.init[0]);
    EXPECT_TRUE(r.empty_property);
    EXPECT_EQ(r.probability_satisfy, 0.0);
    EXPECT_TRUE(r.satisfy.rep.isZero(0.0));
}

TEST(Safety, SatisfyPlusViolateIsIdentity) {
    Rng rng(67);
    for (int trial = 0; trial < 20; ++trial) {
        auto const m = testing::random_slhqmc(rng, 3, 2, 1);
        auto const dfa = testing::random_dfa(rng, m.ap, 3);
        ReachOptions options;
        auto const s = static_cast<StateIndex>(testing::uniform_int(rng, 0, 2));
        auto const r = check_safety(m, dfa, s, testing::random_density(rng, 2), options);
        for (int k = 0; k < 20; ++k) {
            Matrix const rho = testing::random_density(rng, 2);
            double const sat = r.satisfy.trace_on(rho);
            EXPECT_NEAR(sat + r.violate.trace_on(rho), 1.0, options.tol + r.residual + 1e-12);
            EXPECT_GE(sat, -options.tol - 1e-9);
            EXPECT_LE(sat, 1.0 + options.tol + 1e-9);
        }
    }
}

TEST(Safety, RejectsBadInputs) {
    auto const m = load_sl("interference_classical.json");
    auto const dfa = load_dfa("never_bad_dfa.json");
    EXPECT_THROW(check_safety(m, dfa, 9, m.chain.init[0]), LookupError);
    EXPECT_THROW(check_safety(m, dfa, 0, Matrix::Identity(3, 3)), DimensionError);
}

}  // namespace
}  // namespace hqmc
