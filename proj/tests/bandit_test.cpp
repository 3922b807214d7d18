#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "cpdp/bandit.hpp"
#include "cpdp/error.hpp"
#include "oracles.hpp"

using namespace cpdp;

TEST_CASE("arm_auc equals the balanced rate form and the pairwise oracle") {
    SUBCASE("hand case TPR=0.8, TNR=0.6") {
        CHECK(arm_auc(8, 4, 6, 2) == doctest::Approx(0.7).epsilon(1e-13));
        CHECK(std::abs(arm_auc(8, 4, 6, 2) - oracle::pairwise_binary_auc(8, 4, 6, 2)) < 1e-12);
    }
    SUBCASE("perfect classifier with both classes present") {
        CHECK(arm_auc(5, 0, 7, 0) == 1.0);
    }
    SUBCASE("no modules tested yet defaults to one half") {
        CHECK(arm_auc(0, 0, 0, 0) == 0.5);
    }
    SUBCASE("single class present defaults to one half") {
        CHECK(arm_auc(3, 0, 0, 2) == 0.5);
        CHECK(arm_auc(0, 4, 6, 0) == 0.5);
    }
    SUBCASE("500 random confusion matrices match the enumeration oracle exactly") {
        RandomStream rng(31);
        for (int i = 0; i < 500; ++i) {
            const long long tp = static_cast<long long>(rng.below(35));
            const long long fp = static_cast<long long>(rng.below(35));
            const long long tn = static_cast<long long>(rng.below(35));
            const long long fn = static_cast<long long>(rng.below(35));
            const double lib = arm_auc(tp, fp, tn, fn);
            CHECK(lib >= 0.0);
            CHECK(lib <= 1.0);
            CHECK(std::abs(lib - oracle::pairwise_binary_auc(tp, fp, tn, fn)) < 1e-12);
        }
    }
}

TEST_CASE("update_arms increments exactly one cell per arm") {
    std::vector<ArmState> arms(2);

    // prediction DE, recorded ND: wrong -> fp
    update_arms(arms, {true, false}, false);
    CHECK(arms[0].fp == 1);
    CHECK(arms[1].tn == 1);

    // prediction DE, recorded DE: correct -> tp
    update_arms(arms, {true, true}, true);
    CHECK(arms[0].tp == 1);
    CHECK(arms[1].tp == 1);

    // prediction ND, recorded ND -> tn
    update_arms(arms, {false, false}, false);
    CHECK(arms[0].tn == 1);
    CHECK(arms[1].tn == 2);

    for (const auto& a : arms) {
        CHECK(a.tp + a.fp + a.tn + a.fn == 3);
        CHECK(a.auc == arm_auc(a.tp, a.fp, a.tn, a.fn));
    }
    CHECK_THROWS_AS(update_arms(arms, {true}, true), Error);
}

TEST_CASE("ucb_score formula") {
    ArmState arm;
    arm.auc = 0.7;
    arm.n_selected = 1;
    CHECK(ucb_score(arm, 1, std::sqrt(2.0)) == doctest::Approx(0.7));  // ln 1 = 0

    arm.n_selected = 2;
    const double expected = 0.7 + std::sqrt(2.0) * std::sqrt(std::log(8.0) / 2.0);
    CHECK(ucb_score(arm, 8, std::sqrt(2.0)) == doctest::Approx(expected));
    CHECK(expected == doctest::Approx(2.142).epsilon(1e-3));

    arm.n_selected = 0;
    CHECK(ucb_score(arm, 100, std::sqrt(2.0)) > 1e300);  // above any finite score
}

TEST_CASE("select_arm policies") {
    SUBCASE("needs at least two arms") {
        std::vector<ArmState> one(1);
        RandomStream rng(1);
        CHECK_THROWS_AS(select_arm(PolicyKind::epsilon_greedy(0.0), one, 2, rng), Error);
    }
    SUBCASE("greedy takes the argmax and increments the selection count") {
        std::vector<ArmState> arms(3);
        arms[0].auc = 0.6;
        arms[1].auc = 0.8;
        arms[2].auc = 0.7;
        RandomStream rng(1);
        CHECK(select_arm(PolicyKind::epsilon_greedy(0.0), arms, 2, rng) == 1);
        CHECK(arms[1].n_selected == 1);
    }
    SUBCASE("step one is a uniform random pick for every policy") {
        for (const auto& policy : {PolicyKind::epsilon_greedy(0.0), PolicyKind::ucb()}) {
            RandomStream rng(77);
            std::set<std::size_t> seen;
            for (int i = 0; i < 400; ++i) {
                std::vector<ArmState> arms(4);
                arms[3].auc = 0.9;  // argmax would always say 3
                seen.insert(select_arm(policy, arms, 1, rng));
            }
            CHECK(seen.size() == 4);
        }
    }
    SUBCASE("untried arms go first under UCB, lowest index among them") {
        std::vector<ArmState> arms(3);
        arms[0].n_selected = 3;
        arms[1].n_selected = 0;
        arms[2].n_selected = 2;
        arms[0].auc = 0.99;
        RandomStream rng(1);
        CHECK(select_arm(PolicyKind::ucb(), arms, 6, rng) == 1);
    }
    SUBCASE("UCB exploits the score once all arms are tried") {
        std::vector<ArmState> arms(2);
        arms[0].n_selected = 10;
        arms[0].auc = 0.75;
        arms[1].n_selected = 1;
        arms[1].auc = 0.60;
        RandomStream rng(1);
        // bonus for arm 1 dominates: 0.6 + sqrt(2 ln 12 / 1) >> 0.75 + small
        CHECK(select_arm(PolicyKind::ucb(), arms, 12, rng) == 1);
    }
    SUBCASE("epsilon=1 explores uniformly within 3 sigma over 100000 draws") {
        RandomStream rng(2025);
        const std::size_t k = 5;
        const int n = 100000;
        std::vector<int> counts(k, 0);
        for (int i = 0; i < n; ++i) {
            std::vector<ArmState> arms(k);
            for (std::size_t a = 0; a < k; ++a) arms[a].auc = 0.1 * static_cast<double>(a);
            ++counts[select_arm(PolicyKind::epsilon_greedy(1.0), arms, 2, rng)];
        }
        const double expect = static_cast<double>(n) / k;
        const double sigma = std::sqrt(n * (1.0 / k) * (1.0 - 1.0 / k));
        for (int c : counts) CHECK(std::abs(c - expect) <= 3.0 * sigma);
    }
    SUBCASE("argmax ties are broken uniformly from the seeded stream") {
        RandomStream rng(4096);
        for (int trial = 0; trial < 2000; ++trial) {
            std::vector<ArmState> arms(4);
            arms[0].auc = arms[2].auc = 0.8;
            arms[1].auc = 0.3;
            arms[3].auc = trial % 2 ? 0.8 : 0.5;
            RandomStream ref = rng;  // replicate the documented draw
            std::vector<std::size_t> tied = trial % 2 ? std::vector<std::size_t>{0, 2, 3}
                                                      : std::vector<std::size_t>{0, 2};
            const std::size_t expected = tied[ref.below(tied.size())];
            CHECK(select_arm(PolicyKind::epsilon_greedy(0.0), arms, 5, rng) == expected);
        }
    }
}

TEST_CASE("selection counts partition the steps") {
    RandomStream rng(99);
    std::vector<ArmState> arms(4);
    const std::size_t T = 300;
    for (std::size_t t = 1; t <= T; ++t) {
        select_arm(PolicyKind::epsilon_greedy(0.2), arms, t, rng);
        update_arms(arms, {rng.bernoulli(0.5), rng.bernoulli(0.5), rng.bernoulli(0.5),
                           rng.bernoulli(0.5)},
                    rng.bernoulli(0.4));
    }
    long long total = 0;
    for (const auto& a : arms) {
        total += a.n_selected;
        CHECK(a.tp + a.fp + a.tn + a.fn == static_cast<long long>(T));
    }
    CHECK(total == static_cast<long long>(T));
}

TEST_CASE("an always-correct arm dominates at every step") {
    RandomStream rng(123);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<ArmState> arms(3);
        for (int step = 0; step < 60; ++step) {
            const bool recorded = rng.bernoulli(0.3);
            update_arms(arms, {recorded, rng.bernoulli(0.5), rng.bernoulli(0.5)}, recorded);
            CHECK(arms[0].auc >= arms[1].auc);
            CHECK(arms[0].auc >= arms[2].auc);
        }
    }
}

TEST_CASE("probability-score AUC handles ties and one-class inputs") {
    CHECK(score_auc({0.9, 0.8, 0.2, 0.1}, {true, true, false, false}) == doctest::Approx(1.0));
    CHECK(score_auc({0.5, 0.5, 0.5}, {true, false, true}) == doctest::Approx(0.5));
    CHECK(score_auc({0.9, 0.1}, {true, true}) == 0.5);

    // Against a literal pairwise count.
    RandomStream rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.below(30);
        std::vector<double> scores(n);
        std::vector<bool> outcomes(n);
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = static_cast<double>(rng.below(5)) / 4.0;  // force ties
            outcomes[i] = rng.bernoulli(0.5);
        }
        double wins = 0.0;
        std::size_t pos = 0, neg = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!outcomes[i]) continue;
            ++pos;
            for (std::size_t j = 0; j < n; ++j) {
                if (outcomes[j]) continue;
                if (scores[i] > scores[j]) wins += 1.0;
                else if (scores[i] == scores[j]) wins += 0.5;
            }
        }
        neg = n - pos;
        const double expected =
            (pos == 0 || neg == 0) ? 0.5 : wins / (static_cast<double>(pos) * neg);
        CHECK(score_auc(scores, outcomes) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("policy names parse and print canonically") {
    CHECK(PolicyKind::parse("epsilon:0.1").name() == "epsilon:0.1");
    CHECK(PolicyKind::parse("epsilon:0").name() == "epsilon:0");
    CHECK(PolicyKind::parse("ucb").name() == "ucb");
    CHECK(PolicyKind::parse("ucb:2").name() == "ucb:2");
    CHECK_THROWS_AS(PolicyKind::parse("thompson"), ConfigError);
    CHECK_THROWS_AS(PolicyKind::parse("epsilon:1.5"), ConfigError);
    CHECK_THROWS_AS(PolicyKind::parse("ucb:-1"), ConfigError);
}
