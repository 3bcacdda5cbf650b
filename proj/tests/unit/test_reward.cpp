#include "doctest.h"

#include <cmath>
#include <vector>

#include "inferedge/error.hpp"
#include "inferedge/reward.hpp"

using namespace inferedge;

TEST_CASE("accuracy score") {
    const RewardConfig cfg;
    CHECK(accuracy_score(0.72, cfg) == doctest::Approx(0.5));
    // 1 / (1 + exp(-30 * 0.0511))
    CHECK(accuracy_score(0.7711, cfg) == doctest::Approx(0.822441).epsilon(1e-5));
    const double bound = 1.0 / (1.0 + std::exp(-30.0 * (1.0 - 0.72)));
    CHECK(accuracy_score(0.999999, cfg) < bound);
    CHECK(accuracy_score(0.999999, cfg) == doctest::Approx(bound).epsilon(1e-4));
    double prev = 0.0;
    for (double a = 0.60; a < 0.80; a += 0.01) {
        CHECK(accuracy_score(a, cfg) > prev);
        prev = accuracy_score(a, cfg);
    }
}

TEST_CASE("latency and energy scores") {
    CHECK(latency_score(1862.89, 1862.89) == 0.0);
    CHECK(latency_score(1197.89, 1862.89) == doctest::Approx(0.357).epsilon(1e-3));
    CHECK(latency_score(3458.22, 1862.89) == doctest::Approx(-0.856).epsilon(1e-3));
    CHECK(energy_score(11.83, 11.83) == 0.0);
    CHECK(energy_score(2.55, 11.83) == doctest::Approx(0.784).epsilon(1e-3));
    CHECK(energy_score(0.90, 50.99) == doctest::Approx(0.982).epsilon(1e-3));
    CHECK_THROWS_AS(latency_score(1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(energy_score(1.0, -2.0), ConfigError);

    // Affine with slope -1/denominator.
    const double d = 250.0;
    CHECK(latency_score(100.0, d) - latency_score(50.0, d) == doctest::Approx(-50.0 / d));
    CHECK(energy_score(3.0, 6.0) - energy_score(1.0, 6.0) == doctest::Approx(-2.0 / 6.0));
}

TEST_CASE("fleet reward") {
    const RewardConfig eq;
    const std::vector<ScoreTriple> one{{0.8, 0.5, 0.3}};
    CHECK(fleet_reward(one, eq) == doctest::Approx(1.6 / 3.0));
    CHECK(fleet_reward({}, eq) == 0.0);

    const std::vector<ScoreTriple> many{{0.8, -0.5, 0.3}, {0.4, 0.9, 0.1}, {0.2, 0.2, -1.0}};
    CHECK(fleet_reward(many, RewardConfig::accuracy_only()) == doctest::Approx((0.8 + 0.4 + 0.2) / 3.0));

    const std::vector<ScoreTriple> unit{{0.0, 1.0, 0.5}, {1.0, 0.0, 0.25}};
    for (const auto& cfg : {eq, RewardConfig::latency_only(), RewardConfig::energy_only()}) {
        const double r = fleet_reward(unit, cfg);
        CHECK(r >= 0.0);
        CHECK(r <= 1.0);
    }
}

TEST_CASE("presets and validation") {
    CHECK(RewardConfig::preset("AO").w_accuracy == 1.0);
    CHECK(RewardConfig::preset("LO").w_latency == 1.0);
    CHECK(RewardConfig::preset("EO").w_energy == 1.0);
    CHECK(RewardConfig::preset("MO").w_accuracy == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS((void)RewardConfig::preset("XO"), ConfigError);
    CHECK_NOTHROW(RewardConfig{}.validate());

    RewardConfig bad;
    bad.w_accuracy = 0.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    const RewardConfig n = bad.normalized();
    CHECK(n.w_accuracy + n.w_latency + n.w_energy == doctest::Approx(1.0));
    CHECK_NOTHROW(n.validate());

    RewardConfig neg;
    neg.w_accuracy = -0.2;
    neg.w_latency = 0.6;
    neg.w_energy = 0.6;
    CHECK_THROWS_AS(neg.validate(), ConfigError);
    RewardConfig q;
    q.sigmoid_q = 1.0;
    CHECK_THROWS_AS(q.validate(), ConfigError);
}
