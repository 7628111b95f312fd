#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "aoi/core.hpp"

using namespace aoi;

TEST_CASE("validate_params accepts the reproduction setting") {
    const auto s = validate_params({0.5, 0.3, 100});
    CHECK(s.q() == doctest::Approx(0.35).epsilon(1e-15));

    const auto low = validate_params({0.2, 0.3, 100});
    CHECK(low.q() == doctest::Approx(0.14).epsilon(1e-15));
}

TEST_CASE("validate_params rejects degenerate and out-of-range inputs") {
    CHECK_THROWS_WITH_AS(validate_params({0.0, 0.3, 100}), doctest::Contains("no energy arrivals"),
                         std::invalid_argument);
    CHECK_THROWS_AS(validate_params({-0.1, 0.3, 100}), std::invalid_argument);
    CHECK_THROWS_AS(validate_params({1.1, 0.3, 100}), std::invalid_argument);
    CHECK_THROWS_AS(validate_params({0.5, 1.0, 100}), std::invalid_argument);
    CHECK_THROWS_AS(validate_params({0.5, -0.01, 100}), std::invalid_argument);
    CHECK_THROWS_AS(validate_params({0.5, 0.3, 0}), std::invalid_argument);
    CHECK_THROWS_AS(validate_params({std::numeric_limits<double>::quiet_NaN(), 0.3, 1}), std::invalid_argument);
    CHECK_NOTHROW(validate_params({1.0, 0.0, 1}));
}

TEST_CASE("validate_params is idempotent") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const RawParams raw{1.0 - u(rng) * 0.999, u(rng) * 0.999, 1 + static_cast<std::int64_t>(u(rng) * 500)};
        const auto once = validate_params(raw);
        const auto twice = validate_params(once.raw());
        CHECK(once == twice);
        CHECK(twice.q() > 0.0);
        CHECK(twice.q() <= 1.0);
    }
}

TEST_CASE("renewal_aoi") {
    CHECK(renewal_aoi(50, 10).aoi == 5.0);

    // deterministic renewals of length T starting from age c: area T^2/2 + cT
    const double T = 7.0, c = 3.0;
    CHECK(renewal_aoi(T * T / 2 + c * T, T).aoi == doctest::Approx(T / 2 + c));

    CHECK_THROWS_AS(renewal_aoi(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(renewal_aoi(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(renewal_aoi(1.0, -2.0), std::invalid_argument);
}

TEST_CASE("renewal_aoi satisfies aoi * mean_t == mean_q") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(1e-3, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const auto b = renewal_aoi(u(rng), u(rng));
        CHECK(std::abs(b.aoi * b.mean_t - b.mean_q) <= 4 * std::numeric_limits<double>::epsilon() * b.mean_q);
    }
}

TEST_CASE("DiscretePmf moments and normalization") {
    DiscretePmf pmf{2, 2, {0.25, 0.5, 0.25}, 0.0};
    CHECK(pmf.support_max() == 6);
    CHECK(pmf.prob(4) == 0.5);
    CHECK(pmf.prob(3) == 0.0);
    CHECK(pmf.prob(8) == 0.0);
    CHECK(pmf.mean() == doctest::Approx(4.0));
    CHECK(pmf.second_moment() == doctest::Approx(0.25 * 4 + 0.5 * 16 + 0.25 * 36));
    CHECK(pmf.variance() == doctest::Approx(2.0));
    CHECK(pmf.is_normalized());

    pmf.masses[0] = 0.2;
    CHECK_FALSE(pmf.is_normalized());
    pmf.tail_mass = 0.05;
    CHECK(pmf.is_normalized());
    pmf.masses[1] = -0.1;
    CHECK_FALSE(pmf.is_normalized());
}

TEST_CASE("policy names round trip") {
    for (auto p : {Policy::MdsSt, Policy::MdsBe, Policy::RcBe, Policy::RcSt}) {
        CHECK(parse_policy(to_string(p)) == p);
    }
    CHECK(parse_policy("rc-st") == Policy::RcSt);
    CHECK_THROWS_AS(parse_policy("LT"), std::invalid_argument);
    CHECK(parse_battery_mode("physical") == BatteryMode::Physical);
    CHECK(parse_battery_mode("analysis-faithful") == BatteryMode::AnalysisFaithful);
    CHECK_THROWS_AS(parse_battery_mode("lossy"), std::invalid_argument);
}

namespace {

void check_cfg(const SystemParams& s, Policy p, std::optional<std::int64_t> n, std::optional<std::int64_t> m) {
    PolicyConfig{p, n, m}.validate(s);
}

}  // namespace

TEST_CASE("PolicyConfig accepts only the parameter its policy uses") {
    const auto s = validate_params({0.5, 0.3, 10});
    CHECK_NOTHROW(check_cfg(s, Policy::MdsSt, 10, std::nullopt));
    CHECK_NOTHROW(check_cfg(s, Policy::MdsBe, 25, std::nullopt));
    CHECK_NOTHROW(check_cfg(s, Policy::RcSt, std::nullopt, 0));
    CHECK_NOTHROW(check_cfg(s, Policy::RcBe, std::nullopt, std::nullopt));

    CHECK_THROWS_AS(check_cfg(s, Policy::MdsSt, 9, std::nullopt), std::invalid_argument);
    CHECK_THROWS_AS(check_cfg(s, Policy::MdsBe, std::nullopt, std::nullopt), std::invalid_argument);
    CHECK_THROWS_AS(check_cfg(s, Policy::MdsBe, 12, 3), std::invalid_argument);
    CHECK_THROWS_AS(check_cfg(s, Policy::RcSt, std::nullopt, -1), std::invalid_argument);
    CHECK_THROWS_AS(check_cfg(s, Policy::RcSt, std::nullopt, std::nullopt), std::invalid_argument);
    CHECK_THROWS_AS(check_cfg(s, Policy::RcSt, 12, 3), std::invalid_argument);
    CHECK_THROWS_AS(check_cfg(s, Policy::RcBe, std::nullopt, 4), std::invalid_argument);
    CHECK_THROWS_AS(check_cfg(s, Policy::RcBe, 10, std::nullopt), std::invalid_argument);
}
