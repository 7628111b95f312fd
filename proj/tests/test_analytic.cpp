#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "aoi/analytic.hpp"
#include "aoi/dist.hpp"
#include "oracles.hpp"

using namespace aoi;
using namespace aoi::analytic;

TEST_CASE("MDS_ST hand value with clean arrivals") {
    // p = 1, delta = 0.5, k = 1, n = 2
    const auto b = aoi_mds_st(validate_params({1.0, 0.5, 1}), 2);
    CHECK(b.mean_t == doctest::Approx(16.0 / 3.0).epsilon(1e-13));
    CHECK(b.mean_q == doctest::Approx(224.0 / 9.0).epsilon(1e-13));
    CHECK(b.aoi == doctest::Approx(14.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("MDS_ST against summation over the renewal geometry") {
    struct Case {
        double p, delta;
        int k, n;
    };
    for (const auto c : {Case{0.6, 0.2, 2, 3}, Case{0.8, 0.4, 1, 3}, Case{0.5, 0.1, 3, 4}}) {
        const auto b = aoi_mds_st(validate_params({c.p, c.delta, c.k}), c.n);
        const auto ref = oracle::mds_st_by_summation(c.n, c.k, c.p, c.delta, 60, 60);
        CHECK(b.mean_t == doctest::Approx(ref.mean_t).epsilon(1e-9));
        CHECK(b.mean_q == doctest::Approx(ref.mean_q).epsilon(1e-9));
    }
}

TEST_CASE("MDS_BE is the save-free renewal") {
    for (double q : {0.2, 0.5, 0.9}) {
        const auto s = validate_params({1.0, 1.0 - q, 7});
        for (int n : {7, 9, 20}) {
            const double eps = dist::success_prob_eps(7, n, q);
            const double mu = dist::decode_slot_pmf(7, n, q).mean();
            const auto direct = mds_st_breakdown(n, eps, mu, 0.0, 0.0);
            const auto be = aoi_mds_be(s, n);
            CHECK(be.aoi == doctest::Approx(direct.aoi).epsilon(1e-12));
            CHECK(be.aoi == doctest::Approx(n / eps - n / 2.0 + mu).epsilon(1e-12));
            CHECK(be.mean_q == doctest::Approx(be.aoi * be.mean_t).epsilon(1e-14));
        }
    }
}

TEST_CASE("MDS_ST equals MDS_BE when energy always arrives and saving is one block") {
    // at p = 1 every saving phase lasts exactly n slots
    const auto s = validate_params({1.0, 0.3, 5});
    for (int n : {5, 8, 12}) {
        const double eps = dist::success_prob_eps(5, n, 0.7);
        const double mu = dist::decode_slot_pmf(5, n, 0.7).mean();
        const auto ref = mds_st_breakdown(n, eps, mu, n, static_cast<double>(n) * n);
        CHECK(aoi_mds_st(s, n).aoi == doctest::Approx(ref.aoi).epsilon(1e-12));
    }
}

TEST_CASE("closed-form rateless identities") {
    CHECK(aoi_rc_be(validate_params({1.0, 0.0, 100})).aoi == doctest::Approx(150.0).epsilon(1e-14));
    CHECK(aoi_rc_be(validate_params({1.0, 0.5, 100})).aoi == doctest::Approx(301.0).epsilon(1e-14));
    CHECK(aoi_rc_be(validate_params({0.2, 0.3, 100})).aoi == doctest::Approx(1077.5714285714287).epsilon(1e-13));
    CHECK(aoi_mds_be(validate_params({1.0, 0.0, 100}), 100).aoi == doctest::Approx(150.0).epsilon(1e-14));

    for (int k : {1, 3, 40}) {
        CHECK(aoi_rc_be(validate_params({1.0, 0.0, k})).aoi == doctest::Approx(1.5 * k));
    }
}

TEST_CASE("rateless best effort decreases with the per-slot success probability") {
    double prev = INFINITY;
    for (int i = 1; i <= 100; ++i) {
        const double a = aoi_rc_be(validate_params({i / 100.0, 0.0, 25})).aoi;
        CHECK(a < prev);
        prev = a;
    }
}

TEST_CASE("total harvest law") {
    SUBCASE("m = 1, p = 1/2 is geometric") {
        const auto y = total_harvest_pmf(1, 0.5, 1e-12);
        double worst = 0.0;
        for (std::int64_t v = 0; v <= y.support_max(); ++v) worst = std::max(worst, std::abs(y.prob(v) - std::ldexp(1.0, -static_cast<int>(v + 1))));
        CHECK(worst < 1e-10);
        CHECK(y.is_normalized());
    }
    SUBCASE("m = 0 is a point mass at zero") {
        const auto y = total_harvest_pmf(0, 0.7);
        CHECK(y.prob(0) == 1.0);
        CHECK(y.mean() == 0.0);
    }
    SUBCASE("matches the chain recursion and the negative binomial") {
        for (int m = 1; m <= 3; ++m) {
            for (double p : {0.2, 0.55}) {
                const auto y = total_harvest_pmf(m, p, 1e-13);
                for (int v = 0; v <= 6; ++v) {
                    CHECK(y.prob(v) == doctest::Approx(oracle::harvest_chain(m, p, v)).epsilon(1e-10));
                    CHECK(y.prob(v) == doctest::Approx(oracle::harvest_negbin(m, p, v)).epsilon(1e-10));
                }
            }
        }
        const auto big = total_harvest_pmf(40, 0.8, 1e-12);
        // pruned edge states make the far tail slightly light
        for (int v = 0; v <= 400; v += 13) {
            const double ref = oracle::harvest_negbin(40, 0.8, v);
            CHECK(std::abs(big.prob(v) - ref) <= 1e-5 * ref + 1e-12);
        }
    }
    SUBCASE("moments against closed forms") {
        for (int m = 1; m <= 20; m += 3) {
            for (int i = 1; i <= 9; i += 2) {
                const double p = i / 10.0;
                const auto y = total_harvest_pmf(m, p, 1e-12);
                const auto h = harvest_moments(m, p);
                CHECK(h.mean == doctest::Approx(m * p / (1 - p)).epsilon(1e-14));
                CHECK(h.variance == doctest::Approx(m * p * (1 + p) / ((1 - p) * (1 - p * p))).epsilon(1e-12));
                CHECK(y.mean() == doctest::Approx(h.mean).epsilon(1e-8));
                CHECK(y.variance() == doctest::Approx(h.variance).epsilon(1e-6));
            }
        }
    }
    CHECK_THROWS_AS(total_harvest_pmf(3, 1.0), std::domain_error);
}

TEST_CASE("HarvestPmfStepper reproduces the generation recursion") {
    const double p = 0.65;
    HarvestPmfStepper step(p, HarvestPmfStepper::suggested_cap(30, p));
    CHECK(step.pmf().prob(0) == 1.0);
    for (int m = 1; m <= 30; ++m) {
        step.advance();
        REQUIRE(step.m() == m);
        if (m % 7 != 0) continue;
        const auto ref = total_harvest_pmf(m, p, 1e-13);
        for (std::int64_t v = 0; v <= ref.support_max(); v += 3) {
            CHECK(std::abs(step.pmf().prob(v) - ref.prob(v)) <= 1e-8 * ref.prob(v) + 1e-13);
        }
        CHECK(step.pmf().tail_mass < 1e-12);
    }
}

TEST_CASE("conditional best-effort remainder") {
    // k = 2, y = 1, half the symbols erased, q = 0.14
    const auto s = validate_params({0.28, 0.5, 2});
    const auto c = rc_st_conditional_moments(s, 1);
    CHECK(c.z_mean_given_y == doctest::Approx(75.0 / 7.0).epsilon(1e-12));

    const auto none = rc_st_conditional_moments(s, 0);
    CHECK(none.z_mean_given_y == doctest::Approx(2 / s.q()).epsilon(1e-12));
    CHECK(none.yz_mean_given_y == 0.0);

    // enough clean slots always finish the update during the no-outage phase
    const auto clean = rc_st_conditional_moments(validate_params({0.5, 0.0, 4}), 10);
    CHECK(clean.z_mean_given_y == 0.0);
    CHECK(clean.z_second_given_y == 0.0);
}

TEST_CASE("RC_ST with an empty saving phase and the documented gap") {
    for (double p : {0.1, 0.45, 0.9}) {
        for (double delta : {0.0, 0.3, 0.8}) {
            for (int k : {1, 20, 100}) {
                const auto s = validate_params({p, delta, k});
                const double q = s.q();
                const auto st = aoi_rc_st(s, 0);
                CHECK(st.aoi == doctest::Approx((3.0 * k + 1 - q) / (2 * q)).epsilon(1e-12));
                CHECK(rc_gap(s) == doctest::Approx((1 - q) / (2 * q)).epsilon(1e-14));
                CHECK(aoi_rc_be(s).aoi - st.aoi == doctest::Approx(rc_gap(s)).epsilon(1e-9));
            }
        }
    }
    CHECK_THROWS_AS(aoi_rc_st(validate_params({1.0, 0.3, 10}), 3), std::domain_error);
}

TEST_CASE("RC_ST moment table is consistent with direct evaluation") {
    const auto s = validate_params({0.4, 0.3, 12});
    RcStMomentTable table(s);
    for (int m : {1, 5, 17}) {
        const auto y = total_harvest_pmf(m, 0.4);
        const auto a = aoi_rc_st_given_harvest(m, y, table);
        const auto b = aoi_rc_st(s, m);
        CHECK(a.aoi == doctest::Approx(b.aoi).epsilon(1e-12));
        CHECK(a.mean_t == doctest::Approx(m + 0.0 + (b.mean_t - m)).epsilon(1e-12));
    }
    CHECK(table.at(3).z_mean_given_y == doctest::Approx(rc_st_conditional_moments(s, 3).z_mean_given_y));
}
