#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "aoi/analytic.hpp"
#include "aoi/sim.hpp"

using namespace aoi;
using namespace aoi::sim;

namespace {

PolicyConfig config(Policy p, std::optional<std::int64_t> n = std::nullopt, std::optional<std::int64_t> m = std::nullopt,
                    BatteryMode mode = BatteryMode::AnalysisFaithful) {
    PolicyConfig c;
    c.policy = p;
    c.n = n;
    c.m = m;
    c.battery_mode = mode;
    return c;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// the first renewal starts from age 0 at time 0 and is not a typical cycle
double steady_ratio(const SimStats& st) {
    const auto q = std::accumulate(st.q_samples.begin() + 1, st.q_samples.end(), 0.0);
    const auto t = std::accumulate(st.t_samples.begin() + 1, st.t_samples.end(), 0.0);
    return q / t;
}

}  // namespace

TEST_CASE("deterministic channel, rateless best effort") {
    const auto s = validate_params({1.0, 0.0, 5});
    const auto st = simulate_policy(s, config(Policy::RcBe), 1000, 1);
    CHECK(st.total_slots == 1000);
    CHECK(st.deliveries == 200);
    CHECK(steady_ratio(st) == doctest::Approx(7.5));
    CHECK(simulation_estimate(st).mean == doctest::Approx(7.475));
    for (double t : st.t_samples) CHECK(t == 5.0);
}

TEST_CASE("deterministic channel, MDS best effort with n = k") {
    const auto s = validate_params({1.0, 0.0, 5});
    const auto st = simulate_policy(s, config(Policy::MdsBe, 5), 1000, 1);
    CHECK(st.deliveries == 200);
    CHECK(steady_ratio(st) == doctest::Approx(7.5));
}

TEST_CASE("horizon and parameter checks") {
    const auto s = validate_params({0.5, 0.3, 10});
    CHECK_THROWS_AS(simulate_policy(s, config(Policy::RcBe), 99, 1), std::invalid_argument);
    CHECK_THROWS_AS(simulate_policy(validate_params({1.0, 0.3, 10}), config(Policy::RcSt, std::nullopt, 4), 1000, 1),
                    std::domain_error);
    CHECK_THROWS_AS(simulate_policy(s, config(Policy::MdsSt, 4), 1000, 1), std::invalid_argument);
}

TEST_CASE("battery never goes negative and faithful rounds never hit an outage") {
    const auto s = validate_params({0.3, 0.2, 4});
    for (auto cfg : {config(Policy::MdsSt, 6), config(Policy::MdsSt, 6, std::nullopt, BatteryMode::Physical),
                     config(Policy::RcSt, std::nullopt, 5), config(Policy::RcSt, std::nullopt, 5, BatteryMode::Physical)}) {
        std::int64_t sends = 0, outages = 0, slots = 0;
        SimOptions opt;
        opt.observer = [&](const SlotEvent& e) {
            CHECK(e.battery_after >= 0);
            CHECK(e.slot_index == slots);
            ++slots;
            if (e.symbol_sent) ++sends;
            if (e.outage) ++outages;
            CHECK_FALSE((e.symbol_sent && e.outage));
            if (e.symbol_erased) CHECK(e.symbol_sent);
        };
        simulate_policy(s, cfg, 20000, 9, opt);
        CHECK(slots == 20000);
        CHECK(sends > 0);
        if (cfg.policy == Policy::MdsSt) CHECK(outages == 0);
    }
}

TEST_CASE("best-effort policies record outages when energy is scarce") {
    const auto s = validate_params({0.3, 0.2, 4});
    std::int64_t outages = 0;
    SimOptions opt;
    opt.observer = [&](const SlotEvent& e) { outages += e.outage; };
    simulate_policy(s, config(Policy::RcBe), 5000, 4, opt);
    CHECK(outages > 0);
}

TEST_CASE("same seed, same trajectory") {
    const auto s = validate_params({0.4, 0.3, 6});
    for (auto cfg : {config(Policy::MdsSt, 9), config(Policy::MdsBe, 9), config(Policy::RcBe), config(Policy::RcSt, std::nullopt, 7)}) {
        const auto a = simulate_policy(s, cfg, 50000, 123);
        const auto b = simulate_policy(s, cfg, 50000, 123);
        const auto c = simulate_policy(s, cfg, 50000, 124);
        CHECK(a.total_area == b.total_area);
        CHECK(a.q_samples == b.q_samples);
        CHECK(a.t_samples == b.t_samples);
        CHECK(a.total_area != c.total_area);
    }
}

TEST_CASE("renewal samples tile the cut part of the trajectory") {
    const auto s = validate_params({0.6, 0.2, 5});
    const auto st = simulate_policy(s, config(Policy::RcBe), 100000, 77);
    CHECK(static_cast<std::int64_t>(st.t_samples.size()) == st.deliveries);
    CHECK(sum(st.t_samples) <= static_cast<double>(st.total_slots));
    CHECK(sum(st.q_samples) <= st.total_area);
    for (std::size_t i = 0; i < st.q_samples.size(); ++i) {
        const double t = st.t_samples[i];
        // the area over a renewal is at least the triangle of its own length
        CHECK(st.q_samples[i] >= t * t / 2);
    }
}

// The slot simulation lands on the save-and-transmit expression at m = 0, below the
// best-effort closed form by rc_gap().
TEST_CASE("rateless best effort inter-delivery mean is k/q") {
    const auto s = validate_params({0.5, 0.3, 8});
    const auto st = simulate_policy(s, config(Policy::RcBe), 2'000'000, 5);
    const auto e = estimate_ci(st.t_samples);
    CHECK(std::abs(e.mean - 8 / s.q()) < 4 * e.standard_error);
    const auto a = simulation_estimate(st);
    CHECK(std::abs(a.mean - (analytic::aoi_rc_be(s).aoi - analytic::rc_gap(s))) < 4 * a.standard_error);
}

TEST_CASE("estimate_ci") {
    const std::vector<double> flat{3, 3, 3, 3};
    CHECK(estimate_ci(flat).mean == 3.0);
    CHECK(estimate_ci(flat).standard_error == 0.0);

    const std::vector<double> ramp{1, 2, 3, 4};
    CHECK(estimate_ci(ramp).mean == 2.5);
    CHECK(estimate_ci(ramp).standard_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));

    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(estimate_ci(one), std::invalid_argument);
}

TEST_CASE("ratio_estimate standard error agrees with a bootstrap") {
    std::mt19937_64 rng(31);
    std::gamma_distribution<double> len(3.0, 2.0);
    std::vector<double> num, den;
    for (int i = 0; i < 4000; ++i) {
        const double t = len(rng);
        den.push_back(t);
        num.push_back(t * t / 2 + 4 * t);
    }
    const auto e = ratio_estimate(num, den);
    CHECK(e.mean == doctest::Approx(sum(num) / sum(den)));

    std::uniform_int_distribution<std::size_t> pick(0, num.size() - 1);
    std::vector<double> boots;
    for (int b = 0; b < 400; ++b) {
        double sn = 0, sd = 0;
        for (std::size_t i = 0; i < num.size(); ++i) {
            const auto j = pick(rng);
            sn += num[j];
            sd += den[j];
        }
        boots.push_back(sn / sd);
    }
    const auto spread = estimate_ci(boots);
    const double boot_sd = spread.standard_error * std::sqrt(static_cast<double>(boots.size()));
    CHECK(e.standard_error == doctest::Approx(boot_sd).epsilon(0.15));
}

TEST_CASE("replications are reproducible and independent of the thread count") {
    const auto s = validate_params({0.5, 0.3, 6});
    const auto a = simulate_replications(s, config(Policy::MdsSt, 9), 20000, 5, 4, 1);
    const auto b = simulate_replications(s, config(Policy::MdsSt, 9), 20000, 5, 4, 3);
    REQUIRE(a.runs.size() == 4);
    CHECK(a.pooled.total_area == b.pooled.total_area);
    CHECK(a.aoi.mean == b.aoi.mean);
    CHECK(a.runs[0].total_area != a.runs[1].total_area);
}

TEST_CASE("MDS_ST renewal area forms agree on integers") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::int64_t> n_d(1, 200), v_d(1, 30), z_d(1, 50);
    for (int i = 0; i < 20000; ++i) {
        const auto n = n_d(rng);
        const auto v = v_d(rng);
        const auto x = std::uniform_int_distribution<std::int64_t>(1, n)(rng);
        std::int64_t saving = 0;
        for (std::int64_t j = 0; j < v; ++j) saving += n * z_d(rng);
        CHECK(mds_st_area_x2_direct(n, v, x, saving) == mds_st_area_x2_expanded(n, v, x, saving));
    }
    // renewal with one clean round and deterministic saving: n=2, x=1, Z=2
    CHECK(mds_st_area_x2_direct(2, 1, 1, 2) == 2 * 2 * 3 + 9 + 4 - 1);
}

TEST_CASE("MDS_ST renewal oracle") {
    const auto s = validate_params({0.5, 0.3, 10});
    const auto ref = analytic::aoi_mds_st(s, 15);
    const auto o = renewal_oracle_mds_st(s, 15, 200000, 3, true);
    CHECK(o.q_samples.size() == 200000);
    CHECK(std::abs(o.aoi - ref.aoi) < 4 * o.aoi_se);
    CHECK(std::abs(o.mean_t - ref.mean_t) < 4 * o.mean_t_se);

    const auto clean = renewal_oracle_mds_st(validate_params({1.0, 0.5, 1}), 2, 200000, 8);
    CHECK(clean.mean_t == doctest::Approx(16.0 / 3.0).epsilon(0.01));
}

TEST_CASE("RC_ST renewal oracle") {
    const auto s = validate_params({0.5, 0.3, 20});
    const auto ref = analytic::aoi_rc_st(s, 10);
    const auto o = renewal_oracle_rc_st(s, 10, 200000, 3);
    CHECK(std::abs(o.aoi - ref.aoi) < 4 * o.aoi_se);
    CHECK(std::abs(o.mean_t - ref.mean_t) < 4 * o.mean_t_se);

    const auto zero = renewal_oracle_rc_st(s, 0, 200000, 4);
    const double q = s.q();
    CHECK(std::abs(zero.aoi - (3.0 * 20 + 1 - q) / (2 * q)) < 4 * zero.aoi_se);
}

TEST_CASE("faithful RC_ST slot simulation matches the closed form") {
    const auto s = validate_params({0.5, 0.3, 10});
    const auto ref = analytic::aoi_rc_st(s, 6);
    const auto st = simulate_policy(s, config(Policy::RcSt, std::nullopt, 6), 3'000'000, 21);
    const auto e = simulation_estimate(st);
    CHECK(std::abs(e.mean - ref.aoi) < 4 * e.standard_error + 2e-3 * ref.aoi);
}
