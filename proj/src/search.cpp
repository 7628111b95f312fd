#include "aoi/search.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>

#include "aoi/analytic.hpp"

namespace aoi::search {

std::int64_t default_n_max(const SystemParams& params) noexcept { return 10 * params.k() + 50; }

std::int64_t default_m_max(const SystemParams& params) noexcept {
    const double p = params.p();
    const double k = static_cast<double>(params.k());
    return static_cast<std::int64_t>(std::ceil(10.0 * k * (1.0 - p) / p)) + 50;
}

AoiBreakdown evaluate(const SystemParams& params, const PolicyConfig& cfg, double tail_tol) {
    cfg.validate(params);
    switch (cfg.policy) {
        case Policy::MdsSt: return analytic::aoi_mds_st(params, *cfg.n, tail_tol);
        case Policy::MdsBe: return analytic::aoi_mds_be(params, *cfg.n);
        case Policy::RcBe: return analytic::aoi_rc_be(params);
        case Policy::RcSt: return analytic::aoi_rc_st(params, *cfg.m, tail_tol);
    }
    throw std::logic_error("evaluate: unknown policy");
}

SearchResult best_n(const SystemParams& params, Policy policy, std::int64_t n_max, double tail_tol) {
    if (!is_mds(policy)) throw std::invalid_argument("best_n: policy must be MDS_ST or MDS_BE");
    if (n_max < params.k()) throw std::invalid_argument("best_n: n_max must be at least k");
    SearchResult best;
    bool found = false;
    for (std::int64_t n = params.k(); n <= n_max; ++n) {
        const auto b = policy == Policy::MdsSt ? analytic::aoi_mds_st(params, n, tail_tol)
                                               : analytic::aoi_mds_be(params, n);
        if (!found || b.aoi < best.breakdown.aoi) {
            best = {n, b, false};
            found = true;
        }
    }
    best.at_boundary = best.free_param == n_max && n_max > params.k();
    return best;
}

SearchResult best_m(const SystemParams& params, std::int64_t m_max, double tail_tol) {
    if (m_max < 0) throw std::invalid_argument("best_m: m_max must be non-negative");
    if (params.p() == 1.0) throw std::domain_error("no-outage phase never terminates at p = 1; use RC_BE for p=1");

    analytic::RcStMomentTable table(params);
    std::int64_t cap = analytic::HarvestPmfStepper::suggested_cap(m_max, params.p());
    for (;;) {
        analytic::HarvestPmfStepper stepper(params.p(), cap);
        std::int64_t arg = 0;
        double best_aoi = 0.0;
        bool truncated = false;
        for (std::int64_t m = 0; m <= m_max; ++m) {
            if (m > 0) stepper.advance();
            if (stepper.pmf().tail_mass > tail_tol) {
                truncated = true;
                break;
            }
            const double aoi = analytic::aoi_rc_st_given_harvest(m, stepper.pmf(), table).aoi;
            if (m == 0 || aoi < best_aoi) {
                best_aoi = aoi;
                arg = m;
            }
        }
        if (truncated) {
            cap *= 2;
            continue;
        }
        return {arg, analytic::aoi_rc_st(params, arg, tail_tol), arg == m_max && m_max > 0};
    }
}

namespace {

std::vector<SweepRow> optimize_point(const SystemParams& params, const std::vector<Policy>& policies,
                                     std::vector<std::string>& warnings) {
    std::vector<SweepRow> rows;
    for (const auto policy : policies) {
        SweepRow row{params, policy, std::nullopt, {}, false};
        if (is_mds(policy)) {
            const auto r = best_n(params, policy, default_n_max(params));
            row.free_param = r.free_param;
            row.breakdown = r.breakdown;
            row.at_boundary = r.at_boundary;
        } else if (policy == Policy::RcSt) {
            if (params.p() == 1.0) {
                warnings.push_back("RC_ST skipped at p=1 (no-outage phase never ends; RC_BE covers it)");
                continue;
            }
            const auto r = best_m(params, default_m_max(params));
            row.free_param = r.free_param;
            row.breakdown = r.breakdown;
            row.at_boundary = r.at_boundary;
        } else {
            row.breakdown = analytic::aoi_rc_be(params);
            warnings.push_back(analytic::rc_gap_warning(params));
        }
        if (row.at_boundary) {
            warnings.push_back(std::string(to_string(policy)) + " optimum sits on the search bound at p=" +
                               std::to_string(params.p()) + " delta=" + std::to_string(params.delta()) +
                               " k=" + std::to_string(params.k()));
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

SweepResult sweep(const SweepGrid& grid, int threads) {
    if (grid.p.empty() || grid.delta.empty() || grid.k.empty() || grid.policies.empty()) {
        throw std::invalid_argument("sweep: empty grid");
    }
    auto ps = grid.p;
    auto ds = grid.delta;
    auto ks = grid.k;
    auto pol = grid.policies;
    std::sort(ps.begin(), ps.end());
    std::sort(ds.begin(), ds.end());
    std::sort(ks.begin(), ks.end());
    std::sort(pol.begin(), pol.end(), [](Policy a, Policy b) { return to_string(a) < to_string(b); });
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    pol.erase(std::unique(pol.begin(), pol.end()), pol.end());

    std::vector<SystemParams> points;
    for (double p : ps) {
        for (double d : ds) {
            for (auto k : ks) points.push_back(validate_params({p, d, k}));
        }
    }

    struct PointResult {
        std::vector<SweepRow> rows;
        std::vector<std::string> warnings;
    };
    std::vector<PointResult> results(points.size());
    auto run = [&](std::size_t i) { results[i].rows = optimize_point(points[i], pol, results[i].warnings); };

    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1) {
        for (std::size_t i = 0; i < points.size(); ++i) run(i);
    } else {
        std::vector<std::future<void>> jobs;
        for (std::size_t w = 0; w < workers; ++w) {
            jobs.push_back(std::async(std::launch::async, [&, w] {
                for (std::size_t i = w; i < points.size(); i += workers) run(i);
            }));
        }
        for (auto& j : jobs) j.get();
    }

    SweepResult out;
    for (auto& r : results) {
        out.rows.insert(out.rows.end(), r.rows.begin(), r.rows.end());
        out.warnings.insert(out.warnings.end(), r.warnings.begin(), r.warnings.end());
    }
    return out;
}

}  // namespace aoi::search
