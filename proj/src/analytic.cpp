#include "aoi/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "aoi/dist.hpp"

namespace aoi::analytic {

AoiBreakdown mds_st_breakdown(std::int64_t n, double eps, double mean_decode_slot, double z_mean,
                              double z_second) {
    if (!(eps > 0.0) || eps > 1.0) throw std::invalid_argument("mds_st_breakdown: eps must lie in (0, 1]");
    const double nn = static_cast<double>(n);
    const double mu = mean_decode_slot;
    const double e2 = eps * eps;
    const double mean_t = nn / eps + z_mean / eps;
    const double mean_q = nn * nn * (2.0 - eps) / (2.0 * e2) + nn * mu / eps +
                          nn * (2.0 - eps) * z_mean / e2 + mu * z_mean / eps + 0.5 * z_second / eps +
                          (1.0 - eps) * z_mean * z_mean / e2;
    return renewal_aoi(mean_q, mean_t);
}

AoiBreakdown aoi_mds_st(const SystemParams& params, std::int64_t n, double tail_tol) {
    if (n < params.k()) throw std::invalid_argument("aoi_mds_st: n must be at least k");
    const double s = 1.0 - params.delta();
    const double eps = dist::success_prob_eps(params.k(), n, s);
    const auto decode = dist::decode_slot_pmf(params.k(), n, s);
    const auto save = dist::save_duration_pmf(n, params.p(), tail_tol);
    return mds_st_breakdown(n, eps, decode.mean(), save.mean(), save.second_moment());
}

AoiBreakdown aoi_mds_be(const SystemParams& params, std::int64_t n) {
    const auto k = params.k();
    if (n < k) throw std::invalid_argument("aoi_mds_be: n must be at least k");
    const double q = params.q();
    const double nn = static_cast<double>(n);
    const double eps = dist::success_prob_eps(k, n, q);
    const double eps_next = dist::success_prob_eps(k + 1, n + 1, q);
    if (!(eps > 0.0)) throw std::domain_error("aoi_mds_be: decoding probability underflows to zero");
    const double aoi = nn / eps - nn / 2.0 + static_cast<double>(k) * eps_next / (q * eps);
    const double mean_t = nn / eps;
    return {aoi * mean_t, mean_t, aoi};
}

AoiBreakdown aoi_rc_be(const SystemParams& params) {
    const double q = params.q();
    const double k = static_cast<double>(params.k());
    const double aoi = (k / q) * (1.5 + (1.0 - q) / k);
    const double mean_t = k / q;
    return {aoi * mean_t, mean_t, aoi};
}

namespace {

void require_thinning_probability(double p) {
    if (std::isnan(p) || p <= 0.0 || p > 1.0) {
        throw std::invalid_argument("harvest law: p must lie in (0, 1)");
    }
    if (p == 1.0) {
        throw std::domain_error("no-outage phase never terminates at p = 1; use RC_BE for p=1");
    }
}

// Mass of a single generation size, spread over running totals lo, lo+1, ...
struct TotalRow {
    std::int64_t lo = 0;
    std::vector<double> mass;

    bool empty() const noexcept { return mass.empty(); }
    std::int64_t hi() const noexcept { return lo + static_cast<std::int64_t>(mass.size()); }
};

// Drop leading and trailing entries below thr; returns the dropped mass.
double trim(TotalRow& row, double thr) {
    double dropped = 0.0;
    std::size_t first = 0;
    while (first < row.mass.size() && row.mass[first] < thr) dropped += row.mass[first++];
    std::size_t last = row.mass.size();
    while (last > first && row.mass[last - 1] < thr) dropped += row.mass[--last];
    if (first == last) {
        row.mass.clear();
        return dropped;
    }
    row.mass.erase(row.mass.begin() + static_cast<std::ptrdiff_t>(last), row.mass.end());
    row.mass.erase(row.mass.begin(), row.mass.begin() + static_cast<std::ptrdiff_t>(first));
    row.lo += static_cast<std::int64_t>(first);
    return dropped;
}

}  // namespace

DiscretePmf total_harvest_pmf(std::int64_t m, double p, double tail_tol) {
    if (m < 0) throw std::invalid_argument("total_harvest_pmf: m must be non-negative");
    require_thinning_probability(p);
    if (!(tail_tol > 0.0)) throw std::invalid_argument("total_harvest_pmf: tail_tol must be positive");

    DiscretePmf out;
    out.masses.assign(1, 0.0);
    if (m == 0) {
        out.masses[0] = 1.0;
        return out;
    }

    // Bin(e, p) rows, memoized by e.
    std::vector<std::vector<double>> thinning(static_cast<std::size_t>(m) + 1);
    auto thin_row = [&](std::int64_t e) -> const std::vector<double>& {
        auto& row = thinning[static_cast<std::size_t>(e)];
        if (row.empty()) {
            row.resize(static_cast<std::size_t>(e) + 1);
            for (std::int64_t j = 0; j <= e; ++j) row[static_cast<std::size_t>(j)] = dist::binomial_pmf(e, p, j);
        }
        return row;
    };
    auto deposit = [&](std::int64_t y, double mass) {
        if (static_cast<std::size_t>(y) >= out.masses.size()) out.masses.resize(static_cast<std::size_t>(y) + 1, 0.0);
        out.masses[static_cast<std::size_t>(y)] += mass;
    };

    // P(E_g > 0) <= E[E_g] = m p^g, so this many generations leave < tail_tol / 2 alive.
    const double generations =
        std::max(1.0, std::ceil(std::log(tail_tol / (2.0 * static_cast<double>(m + 1))) / std::log(p))) + 1.0;
    const double prune_budget = tail_tol / (2.0 * generations);

    // Generation 1: E_1 ~ Bin(m, p) and the running total equals E_1.
    std::vector<TotalRow> rows(static_cast<std::size_t>(m) + 1);
    {
        const auto& first = thin_row(m);
        deposit(0, first[0]);
        for (std::int64_t e = 1; e <= m; ++e) rows[static_cast<std::size_t>(e)] = {e, {first[static_cast<std::size_t>(e)]}};
    }

    double pruned = 0.0;
    for (;;) {
        std::size_t states = 0;
        for (const auto& r : rows) states += r.mass.size();
        if (states == 0) break;
        const double thr = prune_budget / static_cast<double>(states);
        double alive = 0.0;
        for (auto& r : rows) {
            pruned += trim(r, thr);
            for (double v : r.mass) alive += v;
        }
        if (alive < tail_tol / 2.0) {
            pruned += alive;
            break;
        }

        std::int64_t e_top = 0;
        for (std::int64_t e = 1; e < static_cast<std::int64_t>(rows.size()); ++e) {
            if (!rows[static_cast<std::size_t>(e)].empty()) e_top = e;
        }

        // Next generation e' collects row e shifted by e'; size the targets first.
        std::vector<TotalRow> next(static_cast<std::size_t>(e_top) + 1);
        std::vector<std::int64_t> lo(next.size(), INT64_MAX), hi(next.size(), INT64_MIN);
        for (std::int64_t e = 1; e <= e_top; ++e) {
            const auto& r = rows[static_cast<std::size_t>(e)];
            if (r.empty()) continue;
            for (std::int64_t j = 1; j <= e; ++j) {
                auto& l = lo[static_cast<std::size_t>(j)];
                auto& h = hi[static_cast<std::size_t>(j)];
                l = std::min(l, r.lo + j);
                h = std::max(h, r.hi() + j);
            }
        }
        for (std::size_t j = 1; j < next.size(); ++j) {
            if (lo[j] < hi[j]) next[j] = {lo[j], std::vector<double>(static_cast<std::size_t>(hi[j] - lo[j]), 0.0)};
        }

        for (std::int64_t e = 1; e <= e_top; ++e) {
            const auto& r = rows[static_cast<std::size_t>(e)];
            if (r.empty()) continue;
            const auto& b = thin_row(e);
            // Extinct paths keep their running total.
            for (std::size_t i = 0; i < r.mass.size(); ++i) deposit(r.lo + static_cast<std::int64_t>(i), r.mass[i] * b[0]);
            for (std::int64_t j = 1; j <= e; ++j) {
                const double c = b[static_cast<std::size_t>(j)];
                if (c == 0.0) continue;
                auto& t = next[static_cast<std::size_t>(j)];
                double* dst = t.mass.data() + (r.lo + j - t.lo);
                for (std::size_t i = 0; i < r.mass.size(); ++i) dst[i] += c * r.mass[i];
            }
        }
        rows = std::move(next);
    }

    while (out.masses.size() > 1 && out.masses.back() == 0.0) out.masses.pop_back();
    out.tail_mass = pruned;
    return out;
}

HarvestMoments harvest_moments(std::int64_t m, double p) {
    if (m < 0) throw std::invalid_argument("harvest_moments: m must be non-negative");
    require_thinning_probability(p);
    const double mm = static_cast<double>(m);
    const double mean = mm * p / (1.0 - p);
    const double variance = mm * p * (1.0 + p) / ((1.0 - p) * (1.0 - p * p));
    return {mean, variance, variance + mean * mean};
}

RcStConditionalMoments rc_st_conditional_moments(const SystemParams& params, std::int64_t y) {
    if (y < 0) throw std::invalid_argument("rc_st_conditional_moments: y must be non-negative");
    const auto k = params.k();
    const double q = params.q();
    const double s = 1.0 - params.delta();
    double z_mean = 0.0;
    double z_second = 0.0;
    // Only w < k leaves symbols to send.
    for (std::int64_t w = 0; w <= std::min(y, k - 1); ++w) {
        const double pw = dist::binomial_pmf(y, s, w);
        if (pw == 0.0) continue;
        const double g = static_cast<double>(missing_symbols(k, w));
        z_mean += pw * g / q;
        z_second += pw * g * (g + 1.0 - q) / (q * q);
    }
    return {z_mean, z_second, static_cast<double>(y) * z_mean};
}

const RcStConditionalMoments& RcStMomentTable::at(std::int64_t y) {
    if (y < 0) throw std::invalid_argument("RcStMomentTable: y must be non-negative");
    while (static_cast<std::int64_t>(rows_.size()) <= y) {
        rows_.push_back(rc_st_conditional_moments(params_, static_cast<std::int64_t>(rows_.size())));
    }
    return rows_[static_cast<std::size_t>(y)];
}

AoiBreakdown aoi_rc_st_given_harvest(std::int64_t m, const DiscretePmf& harvest,
                                     RcStMomentTable& table) {
    if (m < 0) throw std::invalid_argument("aoi_rc_st: m must be non-negative");
    double ey = 0.0, ey2 = 0.0, ez = 0.0, ez2 = 0.0, eyz = 0.0;
    for (std::size_t i = 0; i < harvest.size(); ++i) {
        const double w = harvest.masses[i];
        if (w == 0.0) continue;
        const auto y = harvest.support_at(i);
        const auto& c = table.at(y);
        const double yd = static_cast<double>(y);
        ey += w * yd;
        ey2 += w * yd * yd;
        ez += w * c.z_mean_given_y;
        ez2 += w * c.z_second_given_y;
        eyz += w * c.yz_mean_given_y;
    }
    const double mm = static_cast<double>(m);
    const double busy = ey + ez;
    const double cycle_second = mm * mm + 2.0 * mm * busy + ey2 + 2.0 * eyz + ez2;
    const double mean_t = mm + busy;
    // The previous cycle's busy time is independent of the current cycle.
    const double mean_q = 0.5 * (cycle_second + 2.0 * mean_t * busy);
    return renewal_aoi(mean_q, mean_t);
}

AoiBreakdown aoi_rc_st(const SystemParams& params, std::int64_t m, double tail_tol) {
    if (m < 0) throw std::invalid_argument("aoi_rc_st: m must be non-negative");
    if (params.p() == 1.0) throw std::domain_error("no-outage phase never terminates at p = 1; use RC_BE for p=1");
    const auto harvest = total_harvest_pmf(m, params.p(), tail_tol);
    RcStMomentTable table(params);
    return aoi_rc_st_given_harvest(m, harvest, table);
}

double rc_gap(const SystemParams& params) noexcept {
    const double q = params.q();
    return (1.0 - q) / (2.0 * q);
}

std::string rc_gap_warning(const SystemParams& params) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", rc_gap(params));
    return std::string("RC_BE closed form exceeds the RC_ST expression at m=0 by (1-q)/(2q) = ") + buf +
           " slots; both are reported as derived";
}

HarvestPmfStepper::HarvestPmfStepper(double p, std::int64_t y_cap) : p_(p) {
    require_thinning_probability(p);
    if (y_cap < 0) throw std::invalid_argument("HarvestPmfStepper: y_cap must be non-negative");
    pmf_.masses.assign(static_cast<std::size_t>(y_cap) + 1, 0.0);
    pmf_.masses[0] = 1.0;
}

void HarvestPmfStepper::advance() {
    // P_{m+1}(y) = (1 - p) P_m(y) + p P_{m+1}(y - 1)
    auto& v = pmf_.masses;
    v[0] *= (1.0 - p_);
    double stored = v[0];
    for (std::size_t y = 1; y < v.size(); ++y) {
        v[y] = (1.0 - p_) * v[y] + p_ * v[y - 1];
        stored += v[y];
    }
    ++m_;
    pmf_.tail_mass = std::max(0.0, 1.0 - stored);
}

std::int64_t HarvestPmfStepper::suggested_cap(std::int64_t m_max, double p) {
    require_thinning_probability(p);
    const double mm = static_cast<double>(std::max<std::int64_t>(m_max, 0));
    const double mean = mm * p / (1.0 - p);
    const double sd = std::sqrt(mm * p) / (1.0 - p);
    return static_cast<std::int64_t>(std::ceil(mean + 12.0 * sd + 40.0 / -std::log(p))) + 16;
}

}  // namespace aoi::analytic
