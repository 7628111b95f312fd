#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aoi/core.hpp"

/// Closed-form average AoI for the four coding/energy policies.
namespace aoi::analytic {

/// Residual best-effort duration Z given a no-outage phase of y slots (rateless save-and-transmit).
struct RcStConditionalMoments {
    double z_mean_given_y = 0.0;
    double z_second_given_y = 0.0;
    double yz_mean_given_y = 0.0;
};

/// Moments of the total harvest Y banked and spent during the no-outage phase.
struct HarvestMoments {
    double mean = 0.0;
    double variance = 0.0;
    double second_moment = 0.0;
};

/// Symbols still missing after w successes: max(k - w, 0).
inline std::int64_t missing_symbols(std::int64_t k, std::int64_t w) noexcept {
    return w >= k ? 0 : k - w;
}

/// Renewal moments of MDS save-and-transmit from its ingredients.
///
/// eps is the per-round decoding probability, mean_decode_slot the mean slot of the
/// k-th success within a successful round, and z_mean / z_second the first two moments
/// of one saving phase. Pass z_mean = z_second = 0 to recover the best-effort renewal.
AoiBreakdown mds_st_breakdown(std::int64_t n, double eps, double mean_decode_slot, double z_mean,
                              double z_second);

/// MDS save-and-transmit with the battery drained at the end of every round.
AoiBreakdown aoi_mds_st(const SystemParams& params, std::int64_t n,
                        double tail_tol = kDefaultTailTol);

/// MDS best effort: a fresh n-symbol codeword every n slots, per-symbol success q.
AoiBreakdown aoi_mds_be(const SystemParams& params, std::int64_t n);

/// Rateless best effort: (k/q)(3/2 + (1-q)/k).
AoiBreakdown aoi_rc_be(const SystemParams& params);

/// Law of the total harvest Y = E_1 + E_2 + ..., E_1 ~ Bin(m, p), E_{i+1} | E_i ~ Bin(E_i, p).
///
/// Computed generation by generation over (generation size, running total) states.
/// Throws std::domain_error for p = 1, where the chain never dies out.
DiscretePmf total_harvest_pmf(std::int64_t m, double p, double tail_tol = kDefaultTailTol);

/// Closed-form mean and variance of the total harvest.
HarvestMoments harvest_moments(std::int64_t m, double p);

/// Conditional moments of the best-effort remainder after a y-slot no-outage phase.
RcStConditionalMoments rc_st_conditional_moments(const SystemParams& params, std::int64_t y);

/// Lazily grown cache of rc_st_conditional_moments() for y = 0, 1, 2, ...
///
/// The values depend on y and the system parameters only, so one table serves a whole m scan.
class RcStMomentTable {
public:
    explicit RcStMomentTable(const SystemParams& params) : params_(params) {}

    const RcStConditionalMoments& at(std::int64_t y);
    const SystemParams& params() const noexcept { return params_; }

private:
    SystemParams params_;
    std::vector<RcStConditionalMoments> rows_;
};

/// Rateless save-and-transmit AoI for a given law of the total harvest Y.
AoiBreakdown aoi_rc_st_given_harvest(std::int64_t m, const DiscretePmf& harvest,
                                     RcStMomentTable& table);

/// Rateless save-and-transmit: save m slots, spend the bank, then finish best effort.
/// Throws std::domain_error for p = 1.
AoiBreakdown aoi_rc_st(const SystemParams& params, std::int64_t m,
                       double tail_tol = kDefaultTailTol);

/// aoi_rc_be - aoi_rc_st(m = 0) = (1 - q) / (2q).
///
/// The rateless best-effort closed form charges this much more than the save-and-transmit
/// expression evaluated with an empty saving phase. Both are kept as derived; callers surface
/// the difference instead of reconciling it.
double rc_gap(const SystemParams& params) noexcept;

/// Human-readable note carrying rc_gap(), attached to every RC_BE result.
std::string rc_gap_warning(const SystemParams& params);

/// Y laws for m = 0, 1, 2, ... by repeated convolution with a geometric on {0, 1, ...}.
///
/// Each banked unit sustains a geometric run of no-outage slots, so stepping m by one
/// convolves the previous law with P(U = u) = (1 - p) p^u. Support is capped at y_cap;
/// mass beyond it is reported as tail_mass. Used for exhaustive m scans where rerunning
/// total_harvest_pmf() per m would be quadratic.
class HarvestPmfStepper {
public:
    HarvestPmfStepper(double p, std::int64_t y_cap);

    std::int64_t m() const noexcept { return m_; }
    const DiscretePmf& pmf() const noexcept { return pmf_; }
    void advance();

    /// Support cap that keeps the truncated tail of the m_max law far below 1e-12.
    static std::int64_t suggested_cap(std::int64_t m_max, double p);

private:
    double p_;
    std::int64_t m_ = 0;
    DiscretePmf pmf_;
};

}  // namespace aoi::analytic
