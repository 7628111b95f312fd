#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "aoi/core.hpp"

/// Slot-level Monte Carlo of the four policies, and renewal samplers that check the
/// expectation algebra of the closed forms without going through slot dynamics.
///
/// Age convention: Delta(t) grows continuously at unit rate, each slot has unit length,
/// and deliveries take effect at the end of the slot carrying the k-th received symbol.
/// In every slot the energy arrival (if any) is banked before the transmitter decides.
namespace aoi::sim {

struct SlotEvent {
    std::int64_t slot_index = 0;
    bool energy_arrived = false;
    bool symbol_sent = false;
    bool symbol_erased = false;
    bool outage = false;  ///< a symbol was due but the battery was empty
    std::int64_t battery_after = 0;
};

using SlotObserver = std::function<void(const SlotEvent&)>;

struct SimOptions {
    bool record_samples = true;  ///< fill SimStats::q_samples / t_samples
    SlotObserver observer;       ///< called once per slot when set
};

/// Runs one replication for exactly `horizon` slots.
///
/// Renewal samples are cut at the end of the MDS round that delivered, and at the
/// delivery instant for rateless policies. In RC_ST the battery mode picks between
/// finishing the no-outage phase before declaring delivery (analysis_faithful) and
/// delivering at the k-th success with leftover energy banked (physical).
SimStats simulate_policy(const SystemParams& params, const PolicyConfig& cfg, std::int64_t horizon,
                         std::uint64_t seed, const SimOptions& options = {});

struct Estimate {
    double mean = 0.0;
    double standard_error = 0.0;
};

/// Sample mean and its standard error. Needs at least two samples.
Estimate estimate_ci(std::span<const double> samples);

/// Ratio sum(num)/sum(den) with a delta-method standard error.
///
/// `lags` adds that many autocovariance terms of the linearized residuals, which is
/// needed when consecutive renewals share a term (rateless cycles carry the previous
/// busy time).
Estimate ratio_estimate(std::span<const double> num, std::span<const double> den, int lags = 0);

/// Empirical AoI of a run with its standard error from the renewal samples.
Estimate simulation_estimate(const SimStats& stats);

struct ReplicatedStats {
    std::vector<SimStats> runs;  ///< in replication order
    SimStats pooled;
    Estimate aoi;
};

/// Independent replications, replication r seeded from (seed, r). Runs up to `threads`
/// workers; the pooled result is reduced in replication order so it does not depend
/// on scheduling.
ReplicatedStats simulate_replications(const SystemParams& params, const PolicyConfig& cfg,
                                      std::int64_t horizon, std::uint64_t seed, int replications,
                                      int threads = 1);

struct OracleResult {
    double mean_q = 0.0;
    double mean_t = 0.0;
    double aoi = 0.0;
    double aoi_se = 0.0;
    double mean_q_se = 0.0;
    double mean_t_se = 0.0;
    std::vector<double> q_samples;
    std::vector<double> t_samples;
};

/// Twice the MDS save-and-transmit age area of one renewal, written as the
/// pre-delivery trapezoid plus the post-delivery remainder of the round.
std::int64_t mds_st_area_x2_direct(std::int64_t n, std::int64_t rounds, std::int64_t decode_slot,
                                   std::int64_t saving_total);

/// The same quantity expanded into the five terms that the expectation is taken over.
std::int64_t mds_st_area_x2_expanded(std::int64_t n, std::int64_t rounds, std::int64_t decode_slot,
                                     std::int64_t saving_total);

/// Samples (V, decode slot, Z_1..Z_V) directly and averages the renewal area and length.
/// Both area forms are evaluated per sample; a mismatch throws std::logic_error.
OracleResult renewal_oracle_mds_st(const SystemParams& params, std::int64_t n, std::int64_t renewals,
                                   std::uint64_t seed, bool keep_samples = false);

/// Samples the thinning chain, the no-outage successes and the best-effort remainder.
OracleResult renewal_oracle_rc_st(const SystemParams& params, std::int64_t m, std::int64_t renewals,
                                  std::uint64_t seed, bool keep_samples = false);

}  // namespace aoi::sim
