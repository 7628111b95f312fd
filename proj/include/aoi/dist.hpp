#pragma once

#include <cstdint>

#include "aoi/core.hpp"

/// Probability kernels behind the MDS save-and-transmit analysis.
///
/// All coefficients go through log-gamma so k and n in the thousands stay finite.
namespace aoi::dist {

/// First two moments of a geometric number of i.i.d. summands.
struct RandomSumMoments {
    double mean = 0.0;
    double second_moment = 0.0;
};

/// log C(n, r) for 0 <= r <= n.
double log_choose(std::int64_t n, std::int64_t r);

/// C(trials, x) s^x (1-s)^(trials-x). Throws std::invalid_argument if x > trials.
double binomial_pmf(std::int64_t trials, double s, std::int64_t x);

/// Probability the r-th success lands on trial w: C(w-1, r-1) s^r (1-s)^(w-r).
/// Returns 0 for w < r.
double negbin_pmf(std::int64_t r, double s, std::int64_t w);

/// Probability that at least k of n symbols with per-symbol success s get through,
/// summed as the probability the k-th success occurs by slot n.
///
/// Used with s = 1 - delta for save-and-transmit rounds and s = q for best effort.
double success_prob_eps(std::int64_t k, std::int64_t n, double s);

/// Saving duration Z = ceil(W / n) * n, W the slots needed to bank n energy units.
///
/// Support {n, 2n, ...} is cut once the remaining tail falls below tail_tol.
DiscretePmf save_duration_pmf(std::int64_t n, double p, double tail_tol = kDefaultTailTol);

/// Slot of the k-th success given that it happens within an n-slot round.
/// Throws std::domain_error when s = 0 (decoding impossible).
DiscretePmf decode_slot_pmf(std::int64_t k, std::int64_t n, double s);

/// Moments of sum_{j=1}^{V} Z_j, V ~ Geometric(eps) on {1, 2, ...} independent of the Z_j.
RandomSumMoments random_sum_moments(double z_mean, double z_second, double eps);

}  // namespace aoi::dist
