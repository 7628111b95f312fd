#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aoi/core.hpp"

/// Exhaustive optimization of the free policy parameter and grid sweeps.
namespace aoi::search {

struct SearchResult {
    std::int64_t free_param = 0;
    AoiBreakdown breakdown;
    bool at_boundary = false;  ///< minimizer sits on the upper end of the scanned range
};

/// 10k + 50
std::int64_t default_n_max(const SystemParams& params) noexcept;

/// ceil(10k(1-p)/p) + 50
std::int64_t default_m_max(const SystemParams& params) noexcept;

/// Scans n in [k, n_max] for MDS_ST or MDS_BE; ties go to the smaller n.
SearchResult best_n(const SystemParams& params, Policy policy, std::int64_t n_max,
                    double tail_tol = kDefaultTailTol);

/// Scans m in [0, m_max] for RC_ST; ties go to the smaller m.
///
/// The scan walks m upward with an incrementally convolved harvest law; the returned
/// breakdown is recomputed at the minimizer with analytic::aoi_rc_st().
SearchResult best_m(const SystemParams& params, std::int64_t m_max, double tail_tol = kDefaultTailTol);

struct SweepRow {
    SystemParams params;
    Policy policy;
    std::optional<std::int64_t> free_param;
    AoiBreakdown breakdown;
    bool at_boundary = false;
};

struct SweepGrid {
    std::vector<double> p;
    std::vector<double> delta;
    std::vector<std::int64_t> k;
    std::vector<Policy> policies;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<std::string> warnings;
};

/// Optimizes every policy at every grid point. Rows are ordered by (p, delta, k, policy)
/// with policies by name. RC_ST is skipped with a warning at p = 1.
///
/// Grid points are evaluated on up to `threads` workers; assembly order is fixed.
SweepResult sweep(const SweepGrid& grid, int threads = 1);

/// Analytic AoI of one configured policy (the sweep objective).
AoiBreakdown evaluate(const SystemParams& params, const PolicyConfig& cfg,
                      double tail_tol = kDefaultTailTol);

}  // namespace aoi::search
