#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aoi {

/// Normalization slack allowed on every probability mass function.
inline constexpr double kPmfNormTolerance = 1e-9;

/// Default truncation tolerance for distributions with unbounded support.
inline constexpr double kDefaultTailTol = 1e-12;

/// Unvalidated parameter set as entered by a caller.
struct RawParams {
    double p = 0.0;
    double delta = 0.0;
    std::int64_t k = 0;
};

/// Channel and source parameters shared by every policy.
///
/// Instances only come out of validate_params(), so holding one means
/// 0 < p <= 1, 0 <= delta < 1 and k >= 1.
class SystemParams {
public:
    double p() const noexcept { return p_; }
    double delta() const noexcept { return delta_; }
    std::int64_t k() const noexcept { return k_; }

    /// Per-slot success probability of a best-effort symbol: energy present and not erased.
    double q() const noexcept { return p_ * (1.0 - delta_); }

    RawParams raw() const noexcept { return {p_, delta_, k_}; }

    friend bool operator==(const SystemParams&, const SystemParams&) = default;

private:
    friend SystemParams validate_params(const RawParams& raw);
    SystemParams(double p, double delta, std::int64_t k) : p_(p), delta_(delta), k_(k) {}

    double p_;
    double delta_;
    std::int64_t k_;
};

/// Throws std::invalid_argument with a descriptive message on rejection.
SystemParams validate_params(const RawParams& raw);

/// Finite-support pmf on {offset, offset + stride, offset + 2*stride, ...}.
///
/// tail_mass is the probability that was truncated beyond the stored support.
struct DiscretePmf {
    std::int64_t offset = 0;
    std::int64_t stride = 1;
    std::vector<double> masses;
    double tail_mass = 0.0;

    std::size_t size() const noexcept { return masses.size(); }
    std::int64_t support_at(std::size_t i) const noexcept {
        return offset + static_cast<std::int64_t>(i) * stride;
    }
    std::int64_t support_max() const noexcept {
        return masses.empty() ? offset : support_at(masses.size() - 1);
    }

    /// Probability of the support point x (0 off-support).
    double prob(std::int64_t x) const noexcept;

    double stored_mass() const noexcept;
    double mean() const noexcept;
    double second_moment() const noexcept;
    double variance() const noexcept;

    /// Checks non-negativity and stored_mass + tail_mass within kPmfNormTolerance of 1.
    bool is_normalized() const noexcept;
};

/// Average age of information with its renewal-reward constituents.
struct AoiBreakdown {
    double mean_q = 0.0;  ///< expected age area per renewal (slot^2)
    double mean_t = 0.0;  ///< expected renewal length (slots)
    double aoi = 0.0;     ///< mean_q / mean_t (slots)
};

/// aoi = mean_q / mean_t. Throws std::invalid_argument on non-positive inputs.
AoiBreakdown renewal_aoi(double mean_q, double mean_t);

/// Simulator output.
struct SimStats {
    double total_area = 0.0;
    std::int64_t total_slots = 0;
    std::int64_t deliveries = 0;
    std::vector<double> q_samples;
    std::vector<double> t_samples;

    double empirical_aoi() const noexcept {
        return total_slots > 0 ? total_area / static_cast<double>(total_slots) : 0.0;
    }
};

enum class Policy { MdsSt, MdsBe, RcBe, RcSt };

enum class BatteryMode { AnalysisFaithful, Physical };

std::string_view to_string(Policy policy) noexcept;
std::string_view to_string(BatteryMode mode) noexcept;

/// Accepts the canonical names (MDS_ST, ...) case-insensitively, with '-' or '_'.
Policy parse_policy(std::string_view text);
BatteryMode parse_battery_mode(std::string_view text);

inline bool is_mds(Policy policy) noexcept {
    return policy == Policy::MdsSt || policy == Policy::MdsBe;
}

/// A policy together with its free parameter.
struct PolicyConfig {
    Policy policy = Policy::RcBe;
    std::optional<std::int64_t> n;  ///< MDS blocklength
    std::optional<std::int64_t> m;  ///< RC-ST saving duration
    BatteryMode battery_mode = BatteryMode::AnalysisFaithful;

    /// Throws std::invalid_argument if the free parameters do not fit the policy
    /// (missing, out of range, or supplied to a policy that has no use for them).
    void validate(const SystemParams& params) const;
};

}  // namespace aoi
