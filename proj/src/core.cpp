#include "aoi/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace aoi {

SystemParams validate_params(const RawParams& raw) {
    if (std::isnan(raw.p) || raw.p < 0.0 || raw.p > 1.0) {
        throw std::invalid_argument("energy arrival probability p must lie in (0, 1]");
    }
    if (raw.p == 0.0) {
        throw std::invalid_argument("p = 0: no energy arrivals, every update is lost");
    }
    if (std::isnan(raw.delta) || raw.delta < 0.0 || raw.delta > 1.0) {
        throw std::invalid_argument("erasure probability delta must lie in [0, 1)");
    }
    if (raw.delta == 1.0) {
        throw std::invalid_argument("delta = 1: every symbol is erased, no update is ever delivered");
    }
    if (raw.k < 1) {
        throw std::invalid_argument("update length k must be at least 1 symbol");
    }
    return SystemParams{raw.p, raw.delta, raw.k};
}

double DiscretePmf::prob(std::int64_t x) const noexcept {
    if (x < offset || stride <= 0) return 0.0;
    const auto d = x - offset;
    if (d % stride != 0) return 0.0;
    const auto i = static_cast<std::size_t>(d / stride);
    return i < masses.size() ? masses[i] : 0.0;
}

double DiscretePmf::stored_mass() const noexcept {
    double s = 0.0;
    for (double v : masses) s += v;
    return s;
}

double DiscretePmf::mean() const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < masses.size(); ++i) {
        s += masses[i] * static_cast<double>(support_at(i));
    }
    return s;
}

double DiscretePmf::second_moment() const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < masses.size(); ++i) {
        const auto x = static_cast<double>(support_at(i));
        s += masses[i] * x * x;
    }
    return s;
}

double DiscretePmf::variance() const noexcept {
    // Centered sum; the raw E[X^2] - E[X]^2 cancels badly for narrow wide-offset pmfs.
    const double mu = mean();
    double s = 0.0;
    for (std::size_t i = 0; i < masses.size(); ++i) {
        const double d = static_cast<double>(support_at(i)) - mu;
        s += masses[i] * d * d;
    }
    return s;
}

bool DiscretePmf::is_normalized() const noexcept {
    if (tail_mass < 0.0) return false;
    if (std::any_of(masses.begin(), masses.end(), [](double v) { return !(v >= 0.0); })) {
        return false;
    }
    return std::abs(stored_mass() + tail_mass - 1.0) <= kPmfNormTolerance;
}

AoiBreakdown renewal_aoi(double mean_q, double mean_t) {
    if (!(mean_t > 0.0) || !(mean_q > 0.0)) {
        throw std::invalid_argument("renewal_aoi requires positive mean_q and mean_t");
    }
    return {mean_q, mean_t, mean_q / mean_t};
}

std::string_view to_string(Policy policy) noexcept {
    switch (policy) {
        case Policy::MdsSt: return "MDS_ST";
        case Policy::MdsBe: return "MDS_BE";
        case Policy::RcBe: return "RC_BE";
        case Policy::RcSt: return "RC_ST";
    }
    return "?";
}

std::string_view to_string(BatteryMode mode) noexcept {
    return mode == BatteryMode::Physical ? "physical" : "analysis_faithful";
}

namespace {

std::string canonical(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        out.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    return out;
}

}  // namespace

Policy parse_policy(std::string_view text) {
    const auto c = canonical(text);
    if (c == "MDS_ST") return Policy::MdsSt;
    if (c == "MDS_BE") return Policy::MdsBe;
    if (c == "RC_BE") return Policy::RcBe;
    if (c == "RC_ST") return Policy::RcSt;
    throw std::invalid_argument("unknown policy '" + std::string(text) +
                                "' (expected MDS_ST, MDS_BE, RC_BE or RC_ST)");
}

BatteryMode parse_battery_mode(std::string_view text) {
    const auto c = canonical(text);
    if (c == "ANALYSIS_FAITHFUL" || c == "FAITHFUL") return BatteryMode::AnalysisFaithful;
    if (c == "PHYSICAL") return BatteryMode::Physical;
    throw std::invalid_argument("unknown battery mode '" + std::string(text) +
                                "' (expected analysis_faithful or physical)");
}

void PolicyConfig::validate(const SystemParams& params) const {
    const auto name = std::string(to_string(policy));
    if (is_mds(policy)) {
        if (!n) throw std::invalid_argument(name + " requires a blocklength n");
        if (*n < params.k()) throw std::invalid_argument(name + " requires n >= k");
        if (m) throw std::invalid_argument(name + " does not take a saving duration m");
        return;
    }
    if (n) throw std::invalid_argument(name + " does not take a blocklength n");
    if (policy == Policy::RcSt) {
        if (!m) throw std::invalid_argument("RC_ST requires a saving duration m");
        if (*m < 0) throw std::invalid_argument("RC_ST requires m >= 0");
    } else if (m) {
        throw std::invalid_argument("RC_BE does not take a saving duration m");
    }
}

}  // namespace aoi
