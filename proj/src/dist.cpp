#include "aoi/dist.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace aoi::dist {

namespace {

void require_probability(double s, const char* what) {
    if (std::isnan(s) || s < 0.0 || s > 1.0) {
        throw std::invalid_argument(std::string(what) + ": probability must lie in [0, 1]");
    }
}

}  // namespace

double log_choose(std::int64_t n, std::int64_t r) {
    if (r < 0 || r > n) throw std::invalid_argument("log_choose: need 0 <= r <= n");
    if (r == 0 || r == n) return 0.0;
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(r) + 1.0) -
           std::lgamma(static_cast<double>(n - r) + 1.0);
}

double binomial_pmf(std::int64_t trials, double s, std::int64_t x) {
    require_probability(s, "binomial_pmf");
    if (trials < 0 || x < 0) throw std::invalid_argument("binomial_pmf: negative argument");
    if (x > trials) throw std::invalid_argument("binomial_pmf: x exceeds the number of trials");
    if (s == 0.0) return x == 0 ? 1.0 : 0.0;
    if (s == 1.0) return x == trials ? 1.0 : 0.0;
    const double lp = log_choose(trials, x) + static_cast<double>(x) * std::log(s) +
                      static_cast<double>(trials - x) * std::log1p(-s);
    return std::exp(lp);
}

double negbin_pmf(std::int64_t r, double s, std::int64_t w) {
    require_probability(s, "negbin_pmf");
    if (r < 1) throw std::invalid_argument("negbin_pmf: r must be positive");
    if (s == 0.0) throw std::invalid_argument("negbin_pmf: success probability must be positive");
    if (w < r) return 0.0;
    if (s == 1.0) return w == r ? 1.0 : 0.0;
    const double lp = log_choose(w - 1, r - 1) + static_cast<double>(r) * std::log(s) +
                      static_cast<double>(w - r) * std::log1p(-s);
    return std::exp(lp);
}

double success_prob_eps(std::int64_t k, std::int64_t n, double s) {
    require_probability(s, "success_prob_eps");
    if (k < 1) throw std::invalid_argument("success_prob_eps: k must be positive");
    if (n < k) throw std::invalid_argument("success_prob_eps: n must be at least k");
    if (s == 0.0) return 0.0;
    double sum = 0.0;
    for (std::int64_t x = k; x <= n; ++x) sum += negbin_pmf(k, s, x);
    return std::min(sum, 1.0);
}

DiscretePmf save_duration_pmf(std::int64_t n, double p, double tail_tol) {
    require_probability(p, "save_duration_pmf");
    if (n < 1) throw std::invalid_argument("save_duration_pmf: n must be positive");
    if (p == 0.0) throw std::invalid_argument("save_duration_pmf: p must be positive");
    if (!(tail_tol > 0.0)) throw std::invalid_argument("save_duration_pmf: tail_tol must be positive");

    DiscretePmf pmf;
    pmf.offset = n;
    pmf.stride = n;
    // Compensated sum: thousands of terms must resolve a 1e-12 tail against 1.
    double cumulative = 0.0;
    double carry = 0.0;
    const double mean_blocks = 1.0 / p;
    for (std::int64_t block = 1;; ++block) {
        double mass = 0.0;
        for (std::int64_t w = (block - 1) * n + 1; w <= block * n; ++w) mass += negbin_pmf(n, p, w);
        pmf.masses.push_back(mass);
        const double y = mass - carry;
        const double t = cumulative + y;
        carry = (t - cumulative) - y;
        cumulative = t;
        const double tail = 1.0 - cumulative;
        // Past the mean a vanishing block means rounding, not probability, is left.
        const bool exhausted = static_cast<double>(block) > mean_blocks && mass < tail_tol * 1e-6;
        if (tail < tail_tol || exhausted) {
            pmf.tail_mass = std::max(tail, 0.0);
            break;
        }
    }
    return pmf;
}

DiscretePmf decode_slot_pmf(std::int64_t k, std::int64_t n, double s) {
    const double eps = success_prob_eps(k, n, s);
    if (!(eps > 0.0)) throw std::domain_error("decoding impossible: success probability is zero");
    DiscretePmf pmf;
    pmf.offset = k;
    pmf.masses.reserve(static_cast<std::size_t>(n - k + 1));
    for (std::int64_t x = k; x <= n; ++x) pmf.masses.push_back(negbin_pmf(k, s, x) / eps);
    return pmf;
}

RandomSumMoments random_sum_moments(double z_mean, double z_second, double eps) {
    if (!(eps > 0.0) || eps > 1.0) {
        throw std::invalid_argument("random_sum_moments: eps must lie in (0, 1]");
    }
    if (z_second < z_mean * z_mean * (1.0 - 1e-12)) {
        throw std::invalid_argument("random_sum_moments: second moment below squared mean");
    }
    return {z_mean / eps, z_second / eps + (2.0 - 2.0 * eps) / (eps * eps) * z_mean * z_mean};
}

}  // namespace aoi::dist
