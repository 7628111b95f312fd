#include "aoi/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "aoi/dist.hpp"

namespace aoi::sim {

namespace {

using Rng = std::mt19937_64;

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

// Slot engine shared by the four policies. Time is counted in whole slots; the age at a
// slot boundary is an integer, so twice the area is accumulated exactly.
class SlotEngine {
public:
    SlotEngine(const SystemParams& params, std::int64_t horizon, std::uint64_t seed, const SimOptions& options)
        : rng_(make_rng(seed, 0)),
          arrival_(params.p()),
          erasure_(params.delta()),
          horizon_(horizon),
          options_(options) {}

    bool done() const noexcept { return t_ >= horizon_; }
    std::int64_t now() const noexcept { return t_; }
    std::int64_t battery() const noexcept { return battery_; }
    void drain() noexcept { battery_ = 0; }

    // One slot; returns true when a symbol reaches the receiver.
    bool slot(bool want_send) {
        const bool arrived = arrival_(rng_);
        if (arrived) ++battery_;
        const bool sent = want_send && battery_ >= 1;
        if (sent) --battery_;
        const bool erased = sent && erasure_(rng_);
        area2_ += 2 * age_ + 1;
        ++age_;
        if (options_.observer) {
            options_.observer({t_, arrived, sent, erased, want_send && !sent, battery_});
        }
        ++t_;
        return sent && !erased;
    }

    void deliver(std::int64_t generated_at) {
        age_ = t_ - generated_at;
        ++deliveries_;
    }

    void close_cycle() {
        if (options_.record_samples) {
            q_.push_back(0.5 * static_cast<double>(area2_ - cycle_area2_));
            t_samples_.push_back(static_cast<double>(t_ - cycle_start_));
        }
        cycle_area2_ = area2_;
        cycle_start_ = t_;
    }

    SimStats finish() {
        SimStats s;
        s.total_area = 0.5 * static_cast<double>(area2_);
        s.total_slots = t_;
        s.deliveries = deliveries_;
        s.q_samples = std::move(q_);
        s.t_samples = std::move(t_samples_);
        return s;
    }

private:
    Rng rng_;
    std::bernoulli_distribution arrival_;
    std::bernoulli_distribution erasure_;
    std::int64_t horizon_;
    const SimOptions& options_;

    std::int64_t t_ = 0;
    std::int64_t age_ = 0;
    std::int64_t battery_ = 0;
    std::int64_t area2_ = 0;
    std::int64_t deliveries_ = 0;
    std::int64_t cycle_area2_ = 0;
    std::int64_t cycle_start_ = 0;
    std::vector<double> q_;
    std::vector<double> t_samples_;
};

// Transmits one n-slot MDS round; returns false if the horizon cut it short.
bool mds_round(SlotEngine& eng, std::int64_t n, std::int64_t k) {
    const auto generated = eng.now();
    std::int64_t received = 0;
    bool delivered = false;
    for (std::int64_t x = 0; x < n; ++x) {
        if (eng.done()) return false;
        if (eng.slot(true) && ++received == k) {
            eng.deliver(generated);
            delivered = true;
        }
    }
    if (delivered) eng.close_cycle();
    return true;
}

void run_mds_be(SlotEngine& eng, const SystemParams& params, std::int64_t n) {
    while (!eng.done() && mds_round(eng, n, params.k())) {
    }
}

void run_mds_st(SlotEngine& eng, const SystemParams& params, std::int64_t n, BatteryMode mode) {
    const bool faithful = mode == BatteryMode::AnalysisFaithful;
    while (!eng.done()) {
        if (faithful || eng.battery() < n) {
            do {
                for (std::int64_t i = 0; i < n; ++i) {
                    if (eng.done()) return;
                    eng.slot(false);
                }
            } while (eng.battery() < n);
        }
        if (!mds_round(eng, n, params.k())) return;
        if (faithful) eng.drain();
    }
}

void run_rc_be(SlotEngine& eng, const SystemParams& params) {
    auto generated = eng.now();
    std::int64_t received = 0;
    while (!eng.done()) {
        if (eng.slot(true) && ++received == params.k()) {
            eng.deliver(generated);
            eng.close_cycle();
            generated = eng.now();
            received = 0;
        }
    }
}

void run_rc_st(SlotEngine& eng, const SystemParams& params, std::int64_t m, BatteryMode mode) {
    const bool faithful = mode == BatteryMode::AnalysisFaithful;
    const auto k = params.k();
    while (!eng.done()) {
        for (std::int64_t i = 0; i < m; ++i) {
            if (eng.done()) return;
            eng.slot(false);
        }
        const auto generated = eng.now();
        std::int64_t received = 0;
        bool delivered = false;
        // No-outage phase: the bank covers every slot until it runs dry.
        while (eng.battery() > 0 && !delivered) {
            if (eng.done()) return;
            if (eng.slot(true)) ++received;
            if (received >= k && !faithful) delivered = true;
        }
        // Best-effort remainder; the battery is empty here.
        while (received < k) {
            if (eng.done()) return;
            if (eng.slot(true)) ++received;
        }
        eng.deliver(generated);
        eng.close_cycle();
    }
}

}  // namespace

SimStats simulate_policy(const SystemParams& params, const PolicyConfig& cfg, std::int64_t horizon,
                         std::uint64_t seed, const SimOptions& options) {
    cfg.validate(params);
    if (horizon < 10 * params.k()) throw std::invalid_argument("simulate_policy: horizon must be at least 10k slots");
    if (cfg.policy == Policy::RcSt && params.p() == 1.0) {
        throw std::domain_error("no-outage phase never terminates at p = 1; use RC_BE for p=1");
    }
    SlotEngine eng(params, horizon, seed, options);
    switch (cfg.policy) {
        case Policy::MdsBe: run_mds_be(eng, params, *cfg.n); break;
        case Policy::MdsSt: run_mds_st(eng, params, *cfg.n, cfg.battery_mode); break;
        case Policy::RcBe: run_rc_be(eng, params); break;
        case Policy::RcSt: run_rc_st(eng, params, *cfg.m, cfg.battery_mode); break;
    }
    return eng.finish();
}

Estimate estimate_ci(std::span<const double> samples) {
    if (samples.size() < 2) throw std::invalid_argument("estimate_ci: need at least two samples");
    const double n = static_cast<double>(samples.size());
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

Estimate ratio_estimate(std::span<const double> num, std::span<const double> den, int lags) {
    if (num.size() != den.size()) throw std::invalid_argument("ratio_estimate: length mismatch");
    if (num.size() < 2) throw std::invalid_argument("ratio_estimate: need at least two samples");
    if (lags < 0) throw std::invalid_argument("ratio_estimate: lags must be non-negative");
    const std::size_t count = num.size();
    const double n = static_cast<double>(count);
    const double sum_num = std::accumulate(num.begin(), num.end(), 0.0);
    const double sum_den = std::accumulate(den.begin(), den.end(), 0.0);
    if (!(sum_den > 0.0)) throw std::invalid_argument("ratio_estimate: denominators must have positive sum");
    const double ratio = sum_num / sum_den;

    std::vector<double> r(count);
    for (std::size_t i = 0; i < count; ++i) r[i] = num[i] - ratio * den[i];
    auto autocov = [&](std::size_t lag) {
        double s = 0.0;
        for (std::size_t i = 0; i + lag < count; ++i) s += r[i] * r[i + lag];
        return s / n;
    };
    const double gamma0 = autocov(0) * n / (n - 1.0);
    double long_run = gamma0;
    for (std::size_t l = 1; l <= static_cast<std::size_t>(lags) && l < count; ++l) long_run += 2.0 * autocov(l);
    if (long_run < gamma0) long_run = gamma0;
    const double mean_den = sum_den / n;
    return {ratio, std::sqrt(long_run / n) / mean_den};
}

Estimate simulation_estimate(const SimStats& stats) {
    if (stats.q_samples.size() < 2) return {stats.empirical_aoi(), 0.0};
    const auto se = ratio_estimate(stats.q_samples, stats.t_samples, 1).standard_error;
    return {stats.empirical_aoi(), se};
}

ReplicatedStats simulate_replications(const SystemParams& params, const PolicyConfig& cfg,
                                      std::int64_t horizon, std::uint64_t seed, int replications,
                                      int threads) {
    if (replications < 1) throw std::invalid_argument("simulate_replications: need at least one replication");
    cfg.validate(params);
    ReplicatedStats out;
    out.runs.resize(static_cast<std::size_t>(replications));
    const int workers = std::clamp(threads, 1, replications);

    // Replication r uses seed stream (seed, r); each worker owns a fixed stride of indices.
    auto work = [&](int first) {
        for (int r = first; r < replications; r += workers) {
            std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                              static_cast<std::uint32_t>(r)};
            std::uint64_t derived = 0;
            std::uint32_t words[2];
            seq.generate(words, words + 2);
            derived = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
            out.runs[static_cast<std::size_t>(r)] = simulate_policy(params, cfg, horizon, derived);
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }

    for (const auto& run : out.runs) {
        out.pooled.total_area += run.total_area;
        out.pooled.total_slots += run.total_slots;
        out.pooled.deliveries += run.deliveries;
        out.pooled.q_samples.insert(out.pooled.q_samples.end(), run.q_samples.begin(), run.q_samples.end());
        out.pooled.t_samples.insert(out.pooled.t_samples.end(), run.t_samples.begin(), run.t_samples.end());
    }
    out.aoi = simulation_estimate(out.pooled);
    return out;
}

std::int64_t mds_st_area_x2_direct(std::int64_t n, std::int64_t rounds, std::int64_t decode_slot,
                                   std::int64_t saving_total) {
    // Age starts the renewal at n, grows until delivery, drops to the decode slot, then
    // climbs back to n by the end of the round.
    const std::int64_t until_delivery = n * (rounds - 1) + decode_slot + saving_total;
    return 2 * n * until_delivery + until_delivery * until_delivery + n * n - decode_slot * decode_slot;
}

std::int64_t mds_st_area_x2_expanded(std::int64_t n, std::int64_t rounds, std::int64_t decode_slot,
                                     std::int64_t saving_total) {
    const std::int64_t s = saving_total;
    return n * n * rounds * rounds + 2 * n * rounds * decode_slot + 2 * n * s +
           2 * (n * (rounds - 1) + decode_slot) * s + s * s;
}

namespace {

// Inverse-cdf sampler over a DiscretePmf's stored support.
class PmfSampler {
public:
    explicit PmfSampler(const DiscretePmf& pmf) : pmf_(pmf), cdf_(pmf.size()) {
        std::partial_sum(pmf.masses.begin(), pmf.masses.end(), cdf_.begin());
    }

    std::int64_t operator()(Rng& rng) const {
        std::uniform_real_distribution<double> u(0.0, cdf_.back());
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u(rng));
        const auto i = std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
        return pmf_.support_at(i);
    }

private:
    const DiscretePmf& pmf_;
    std::vector<double> cdf_;
};

OracleResult summarize(std::vector<double> q, std::vector<double> t, int lags, bool keep) {
    OracleResult out;
    const auto ratio = ratio_estimate(q, t, lags);
    const auto eq = estimate_ci(q);
    const auto et = estimate_ci(t);
    out.mean_q = eq.mean;
    out.mean_t = et.mean;
    out.aoi = ratio.mean;
    out.aoi_se = ratio.standard_error;
    out.mean_q_se = eq.standard_error;
    out.mean_t_se = et.standard_error;
    if (keep) {
        out.q_samples = std::move(q);
        out.t_samples = std::move(t);
    }
    return out;
}

}  // namespace

OracleResult renewal_oracle_mds_st(const SystemParams& params, std::int64_t n, std::int64_t renewals,
                                   std::uint64_t seed, bool keep_samples) {
    const auto k = params.k();
    if (n < k) throw std::invalid_argument("renewal_oracle_mds_st: n must be at least k");
    if (renewals < 2) throw std::invalid_argument("renewal_oracle_mds_st: need at least two renewals");
    const double s = 1.0 - params.delta();
    const double eps = dist::success_prob_eps(k, n, s);
    const auto decode = dist::decode_slot_pmf(k, n, s);
    const PmfSampler decode_slot(decode);

    Rng rng = make_rng(seed, 1);
    std::geometric_distribution<std::int64_t> extra_rounds(eps);
    std::negative_binomial_distribution<std::int64_t> idle_slots(static_cast<std::int64_t>(n),
                                                                 params.p() < 1.0 ? params.p() : 0.5);
    // Slots to bank n units, rounded up to whole n-slot saving blocks.
    auto saving_phase = [&] {
        const std::int64_t w = params.p() < 1.0 ? n + idle_slots(rng) : n;
        return (w + n - 1) / n * n;
    };

    std::vector<double> q, t;
    q.reserve(static_cast<std::size_t>(renewals));
    t.reserve(static_cast<std::size_t>(renewals));
    for (std::int64_t i = 0; i < renewals; ++i) {
        const std::int64_t v = 1 + extra_rounds(rng);
        const std::int64_t x = decode_slot(rng);
        std::int64_t z_total = 0;
        for (std::int64_t j = 0; j < v; ++j) z_total += saving_phase();
        const auto direct = mds_st_area_x2_direct(n, v, x, z_total);
        if (direct != mds_st_area_x2_expanded(n, v, x, z_total)) {
            throw std::logic_error("renewal_oracle_mds_st: area forms disagree");
        }
        q.push_back(0.5 * static_cast<double>(direct));
        t.push_back(static_cast<double>(n * v + z_total));
    }
    return summarize(std::move(q), std::move(t), 0, keep_samples);
}

OracleResult renewal_oracle_rc_st(const SystemParams& params, std::int64_t m, std::int64_t renewals,
                                  std::uint64_t seed, bool keep_samples) {
    if (m < 0) throw std::invalid_argument("renewal_oracle_rc_st: m must be non-negative");
    if (renewals < 2) throw std::invalid_argument("renewal_oracle_rc_st: need at least two renewals");
    if (params.p() == 1.0) throw std::domain_error("no-outage phase never terminates at p = 1; use RC_BE for p=1");
    const auto k = params.k();
    const double p = params.p();
    const double q = params.q();
    Rng rng = make_rng(seed, 2);

    auto busy_time = [&] {
        std::int64_t e = std::binomial_distribution<std::int64_t>(m, p)(rng);
        std::int64_t y = e;
        while (e > 0) {
            e = std::binomial_distribution<std::int64_t>(e, p)(rng);
            y += e;
        }
        const std::int64_t w = y > 0 ? std::binomial_distribution<std::int64_t>(y, 1.0 - params.delta())(rng) : 0;
        const std::int64_t g = w >= k ? 0 : k - w;
        const std::int64_t z = g > 0 ? g + std::negative_binomial_distribution<std::int64_t>(g, q)(rng) : 0;
        return y + z;
    };

    std::vector<double> qs, ts;
    qs.reserve(static_cast<std::size_t>(renewals));
    ts.reserve(static_cast<std::size_t>(renewals));
    std::int64_t previous = busy_time();
    for (std::int64_t i = 0; i < renewals; ++i) {
        const std::int64_t busy = busy_time();
        const double cycle = static_cast<double>(m + busy);
        qs.push_back(0.5 * (cycle * cycle + 2.0 * cycle * static_cast<double>(previous)));
        ts.push_back(cycle);
        previous = busy;
    }
    return summarize(std::move(qs), std::move(ts), 1, keep_samples);
}

}  // namespace aoi::sim
