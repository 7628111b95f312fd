// aoi: analytic, simulated and optimized age of information for coded status updates
// from an energy harvesting transmitter over a slotted erasure channel.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aoi/analytic.hpp"
#include "aoi/core.hpp"
#include "aoi/report.hpp"
#include "aoi/search.hpp"
#include "aoi/sim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using aoi::report::round_sig;

namespace {

struct CommonArgs {
    std::string policy;
    double p = 0.0;
    double delta = 0.0;
    std::int64_t k = 0;
    std::optional<std::int64_t> n;
    std::optional<std::int64_t> m;
    double tail_tol = aoi::kDefaultTailTol;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_free_params = true) {
    cmd->add_option("--policy", a.policy, "MDS_ST, MDS_BE, RC_BE or RC_ST")->required();
    cmd->add_option("--p", a.p, "energy arrival probability per slot")->required();
    cmd->add_option("--delta", a.delta, "symbol erasure probability")->required();
    cmd->add_option("--k", a.k, "symbols per status update")->required();
    if (with_free_params) {
        cmd->add_option("--n", a.n, "MDS blocklength");
        cmd->add_option("--m", a.m, "RC_ST saving slots");
    }
    cmd->add_option("--tail-tol", a.tail_tol, "truncation tolerance for unbounded pmfs");
}

json params_json(const aoi::SystemParams& s) {
    return {{"p", round_sig(s.p())}, {"delta", round_sig(s.delta())}, {"k", s.k()}, {"q", round_sig(s.q())}};
}

json breakdown_json(const aoi::AoiBreakdown& b) {
    return {{"aoi", round_sig(b.aoi)}, {"mean_q", round_sig(b.mean_q)}, {"mean_t", round_sig(b.mean_t)}};
}

aoi::PolicyConfig make_config(const CommonArgs& a, const std::string& battery_mode = "analysis_faithful") {
    aoi::PolicyConfig cfg;
    cfg.policy = aoi::parse_policy(a.policy);
    cfg.n = a.n;
    cfg.m = a.m;
    cfg.battery_mode = aoi::parse_battery_mode(battery_mode);
    return cfg;
}

aoi::report::RunManifest manifest(const std::string& command, json parameters, std::optional<std::uint64_t> seed = {}) {
    aoi::report::RunManifest mf;
    mf.command = command;
    mf.parameters = std::move(parameters);
    mf.seed = seed;
    mf.timestamp = aoi::report::utc_timestamp();
    return mf;
}

json echo(const CommonArgs& a) {
    json j = {{"policy", a.policy}, {"p", a.p}, {"delta", a.delta}, {"k", a.k}, {"tail_tol", a.tail_tol}};
    if (a.n) j["n"] = *a.n;
    if (a.m) j["m"] = *a.m;
    return j;
}

int cmd_analytic(const CommonArgs& a) {
    const auto params = aoi::validate_params({a.p, a.delta, a.k});
    const auto cfg = make_config(a);
    if (cfg.policy == aoi::Policy::RcSt && params.p() == 1.0) {
        throw std::domain_error("RC_ST is undefined at p=1 (the battery never drains); use RC_BE for p=1");
    }
    const auto b = aoi::search::evaluate(params, cfg, a.tail_tol);

    json warnings = json::array();
    if (cfg.policy == aoi::Policy::RcBe || (cfg.policy == aoi::Policy::RcSt && *cfg.m == 0)) {
        warnings.push_back(aoi::analytic::rc_gap_warning(params));
    }
    json out = {{"policy", aoi::to_string(cfg.policy)}, {"params", params_json(params)}};
    if (cfg.n) out["n"] = *cfg.n;
    if (cfg.m) out["m"] = *cfg.m;
    out.update(breakdown_json(b));
    out["warnings"] = warnings;
    out["manifest"] = manifest("analytic", echo(a)).to_json();
    std::cout << out.dump(2) << '\n';
    return 0;
}

struct SimArgs {
    CommonArgs common;
    std::optional<std::int64_t> horizon;
    std::optional<std::int64_t> renewals;
    std::uint64_t seed = 0;
    std::string battery_mode = "analysis_faithful";
    bool oracle = false;
    int replications = 1;
    int threads = 1;
    std::string samples_out;
};

int cmd_simulate(const SimArgs& s) {
    const auto& a = s.common;
    const auto params = aoi::validate_params({a.p, a.delta, a.k});
    const auto cfg = make_config(a, s.battery_mode);
    cfg.validate(params);

    json parameters = echo(a);
    parameters["battery_mode"] = aoi::to_string(cfg.battery_mode);
    parameters["oracle"] = s.oracle;
    json out = {{"policy", aoi::to_string(cfg.policy)}, {"params", params_json(params)}};
    json warnings = json::array();
    std::vector<double> q, t;

    if (s.oracle) {
        if (!s.renewals) throw std::invalid_argument("--oracle needs --renewals");
        parameters["renewals"] = *s.renewals;
        aoi::sim::OracleResult r;
        aoi::AoiBreakdown analytic;
        const bool keep = !s.samples_out.empty();
        if (cfg.policy == aoi::Policy::MdsSt) {
            r = aoi::sim::renewal_oracle_mds_st(params, *cfg.n, *s.renewals, s.seed, keep);
            analytic = aoi::analytic::aoi_mds_st(params, *cfg.n, a.tail_tol);
        } else if (cfg.policy == aoi::Policy::RcSt) {
            r = aoi::sim::renewal_oracle_rc_st(params, *cfg.m, *s.renewals, s.seed, keep);
            analytic = aoi::analytic::aoi_rc_st(params, *cfg.m, a.tail_tol);
        } else {
            throw std::invalid_argument("renewal oracles exist for MDS_ST and RC_ST only");
        }
        out["mode"] = "renewal_oracle";
        out["renewals"] = *s.renewals;
        out["aoi"] = round_sig(r.aoi);
        out["standard_error"] = round_sig(r.aoi_se);
        out["mean_q"] = round_sig(r.mean_q);
        out["mean_t"] = round_sig(r.mean_t);
        out["mean_t_standard_error"] = round_sig(r.mean_t_se);
        out["analytic"] = breakdown_json(analytic);
        out["z_score"] = r.aoi_se > 0 ? round_sig((r.aoi - analytic.aoi) / r.aoi_se) : 0.0;
        out["z_score_mean_t"] = r.mean_t_se > 0 ? round_sig((r.mean_t - analytic.mean_t) / r.mean_t_se) : 0.0;
        q = std::move(r.q_samples);
        t = std::move(r.t_samples);
    } else {
        if (!s.horizon) throw std::invalid_argument("slot simulation needs --horizon");
        parameters["horizon"] = *s.horizon;
        parameters["replications"] = s.replications;
        const auto rep = aoi::sim::simulate_replications(params, cfg, *s.horizon, s.seed, s.replications, s.threads);
        out["mode"] = "slot";
        out["battery_mode"] = aoi::to_string(cfg.battery_mode);
        out["aoi"] = round_sig(rep.aoi.mean);
        out["standard_error"] = round_sig(rep.aoi.standard_error);
        out["deliveries"] = rep.pooled.deliveries;
        out["total_slots"] = rep.pooled.total_slots;
        out["total_area"] = round_sig(rep.pooled.total_area);

        const bool faithful = cfg.battery_mode == aoi::BatteryMode::AnalysisFaithful;
        const bool has_battery_mode = cfg.policy == aoi::Policy::MdsSt || cfg.policy == aoi::Policy::RcSt;
        const auto analytic = aoi::search::evaluate(params, cfg, a.tail_tol);
        if (!has_battery_mode || faithful) {
            out["analytic"] = breakdown_json(analytic);
            if (rep.aoi.standard_error > 0) {
                out["z_score"] = round_sig((rep.aoi.mean - analytic.aoi) / rep.aoi.standard_error);
            }
        } else {
            out["analytic_upper_bound"] = breakdown_json(analytic);
        }
        if (cfg.policy == aoi::Policy::RcBe) warnings.push_back(aoi::analytic::rc_gap_warning(params));
        q = rep.pooled.q_samples;
        t = rep.pooled.t_samples;
    }

    if (!s.samples_out.empty()) {
        std::ofstream f(s.samples_out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + s.samples_out);
        aoi::report::write_renewal_samples_csv(f, q, t);
        if (!f) throw std::runtime_error("failed writing " + s.samples_out);
        out["samples_out"] = s.samples_out;
    }
    out["warnings"] = warnings;
    out["manifest"] = manifest("simulate", parameters, s.seed).to_json();
    std::cout << out.dump(2) << '\n';
    return 0;
}

struct OptimizeArgs {
    CommonArgs common;
    std::optional<std::int64_t> n_max;
    std::optional<std::int64_t> m_max;
};

int cmd_optimize(const OptimizeArgs& o) {
    const auto& a = o.common;
    const auto params = aoi::validate_params({a.p, a.delta, a.k});
    const auto policy = aoi::parse_policy(a.policy);
    json parameters = echo(a);
    json out = {{"policy", aoi::to_string(policy)}, {"params", params_json(params)}};
    json warnings = json::array();

    aoi::search::SearchResult r;
    if (aoi::is_mds(policy)) {
        const auto bound = o.n_max.value_or(aoi::search::default_n_max(params));
        parameters["n_max"] = bound;
        r = aoi::search::best_n(params, policy, bound, a.tail_tol);
        out["free_param_name"] = "n";
        out["free_param"] = r.free_param;
        out["search_bound"] = bound;
    } else if (policy == aoi::Policy::RcSt) {
        if (params.p() == 1.0) throw std::domain_error("RC_ST is undefined at p=1; use RC_BE for p=1");
        const auto bound = o.m_max.value_or(aoi::search::default_m_max(params));
        parameters["m_max"] = bound;
        r = aoi::search::best_m(params, bound, a.tail_tol);
        out["free_param_name"] = "m";
        out["free_param"] = r.free_param;
        out["search_bound"] = bound;
    } else {
        r.breakdown = aoi::analytic::aoi_rc_be(params);
        out["free_param"] = nullptr;
        warnings.push_back(aoi::analytic::rc_gap_warning(params));
    }
    out.update(breakdown_json(r.breakdown));
    out["at_boundary"] = r.at_boundary;
    if (r.at_boundary) warnings.push_back("optimum sits on the search bound; widen it");
    out["warnings"] = warnings;
    out["manifest"] = manifest("optimize", parameters).to_json();
    std::cout << out.dump(2) << '\n';
    return 0;
}

struct SweepArgs {
    std::string config;
    std::vector<double> p;
    std::vector<double> delta;
    std::vector<std::int64_t> k;
    std::string k_range;
    std::vector<std::string> policies;
    std::string out;
    std::string format;  // csv unless set by flag or config
    int threads = 1;
};

std::vector<std::int64_t> parse_range(const std::string& text) {
    // start:stop[:step], inclusive
    std::vector<std::int64_t> parts;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto next = text.find(':', pos);
        parts.push_back(std::stoll(text.substr(pos, next == std::string::npos ? std::string::npos : next - pos)));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    if (parts.size() < 2 || parts.size() > 3) throw std::invalid_argument("--k-range expects start:stop[:step]");
    const auto step = parts.size() == 3 ? parts[2] : 1;
    if (step <= 0 || parts[1] < parts[0]) throw std::invalid_argument("--k-range needs start <= stop and step > 0");
    std::vector<std::int64_t> out;
    for (auto v = parts[0]; v <= parts[1]; v += step) out.push_back(v);
    return out;
}

int cmd_sweep(SweepArgs s) {
    if (!s.config.empty()) {
        std::ifstream f(s.config);
        if (!f) throw std::runtime_error("cannot read config " + s.config);
        const auto cfg = json::parse(f);
        if (s.p.empty() && cfg.contains("p")) s.p = cfg["p"].get<std::vector<double>>();
        if (s.delta.empty() && cfg.contains("delta")) s.delta = cfg["delta"].get<std::vector<double>>();
        if (s.k.empty() && cfg.contains("k")) s.k = cfg["k"].get<std::vector<std::int64_t>>();
        if (s.k_range.empty() && cfg.contains("k_range")) s.k_range = cfg["k_range"].get<std::string>();
        if (s.policies.empty() && cfg.contains("policies")) s.policies = cfg["policies"].get<std::vector<std::string>>();
        if (s.out.empty() && cfg.contains("out")) s.out = cfg["out"].get<std::string>();
        if (s.format.empty() && cfg.contains("format")) s.format = cfg["format"].get<std::string>();
    }
    if (s.format.empty()) s.format = "csv";
    if (s.format != "csv" && s.format != "json") throw std::invalid_argument("--format must be csv or json");

    aoi::search::SweepGrid grid;
    grid.p = s.p;
    grid.delta = s.delta;
    grid.k = s.k;
    if (!s.k_range.empty()) {
        const auto r = parse_range(s.k_range);
        grid.k.insert(grid.k.end(), r.begin(), r.end());
    }
    if (s.policies.empty()) s.policies = {"MDS_BE", "MDS_ST", "RC_BE", "RC_ST"};
    for (const auto& name : s.policies) grid.policies.push_back(aoi::parse_policy(name));

    fs::path out_path;
    if (s.out.empty()) {
        const char* dir = std::getenv("AOI_OUTPUT_DIR");
        out_path = fs::path(dir ? dir : ".") / ("sweep." + s.format);
    } else {
        out_path = s.out;
    }

    const auto result = aoi::search::sweep(grid, s.threads);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';

    {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + out_path.string());
        if (s.format == "csv") {
            aoi::report::write_sweep_csv(f, result.rows);
        } else {
            f << json{{"rows", aoi::report::sweep_json(result.rows)}, {"warnings", result.warnings}}.dump(2) << '\n';
        }
        if (!f) throw std::runtime_error("failed writing " + out_path.string());
    }

    json parameters = {{"p", grid.p},   {"delta", grid.delta},   {"k", grid.k},
                       {"policies", s.policies}, {"format", s.format}, {"out", out_path.string()}};
    const auto sidecar = out_path.string() + ".manifest.json";
    std::ofstream mf(sidecar, std::ios::binary);
    mf << manifest("sweep", parameters).to_json().dump(2) << '\n';
    if (!mf) throw std::runtime_error("failed writing " + sidecar);
    std::cerr << "wrote " << result.rows.size() << " rows to " << out_path.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Age of information for coded status updates over an energy harvesting erasure channel"};
    app.require_subcommand(1);

    CommonArgs analytic_args;
    auto* analytic = app.add_subcommand("analytic", "closed-form average AoI of one configured policy");
    add_common(analytic, analytic_args);

    SimArgs sim_args;
    auto* simulate = app.add_subcommand("simulate", "slot simulation or renewal oracle");
    add_common(simulate, sim_args.common);
    simulate->add_option("--horizon", sim_args.horizon, "slots per replication (slot mode)");
    simulate->add_option("--renewals", sim_args.renewals, "renewal samples (oracle mode)");
    simulate->add_option("--seed", sim_args.seed, "random seed")->required();
    simulate->add_option("--battery-mode", sim_args.battery_mode, "analysis_faithful or physical");
    simulate->add_flag("--oracle", sim_args.oracle, "sample renewals directly instead of slots");
    simulate->add_option("--replications", sim_args.replications, "independent slot replications");
    simulate->add_option("--threads", sim_args.threads, "worker threads for replications");
    simulate->add_option("--samples-out", sim_args.samples_out, "CSV dump of per-renewal (q, t)");

    OptimizeArgs opt_args;
    auto* optimize = app.add_subcommand("optimize", "scan the free parameter (n or m) for the minimum AoI");
    add_common(optimize, opt_args.common, false);
    optimize->add_option("--n-max", opt_args.n_max, "upper bound of the n scan (default 10k+50)");
    optimize->add_option("--m-max", opt_args.m_max, "upper bound of the m scan (default ceil(10k(1-p)/p)+50)");

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "optimize every policy over a parameter grid");
    sweep->add_option("--config", sweep_args.config, "JSON file with p, delta, k/k_range, policies, out, format");
    sweep->add_option("--p", sweep_args.p, "energy arrival probabilities")->delimiter(',');
    sweep->add_option("--delta", sweep_args.delta, "erasure probabilities")->delimiter(',');
    sweep->add_option("--k", sweep_args.k, "update lengths")->delimiter(',');
    sweep->add_option("--k-range", sweep_args.k_range, "update lengths as start:stop[:step]");
    sweep->add_option("--policy,--policies", sweep_args.policies, "policies (default all)")->delimiter(',');
    sweep->add_option("--out", sweep_args.out, "output file (default $AOI_OUTPUT_DIR/sweep.<format>)");
    sweep->add_option("--format", sweep_args.format, "csv or json");
    sweep->add_option("--threads", sweep_args.threads, "worker threads for grid points");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analytic->parsed()) return cmd_analytic(analytic_args);
        if (simulate->parsed()) return cmd_simulate(sim_args);
        if (optimize->parsed()) return cmd_optimize(opt_args);
        if (sweep->parsed()) return cmd_sweep(sweep_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
