#include "aoi/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace aoi::report {

std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

double round_sig(double x) { return std::stod(format_number(x)); }

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double to_double(const std::string& s, std::size_t line_no) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) {
        throw std::runtime_error("sweep csv line " + std::to_string(line_no) + ": bad number '" + s + "'");
    }
    return v;
}

std::int64_t to_int(const std::string& s, std::size_t line_no) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) {
        throw std::runtime_error("sweep csv line " + std::to_string(line_no) + ": bad integer '" + s + "'");
    }
    return v;
}

}  // namespace

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << kSweepHeader << '\n';
    for (const auto& r : rows) {
        out << format_number(r.params.p()) << ',' << format_number(r.params.delta()) << ',' << r.params.k()
            << ',' << to_string(r.policy) << ',';
        if (r.free_param) out << *r.free_param;
        out << ',' << format_number(r.breakdown.aoi) << ',' << format_number(r.breakdown.mean_q) << ','
            << format_number(r.breakdown.mean_t) << '\n';
    }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kSweepHeader) {
        throw std::runtime_error("sweep csv: missing or unexpected header");
    }
    std::vector<SweepRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 8) {
            throw std::runtime_error("sweep csv line " + std::to_string(line_no) + ": expected 8 fields");
        }
        const auto params = validate_params({to_double(f[0], line_no), to_double(f[1], line_no), to_int(f[2], line_no)});
        SweepRow row{params, parse_policy(f[3]), std::nullopt, {}, false};
        if (!f[4].empty()) row.free_param = to_int(f[4], line_no);
        row.breakdown.aoi = to_double(f[5], line_no);
        row.breakdown.mean_q = to_double(f[6], line_no);
        row.breakdown.mean_t = to_double(f[7], line_no);
        rows.push_back(row);
    }
    return rows;
}

nlohmann::json sweep_json(std::span<const SweepRow> rows) {
    auto arr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json j = {
            {"p", round_sig(r.params.p())},
            {"delta", round_sig(r.params.delta())},
            {"k", r.params.k()},
            {"policy", to_string(r.policy)},
            {"free_param", nullptr},
            {"aoi", round_sig(r.breakdown.aoi)},
            {"mean_q", round_sig(r.breakdown.mean_q)},
            {"mean_t", round_sig(r.breakdown.mean_t)},
            {"at_boundary", r.at_boundary},
        };
        if (r.free_param) j["free_param"] = *r.free_param;
        arr.push_back(std::move(j));
    }
    return arr;
}

void write_renewal_samples_csv(std::ostream& out, std::span<const double> q, std::span<const double> t) {
    if (q.size() != t.size()) throw std::invalid_argument("renewal samples: length mismatch");
    out << "q,t\n";
    for (std::size_t i = 0; i < q.size(); ++i) out << format_number(q[i]) << ',' << format_number(t[i]) << '\n';
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j = {
        {"command", command},
        {"parameters", parameters},
        {"seed", nullptr},
        {"tool_version", tool_version},
        {"timestamp", timestamp},
    };
    if (seed) j["seed"] = *seed;
    return j;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace aoi::report
