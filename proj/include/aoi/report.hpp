#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "aoi/search.hpp"

/// Serialization of results: sweep CSV, renewal sample dumps, run manifests.
namespace aoi::report {

using search::SweepRow;

inline constexpr const char* kToolVersion = "0.3.0";
inline constexpr const char* kSweepHeader = "p,delta,k,policy,free_param,aoi,mean_q,mean_t";

/// 12 significant digits, '.' decimal point, no grouping.
std::string format_number(double x);

/// x rounded to what format_number() prints, so JSON output stays diff-stable.
double round_sig(double x);

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

/// Inverse of write_sweep_csv(). Throws std::runtime_error on a malformed file.
std::vector<SweepRow> read_sweep_csv(std::istream& in);

nlohmann::json sweep_json(std::span<const SweepRow> rows);

/// One "q_i,t_i" line per renewal under a "q,t" header.
void write_renewal_samples_csv(std::ostream& out, std::span<const double> q, std::span<const double> t);

struct RunManifest {
    std::string command;
    nlohmann::json parameters;
    std::optional<std::uint64_t> seed;
    std::string tool_version = kToolVersion;
    std::string timestamp;  ///< ISO-8601 UTC

    nlohmann::json to_json() const;
};

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

}  // namespace aoi::report
