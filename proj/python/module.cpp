#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "aoi/analytic.hpp"
#include "aoi/core.hpp"
#include "aoi/dist.hpp"
#include "aoi/report.hpp"
#include "aoi/search.hpp"
#include "aoi/sim.hpp"

namespace py = pybind11;

namespace {

aoi::SystemParams make_params(double p, double delta, std::int64_t k) {
    return aoi::validate_params({p, delta, k});
}

aoi::PolicyConfig make_config(const std::string& policy, std::optional<std::int64_t> n,
                              std::optional<std::int64_t> m, const std::string& battery_mode) {
    aoi::PolicyConfig cfg;
    cfg.policy = aoi::parse_policy(policy);
    cfg.n = n;
    cfg.m = m;
    cfg.battery_mode = aoi::parse_battery_mode(battery_mode);
    return cfg;
}

}  // namespace

PYBIND11_MODULE(coded_aoi, m) {
    m.doc() = "Average age of information for coded status updates from an energy harvesting "
              "transmitter over a slotted erasure channel";
    m.attr("__version__") = aoi::report::kToolVersion;

    py::register_exception<std::domain_error>(m, "DomainError", PyExc_ValueError);

    py::class_<aoi::SystemParams>(m, "SystemParams")
        .def(py::init(&make_params), py::arg("p"), py::arg("delta"), py::arg("k"))
        .def_property_readonly("p", &aoi::SystemParams::p)
        .def_property_readonly("delta", &aoi::SystemParams::delta)
        .def_property_readonly("k", &aoi::SystemParams::k)
        .def_property_readonly("q", &aoi::SystemParams::q)
        .def("__repr__", [](const aoi::SystemParams& s) {
            return "SystemParams(p=" + aoi::report::format_number(s.p()) +
                   ", delta=" + aoi::report::format_number(s.delta()) + ", k=" + std::to_string(s.k()) + ")";
        });

    py::class_<aoi::AoiBreakdown>(m, "AoiBreakdown")
        .def_readonly("mean_q", &aoi::AoiBreakdown::mean_q)
        .def_readonly("mean_t", &aoi::AoiBreakdown::mean_t)
        .def_readonly("aoi", &aoi::AoiBreakdown::aoi);

    py::class_<aoi::DiscretePmf>(m, "DiscretePmf")
        .def_readonly("offset", &aoi::DiscretePmf::offset)
        .def_readonly("stride", &aoi::DiscretePmf::stride)
        .def_readonly("masses", &aoi::DiscretePmf::masses)
        .def_readonly("tail_mass", &aoi::DiscretePmf::tail_mass)
        .def("prob", &aoi::DiscretePmf::prob)
        .def("mean", &aoi::DiscretePmf::mean)
        .def("second_moment", &aoi::DiscretePmf::second_moment)
        .def("variance", &aoi::DiscretePmf::variance)
        .def("is_normalized", &aoi::DiscretePmf::is_normalized);

    py::class_<aoi::SimStats>(m, "SimStats")
        .def_readonly("total_area", &aoi::SimStats::total_area)
        .def_readonly("total_slots", &aoi::SimStats::total_slots)
        .def_readonly("deliveries", &aoi::SimStats::deliveries)
        .def_readonly("q_samples", &aoi::SimStats::q_samples)
        .def_readonly("t_samples", &aoi::SimStats::t_samples)
        .def_property_readonly("empirical_aoi", &aoi::SimStats::empirical_aoi);

    py::class_<aoi::sim::OracleResult>(m, "OracleResult")
        .def_readonly("mean_q", &aoi::sim::OracleResult::mean_q)
        .def_readonly("mean_t", &aoi::sim::OracleResult::mean_t)
        .def_readonly("aoi", &aoi::sim::OracleResult::aoi)
        .def_readonly("aoi_se", &aoi::sim::OracleResult::aoi_se)
        .def_readonly("mean_t_se", &aoi::sim::OracleResult::mean_t_se);

    py::class_<aoi::search::SearchResult>(m, "SearchResult")
        .def_readonly("free_param", &aoi::search::SearchResult::free_param)
        .def_readonly("breakdown", &aoi::search::SearchResult::breakdown)
        .def_readonly("at_boundary", &aoi::search::SearchResult::at_boundary);

    // distribution kernels
    m.def("binomial_pmf", &aoi::dist::binomial_pmf, py::arg("trials"), py::arg("s"), py::arg("x"));
    m.def("negbin_pmf", &aoi::dist::negbin_pmf, py::arg("r"), py::arg("s"), py::arg("w"));
    m.def("success_prob_eps", &aoi::dist::success_prob_eps, py::arg("k"), py::arg("n"), py::arg("s"),
          "Probability that at least k of n symbols with success probability s get through.");
    m.def("save_duration_pmf", &aoi::dist::save_duration_pmf, py::arg("n"), py::arg("p"),
          py::arg("tail_tol") = aoi::kDefaultTailTol);
    m.def("decode_slot_pmf", &aoi::dist::decode_slot_pmf, py::arg("k"), py::arg("n"), py::arg("s"));
    m.def(
        "random_sum_moments",
        [](double z_mean, double z_second, double eps) {
            const auto r = aoi::dist::random_sum_moments(z_mean, z_second, eps);
            return py::make_tuple(r.mean, r.second_moment);
        },
        py::arg("z_mean"), py::arg("z_second"), py::arg("eps"));

    // closed forms
    m.def("aoi_mds_st", &aoi::analytic::aoi_mds_st, py::arg("params"), py::arg("n"),
          py::arg("tail_tol") = aoi::kDefaultTailTol);
    m.def("aoi_mds_be", &aoi::analytic::aoi_mds_be, py::arg("params"), py::arg("n"));
    m.def("aoi_rc_be", &aoi::analytic::aoi_rc_be, py::arg("params"));
    m.def("aoi_rc_st", &aoi::analytic::aoi_rc_st, py::arg("params"), py::arg("m"),
          py::arg("tail_tol") = aoi::kDefaultTailTol);
    m.def("total_harvest_pmf", &aoi::analytic::total_harvest_pmf, py::arg("m"), py::arg("p"),
          py::arg("tail_tol") = aoi::kDefaultTailTol);
    m.def(
        "harvest_moments",
        [](std::int64_t mm, double p) {
            const auto h = aoi::analytic::harvest_moments(mm, p);
            return py::make_tuple(h.mean, h.variance, h.second_moment);
        },
        py::arg("m"), py::arg("p"));
    m.def("rc_gap", &aoi::analytic::rc_gap, py::arg("params"));

    // simulation
    m.def(
        "simulate_policy",
        [](const aoi::SystemParams& params, const std::string& policy, std::int64_t horizon, std::uint64_t seed,
           std::optional<std::int64_t> n, std::optional<std::int64_t> mm, const std::string& battery_mode) {
            const auto cfg = make_config(policy, n, mm, battery_mode);
            py::gil_scoped_release release;
            return aoi::sim::simulate_policy(params, cfg, horizon, seed);
        },
        py::arg("params"), py::arg("policy"), py::arg("horizon"), py::arg("seed"), py::arg("n") = py::none(),
        py::arg("m") = py::none(), py::arg("battery_mode") = "analysis_faithful");
    m.def(
        "renewal_oracle_mds_st",
        [](const aoi::SystemParams& params, std::int64_t n, std::int64_t renewals, std::uint64_t seed) {
            py::gil_scoped_release release;
            return aoi::sim::renewal_oracle_mds_st(params, n, renewals, seed);
        },
        py::arg("params"), py::arg("n"), py::arg("renewals"), py::arg("seed"));
    m.def(
        "renewal_oracle_rc_st",
        [](const aoi::SystemParams& params, std::int64_t mm, std::int64_t renewals, std::uint64_t seed) {
            py::gil_scoped_release release;
            return aoi::sim::renewal_oracle_rc_st(params, mm, renewals, seed);
        },
        py::arg("params"), py::arg("m"), py::arg("renewals"), py::arg("seed"));

    // optimization
    m.def(
        "best_n",
        [](const aoi::SystemParams& params, const std::string& policy, std::optional<std::int64_t> n_max) {
            return aoi::search::best_n(params, aoi::parse_policy(policy),
                                       n_max.value_or(aoi::search::default_n_max(params)));
        },
        py::arg("params"), py::arg("policy"), py::arg("n_max") = py::none());
    m.def(
        "best_m",
        [](const aoi::SystemParams& params, std::optional<std::int64_t> m_max) {
            return aoi::search::best_m(params, m_max.value_or(aoi::search::default_m_max(params)));
        },
        py::arg("params"), py::arg("m_max") = py::none());
    m.def(
        "sweep",
        [](std::vector<double> p, std::vector<double> delta, std::vector<std::int64_t> k,
           std::vector<std::string> policies) {
            aoi::search::SweepGrid grid{std::move(p), std::move(delta), std::move(k), {}};
            for (const auto& name : policies) grid.policies.push_back(aoi::parse_policy(name));
            const auto result = aoi::search::sweep(grid);
            py::list rows;
            for (const auto& r : result.rows) {
                py::dict d;
                d["p"] = r.params.p();
                d["delta"] = r.params.delta();
                d["k"] = r.params.k();
                d["policy"] = std::string(aoi::to_string(r.policy));
                d["free_param"] = r.free_param ? py::cast(*r.free_param) : py::none();
                d["aoi"] = r.breakdown.aoi;
                d["mean_q"] = r.breakdown.mean_q;
                d["mean_t"] = r.breakdown.mean_t;
                d["at_boundary"] = r.at_boundary;
                rows.append(d);
            }
            return rows;
        },
        py::arg("p"), py::arg("delta"), py::arg("k"),
        py::arg("policies") = std::vector<std::string>{"MDS_BE", "MDS_ST", "RC_BE", "RC_ST"});
}
