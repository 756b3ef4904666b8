// SPDX-License-Identifier: Apache-2.0
//
// Python bindings. Configuration and results cross the boundary as plain
// dicts/lists mirroring the JSON schema of result.json, so the Python surface
// stays in lockstep with the file formats.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "tfasim/channel.hpp"
#include "tfasim/experiment.hpp"
#include "tfasim/ga.hpp"
#include "tfasim/result_io.hpp"
#include "tfasim/rng.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace tfasim;

namespace {

py::object json_to_py(const json& j)
{
    switch (j.type())
    {
    case json::value_t::null: return py::none();
    case json::value_t::boolean: return py::bool_(j.get<bool>());
    case json::value_t::number_integer: return py::int_(j.get<long long>());
    case json::value_t::number_unsigned: return py::int_(j.get<unsigned long long>());
    case json::value_t::number_float: return py::float_(j.get<double>());
    case json::value_t::string: return py::str(j.get<std::string>());
    case json::value_t::array: {
        py::list out;
        for (const json& item : j)
            out.append(json_to_py(item));
        return out;
    }
    case json::value_t::object: {
        py::dict out;
        for (const auto& [key, value] : j.items())
            out[py::str(key)] = json_to_py(value);
        return out;
    }
    default: throw std::invalid_argument("unsupported JSON value type");
    }
}

json py_to_json(const py::handle& obj)
{
    if (obj.is_none())
        return nullptr;
    if (py::isinstance<py::bool_>(obj))
        return obj.cast<bool>();
    if (py::isinstance<py::int_>(obj))
    {
        long long v = obj.cast<long long>();
        if (v >= 0)
            return obj.cast<unsigned long long>();
        return v;
    }
    if (py::isinstance<py::float_>(obj))
        return obj.cast<double>();
    if (py::isinstance<py::str>(obj))
        return obj.cast<std::string>();
    if (py::isinstance<py::list>(obj) || py::isinstance<py::tuple>(obj))
    {
        json arr = json::array();
        for (const py::handle& item : obj)
            arr.push_back(py_to_json(item));
        return arr;
    }
    if (py::isinstance<py::dict>(obj))
    {
        json out = json::object();
        for (const auto& item : obj.cast<py::dict>())
            out[item.first.cast<std::string>()] = py_to_json(item.second);
        return out;
    }
    throw std::invalid_argument("cannot convert Python object to JSON");
}

harness::Scenario scenario_from_dict(const py::dict& config)
{
    return io::scenario_from_json(py_to_json(config));
}

std::vector<harness::Scheme> schemes_from_list(const std::vector<std::string>& names)
{
    std::vector<harness::Scheme> out;
    for (const std::string& name : names)
        out.push_back(harness::scheme_from_name(name));
    return out;
}

} // namespace

PYBIND11_MODULE(_tfasim, m)
{
    m.doc() = "mmWave MIMO downlink association simulator";
    m.attr("__version__") = harness::kVersion;

    m.def("default_config", [] { return json_to_py(io::scenario_to_json(harness::Scenario{})); },
          "Fully resolved default scenario configuration");

    m.def(
        "run_experiment",
        [](const py::dict& config, const std::vector<std::string>& schemes) {
            harness::Scenario scenario = scenario_from_dict(config);
            std::vector<harness::ExperimentResult> results{
                harness::run_experiment(scenario, schemes_from_list(schemes))};
            return json_to_py(io::to_json(results));
        },
        py::arg("config"),
        py::arg("schemes") = std::vector<std::string>{"tfa", "max_sinr_drop", "max_sinr_share_drop",
                                                      "lb_fi"},
        "Run one experiment; returns the result.json structure as a dict");

    m.def(
        "power_sweep",
        [](const py::dict& config, const std::vector<double>& powers_dbm,
           const std::vector<std::string>& schemes) {
            harness::Scenario scenario = scenario_from_dict(config);
            return json_to_py(
                io::to_json(harness::power_sweep(scenario, schemes_from_list(schemes), powers_dbm)));
        },
        py::arg("config"), py::arg("powers_dbm"),
        py::arg("schemes") = std::vector<std::string>{"tfa", "max_sinr_drop", "max_sinr_share_drop",
                                                      "lb_fi"},
        "Rerun the experiment for each transmit power with paired channels");

    m.def(
        "emit_results",
        [](const py::dict& result, const std::string& output_dir) {
            io::emit_results(io::experiments_from_json(py_to_json(result)), output_dir);
        },
        py::arg("result"), py::arg("output_dir"),
        "Write config.resolved, CSV tables and result.json for a result dict");

    m.def(
        "oracle_check",
        [](const py::dict& config, int trials) {
            harness::Scenario scenario = scenario_from_dict(config);
            scenario.validate();
            const std::vector<int> capacities = scenario.capacity_vector();
            const std::vector<int> demands = scenario.stream_demand_vector();
            int exact = 0;
            int within_pct = 0;
            for (int trial = 0; trial < trials; ++trial)
            {
                harness::Scenario point = scenario;
                point.master_seed = scenario.master_seed + static_cast<std::uint64_t>(trial);
                harness::Deployment deployment = harness::sample_deployment(point);
                channel::ChannelGrid grid = harness::sample_slot_channels(point, deployment, 1);
                rate::SlotContext context(grid, point.tx_power_w(), demands, point.noise);
                ga::GaConfig cfg = point.ga;
                cfg.seed = derive_stream(point.master_seed, {kStreamGa, 1});
                double solved = ga::solve_slot(context, capacities, cfg).best_utility;
                double oracle = ga::brute_force_oracle(context, capacities).best_utility;
                exact += std::abs(oracle - solved) <= 1e-9;
                within_pct += oracle - solved <= 0.01 * std::abs(oracle);
            }
            py::dict out;
            out["trials"] = trials;
            out["exact_matches"] = exact;
            out["within_1pct"] = within_pct;
            return out;
        },
        py::arg("config"), py::arg("trials") = 20,
        "Compare the per-slot solver against exhaustive search over seeded slots");

    m.def(
        "los_probability",
        [](double distance_m, const py::object& config) {
            channel::LargeScaleParams params;
            if (!config.is_none())
                params = scenario_from_dict(config.cast<py::dict>()).propagation;
            return channel::los_probability(distance_m, params);
        },
        py::arg("distance_m"), py::arg("config") = py::none(),
        "Line-of-sight probability at a given link distance");

    m.def(
        "path_loss_db",
        [](double distance_m, const std::string& state, double shadow_db, const py::object& config) {
            channel::LargeScaleParams params;
            if (!config.is_none())
                params = scenario_from_dict(config.cast<py::dict>()).propagation;
            channel::LinkState link_state =
                state == "los" ? channel::LinkState::kLos : channel::LinkState::kNlos;
            return channel::path_loss_db(distance_m, link_state, params, shadow_db);
        },
        py::arg("distance_m"), py::arg("state") = "los", py::arg("shadow_db") = 0.0,
        py::arg("config") = py::none(), "Close-in path loss in dB for a LoS or NLoS link");
}
