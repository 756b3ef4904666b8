// SPDX-License-Identifier: Apache-2.0

#include "tfasim/result_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tfasim::io {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json positions_to_json(const std::vector<Eigen::Vector2d>& positions)
{
    json arr = json::array();
    for (const Eigen::Vector2d& p : positions)
        arr.push_back({p.x(), p.y()});
    return arr;
}

std::vector<Eigen::Vector2d> positions_from_json(const json& arr)
{
    std::vector<Eigen::Vector2d> out;
    for (const json& p : arr)
        out.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    return out;
}

// Values holding list delimiters must be quoted in config files, or the
// reader splits them into separate tokens.
std::string quote_if_list(const std::string& value)
{
    if (value.find_first_of(",| ") == std::string::npos)
        return value;
    return '"' + value + '"';
}

std::string power_label(const std::vector<double>& tx_power_dbm)
{
    if (tx_power_dbm.empty())
        return "none";
    bool uniform = true;
    for (double p : tx_power_dbm)
        uniform = uniform && p == tx_power_dbm.front();
    if (uniform)
    {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%g", tx_power_dbm.front());
        return buf;
    }
    std::string out;
    for (std::size_t i = 0; i < tx_power_dbm.size(); ++i)
    {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%g", tx_power_dbm[i]);
        if (i > 0)
            out += '|';
        out += buf;
    }
    return out;
}

ordered_json scheme_result_to_json(const harness::SchemeResult& r)
{
    ordered_json j;
    j["scheme"] = harness::scheme_name(r.scheme);
    j["horizon"] = r.association.horizon;
    json coeffs = json::array();
    for (Eigen::Index k = 0; k < r.association.coefficients.rows(); ++k)
    {
        json row = json::array();
        for (Eigen::Index b = 0; b < r.association.coefficients.cols(); ++b)
            row.push_back(r.association.coefficients(k, b));
        coeffs.push_back(std::move(row));
    }
    j["association_coefficients"] = std::move(coeffs);
    j["slot_utilities_bpshz"] = r.slot_utilities;
    std::vector<double> per_user(r.per_user_mean_rate.data(),
                                 r.per_user_mean_rate.data() + r.per_user_mean_rate.size());
    j["per_user_mean_rate_bpshz"] = per_user;
    j["mean_sum_rate_bpshz"] = r.mean_sum_rate_bpshz;
    j["mean_sum_rate_bps"] = r.mean_sum_rate_bps;
    j["ci95_bpshz"] = r.ci95_bpshz;
    j["drop_count"] = r.drop_count;
    return j;
}

harness::SchemeResult scheme_result_from_json(const json& j)
{
    harness::SchemeResult r;
    r.scheme = harness::scheme_from_name(j.at("scheme").get<std::string>());
    r.association.horizon = j.at("horizon").get<int>();
    const json& coeffs = j.at("association_coefficients");
    if (!coeffs.empty())
    {
        r.association.coefficients.resize(coeffs.size(), coeffs.at(0).size());
        for (std::size_t k = 0; k < coeffs.size(); ++k)
            for (std::size_t b = 0; b < coeffs.at(k).size(); ++b)
                r.association.coefficients(k, b) = coeffs.at(k).at(b).get<double>();
    }
    r.slot_utilities = j.at("slot_utilities_bpshz").get<std::vector<double>>();
    std::vector<double> per_user = j.at("per_user_mean_rate_bpshz").get<std::vector<double>>();
    r.per_user_mean_rate = Eigen::Map<Eigen::VectorXd>(per_user.data(), per_user.size());
    r.mean_sum_rate_bpshz = j.at("mean_sum_rate_bpshz").get<double>();
    r.mean_sum_rate_bps = j.at("mean_sum_rate_bps").get<double>();
    r.ci95_bpshz = j.at("ci95_bpshz").get<double>();
    r.drop_count = j.at("drop_count").get<long long>();
    return r;
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out)
        throw std::runtime_error("write failed for " + path.string());
}

} // namespace

std::string format_double(double value)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string join_doubles(const std::vector<double>& values, char sep)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        if (i > 0)
            out += sep;
        out += format_double(values[i]);
    }
    return out;
}

std::vector<double> parse_doubles(const std::string& text, char sep)
{
    std::vector<double> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep))
    {
        if (item.empty())
            continue;
        std::size_t used = 0;
        double value = 0.0;
        try
        {
            value = std::stod(item, &used);
        }
        catch (const std::exception&)
        {
            used = 0;
        }
        if (used != item.size())
            throw std::invalid_argument("cannot parse number: " + item);
        out.push_back(value);
    }
    return out;
}

std::string encode_positions(const std::vector<Eigen::Vector2d>& positions)
{
    std::string out;
    for (std::size_t i = 0; i < positions.size(); ++i)
    {
        if (i > 0)
            out += '|';
        out += format_double(positions[i].x()) + "," + format_double(positions[i].y());
    }
    return out;
}

std::vector<Eigen::Vector2d> parse_positions(const std::string& text)
{
    std::vector<Eigen::Vector2d> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, '|'))
    {
        if (item.empty())
            continue;
        std::vector<double> coords = parse_doubles(item, ',');
        if (coords.size() != 2)
            throw std::invalid_argument("positions must be x,y pairs: " + item);
        out.emplace_back(coords[0], coords[1]);
    }
    return out;
}

std::string scenario_to_config_text(const harness::Scenario& s)
{
    std::ostringstream out;
    out << "# resolved configuration; reusable via --config\n";
    out << "area-x=" << format_double(s.area_x_m) << "\n";
    out << "area-y=" << format_double(s.area_y_m) << "\n";
    out << "bs-pos=" << quote_if_list(encode_positions(s.bs_positions)) << "\n";
    out << "num-ues=" << s.num_ues << "\n";
    out << "placement=" << harness::placement_name(s.ue_placement) << "\n";
    out << "ue-pos=" << quote_if_list(encode_positions(s.ue_positions)) << "\n";
    out << "congested-count=" << s.congested_count << "\n";
    out << "congested-radius=" << format_double(s.congested_radius_m) << "\n";
    out << "bs-rows=" << s.bs_array.rows_u << "\n";
    out << "bs-cols=" << s.bs_array.cols_v << "\n";
    out << "bs-spacing=" << format_double(s.bs_array.element_spacing_m) << "\n";
    out << "ue-rows=" << s.ue_array.rows_u << "\n";
    out << "ue-cols=" << s.ue_array.cols_v << "\n";
    out << "ue-spacing=" << format_double(s.ue_array.element_spacing_m) << "\n";
    out << "streams-per-ue=" << s.streams_per_ue << "\n";
    out << "streams-per-bs=" << s.streams_per_bs << "\n";
    out << "tx-power-dbm=" << quote_if_list(join_doubles(s.tx_power_dbm, ',')) << "\n";
    out << "carrier-ghz=" << format_double(s.propagation.carrier_freq_hz / 1e9) << "\n";
    out << "ref-distance=" << format_double(s.propagation.ref_distance_m) << "\n";
    out << "pl-exp-los=" << format_double(s.propagation.pathloss_exp_los) << "\n";
    out << "pl-exp-nlos=" << format_double(s.propagation.pathloss_exp_nlos) << "\n";
    out << "shadow-los=" << format_double(s.propagation.shadow_sigma_los_db) << "\n";
    out << "shadow-nlos=" << format_double(s.propagation.shadow_sigma_nlos_db) << "\n";
    out << "breakpoint=" << format_double(s.propagation.breakpoint_m) << "\n";
    out << "los-decay=" << format_double(s.propagation.decay_eta_m) << "\n";
    out << "noise-psd=" << format_double(s.noise.psd_dbm_per_hz) << "\n";
    out << "bandwidth-hz=" << format_double(s.noise.bandwidth_hz) << "\n";
    out << "clusters=" << s.num_clusters << "\n";
    out << "rays=" << s.rays_per_cluster << "\n";
    out << "az-spread-deg=" << format_double(s.azimuth_spread_deg) << "\n";
    out << "el-spread-deg=" << format_double(s.elevation_spread_deg) << "\n";
    out << "slots=" << s.num_slots << "\n";
    out << "seed=" << s.master_seed << "\n";
    out << "ga-pop=" << s.ga.population_size << "\n";
    out << "ga-gens=" << s.ga.max_generations << "\n";
    out << "ga-stall=" << s.ga.stall_generations << "\n";
    out << "ga-crossover=" << format_double(s.ga.crossover_rate) << "\n";
    out << "ga-mutation=" << format_double(s.ga.mutation_rate_per_gene) << "\n";
    out << "ga-tournament=" << s.ga.tournament_size << "\n";
    out << "ga-elite=" << s.ga.elite_count << "\n";
    return out.str();
}

ordered_json scenario_to_json(const harness::Scenario& s)
{
    ordered_json j;
    j["area_x_m"] = s.area_x_m;
    j["area_y_m"] = s.area_y_m;
    j["bs_positions"] = positions_to_json(s.bs_positions);
    j["num_ues"] = s.num_ues;
    j["ue_placement"] = harness::placement_name(s.ue_placement);
    j["ue_positions"] = positions_to_json(s.ue_positions);
    j["congested_count"] = s.congested_count;
    j["congested_radius_m"] = s.congested_radius_m;
    j["bs_array"] = {{"rows", s.bs_array.rows_u},
                     {"cols", s.bs_array.cols_v},
                     {"element_spacing_m", s.bs_array.element_spacing_m}};
    j["ue_array"] = {{"rows", s.ue_array.rows_u},
                     {"cols", s.ue_array.cols_v},
                     {"element_spacing_m", s.ue_array.element_spacing_m}};
    j["streams_per_ue"] = s.streams_per_ue;
    j["streams_per_bs"] = s.streams_per_bs;
    j["tx_power_dbm"] = s.tx_power_dbm;
    j["propagation"] = {{"carrier_freq_hz", s.propagation.carrier_freq_hz},
                        {"ref_distance_m", s.propagation.ref_distance_m},
                        {"pathloss_exp_los", s.propagation.pathloss_exp_los},
                        {"pathloss_exp_nlos", s.propagation.pathloss_exp_nlos},
                        {"shadow_sigma_los_db", s.propagation.shadow_sigma_los_db},
                        {"shadow_sigma_nlos_db", s.propagation.shadow_sigma_nlos_db},
                        {"breakpoint_m", s.propagation.breakpoint_m},
                        {"decay_eta_m", s.propagation.decay_eta_m}};
    j["noise"] = {{"psd_dbm_per_hz", s.noise.psd_dbm_per_hz}, {"bandwidth_hz", s.noise.bandwidth_hz}};
    j["clusters"] = {{"num_clusters", s.num_clusters},
                     {"rays_per_cluster", s.rays_per_cluster},
                     {"azimuth_spread_deg", s.azimuth_spread_deg},
                     {"elevation_spread_deg", s.elevation_spread_deg}};
    j["num_slots"] = s.num_slots;
    j["master_seed"] = s.master_seed;
    j["ga"] = {{"population_size", s.ga.population_size},
               {"max_generations", s.ga.max_generations},
               {"stall_generations", s.ga.stall_generations},
               {"crossover_rate", s.ga.crossover_rate},
               {"mutation_rate_per_gene", s.ga.mutation_rate_per_gene},
               {"tournament_size", s.ga.tournament_size},
               {"elite_count", s.ga.elite_count}};
    return j;
}

harness::Scenario scenario_from_json(const json& j)
{
    harness::Scenario s;
    s.area_x_m = j.at("area_x_m").get<double>();
    s.area_y_m = j.at("area_y_m").get<double>();
    s.bs_positions = positions_from_json(j.at("bs_positions"));
    s.num_ues = j.at("num_ues").get<int>();
    s.ue_placement = harness::placement_from_name(j.at("ue_placement").get<std::string>());
    s.ue_positions = positions_from_json(j.at("ue_positions"));
    s.congested_count = j.at("congested_count").get<int>();
    s.congested_radius_m = j.at("congested_radius_m").get<double>();
    s.bs_array.rows_u = j.at("bs_array").at("rows").get<int>();
    s.bs_array.cols_v = j.at("bs_array").at("cols").get<int>();
    s.bs_array.element_spacing_m = j.at("bs_array").at("element_spacing_m").get<double>();
    s.ue_array.rows_u = j.at("ue_array").at("rows").get<int>();
    s.ue_array.cols_v = j.at("ue_array").at("cols").get<int>();
    s.ue_array.element_spacing_m = j.at("ue_array").at("element_spacing_m").get<double>();
    s.streams_per_ue = j.at("streams_per_ue").get<int>();
    s.streams_per_bs = j.at("streams_per_bs").get<int>();
    s.tx_power_dbm = j.at("tx_power_dbm").get<std::vector<double>>();
    const json& prop = j.at("propagation");
    s.propagation.carrier_freq_hz = prop.at("carrier_freq_hz").get<double>();
    s.propagation.ref_distance_m = prop.at("ref_distance_m").get<double>();
    s.propagation.pathloss_exp_los = prop.at("pathloss_exp_los").get<double>();
    s.propagation.pathloss_exp_nlos = prop.at("pathloss_exp_nlos").get<double>();
    s.propagation.shadow_sigma_los_db = prop.at("shadow_sigma_los_db").get<double>();
    s.propagation.shadow_sigma_nlos_db = prop.at("shadow_sigma_nlos_db").get<double>();
    s.propagation.breakpoint_m = prop.at("breakpoint_m").get<double>();
    s.propagation.decay_eta_m = prop.at("decay_eta_m").get<double>();
    s.noise.psd_dbm_per_hz = j.at("noise").at("psd_dbm_per_hz").get<double>();
    s.noise.bandwidth_hz = j.at("noise").at("bandwidth_hz").get<double>();
    const json& cl = j.at("clusters");
    s.num_clusters = cl.at("num_clusters").get<int>();
    s.rays_per_cluster = cl.at("rays_per_cluster").get<int>();
    s.azimuth_spread_deg = cl.at("azimuth_spread_deg").get<double>();
    s.elevation_spread_deg = cl.at("elevation_spread_deg").get<double>();
    s.num_slots = j.at("num_slots").get<int>();
    s.master_seed = j.at("master_seed").get<std::uint64_t>();
    const json& ga = j.at("ga");
    s.ga.population_size = ga.at("population_size").get<int>();
    s.ga.max_generations = ga.at("max_generations").get<int>();
    s.ga.stall_generations = ga.at("stall_generations").get<int>();
    s.ga.crossover_rate = ga.at("crossover_rate").get<double>();
    s.ga.mutation_rate_per_gene = ga.at("mutation_rate_per_gene").get<double>();
    s.ga.tournament_size = ga.at("tournament_size").get<int>();
    s.ga.elite_count = ga.at("elite_count").get<int>();
    return s;
}

nlohmann::ordered_json to_json(const std::vector<harness::ExperimentResult>& results)
{
    if (results.empty())
        throw std::invalid_argument("no results to serialize");
    ordered_json j;
    j["software_version"] = harness::kVersion;
    j["config"] = scenario_to_json(results.front().scenario);
    ordered_json runs = ordered_json::array();
    for (const harness::ExperimentResult& r : results)
    {
        ordered_json run;
        run["tx_power_dbm"] = r.scenario.tx_power_dbm;
        char digest[32];
        std::snprintf(digest, sizeof(digest), "0x%016llx",
                      static_cast<unsigned long long>(r.channel_checksum));
        run["channel_checksum"] = digest;
        ordered_json schemes = ordered_json::array();
        for (const harness::SchemeResult& s : r.schemes)
            schemes.push_back(scheme_result_to_json(s));
        run["schemes"] = std::move(schemes);
        runs.push_back(std::move(run));
    }
    j["runs"] = std::move(runs);
    return j;
}

std::vector<harness::ExperimentResult> experiments_from_json(const json& j)
{
    harness::Scenario base = scenario_from_json(j.at("config"));
    std::vector<harness::ExperimentResult> results;
    for (const json& run : j.at("runs"))
    {
        harness::ExperimentResult r;
        r.scenario = base;
        r.scenario.tx_power_dbm = run.at("tx_power_dbm").get<std::vector<double>>();
        r.channel_checksum =
            std::stoull(run.at("channel_checksum").get<std::string>(), nullptr, 16);
        for (const json& s : run.at("schemes"))
            r.schemes.push_back(scheme_result_from_json(s));
        results.push_back(std::move(r));
    }
    return results;
}

std::string slot_utilities_csv(const harness::SchemeResult& result)
{
    std::string out = "slot,sum_rate_bpshz\n";
    for (std::size_t i = 0; i < result.slot_utilities.size(); ++i)
        out += std::to_string(i + 1) + "," + format_double(result.slot_utilities[i]) + "\n";
    return out;
}

std::string sweep_summary_csv(const std::vector<harness::ExperimentResult>& results)
{
    std::string out = "power_dbm,scheme,mean_sum_rate_bpshz,mean_sum_rate_bps,ci95\n";
    for (const harness::ExperimentResult& r : results)
        for (const harness::SchemeResult& s : r.schemes)
            out += power_label(r.scenario.tx_power_dbm) + "," + harness::scheme_name(s.scheme) + "," +
                   format_double(s.mean_sum_rate_bpshz) + "," + format_double(s.mean_sum_rate_bps) +
                   "," + format_double(s.ci95_bpshz) + "\n";
    return out;
}

void emit_results(const std::vector<harness::ExperimentResult>& results,
                  const std::filesystem::path& output_dir)
{
    if (results.empty())
        throw std::invalid_argument("no results to emit");
    std::error_code ec;
    std::filesystem::create_directories(output_dir, ec);
    if (ec)
        throw std::runtime_error("cannot create " + output_dir.string() + ": " + ec.message());

    write_file(output_dir / "config.resolved", scenario_to_config_text(results.front().scenario));
    for (const harness::ExperimentResult& r : results)
    {
        std::string tag = results.size() > 1 ? "_p" + power_label(r.scenario.tx_power_dbm) : "";
        for (const harness::SchemeResult& s : r.schemes)
        {
            std::string scheme = harness::scheme_name(s.scheme);
            write_file(output_dir / ("association_coeffs_" + scheme + tag + ".csv"),
                       assoc::to_csv(s.association));
            write_file(output_dir / ("slot_utilities_" + scheme + tag + ".csv"),
                       slot_utilities_csv(s));
        }
    }
    write_file(output_dir / "sweep_summary.csv", sweep_summary_csv(results));
    write_file(output_dir / "result.json", to_json(results).dump(2) + "\n");
}

} // namespace tfasim::io
