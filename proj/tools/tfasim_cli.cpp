// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: `run` (one experiment), `sweep` (transmit-power
// sweep), `oracle-check` (per-slot solver vs exhaustive search), and
// `channel-stats` (Monte Carlo checks of the channel model).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tfasim/experiment.hpp"
#include "tfasim/ga.hpp"
#include "tfasim/result_io.hpp"
#include "tfasim/rng.hpp"

namespace {

using namespace tfasim;

// Scenario flags shared by all subcommands. Scalars bind straight into the
// Scenario; list-valued fields go through the text codecs.
struct ScenarioFlags
{
    harness::Scenario scenario;
    std::string bs_pos = io::encode_positions(scenario.bs_positions);
    std::string ue_pos;
    std::string tx_power_dbm = io::join_doubles(scenario.tx_power_dbm, ',');
    std::string placement = harness::placement_name(scenario.ue_placement);
    double carrier_ghz = scenario.propagation.carrier_freq_hz / 1e9;

    harness::Scenario resolve() const
    {
        harness::Scenario s = scenario;
        s.bs_positions = io::parse_positions(bs_pos);
        s.ue_positions = io::parse_positions(ue_pos);
        s.tx_power_dbm = io::parse_doubles(tx_power_dbm);
        s.ue_placement = harness::placement_from_name(placement);
        s.propagation.carrier_freq_hz = carrier_ghz * 1e9;
        return s;
    }
};

void add_scenario_options(CLI::App& app, ScenarioFlags& f)
{
    harness::Scenario& s = f.scenario;
    app.add_option("--area-x", s.area_x_m, "Service area width in meters")->capture_default_str();
    app.add_option("--area-y", s.area_y_m, "Service area height in meters")->capture_default_str();
    app.add_option("--bs-pos", f.bs_pos, "BS positions as x,y|x,y|...")->capture_default_str();
    app.add_option("--num-ues", s.num_ues, "Number of users")->capture_default_str();
    app.add_option("--placement", f.placement, "UE placement: uniform, congested, or explicit")
        ->capture_default_str();
    app.add_option("--ue-pos", f.ue_pos, "Explicit UE positions as x,y|x,y|...")
        ->capture_default_str();
    app.add_option("--congested-count", s.congested_count,
                   "Users clustered near the first BS in congested placement")
        ->capture_default_str();
    app.add_option("--congested-radius", s.congested_radius_m,
                   "Cluster radius in meters for congested placement")
        ->capture_default_str();
    app.add_option("--bs-rows", s.bs_array.rows_u, "BS array rows")->capture_default_str();
    app.add_option("--bs-cols", s.bs_array.cols_v, "BS array columns")->capture_default_str();
    app.add_option("--bs-spacing", s.bs_array.element_spacing_m,
                   "BS element spacing in meters (0 = half wavelength)")
        ->capture_default_str();
    app.add_option("--ue-rows", s.ue_array.rows_u, "UE array rows")->capture_default_str();
    app.add_option("--ue-cols", s.ue_array.cols_v, "UE array columns")->capture_default_str();
    app.add_option("--ue-spacing", s.ue_array.element_spacing_m,
                   "UE element spacing in meters (0 = half wavelength)")
        ->capture_default_str();
    app.add_option("--streams-per-ue", s.streams_per_ue, "Streams demanded per user")
        ->capture_default_str();
    app.add_option("--streams-per-bs", s.streams_per_bs, "Streams supplied per BS")
        ->capture_default_str();
    app.add_option("--tx-power-dbm", f.tx_power_dbm,
                   "Per-BS transmit power in dBm (single value broadcasts)")
        ->capture_default_str();
    app.add_option("--carrier-ghz", f.carrier_ghz, "Carrier frequency in GHz")->capture_default_str();
    app.add_option("--ref-distance", s.propagation.ref_distance_m,
                   "Close-in reference distance in meters")
        ->capture_default_str();
    app.add_option("--pl-exp-los", s.propagation.pathloss_exp_los, "LoS path-loss exponent")
        ->capture_default_str();
    app.add_option("--pl-exp-nlos", s.propagation.pathloss_exp_nlos, "NLoS path-loss exponent")
        ->capture_default_str();
    app.add_option("--shadow-los", s.propagation.shadow_sigma_los_db, "LoS shadowing sigma in dB")
        ->capture_default_str();
    app.add_option("--shadow-nlos", s.propagation.shadow_sigma_nlos_db, "NLoS shadowing sigma in dB")
        ->capture_default_str();
    app.add_option("--breakpoint", s.propagation.breakpoint_m,
                   "Distance below which links are always LoS, meters")
        ->capture_default_str();
    app.add_option("--los-decay", s.propagation.decay_eta_m, "LoS probability decay constant, meters")
        ->capture_default_str();
    app.add_option("--noise-psd", s.noise.psd_dbm_per_hz, "Noise PSD in dBm/Hz")
        ->capture_default_str();
    app.add_option("--bandwidth-hz", s.noise.bandwidth_hz, "Bandwidth in Hz")->capture_default_str();
    app.add_option("--clusters", s.num_clusters, "Scattering clusters per link")
        ->capture_default_str();
    app.add_option("--rays", s.rays_per_cluster, "Rays per cluster")->capture_default_str();
    app.add_option("--az-spread-deg", s.azimuth_spread_deg, "Per-cluster azimuth spread in degrees")
        ->capture_default_str();
    app.add_option("--el-spread-deg", s.elevation_spread_deg,
                   "Per-cluster elevation spread in degrees")
        ->capture_default_str();
    app.add_option("--slots", s.num_slots, "Number of simulated slots")->capture_default_str();
    app.add_option("--seed", s.master_seed, "Master seed")->capture_default_str();
    app.add_option("--ga-pop", s.ga.population_size, "GA population size")->capture_default_str();
    app.add_option("--ga-gens", s.ga.max_generations, "GA generation limit")->capture_default_str();
    app.add_option("--ga-stall", s.ga.stall_generations, "GA stall limit")->capture_default_str();
    app.add_option("--ga-crossover", s.ga.crossover_rate, "GA crossover rate")->capture_default_str();
    app.add_option("--ga-mutation", s.ga.mutation_rate_per_gene,
                   "GA per-gene mutation rate (0 = 1/K)")
        ->capture_default_str();
    app.add_option("--ga-tournament", s.ga.tournament_size, "GA tournament size")
        ->capture_default_str();
    app.add_option("--ga-elite", s.ga.elite_count, "GA elite count")->capture_default_str();
    app.set_config("--config", "", "Configuration file with key=value lines");
    app.allow_config_extras(CLI::config_extras_mode::error);
}

// The parser opens config files only for the root command, so a file handed
// to a subcommand via --config would be stored but never read. Replay it
// through the subcommand's stream parser; file values fill whichever options
// the command line left unset.
void apply_config_file(CLI::App& app)
{
    const CLI::Option* config = app.get_config_ptr();
    if (config == nullptr || config->count() == 0)
        return;
    for (const std::string& path : config->as<std::vector<std::string>>())
    {
        std::ifstream in(path);
        if (!in)
            throw CLI::FileError::Missing(path);
        app.parse_from_stream(in);
    }
}

std::vector<harness::Scheme> parse_schemes(const std::string& text)
{
    std::vector<harness::Scheme> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ','))
        if (!item.empty())
            out.push_back(harness::scheme_from_name(item));
    return out;
}

void print_summary(const std::vector<harness::ExperimentResult>& results)
{
    std::printf("power_dbm  scheme               mean_bpshz       ci95         drops\n");
    for (const harness::ExperimentResult& r : results)
        for (const harness::SchemeResult& s : r.schemes)
            std::printf("%-9s  %-19s  %14.6f  %11.6f  %6lld\n",
                        io::join_doubles({r.scenario.tx_power_dbm.front()}, ',').c_str(),
                        harness::scheme_name(s.scheme), s.mean_sum_rate_bpshz, s.ci95_bpshz,
                        s.drop_count);
}

int cmd_run(const ScenarioFlags& flags, const std::string& schemes_text, const std::string& out_dir)
{
    auto start = std::chrono::steady_clock::now();
    harness::Scenario scenario = flags.resolve();
    harness::ExperimentResult result = harness::run_experiment(scenario, parse_schemes(schemes_text));
    std::vector<harness::ExperimentResult> results{std::move(result)};
    io::emit_results(results, out_dir);
    print_summary(results);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("wrote %s in %.2f s\n", out_dir.c_str(), secs);
    return 0;
}

int cmd_sweep(const ScenarioFlags& flags, const std::string& schemes_text,
              const std::string& powers_text, const std::string& out_dir)
{
    auto start = std::chrono::steady_clock::now();
    harness::Scenario scenario = flags.resolve();
    std::vector<double> grid = io::parse_doubles(powers_text);
    std::vector<harness::ExperimentResult> results =
        harness::power_sweep(scenario, parse_schemes(schemes_text), grid);
    io::emit_results(results, out_dir);
    print_summary(results);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("wrote %s in %.2f s\n", out_dir.c_str(), secs);
    return 0;
}

int cmd_oracle_check(const ScenarioFlags& flags, int trials)
{
    harness::Scenario scenario = flags.resolve();
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
        ga::GaResult solved = ga::solve_slot(context, capacities, cfg);
        ga::OracleResult oracle = ga::brute_force_oracle(context, capacities);

        double gap = oracle.best_utility - solved.best_utility;
        bool is_exact = std::abs(gap) <= 1e-9;
        bool is_close = gap <= 0.01 * std::abs(oracle.best_utility);
        exact += is_exact;
        within_pct += is_close;
        std::printf("trial %3d  seed %llu  ga %.9f  oracle %.9f  gap %.3e%s\n", trial,
                    static_cast<unsigned long long>(point.master_seed), solved.best_utility,
                    oracle.best_utility, gap, is_exact ? "" : "  (suboptimal)");
    }
    std::printf("exact matches: %d/%d, within 1%%: %d/%d\n", exact, trials, within_pct, trials);
    bool pass = exact * 100 >= trials * 95 && within_pct == trials;
    std::printf("%s\n", pass ? "PASS" : "FAIL");
    return pass ? 0 : 1;
}

int cmd_channel_stats(const ScenarioFlags& flags, int draws, double distance_m)
{
    harness::Scenario scenario = flags.resolve();
    const channel::LargeScaleParams& prop = scenario.propagation;
    prop.validate();

    double p_los = channel::los_probability(distance_m, prop);
    Rng state_rng(derive_stream(scenario.master_seed, {kStreamLinkState}));
    int los_hits = 0;
    for (int i = 0; i < draws; ++i)
        los_hits += channel::sample_link_state(distance_m, prop, state_rng) == channel::LinkState::kLos;
    double los_frac = static_cast<double>(los_hits) / draws;

    const channel::ClusterConfig clusters = scenario.cluster_config();
    const double wavelength = prop.wavelength_m();
    Rng ss_rng(derive_stream(scenario.master_seed, {kStreamSmallScale}));
    double norm_sum = 0.0;
    for (int i = 0; i < draws; ++i)
        norm_sum += channel::sample_small_scale(clusters, scenario.ue_array, scenario.bs_array,
                                                wavelength, ss_rng)
                        .squaredNorm();
    double norm_mean = norm_sum / draws;
    double norm_expect = scenario.ue_array.num_elements() * scenario.bs_array.num_elements();

    double pl_los = channel::path_loss_db(100.0, channel::LinkState::kLos, prop, 0.0);
    double pl_nlos = channel::path_loss_db(100.0, channel::LinkState::kNlos, prop, 0.0);

    std::printf("los_probability(%g m)        = %.9f\n", distance_m, p_los);
    std::printf("LoS fraction over %d draws  = %.6f (|diff| = %.6f)\n", draws, los_frac,
                std::abs(los_frac - p_los));
    std::printf("mean ||H||_F^2 over %d draws = %.4f (expected %.1f, ratio %.4f)\n", draws,
                norm_mean, norm_expect, norm_mean / norm_expect);
    std::printf("path_loss_db(100 m, LoS)      = %.6f dB\n", pl_los);
    std::printf("path_loss_db(100 m, NLoS)     = %.6f dB\n", pl_nlos);

    bool pass = std::abs(los_frac - p_los) <= 0.01 && std::abs(norm_mean / norm_expect - 1.0) <= 0.05;
    std::printf("%s\n", pass ? "PASS" : "FAIL");
    return pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Per-slot user association simulator for mmWave MIMO downlink networks"};
    app.require_subcommand(1);

    ScenarioFlags run_flags;
    std::string run_schemes = "tfa,max_sinr_drop,max_sinr_share_drop,lb_fi";
    std::string run_out = "results";
    CLI::App* run = app.add_subcommand("run", "Run one experiment and write result files");
    add_scenario_options(*run, run_flags);
    run->add_option("--schemes", run_schemes, "Comma-separated scheme list")->capture_default_str();
    run->add_option("--out", run_out, "Output directory")->capture_default_str();

    ScenarioFlags sweep_flags;
    sweep_flags.scenario.num_slots = 200; // sweep default horizon
    std::string sweep_schemes = "tfa,max_sinr_drop,max_sinr_share_drop,lb_fi";
    std::string sweep_powers = "20,25,30,35,40,45,50";
    std::string sweep_out = "results";
    CLI::App* sweep = app.add_subcommand("sweep", "Rerun the experiment over a transmit-power grid");
    add_scenario_options(*sweep, sweep_flags);
    sweep->add_option("--schemes", sweep_schemes, "Comma-separated scheme list")
        ->capture_default_str();
    sweep->add_option("--powers", sweep_powers, "Comma-separated power grid in dBm")
        ->capture_default_str();
    sweep->add_option("--out", sweep_out, "Output directory")->capture_default_str();

    ScenarioFlags oracle_flags;
    int oracle_trials = 100;
    CLI::App* oracle = app.add_subcommand(
        "oracle-check", "Compare the per-slot solver against exhaustive search over seeded slots");
    add_scenario_options(*oracle, oracle_flags);
    oracle->add_option("--trials", oracle_trials, "Number of seeded slots")->capture_default_str();

    ScenarioFlags stats_flags;
    int stats_draws = 10000;
    double stats_distance = 71.0;
    CLI::App* stats =
        app.add_subcommand("channel-stats", "Monte Carlo validation of the channel model");
    add_scenario_options(*stats, stats_flags);
    stats->add_option("--draws", stats_draws, "Monte Carlo draws")->capture_default_str();
    stats->add_option("--distance", stats_distance, "Link distance in meters for the LoS check")
        ->capture_default_str();

    try
    {
        app.parse(argc, argv);
        for (CLI::App* sub : app.get_subcommands())
            apply_config_file(*sub);
        if (run->parsed())
            return cmd_run(run_flags, run_schemes, run_out);
        if (sweep->parsed())
            return cmd_sweep(sweep_flags, sweep_schemes, sweep_powers, sweep_out);
        if (oracle->parsed())
            return cmd_oracle_check(oracle_flags, oracle_trials);
        if (stats->parsed())
            return cmd_channel_stats(stats_flags, stats_draws, stats_distance);
    }
    catch (const CLI::ParseError& e)
    {
        return app.exit(e);
    }
    catch (const std::exception& e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
