// SPDX-License-Identifier: Apache-2.0

#include "tfasim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tfasim/rng.hpp"

namespace tfasim::harness {

namespace {

double dbm_to_watt(double dbm)
{
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

// Beamformers for every served user of one activation, with the BS power
// split equally among its served users and each user's stream count taken
// from `streams` (0 = unserved).
rate::BeamformerSet build_beamformers(const assoc::ActivationVector& activation,
                                      const channel::ChannelGrid& channels,
                                      const Eigen::VectorXd& tx_power_w, const std::vector<int>& streams)
{
    std::vector<int> served_users(channels.num_bs, 0);
    for (int k = 0; k < channels.num_ues; ++k)
        if (activation.served(k))
            served_users[activation.assignment[k]] += 1;

    rate::BeamformerSet beamformers(channels.num_ues);
    for (int k = 0; k < channels.num_ues; ++k)
    {
        if (!activation.served(k))
            continue;
        int j = activation.assignment[k];
        double per_user_power = tx_power_w(j) / served_users[j];
        beamformers[k] = bf::make_beamformers(channels.at(k, j).matrix, streams[k], per_user_power);
    }
    return beamformers;
}

struct SchemeAccumulator
{
    Scheme scheme;
    assoc::ActivationMatrix activations;
    std::vector<double> utilities;
    Eigen::VectorXd rate_sum;
    long long drops = 0;
};

} // namespace

const char* scheme_name(Scheme scheme)
{
    switch (scheme)
    {
    case Scheme::kTfa: return "tfa";
    case Scheme::kMaxSinrDrop: return "max_sinr_drop";
    case Scheme::kMaxSinrShareDrop: return "max_sinr_share_drop";
    case Scheme::kLbFi: return "lb_fi";
    }
    throw std::invalid_argument("unknown scheme");
}

Scheme scheme_from_name(const std::string& name)
{
    for (Scheme s : all_schemes())
        if (name == scheme_name(s))
            return s;
    throw std::invalid_argument("unknown scheme name: " + name);
}

std::vector<Scheme> all_schemes()
{
    return {Scheme::kTfa, Scheme::kMaxSinrDrop, Scheme::kMaxSinrShareDrop, Scheme::kLbFi};
}

const char* placement_name(UePlacement placement)
{
    switch (placement)
    {
    case UePlacement::kUniformRandom: return "uniform";
    case UePlacement::kCongested: return "congested";
    case UePlacement::kExplicit: return "explicit";
    }
    throw std::invalid_argument("unknown placement");
}

UePlacement placement_from_name(const std::string& name)
{
    if (name == "uniform")
        return UePlacement::kUniformRandom;
    if (name == "congested")
        return UePlacement::kCongested;
    if (name == "explicit")
        return UePlacement::kExplicit;
    throw std::invalid_argument("unknown placement name: " + name);
}

std::vector<int> Scenario::stream_demand_vector() const
{
    return std::vector<int>(num_ues, streams_per_ue);
}

std::vector<int> Scenario::capacity_vector() const
{
    return std::vector<int>(num_bs(), streams_per_bs);
}

Eigen::VectorXd Scenario::tx_power_w() const
{
    Eigen::VectorXd power(num_bs());
    for (int j = 0; j < num_bs(); ++j)
        power(j) = dbm_to_watt(tx_power_dbm.size() == 1 ? tx_power_dbm[0] : tx_power_dbm.at(j));
    return power;
}

channel::ClusterConfig Scenario::cluster_config() const
{
    channel::ClusterConfig cfg;
    cfg.num_clusters = num_clusters;
    cfg.rays_per_cluster = rays_per_cluster;
    cfg.azimuth_spread_rad = azimuth_spread_deg * M_PI / 180.0;
    cfg.elevation_spread_rad = elevation_spread_deg * M_PI / 180.0;
    return cfg;
}

void Scenario::validate() const
{
    if (area_x_m <= 0.0 || area_y_m <= 0.0)
        throw std::invalid_argument("area dimensions must be positive");
    if (bs_positions.empty())
        throw std::invalid_argument("at least one BS is required");
    if (num_ues <= 0)
        throw std::invalid_argument("at least one UE is required");
    if (streams_per_ue <= 0 || streams_per_bs <= 0)
        throw std::invalid_argument("stream counts must be positive");
    int min_dim = std::min(ue_array.num_elements(), bs_array.num_elements());
    if (streams_per_ue > min_dim)
        throw std::invalid_argument("streams_per_ue cannot exceed the smaller array size");
    if (tx_power_dbm.size() != 1 && static_cast<int>(tx_power_dbm.size()) != num_bs())
        throw std::invalid_argument("tx_power_dbm needs one entry or one entry per BS");
    if (ue_placement == UePlacement::kExplicit &&
        static_cast<int>(ue_positions.size()) != num_ues)
        throw std::invalid_argument("explicit placement requires one position per UE");
    if (ue_placement == UePlacement::kCongested &&
        (congested_count < 0 || congested_count > num_ues || congested_radius_m <= 0.0))
        throw std::invalid_argument("invalid congested-placement parameters");
    if (num_slots <= 0)
        throw std::invalid_argument("num_slots must be positive");
    for (const Eigen::Vector2d& p : bs_positions)
        if (p.x() < 0.0 || p.x() > area_x_m || p.y() < 0.0 || p.y() > area_y_m)
            throw std::invalid_argument("BS position outside the area");
    bs_array.validate();
    ue_array.validate();
    propagation.validate();
    noise.validate();
    cluster_config().validate();
    ga.validate(num_ues);
}

Deployment sample_deployment(const Scenario& scenario)
{
    scenario.validate();
    Deployment dep;
    dep.ue_positions.resize(scenario.num_ues);

    Rng placement_rng(derive_stream(scenario.master_seed, {kStreamDeployment}));
    if (scenario.ue_placement == UePlacement::kExplicit)
    {
        dep.ue_positions = scenario.ue_positions;
    }
    else
    {
        for (int k = 0; k < scenario.num_ues; ++k)
        {
            if (scenario.ue_placement == UePlacement::kCongested && k < scenario.congested_count)
            {
                // Uniform draw over a disk centered on the first BS, clamped
                // to the service area.
                double radius = scenario.congested_radius_m * std::sqrt(placement_rng.uniform());
                double angle = placement_rng.uniform(0.0, 2.0 * M_PI);
                Eigen::Vector2d p = scenario.bs_positions.front() +
                                    radius * Eigen::Vector2d(std::cos(angle), std::sin(angle));
                dep.ue_positions[k] = {std::clamp(p.x(), 0.0, scenario.area_x_m),
                                       std::clamp(p.y(), 0.0, scenario.area_y_m)};
            }
            else
            {
                dep.ue_positions[k] = {placement_rng.uniform(0.0, scenario.area_x_m),
                                       placement_rng.uniform(0.0, scenario.area_y_m)};
            }
        }
    }

    dep.large_scale.num_ues = scenario.num_ues;
    dep.large_scale.num_bs = scenario.num_bs();
    dep.large_scale.links.resize(static_cast<std::size_t>(scenario.num_ues) * scenario.num_bs());
    for (int k = 0; k < scenario.num_ues; ++k)
        for (int j = 0; j < scenario.num_bs(); ++j)
        {
            double distance = (dep.ue_positions[k] - scenario.bs_positions[j]).norm();
            Rng link_rng(derive_stream(scenario.master_seed,
                                       {kStreamLinkState, static_cast<std::uint64_t>(k),
                                        static_cast<std::uint64_t>(j)}));
            dep.large_scale.at(k, j) =
                channel::sample_link_large_scale(distance, scenario.propagation, link_rng);
        }
    return dep;
}

channel::ChannelGrid sample_slot_channels(const Scenario& scenario, const Deployment& deployment,
                                          int slot)
{
    channel::ChannelGrid grid;
    grid.num_ues = scenario.num_ues;
    grid.num_bs = scenario.num_bs();
    grid.links.resize(static_cast<std::size_t>(grid.num_ues) * grid.num_bs);
    const double wavelength = scenario.propagation.wavelength_m();
    const channel::ClusterConfig clusters = scenario.cluster_config();
    for (int k = 0; k < grid.num_ues; ++k)
        for (int j = 0; j < grid.num_bs; ++j)
        {
            Rng rng(derive_stream(scenario.master_seed,
                                  {kStreamSmallScale, static_cast<std::uint64_t>(k),
                                   static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(slot)}));
            grid.at(k, j) = channel::sample_channel(k, j, slot, deployment.large_scale, clusters,
                                                    scenario.ue_array, scenario.bs_array, wavelength,
                                                    rng);
        }
    return grid;
}

ExperimentResult run_experiment(const Scenario& scenario, const std::vector<Scheme>& schemes)
{
    scenario.validate();
    if (schemes.empty())
        throw std::invalid_argument("at least one scheme must be selected");

    const std::vector<int> demands = scenario.stream_demand_vector();
    const std::vector<int> capacities = scenario.capacity_vector();
    const Eigen::VectorXd power_w = scenario.tx_power_w();
    const int num_ues = scenario.num_ues;
    const int num_bs = scenario.num_bs();
    const int horizon = scenario.num_slots;

    long long total_demand = static_cast<long long>(num_ues) * scenario.streams_per_ue;
    long long total_supply = static_cast<long long>(num_bs) * scenario.streams_per_bs;
    bool needs_full_capacity =
        std::find(schemes.begin(), schemes.end(), Scheme::kTfa) != schemes.end() ||
        std::find(schemes.begin(), schemes.end(), Scheme::kLbFi) != schemes.end();
    if (needs_full_capacity && total_demand > total_supply)
        throw std::invalid_argument("total stream demand exceeds total BS capacity; "
                                    "the optimizing schemes require all users to fit");

    Deployment deployment = sample_deployment(scenario);

    // Static baselines: associated once per deployment.
    assoc::ActivationVector max_sinr_drop;
    baselines::ShareDropResult share_drop;
    assoc::ActivationVector lb_fi;
    for (Scheme s : schemes)
    {
        if (s == Scheme::kMaxSinrDrop)
            max_sinr_drop = baselines::associate_max_sinr_drop(deployment.large_scale, power_w,
                                                               scenario.noise, demands, capacities);
        else if (s == Scheme::kMaxSinrShareDrop)
            share_drop = baselines::associate_max_sinr_share_drop(deployment.large_scale, power_w,
                                                                  scenario.noise, demands, capacities);
        else if (s == Scheme::kLbFi)
        {
            // Rate table measured on the reserved slot 0, so the association
            // stays static over the evaluated horizon.
            channel::ChannelGrid pilot = sample_slot_channels(scenario, deployment, 0);
            Eigen::MatrixXd table =
                rate::full_interference_rate_table(pilot, power_w, demands, scenario.noise);
            ga::GaConfig lb_cfg = scenario.ga;
            lb_cfg.seed = derive_stream(scenario.master_seed, {kStreamLbFi});
            lb_fi = baselines::associate_load_balanced_fi(table, demands, capacities, lb_cfg);
        }
    }

    std::vector<SchemeAccumulator> acc;
    for (Scheme s : schemes)
    {
        SchemeAccumulator a;
        a.scheme = s;
        a.activations.columns.reserve(horizon);
        a.utilities.reserve(horizon);
        a.rate_sum = Eigen::VectorXd::Zero(num_ues);
        acc.push_back(std::move(a));
    }

    std::uint64_t checksum = 0xcbf29ce484222325ULL;
    for (int t = 1; t <= horizon; ++t)
    {
        channel::ChannelGrid grid = sample_slot_channels(scenario, deployment, t);
        std::uint64_t slot_digest = grid.checksum();
        checksum = fnv1a64(&slot_digest, sizeof(slot_digest), checksum);

        for (SchemeAccumulator& a : acc)
        {
            assoc::ActivationVector activation;
            std::vector<int> streams = demands;
            if (a.scheme == Scheme::kTfa)
            {
                rate::SlotContext context(grid, power_w, demands, scenario.noise);
                ga::GaConfig cfg = scenario.ga;
                cfg.seed = derive_stream(scenario.master_seed,
                                         {kStreamGa, static_cast<std::uint64_t>(t)});
                activation = ga::solve_slot(context, capacities, cfg).best_activation;
            }
            else if (a.scheme == Scheme::kMaxSinrDrop)
                activation = max_sinr_drop;
            else if (a.scheme == Scheme::kMaxSinrShareDrop)
            {
                activation = share_drop.activation;
                streams = share_drop.streams;
            }
            else
                activation = lb_fi;
            activation.slot_index = t;
            for (int k = 0; k < num_ues; ++k)
                if (!activation.served(k))
                    streams[k] = 0;

            rate::BeamformerSet beamformers = build_beamformers(activation, grid, power_w, streams);
            rate::SlotRates rates = rate::slot_throughputs(activation, grid, beamformers, scenario.noise);

            a.utilities.push_back(rates.utility);
            a.rate_sum += rates.per_user_rate;
            a.drops += num_ues - activation.num_served();
            a.activations.columns.push_back(std::move(activation));
        }
    }

    ExperimentResult result;
    result.scenario = scenario;
    result.channel_checksum = checksum;
    for (SchemeAccumulator& a : acc)
    {
        SchemeResult r;
        r.scheme = a.scheme;
        r.association = assoc::association_matrix(a.activations, num_bs);
        r.slot_utilities = std::move(a.utilities);
        r.per_user_mean_rate = a.rate_sum / horizon;
        double mean = 0.0;
        for (double u : r.slot_utilities)
            mean += u;
        mean /= horizon;
        double var = 0.0;
        for (double u : r.slot_utilities)
            var += (u - mean) * (u - mean);
        r.mean_sum_rate_bpshz = mean;
        r.mean_sum_rate_bps = mean * scenario.noise.bandwidth_hz;
        r.ci95_bpshz = horizon > 1 ? 1.96 * std::sqrt(var / (horizon - 1)) / std::sqrt(horizon) : 0.0;
        r.drop_count = a.drops;
        result.schemes.push_back(std::move(r));
    }
    return result;
}

std::vector<ExperimentResult> power_sweep(const Scenario& scenario, const std::vector<Scheme>& schemes,
                                          const std::vector<double>& power_grid_dbm)
{
    if (power_grid_dbm.empty())
        throw std::invalid_argument("power grid must not be empty");
    std::vector<ExperimentResult> results;
    results.reserve(power_grid_dbm.size());
    for (double dbm : power_grid_dbm)
    {
        Scenario point = scenario;
        point.tx_power_dbm = {dbm};
        results.push_back(run_experiment(point, schemes));
    }
    return results;
}

} // namespace tfasim::harness
