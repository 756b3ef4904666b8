// SPDX-License-Identifier: Apache-2.0
//
// Experiment orchestration: scenario configuration, deployment sampling,
// multi-slot simulation across association schemes, transmit-power sweeps,
// and aggregation.  One deployment (UE positions, link states, shadow draws)
// is frozen per master seed; small-scale fading is redrawn per slot and shared
// across all schemes so comparisons are paired.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tfasim/association.hpp"
#include "tfasim/baselines.hpp"
#include "tfasim/channel.hpp"
#include "tfasim/ga.hpp"
#include "tfasim/rate.hpp"

namespace tfasim::harness {

inline constexpr const char* kVersion = "0.1.0";

enum class Scheme
{
    kTfa,              // per-slot optimized association
    kMaxSinrDrop,      // static max-SINR, overload users dropped
    kMaxSinrShareDrop, // static max-SINR, streams shared then dropped
    kLbFi              // static load-balancing on full-interference rates
};

const char* scheme_name(Scheme scheme);
Scheme scheme_from_name(const std::string& name);
std::vector<Scheme> all_schemes();

enum class UePlacement
{
    kUniformRandom,
    kCongested, // a cluster of users near the first BS, remainder uniform
    kExplicit
};

const char* placement_name(UePlacement placement);
UePlacement placement_from_name(const std::string& name);

struct Scenario
{
    double area_x_m = 300.0;
    double area_y_m = 300.0;
    std::vector<Eigen::Vector2d> bs_positions = {
        {150.0, 150.0}, {75.0, 75.0}, {225.0, 75.0}, {150.0, 240.0}};
    int num_ues = 8;
    UePlacement ue_placement = UePlacement::kUniformRandom;
    std::vector<Eigen::Vector2d> ue_positions; // used when placement is explicit
    int congested_count = 5;
    double congested_radius_m = 30.0;
    channel::ArrayGeometry bs_array{8, 8, 0.0};
    channel::ArrayGeometry ue_array{2, 2, 0.0};
    int streams_per_ue = 2;
    int streams_per_bs = 4;
    // One entry per BS, or a single entry broadcast to every BS.
    std::vector<double> tx_power_dbm = {30.0};
    channel::LargeScaleParams propagation;
    rate::NoiseModel noise;
    int num_clusters = 5;
    int rays_per_cluster = 10;
    // Spreads are kept in degrees so the config echo is lossless; they are
    // converted to radians when the sampler's cluster config is built.
    double azimuth_spread_deg = 5.0;
    double elevation_spread_deg = 2.5;
    int num_slots = 1000;
    std::uint64_t master_seed = 1;
    ga::GaConfig ga; // seed is derived per slot from master_seed

    int num_bs() const { return static_cast<int>(bs_positions.size()); }
    std::vector<int> stream_demand_vector() const;
    std::vector<int> capacity_vector() const;
    Eigen::VectorXd tx_power_w() const;
    channel::ClusterConfig cluster_config() const;
    void validate() const;
};

// One sampled placement of UEs plus frozen per-link large-scale state.
struct Deployment
{
    std::vector<Eigen::Vector2d> ue_positions;
    channel::LargeScaleCache large_scale;
};

Deployment sample_deployment(const Scenario& scenario);

// All K x J links of one slot; slot 0 is reserved as the measurement slot for
// the load-balancing baseline's rate table, measured slots run 1..T.
channel::ChannelGrid sample_slot_channels(const Scenario& scenario, const Deployment& deployment,
                                          int slot);

struct SchemeResult
{
    Scheme scheme = Scheme::kTfa;
    assoc::AssociationMatrix association;
    std::vector<double> slot_utilities;  // bits/s/Hz per slot
    Eigen::VectorXd per_user_mean_rate;  // bits/s/Hz
    double mean_sum_rate_bpshz = 0.0;
    double mean_sum_rate_bps = 0.0;
    double ci95_bpshz = 0.0; // 95% confidence half-width of the slot mean
    long long drop_count = 0; // unserved user-slots over the horizon
};

struct ExperimentResult
{
    Scenario scenario; // fully resolved configuration of this run
    std::vector<SchemeResult> schemes;
    std::uint64_t channel_checksum = 0; // digest over all simulated slots
};

ExperimentResult run_experiment(const Scenario& scenario, const std::vector<Scheme>& schemes);

// Reruns the experiment once per grid point with the same master seed, so all
// powers and schemes see identical channel realizations.
std::vector<ExperimentResult> power_sweep(const Scenario& scenario, const std::vector<Scheme>& schemes,
                                          const std::vector<double>& power_grid_dbm);

} // namespace tfasim::harness
