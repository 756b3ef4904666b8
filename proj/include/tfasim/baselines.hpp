// SPDX-License-Identifier: Apache-2.0
//
// Baseline association schemes evaluated against the per-slot optimizer:
//   - max-SINR with overload dropping,
//   - max-SINR with stream sharing at congested BSs plus dropping,
//   - load-balancing via capacity-constrained sum full-interference-rate
//     maximization.
// The max-SINR metric uses frozen large-scale gains only, so these
// associations are computed once per deployment and held fixed across slots.

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "tfasim/association.hpp"
#include "tfasim/channel.hpp"
#include "tfasim/ga.hpp"
#include "tfasim/rate.hpp"

namespace tfasim::baselines {

struct ShareDropResult
{
    assoc::ActivationVector activation;
    // Per-user stream counts after sharing; 0 for dropped users.
    std::vector<int> streams;
};

// Long-term SINR of UE `ue` toward every BS: g_j P_j / (sum_{i != j} g_i P_i + N)
// with g = 10^(-PL/10) from the frozen large-scale cache.
Eigen::VectorXd max_sinr_metric(int ue, const channel::LargeScaleCache& large_scale,
                                const Eigen::VectorXd& tx_power_w, const rate::NoiseModel& noise);

// Every user attaches to its highest-SINR BS; at each overloaded BS the
// highest-SINR users that fit the stream budget keep their full demand and the
// rest are dropped (no reassignment).  Ties resolve to the lowest index.
assoc::ActivationVector associate_max_sinr_drop(const channel::LargeScaleCache& large_scale,
                                                const Eigen::VectorXd& tx_power_w,
                                                const rate::NoiseModel& noise,
                                                const std::vector<int>& stream_demands,
                                                const std::vector<int>& capacities);

// Same attachment; an overloaded BS with A attached users serves the top
// min(A, D_j) of them with max(1, floor(D_j / min(A, D_j))) streams each
// (never more than the user's demand) and drops the remainder.
ShareDropResult associate_max_sinr_share_drop(const channel::LargeScaleCache& large_scale,
                                              const Eigen::VectorXd& tx_power_w,
                                              const rate::NoiseModel& noise,
                                              const std::vector<int>& stream_demands,
                                              const std::vector<int>& capacities);

// Load-balancing proxy: the feasible all-served assignment maximizing the sum
// of full-interference reference rates, solved exactly by enumeration when
// J^K fits under the cap and by the GA otherwise.
assoc::ActivationVector associate_load_balanced_fi(const Eigen::MatrixXd& full_interference_rates,
                                                   const std::vector<int>& stream_demands,
                                                   const std::vector<int>& capacities,
                                                   const ga::GaConfig& solver_cfg,
                                                   long long enumeration_cap = 1'000'000);

} // namespace tfasim::baselines
