// SPDX-License-Identifier: Apache-2.0
//
// Genetic-algorithm solver for the per-slot association problem: maximize the
// sum-rate utility over UE-to-BS assignments subject to per-BS stream budgets.
// A chromosome is a length-K vector of BS indices; infeasible offspring are
// repaired before fitness evaluation, so every evaluated individual encodes a
// valid network state.  An exhaustive oracle over the full J^K space is
// provided for desk-scale validation.

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "tfasim/association.hpp"
#include "tfasim/rate.hpp"

namespace tfasim::ga {

struct GaConfig
{
    // Sized for reliable convergence to the exhaustive-search optimum on
    // desk-scale instances; capacity-tight cases need the extra diversity.
    int population_size = 160;
    int max_generations = 200;
    int stall_generations = 30;
    double crossover_rate = 0.9;
    // Per-gene reassignment probability; values <= 0 select the 1/K default.
    double mutation_rate_per_gene = 0.0;
    int tournament_size = 3;
    int elite_count = 2;
    std::uint64_t seed = 0;

    void validate(int num_genes) const;
};

struct GaResult
{
    assoc::ActivationVector best_activation;
    double best_utility = 0.0;
    int generations_run = 0;
    // Best utility after initialization (index 0) and after each generation.
    std::vector<double> utility_trace;
    long long evaluations = 0;
};

struct OracleResult
{
    assoc::ActivationVector best_activation;
    double best_utility = 0.0;
    long long feasible_count = 0;
};

// Objective evaluated on a full assignment (one BS index per UE).
using FitnessFn = std::function<double(const std::vector<int>&)>;

// Greedy constraint handling: while any BS is over budget, detach from the
// lowest-indexed overloaded BS the user whose move costs the least reference
// rate (fallback_rates(k, current) - best feasible alternative), re-attaching
// it to its best BS with spare capacity.  Ties resolve to the lowest UE index,
// then the lowest target BS index.  Terminates in at most K moves.
std::vector<int> repair(std::vector<int> chromosome, const std::vector<int>& stream_demands,
                        const std::vector<int>& capacities, const Eigen::MatrixXd& fallback_rates);

// Generic capacity-constrained GA over assignments, used both for the
// per-slot utility objective and for additive reference-rate objectives.
GaResult optimize(int num_ues, int num_bs, const std::vector<int>& stream_demands,
                  const std::vector<int>& capacities, const Eigen::MatrixXd& fallback_rates,
                  const FitnessFn& fitness, const GaConfig& cfg, int slot_index = 0);

// Solve one slot: fitness is the sum-rate utility with per-candidate power
// shares, evaluated through the slot context's cached decompositions.
GaResult solve_slot(const rate::SlotContext& context, const std::vector<int>& capacities,
                    const GaConfig& cfg);

// Exhaustive search over all J^K assignments (lexicographic order; ties keep
// the lexicographically smallest).  Throws when J^K exceeds enumeration_cap.
OracleResult brute_force_oracle(const rate::SlotContext& context, const std::vector<int>& capacities,
                                long long enumeration_cap = 1'000'000);

} // namespace tfasim::ga
