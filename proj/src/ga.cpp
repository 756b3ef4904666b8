// SPDX-License-Identifier: Apache-2.0

#include "tfasim/ga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "tfasim/rng.hpp"

namespace tfasim::ga {

namespace {

std::vector<int> bs_loads(const std::vector<int>& chromosome, const std::vector<int>& stream_demands,
                          int num_bs)
{
    std::vector<int> load(num_bs, 0);
    for (std::size_t k = 0; k < chromosome.size(); ++k)
        load[chromosome[k]] += stream_demands[k];
    return load;
}

void check_total_capacity(const std::vector<int>& stream_demands, const std::vector<int>& capacities)
{
    long long demand = std::accumulate(stream_demands.begin(), stream_demands.end(), 0LL);
    long long supply = std::accumulate(capacities.begin(), capacities.end(), 0LL);
    if (demand > supply)
        throw std::invalid_argument("total stream demand " + std::to_string(demand) +
                                    " exceeds total capacity " + std::to_string(supply));
}

// Capacity-respecting random assignment: users in shuffled order each pick a
// uniformly random BS among those that still fit their demand.
std::vector<int> random_feasible_assignment(int num_ues, int num_bs,
                                            const std::vector<int>& stream_demands,
                                            const std::vector<int>& capacities, Rng& rng)
{
    std::vector<int> order(num_ues);
    std::iota(order.begin(), order.end(), 0);
    for (int i = num_ues - 1; i > 0; --i)
        std::swap(order[i], order[rng.uniform_int(i + 1)]);

    std::vector<int> assignment(num_ues, 0);
    std::vector<int> load(num_bs, 0);
    std::vector<int> open;
    open.reserve(num_bs);
    for (int k : order)
    {
        open.clear();
        for (int j = 0; j < num_bs; ++j)
            if (load[j] + stream_demands[k] <= capacities[j])
                open.push_back(j);
        int j = open.empty() ? rng.uniform_int(num_bs) : open[rng.uniform_int(open.size())];
        assignment[k] = j;
        load[j] += stream_demands[k];
    }
    return assignment;
}

} // namespace

void GaConfig::validate(int num_genes) const
{
    if (population_size <= 0)
        throw std::invalid_argument("population_size must be positive");
    if (max_generations <= 0)
        throw std::invalid_argument("max_generations must be positive");
    if (stall_generations <= 0)
        throw std::invalid_argument("stall_generations must be positive");
    if (crossover_rate < 0.0 || crossover_rate > 1.0)
        throw std::invalid_argument("crossover_rate must lie in [0, 1]");
    if (mutation_rate_per_gene > 1.0)
        throw std::invalid_argument("mutation_rate_per_gene must lie in [0, 1]");
    if (tournament_size <= 0)
        throw std::invalid_argument("tournament_size must be positive");
    if (elite_count < 0 || elite_count >= population_size)
        throw std::invalid_argument("elite_count must lie in [0, population_size)");
    if (num_genes <= 0)
        throw std::invalid_argument("at least one user is required");
}

std::vector<int> repair(std::vector<int> chromosome, const std::vector<int>& stream_demands,
                        const std::vector<int>& capacities, const Eigen::MatrixXd& fallback_rates)
{
    const int num_ues = static_cast<int>(chromosome.size());
    const int num_bs = static_cast<int>(capacities.size());
    std::vector<int> load = bs_loads(chromosome, stream_demands, num_bs);

    for (int moves = 0; moves <= num_ues; ++moves)
    {
        int overloaded = -1;
        int mover = -1;
        int target = -1;
        double best_loss = std::numeric_limits<double>::infinity();
        for (int j = 0; j < num_bs && overloaded < 0; ++j)
        {
            if (load[j] <= capacities[j])
                continue;
            // Lowest-indexed overloaded BS with at least one movable user.
            for (int k = 0; k < num_ues; ++k)
            {
                if (chromosome[k] != j)
                    continue;
                int alt = -1;
                double alt_rate = -std::numeric_limits<double>::infinity();
                for (int i = 0; i < num_bs; ++i)
                {
                    if (i == j || load[i] + stream_demands[k] > capacities[i])
                        continue;
                    if (fallback_rates(k, i) > alt_rate)
                    {
                        alt_rate = fallback_rates(k, i);
                        alt = i;
                    }
                }
                if (alt < 0)
                    continue;
                double loss = fallback_rates(k, j) - alt_rate;
                if (loss < best_loss)
                {
                    best_loss = loss;
                    mover = k;
                    target = alt;
                    overloaded = j;
                }
            }
            if (mover >= 0)
                overloaded = j;
        }
        if (overloaded < 0)
        {
            bool any_overload = false;
            for (int j = 0; j < num_bs; ++j)
                any_overload = any_overload || load[j] > capacities[j];
            if (!any_overload)
                return chromosome;
            throw std::logic_error("repair failed: no feasible move for an overloaded BS");
        }
        load[overloaded] -= stream_demands[mover];
        load[target] += stream_demands[mover];
        chromosome[mover] = target;
    }
    throw std::logic_error("repair failed to terminate within the move budget");
}

GaResult optimize(int num_ues, int num_bs, const std::vector<int>& stream_demands,
                  const std::vector<int>& capacities, const Eigen::MatrixXd& fallback_rates,
                  const FitnessFn& fitness, const GaConfig& cfg, int slot_index)
{
    cfg.validate(num_ues);
    check_total_capacity(stream_demands, capacities);

    const int pop_size = cfg.population_size;
    const double mutation_rate =
        cfg.mutation_rate_per_gene > 0.0 ? cfg.mutation_rate_per_gene : 1.0 / num_ues;

    Rng rng(cfg.seed);
    GaResult result;

    std::vector<std::vector<int>> population(pop_size);
    std::vector<double> scores(pop_size);
    for (int p = 0; p < pop_size; ++p)
    {
        population[p] = repair(random_feasible_assignment(num_ues, num_bs, stream_demands, capacities, rng),
                               stream_demands, capacities, fallback_rates);
        scores[p] = fitness(population[p]);
        ++result.evaluations;
    }

    auto best_of = [&](const std::vector<double>& s) {
        int best = 0;
        for (int p = 1; p < pop_size; ++p)
            if (s[p] > s[best])
                best = p;
        return best;
    };

    int incumbent = best_of(scores);
    result.best_activation.assignment = population[incumbent];
    result.best_activation.slot_index = slot_index;
    result.best_utility = scores[incumbent];
    result.utility_trace.push_back(result.best_utility);

    auto tournament = [&]() -> int {
        int winner = rng.uniform_int(pop_size);
        for (int t = 1; t < cfg.tournament_size; ++t)
        {
            int challenger = rng.uniform_int(pop_size);
            if (scores[challenger] > scores[winner])
                winner = challenger;
        }
        return winner;
    };

    std::vector<std::vector<int>> next(pop_size);
    std::vector<double> next_scores(pop_size);
    std::vector<int> rank(pop_size);
    int stall = 0;

    for (int gen = 0; gen < cfg.max_generations && stall < cfg.stall_generations; ++gen)
    {
        // Elites: best elite_count individuals carried over unchanged.
        std::iota(rank.begin(), rank.end(), 0);
        std::stable_sort(rank.begin(), rank.end(), [&](int a, int b) { return scores[a] > scores[b]; });
        for (int e = 0; e < cfg.elite_count; ++e)
        {
            next[e] = population[rank[e]];
            next_scores[e] = scores[rank[e]];
        }

        for (int p = cfg.elite_count; p < pop_size; ++p)
        {
            const std::vector<int>& a = population[tournament()];
            const std::vector<int>& b = population[tournament()];
            std::vector<int> child(num_ues);
            if (rng.uniform() < cfg.crossover_rate)
            {
                for (int g = 0; g < num_ues; ++g)
                    child[g] = rng.uniform() < 0.5 ? a[g] : b[g];
            }
            else
            {
                child = a;
            }
            for (int g = 0; g < num_ues; ++g)
                if (rng.uniform() < mutation_rate)
                    child[g] = rng.uniform_int(num_bs);

            child = repair(std::move(child), stream_demands, capacities, fallback_rates);
            next_scores[p] = fitness(child);
            next[p] = std::move(child);
            ++result.evaluations;
        }

        population.swap(next);
        scores.swap(next_scores);
        ++result.generations_run;

        int best = best_of(scores);
        if (scores[best] > result.best_utility + 1e-12)
        {
            result.best_utility = scores[best];
            result.best_activation.assignment = population[best];
            stall = 0;
        }
        else
        {
            ++stall;
        }
        result.utility_trace.push_back(result.best_utility);
    }
    return result;
}

GaResult solve_slot(const rate::SlotContext& context, const std::vector<int>& capacities,
                    const GaConfig& cfg)
{
    if (static_cast<int>(capacities.size()) != context.num_bs())
        throw std::invalid_argument("one capacity per BS required");
    int slot = context.channels().at(0, 0).slot_index;
    return optimize(
        context.num_ues(), context.num_bs(), context.stream_demands(), capacities, context.fi_rates(),
        [&context](const std::vector<int>& assignment) { return context.utility(assignment); }, cfg,
        slot);
}

OracleResult brute_force_oracle(const rate::SlotContext& context, const std::vector<int>& capacities,
                                long long enumeration_cap)
{
    const int num_ues = context.num_ues();
    const int num_bs = context.num_bs();
    if (static_cast<int>(capacities.size()) != num_bs)
        throw std::invalid_argument("one capacity per BS required");
    check_total_capacity(context.stream_demands(), capacities);

    double space = std::pow(static_cast<double>(num_bs), num_ues);
    if (space > static_cast<double>(enumeration_cap))
        throw std::invalid_argument("search space of " + std::to_string(space) +
                                    " assignments exceeds the enumeration cap of " +
                                    std::to_string(enumeration_cap) + "; use the GA solver instead");

    OracleResult result;
    result.best_utility = -std::numeric_limits<double>::infinity();
    result.best_activation.slot_index = context.channels().at(0, 0).slot_index;

    const std::vector<int>& demands = context.stream_demands();
    std::vector<int> assignment(num_ues, 0);
    std::vector<int> load = bs_loads(assignment, demands, num_bs);

    // Odometer enumeration in lexicographic order (gene 0 most significant);
    // strict improvement keeps the lexicographically smallest maximizer.
    bool done = false;
    while (!done)
    {
        bool feasible = true;
        for (int j = 0; j < num_bs && feasible; ++j)
            feasible = load[j] <= capacities[j];
        if (feasible)
        {
            ++result.feasible_count;
            double utility = context.utility(assignment);
            if (utility > result.best_utility)
            {
                result.best_utility = utility;
                result.best_activation.assignment = assignment;
            }
        }

        int pos = num_ues - 1;
        while (pos >= 0)
        {
            load[assignment[pos]] -= demands[pos];
            if (assignment[pos] + 1 < num_bs)
            {
                assignment[pos] += 1;
                load[assignment[pos]] += demands[pos];
                break;
            }
            assignment[pos] = 0;
            load[0] += demands[pos];
            --pos;
        }
        done = pos < 0;
    }

    if (!std::isfinite(result.best_utility))
        throw std::logic_error("no feasible assignment exists under the given capacities");
    return result;
}

} // namespace tfasim::ga
