// SPDX-License-Identifier: Apache-2.0

#include "tfasim/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace tfasim::baselines {

namespace {

// Attachment step shared by both max-SINR schemes: argmax_j SINR, lowest
// index on ties, plus per-BS member lists sorted by descending SINR.
struct Attachment
{
    std::vector<int> choice;
    std::vector<std::vector<int>> members; // per BS, sorted by SINR desc, UE asc
    Eigen::MatrixXd sinr;                  // K x J
};

Attachment attach_max_sinr(const channel::LargeScaleCache& large_scale,
                           const Eigen::VectorXd& tx_power_w, const rate::NoiseModel& noise)
{
    const int num_ues = large_scale.num_ues;
    const int num_bs = large_scale.num_bs;
    Attachment out;
    out.choice.resize(num_ues);
    out.members.resize(num_bs);
    out.sinr.resize(num_ues, num_bs);
    for (int k = 0; k < num_ues; ++k)
    {
        Eigen::VectorXd sinr = max_sinr_metric(k, large_scale, tx_power_w, noise);
        out.sinr.row(k) = sinr.transpose();
        int best = 0;
        for (int j = 1; j < num_bs; ++j)
            if (sinr(j) > sinr(best))
                best = j;
        out.choice[k] = best;
        out.members[best].push_back(k);
    }
    for (int j = 0; j < num_bs; ++j)
        std::stable_sort(out.members[j].begin(), out.members[j].end(),
                         [&](int a, int b) { return out.sinr(a, j) > out.sinr(b, j); });
    return out;
}

} // namespace

Eigen::VectorXd max_sinr_metric(int ue, const channel::LargeScaleCache& large_scale,
                                const Eigen::VectorXd& tx_power_w, const rate::NoiseModel& noise)
{
    const int num_bs = large_scale.num_bs;
    if (ue < 0 || ue >= large_scale.num_ues)
        throw std::invalid_argument("UE index out of range");
    if (tx_power_w.size() != num_bs)
        throw std::invalid_argument("one transmit power per BS required");

    Eigen::VectorXd rx(num_bs);
    for (int j = 0; j < num_bs; ++j)
        rx(j) = std::pow(10.0, -large_scale.at(ue, j).pathloss_db / 10.0) * tx_power_w(j);

    const double noise_w = noise.power_w();
    const double total = rx.sum();
    Eigen::VectorXd sinr(num_bs);
    for (int j = 0; j < num_bs; ++j)
        sinr(j) = rx(j) / (total - rx(j) + noise_w);
    return sinr;
}

assoc::ActivationVector associate_max_sinr_drop(const channel::LargeScaleCache& large_scale,
                                                const Eigen::VectorXd& tx_power_w,
                                                const rate::NoiseModel& noise,
                                                const std::vector<int>& stream_demands,
                                                const std::vector<int>& capacities)
{
    Attachment att = attach_max_sinr(large_scale, tx_power_w, noise);
    assoc::ActivationVector result;
    result.assignment.assign(large_scale.num_ues, assoc::ActivationVector::kUnserved);
    for (int j = 0; j < large_scale.num_bs; ++j)
    {
        int load = 0;
        for (int k : att.members[j])
        {
            if (load + stream_demands[k] > capacities[j])
                continue; // dropped, not reassigned
            result.assignment[k] = j;
            load += stream_demands[k];
        }
    }
    return result;
}

ShareDropResult associate_max_sinr_share_drop(const channel::LargeScaleCache& large_scale,
                                              const Eigen::VectorXd& tx_power_w,
                                              const rate::NoiseModel& noise,
                                              const std::vector<int>& stream_demands,
                                              const std::vector<int>& capacities)
{
    Attachment att = attach_max_sinr(large_scale, tx_power_w, noise);
    ShareDropResult result;
    result.activation.assignment.assign(large_scale.num_ues, assoc::ActivationVector::kUnserved);
    result.streams.assign(large_scale.num_ues, 0);

    for (int j = 0; j < large_scale.num_bs; ++j)
    {
        const std::vector<int>& attached = att.members[j];
        int load = 0;
        for (int k : attached)
            load += stream_demands[k];

        if (load <= capacities[j])
        {
            for (int k : attached)
            {
                result.activation.assignment[k] = j;
                result.streams[k] = stream_demands[k];
            }
            continue;
        }
        // Overloaded: share the stream budget among the top users by SINR.
        const int served = std::min<int>(static_cast<int>(attached.size()), capacities[j]);
        const int shared = std::max(1, capacities[j] / std::max(served, 1));
        for (int rank = 0; rank < served; ++rank)
        {
            int k = attached[rank];
            result.activation.assignment[k] = j;
            result.streams[k] = std::min(shared, stream_demands[k]);
        }
    }
    return result;
}

assoc::ActivationVector associate_load_balanced_fi(const Eigen::MatrixXd& full_interference_rates,
                                                   const std::vector<int>& stream_demands,
                                                   const std::vector<int>& capacities,
                                                   const ga::GaConfig& solver_cfg,
                                                   long long enumeration_cap)
{
    const int num_ues = static_cast<int>(full_interference_rates.rows());
    const int num_bs = static_cast<int>(full_interference_rates.cols());
    if (static_cast<int>(stream_demands.size()) != num_ues ||
        static_cast<int>(capacities.size()) != num_bs)
        throw std::invalid_argument("dimension mismatch between rate table, demands, and capacities");

    long long demand = std::accumulate(stream_demands.begin(), stream_demands.end(), 0LL);
    long long supply = std::accumulate(capacities.begin(), capacities.end(), 0LL);
    if (demand > supply)
        throw std::invalid_argument("cannot serve every user: total demand of " +
                                    std::to_string(demand) + " streams exceeds total capacity of " +
                                    std::to_string(supply));

    assoc::ActivationVector result;
    if (std::pow(static_cast<double>(num_bs), num_ues) <= static_cast<double>(enumeration_cap))
    {
        // Exhaustive odometer search, lexicographically smallest on ties.
        std::vector<int> assignment(num_ues, 0);
        std::vector<int> load(num_bs, 0);
        for (int k = 0; k < num_ues; ++k)
            load[0] += stream_demands[k];

        std::vector<int> best;
        double best_value = -std::numeric_limits<double>::infinity();
        bool done = false;
        while (!done)
        {
            bool feasible = true;
            for (int j = 0; j < num_bs && feasible; ++j)
                feasible = load[j] <= capacities[j];
            if (feasible)
            {
                double value = 0.0;
                for (int k = 0; k < num_ues; ++k)
                    value += full_interference_rates(k, assignment[k]);
                if (value > best_value)
                {
                    best_value = value;
                    best = assignment;
                }
            }
            int pos = num_ues - 1;
            while (pos >= 0)
            {
                load[assignment[pos]] -= stream_demands[pos];
                if (assignment[pos] + 1 < num_bs)
                {
                    assignment[pos] += 1;
                    load[assignment[pos]] += stream_demands[pos];
                    break;
                }
                assignment[pos] = 0;
                load[0] += stream_demands[pos];
                --pos;
            }
            done = pos < 0;
        }
        if (best.empty())
            throw std::logic_error("no feasible all-served assignment exists");
        result.assignment = std::move(best);
        return result;
    }

    ga::GaResult solved = ga::optimize(
        num_ues, num_bs, stream_demands, capacities, full_interference_rates,
        [&](const std::vector<int>& assignment) {
            double value = 0.0;
            for (int k = 0; k < num_ues; ++k)
                value += full_interference_rates(k, assignment[k]);
            return value;
        },
        solver_cfg);
    result = solved.best_activation;
    result.slot_index = 0;
    return result;
}

} // namespace tfasim::baselines
