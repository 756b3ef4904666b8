// SPDX-License-Identifier: Apache-2.0
//
// Baseline association schemes: long-term SINR attachment with dropping or
// stream sharing, and the capacity-constrained reference-rate maximizer.

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tfasim/baselines.hpp"
#include "tfasim/rng.hpp"

using namespace tfasim;
using assoc::ActivationVector;

namespace {

constexpr int kUnserved = ActivationVector::kUnserved;

// Large-scale cache with the given path-loss table (dB), all links LoS.
channel::LargeScaleCache make_cache(const Eigen::MatrixXd& pathloss_db)
{
    channel::LargeScaleCache cache;
    cache.num_ues = static_cast<int>(pathloss_db.rows());
    cache.num_bs = static_cast<int>(pathloss_db.cols());
    cache.links.resize(static_cast<std::size_t>(cache.num_ues) * cache.num_bs);
    for (int k = 0; k < cache.num_ues; ++k)
        for (int j = 0; j < cache.num_bs; ++j)
        {
            channel::LinkLargeScale& link = cache.at(k, j);
            link.state = channel::LinkState::kLos;
            link.pathloss_db = pathloss_db(k, j);
            link.distance_m = 50.0;
        }
    return cache;
}

} // namespace

TEST_CASE("long-term SINR metric")
{
    rate::NoiseModel noise;
    const double noise_w = noise.power_w();

    SUBCASE("single BS reduces to an SNR")
    {
        Eigen::MatrixXd pl(1, 1);
        pl << 90.0;
        channel::LargeScaleCache cache = make_cache(pl);
        Eigen::VectorXd power = Eigen::VectorXd::Constant(1, 2.0);
        Eigen::VectorXd sinr = baselines::max_sinr_metric(0, cache, power, noise);
        CHECK(sinr(0) == doctest::Approx(1e-9 * 2.0 / noise_w).epsilon(1e-12));
    }

    SUBCASE("symmetric links give identical SINRs")
    {
        Eigen::MatrixXd pl(1, 2);
        pl << 95.0, 95.0;
        channel::LargeScaleCache cache = make_cache(pl);
        Eigen::VectorXd power = Eigen::VectorXd::Constant(2, 1.0);
        Eigen::VectorXd sinr = baselines::max_sinr_metric(0, cache, power, noise);
        CHECK(sinr(0) == sinr(1));
    }

    SUBCASE("random instances match an independent recomputation")
    {
        Rng rng(131);
        for (int trial = 0; trial < 200; ++trial)
        {
            const int num_bs = 2 + rng.uniform_int(4);
            Eigen::MatrixXd pl(1, num_bs);
            Eigen::VectorXd power(num_bs);
            for (int j = 0; j < num_bs; ++j)
            {
                pl(0, j) = rng.uniform(70.0, 130.0);
                power(j) = rng.uniform(0.5, 10.0);
            }
            channel::LargeScaleCache cache = make_cache(pl);
            Eigen::VectorXd sinr = baselines::max_sinr_metric(0, cache, power, noise);
            for (int j = 0; j < num_bs; ++j)
            {
                double signal = std::pow(10.0, -pl(0, j) / 10.0) * power(j);
                double interference = 0.0;
                for (int i = 0; i < num_bs; ++i)
                    if (i != j)
                        interference += std::pow(10.0, -pl(0, i) / 10.0) * power(i);
                CHECK(sinr(j) ==
                      doctest::Approx(signal / (interference + noise_w)).epsilon(1e-12));
            }
        }
    }

    SUBCASE("index bounds are enforced")
    {
        Eigen::MatrixXd pl = Eigen::MatrixXd::Constant(1, 2, 90.0);
        channel::LargeScaleCache cache = make_cache(pl);
        Eigen::VectorXd power = Eigen::VectorXd::Constant(2, 1.0);
        CHECK_THROWS_AS(baselines::max_sinr_metric(1, cache, power, noise), std::invalid_argument);
        CHECK_THROWS_AS(baselines::max_sinr_metric(0, cache, Eigen::VectorXd::Constant(1, 1.0), noise),
                        std::invalid_argument);
    }
}

TEST_CASE("max-SINR with overload dropping")
{
    rate::NoiseModel noise;

    SUBCASE("no overload keeps the plain attachment")
    {
        Eigen::MatrixXd pl(2, 2);
        pl << 80.0, 100.0, 100.0, 80.0;
        channel::LargeScaleCache cache = make_cache(pl);
        Eigen::VectorXd power = Eigen::VectorXd::Constant(2, 1.0);
        ActivationVector act = baselines::associate_max_sinr_drop(cache, power, noise, {2, 2}, {4, 4});
        CHECK(act.assignment == std::vector<int>{0, 1});
    }

    SUBCASE("overloaded BS keeps its strongest users and drops the rest")
    {
        // Five users prefer the first BS with strictly decreasing SINR;
        // three others attach elsewhere.
        Eigen::MatrixXd pl = Eigen::MatrixXd::Constant(8, 4, 110.0);
        for (int k = 0; k < 5; ++k)
            pl(k, 0) = 80.0 + k;
        pl(5, 1) = 80.0;
        pl(6, 2) = 80.0;
        pl(7, 3) = 80.0;
        channel::LargeScaleCache cache = make_cache(pl);
        Eigen::VectorXd power = Eigen::VectorXd::Constant(4, 1.0);
        const std::vector<int> demands(8, 2);
        const std::vector<int> capacities(4, 4);

        ActivationVector act =
            baselines::associate_max_sinr_drop(cache, power, noise, demands, capacities);
        CHECK(act.assignment ==
              std::vector<int>{0, 0, kUnserved, kUnserved, kUnserved, 1, 2, 3});
        CHECK(assoc::feasible(act, demands, capacities).ok);
        CHECK(act.num_served() == 5);
    }

    SUBCASE("exact ties keep the lowest user indices")
    {
        Eigen::MatrixXd pl = Eigen::MatrixXd::Constant(3, 1, 90.0);
        channel::LargeScaleCache cache = make_cache(pl);
        Eigen::VectorXd power = Eigen::VectorXd::Constant(1, 1.0);
        ActivationVector act =
            baselines::associate_max_sinr_drop(cache, power, noise, {2, 2, 2}, {4});
        CHECK(act.assignment == std::vector<int>{0, 0, kUnserved});
    }
}

TEST_CASE("max-SINR with stream sharing")
{
    rate::NoiseModel noise;

    SUBCASE("five attached users share four streams and the fifth drops")
    {
        Eigen::MatrixXd pl = Eigen::MatrixXd::Constant(8, 4, 110.0);
        for (int k = 0; k < 5; ++k)
            pl(k, 0) = 80.0 + k;
        pl(5, 1) = 80.0;
        pl(6, 2) = 80.0;
        pl(7, 3) = 80.0;
        channel::LargeScaleCache cache = make_cache(pl);
        Eigen::VectorXd power = Eigen::VectorXd::Constant(4, 1.0);
        const std::vector<int> demands(8, 2);
        const std::vector<int> capacities(4, 4);

        baselines::ShareDropResult result =
            baselines::associate_max_sinr_share_drop(cache, power, noise, demands, capacities);
        CHECK(result.activation.assignment ==
              std::vector<int>{0, 0, 0, 0, kUnserved, 1, 2, 3});
        CHECK(result.streams == std::vector<int>{1, 1, 1, 1, 0, 2, 2, 2});
        // Feasible under the overridden stream counts.
        CHECK(assoc::feasible(result.activation, result.streams, capacities).ok);
    }

    SUBCASE("an uncongested BS serves full demands")
    {
        Eigen::MatrixXd pl(2, 2);
        pl << 80.0, 100.0, 81.0, 100.0;
        channel::LargeScaleCache cache = make_cache(pl);
        Eigen::VectorXd power = Eigen::VectorXd::Constant(2, 1.0);
        baselines::ShareDropResult result =
            baselines::associate_max_sinr_share_drop(cache, power, noise, {2, 2}, {4, 4});
        CHECK(result.activation.assignment == std::vector<int>{0, 0});
        CHECK(result.streams == std::vector<int>{2, 2});
    }

    SUBCASE("three users on a four-stream BS get one stream each")
    {
        Eigen::MatrixXd pl(3, 2);
        pl << 80.0, 100.0, 81.0, 100.0, 82.0, 100.0;
        channel::LargeScaleCache cache = make_cache(pl);
        Eigen::VectorXd power = Eigen::VectorXd::Constant(2, 1.0);
        baselines::ShareDropResult result =
            baselines::associate_max_sinr_share_drop(cache, power, noise, {2, 2, 2}, {4, 4});
        CHECK(result.activation.assignment == std::vector<int>{0, 0, 0});
        CHECK(result.streams == std::vector<int>{1, 1, 1});
        CHECK(result.activation.num_served() == 3);
    }
}

TEST_CASE("load-balancing reference-rate maximizer")
{
    ga::GaConfig cfg;
    cfg.seed = 211;

    SUBCASE("unbounded capacity decouples into per-user argmax")
    {
        Rng rng(137);
        Eigen::MatrixXd table(5, 3);
        for (int k = 0; k < 5; ++k)
            for (int j = 0; j < 3; ++j)
                table(k, j) = rng.uniform(0.0, 20.0);
        ActivationVector act = baselines::associate_load_balanced_fi(
            table, std::vector<int>(5, 2), {100, 100, 100}, cfg);
        for (int k = 0; k < 5; ++k)
        {
            int best = 0;
            for (int j = 1; j < 3; ++j)
                if (table(k, j) > table(k, best))
                    best = j;
            CHECK(act.assignment[k] == best);
        }
    }

    SUBCASE("tight capacity forces the documented swap")
    {
        // Both users prefer the first BS, but it fits only one; the optimal
        // plan parks the weaker-preference user on the second BS.
        Eigen::MatrixXd table(3, 2);
        table << 10.0, 9.5, 10.0, 4.0, 3.0, 2.0;
        const std::vector<int> demands = {1, 1, 1};
        const std::vector<int> capacities = {2, 1};
        ActivationVector act =
            baselines::associate_load_balanced_fi(table, demands, capacities, cfg);

        // Independent exhaustive check over all 8 assignments.
        std::vector<int> best;
        double best_value = -1.0;
        for (int a0 = 0; a0 < 2; ++a0)
            for (int a1 = 0; a1 < 2; ++a1)
                for (int a2 = 0; a2 < 2; ++a2)
                {
                    std::vector<int> cand = {a0, a1, a2};
                    std::vector<int> load(2, 0);
                    for (int k = 0; k < 3; ++k)
                        load[cand[k]] += demands[k];
                    if (load[0] > capacities[0] || load[1] > capacities[1])
                        continue;
                    double value = table(0, a0) + table(1, a1) + table(2, a2);
                    if (value > best_value)
                    {
                        best_value = value;
                        best = cand;
                    }
                }
        CHECK(act.assignment == best);
        CHECK(act.assignment == std::vector<int>{1, 0, 0});
        CHECK(assoc::feasible(act, demands, capacities).ok);
    }

    SUBCASE("metaheuristic path reaches the enumerated optimum")
    {
        Rng rng(139);
        Eigen::MatrixXd table(4, 2);
        for (int k = 0; k < 4; ++k)
            for (int j = 0; j < 2; ++j)
                table(k, j) = rng.uniform(0.0, 20.0);
        const std::vector<int> demands(4, 1);
        const std::vector<int> capacities(2, 2);

        ActivationVector exact =
            baselines::associate_load_balanced_fi(table, demands, capacities, cfg);
        // Capping enumeration at one assignment forces the solver path.
        ActivationVector searched =
            baselines::associate_load_balanced_fi(table, demands, capacities, cfg, 1);

        auto objective = [&table](const ActivationVector& act) {
            double v = 0.0;
            for (int k = 0; k < 4; ++k)
                v += table(k, act.assignment[k]);
            return v;
        };
        CHECK(objective(searched) == doctest::Approx(objective(exact)).epsilon(1e-12));
        CHECK(assoc::feasible(searched, demands, capacities).ok);
        CHECK(searched.num_served() == 4);
    }

    SUBCASE("insufficient total capacity is rejected with the shortfall")
    {
        Eigen::MatrixXd table = Eigen::MatrixXd::Ones(3, 2);
        try
        {
            baselines::associate_load_balanced_fi(table, {2, 2, 2}, {1, 2}, cfg);
            FAIL("expected an exception");
        }
        catch (const std::invalid_argument& e)
        {
            std::string message = e.what();
            CHECK(message.find("6") != std::string::npos);
            CHECK(message.find("3") != std::string::npos);
        }
    }

    SUBCASE("dimension mismatches are rejected")
    {
        Eigen::MatrixXd table = Eigen::MatrixXd::Ones(3, 2);
        CHECK_THROWS_AS(baselines::associate_load_balanced_fi(table, {1, 1}, {4, 4}, cfg),
                        std::invalid_argument);
    }
}
