// SPDX-License-Identifier: Apache-2.0
//
// Rate evaluation: interference covariance assembly, log-det rates against
// closed forms and independent accumulations, and the cached slot context's
// equivalence with the direct evaluation path.

#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "tfasim/rate.hpp"
#include "tfasim/rng.hpp"

using namespace tfasim;
using assoc::ActivationVector;
using channel::ChannelGrid;

namespace {

constexpr int kUnserved = ActivationVector::kUnserved;

Eigen::MatrixXcd random_matrix(int rows, int cols, double amplitude, Rng& rng)
{
    Eigen::MatrixXcd h(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            h(r, c) = amplitude * std::complex<double>(rng.normal(), rng.normal()) / std::sqrt(2.0);
    return h;
}

// K x J grid of random channels with large-scale amplitudes near a realistic
// operating point (path losses around 90 dB).
ChannelGrid random_grid(int num_ues, int num_bs, int ue_antennas, int bs_antennas, Rng& rng,
                        int slot = 1)
{
    ChannelGrid grid;
    grid.num_ues = num_ues;
    grid.num_bs = num_bs;
    grid.links.resize(static_cast<std::size_t>(num_ues) * num_bs);
    for (int k = 0; k < num_ues; ++k)
        for (int j = 0; j < num_bs; ++j)
        {
            channel::ChannelRealization& link = grid.at(k, j);
            double pathloss_db = rng.uniform(80.0, 100.0);
            link.matrix = random_matrix(ue_antennas, bs_antennas,
                                        std::pow(10.0, -pathloss_db / 20.0), rng);
            link.pathloss_db = pathloss_db;
            link.ue_index = k;
            link.bs_index = j;
            link.slot_index = slot;
        }
    return grid;
}

ActivationVector make_activation(std::vector<int> assignment)
{
    ActivationVector v;
    v.assignment = std::move(assignment);
    v.slot_index = 1;
    return v;
}

// Equal power split over each BS's served users, streams per `demands`
// (0 entries treated as unserved).
rate::BeamformerSet build_beamformers(const ActivationVector& activation, const ChannelGrid& grid,
                                      const Eigen::VectorXd& power_w, const std::vector<int>& streams)
{
    std::vector<int> served(grid.num_bs, 0);
    for (int k = 0; k < grid.num_ues; ++k)
        if (activation.served(k))
            served[activation.assignment[k]] += 1;
    rate::BeamformerSet set(grid.num_ues);
    for (int k = 0; k < grid.num_ues; ++k)
    {
        if (!activation.served(k))
            continue;
        int j = activation.assignment[k];
        set[k] = bf::make_beamformers(grid.at(k, j).matrix, streams[k], power_w(j) / served[j]);
    }
    return set;
}

double closed_form_rate(const Eigen::MatrixXcd& channel, int streams, double power_w, double noise_w)
{
    bf::SvdPartition part = bf::svd_partition(channel, streams);
    double rate = 0.0;
    for (int i = 0; i < streams; ++i)
    {
        double s = part.singulars(i);
        rate += std::log2(1.0 + (power_w / streams) * s * s / noise_w);
    }
    return rate;
}

} // namespace

TEST_CASE("noise model converts PSD and bandwidth to watts")
{
    rate::NoiseModel noise;
    // -174 dBm/Hz over 1 GHz, evaluated independently and frozen.
    CHECK(noise.power_w() == doctest::Approx(3.9810717055349695e-12).epsilon(1e-12));

    rate::NoiseModel narrow;
    narrow.bandwidth_hz = 1.0;
    CHECK(narrow.power_w() == doctest::Approx(std::pow(10.0, -174.0 / 10.0) * 1e-3).epsilon(1e-12));

    rate::NoiseModel bad;
    bad.bandwidth_hz = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("interference covariance structure")
{
    rate::NoiseModel noise;
    const double noise_w = noise.power_w();
    Rng rng(89);

    SUBCASE("single served user sees pure noise")
    {
        ChannelGrid grid = random_grid(1, 1, 2, 8, rng);
        ActivationVector act = make_activation({0});
        Eigen::VectorXd power = Eigen::VectorXd::Constant(1, 1.0);
        rate::BeamformerSet bfs = build_beamformers(act, grid, power, {2});

        rate::CovarianceParts parts =
            rate::interference_covariance_parts(0, 0, act, grid, bfs, noise);
        CHECK(parts.intra_cell.norm() == 0.0);
        CHECK(parts.inter_cell.norm() == 0.0);
        CHECK((parts.noise - noise_w * Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-20);
    }

    SUBCASE("two users on one BS produce intra-cell interference only")
    {
        ChannelGrid grid = random_grid(2, 1, 2, 8, rng);
        ActivationVector act = make_activation({0, 0});
        Eigen::VectorXd power = Eigen::VectorXd::Constant(1, 1.0);
        rate::BeamformerSet bfs = build_beamformers(act, grid, power, {2, 2});

        rate::CovarianceParts parts =
            rate::interference_covariance_parts(0, 0, act, grid, bfs, noise);
        CHECK(parts.intra_cell.norm() > 0.0);
        CHECK(parts.inter_cell.norm() == 0.0);

        // The single intra term is the partner's precoder seen through this
        // user's serving channel and combiner.
        const Eigen::MatrixXcd& w = bfs[0]->combiner;
        const Eigen::MatrixXcd& h = grid.at(0, 0).matrix;
        Eigen::MatrixXcd cross = w.adjoint() * h * bfs[1]->precoder;
        CHECK((parts.intra_cell - cross * cross.adjoint()).norm() < 1e-12 * parts.intra_cell.norm());
    }

    SUBCASE("random instance matches a term-by-term accumulation")
    {
        for (int trial = 0; trial < 25; ++trial)
        {
            ChannelGrid grid = random_grid(3, 2, 2, 8, rng);
            ActivationVector act = make_activation({0, 1, 1});
            Eigen::VectorXd power(2);
            power << 1.0, 2.0;
            std::vector<int> streams = {2, 1, 2};
            rate::BeamformerSet bfs = build_beamformers(act, grid, power, streams);

            for (int k = 0; k < 3; ++k)
            {
                const int j = act.assignment[k];
                const Eigen::MatrixXcd& w = bfs[k]->combiner;
                const int n = bfs[k]->num_streams;

                // Independent oracle: iterate all (l, i) pairs with an
                // activation-set indicator.
                Eigen::MatrixXcd expect = noise_w * (w.adjoint() * w);
                for (int l = 0; l < 3; ++l)
                {
                    if (l == k || !act.served(l))
                        continue;
                    const int i = act.assignment[l];
                    Eigen::MatrixXcd t = w.adjoint() * grid.at(k, i).matrix * bfs[l]->precoder;
                    expect += t * t.adjoint();
                }

                Eigen::MatrixXcd got = rate::interference_covariance(k, j, act, grid, bfs, noise);
                REQUIRE(got.rows() == n);
                CHECK((got - expect).norm() <= 1e-12 * std::max(1e-30, expect.norm()));

                rate::CovarianceParts parts =
                    rate::interference_covariance_parts(k, j, act, grid, bfs, noise);
                CHECK((parts.total() - got).norm() <= 1e-12 * std::max(1e-30, got.norm()));
            }
        }
    }

    SUBCASE("missing beamformers are internal errors")
    {
        ChannelGrid grid = random_grid(2, 1, 2, 8, rng);
        ActivationVector act = make_activation({0, 0});
        rate::BeamformerSet bfs(1); // wrong size
        CHECK_THROWS_AS(rate::interference_covariance(0, 0, act, grid, bfs, noise),
                        std::logic_error);
        rate::BeamformerSet missing(2); // right size, no entries
        CHECK_THROWS_AS(rate::interference_covariance(0, 0, act, grid, missing, noise),
                        std::logic_error);
        CHECK_THROWS_AS(rate::instantaneous_rate(1, 0, act, grid, missing, noise), std::logic_error);
    }

    SUBCASE("querying a BS the user is not assigned to is an internal error")
    {
        ChannelGrid grid = random_grid(1, 2, 2, 8, rng);
        ActivationVector act = make_activation({0});
        Eigen::VectorXd power = Eigen::VectorXd::Constant(2, 1.0);
        rate::BeamformerSet bfs = build_beamformers(act, grid, power, {2});
        CHECK_THROWS_AS(rate::instantaneous_rate(0, 1, act, grid, bfs, noise), std::logic_error);
    }
}

TEST_CASE("instantaneous rate against closed forms")
{
    rate::NoiseModel noise;
    const double noise_w = noise.power_w();
    Rng rng(97);

    SUBCASE("interference-free SVD link is a sum of per-stream logs")
    {
        for (int trial = 0; trial < 1000; ++trial)
        {
            ChannelGrid grid = random_grid(1, 1, 2, 8, rng);
            ActivationVector act = make_activation({0});
            const double power = std::pow(10.0, rng.uniform(-1.0, 2.0));
            Eigen::VectorXd power_v = Eigen::VectorXd::Constant(1, power);
            rate::BeamformerSet bfs = build_beamformers(act, grid, power_v, {2});

            double got = rate::instantaneous_rate(0, 0, act, grid, bfs, noise);
            double expect = closed_form_rate(grid.at(0, 0).matrix, 2, power, noise_w);
            CHECK(got == doctest::Approx(expect).epsilon(1e-9));
            CHECK(got >= 0.0);
        }
    }

    SUBCASE("zero precoder carries zero rate")
    {
        ChannelGrid grid = random_grid(1, 1, 2, 8, rng);
        ActivationVector act = make_activation({0});
        bf::BeamformerPair pair = bf::make_beamformers(grid.at(0, 0).matrix, 2, 1.0);
        pair.precoder.setZero();
        rate::BeamformerSet bfs(1);
        bfs[0] = pair;
        CHECK(rate::instantaneous_rate(0, 0, act, grid, bfs, noise) == 0.0);
    }

    SUBCASE("an added interferer never increases the rate")
    {
        int violations = 0;
        for (int trial = 0; trial < 1000; ++trial)
        {
            ChannelGrid grid = random_grid(2, 2, 2, 8, rng);
            Eigen::VectorXd power = Eigen::VectorXd::Constant(2, 1.0);

            ActivationVector alone = make_activation({0, kUnserved});
            rate::BeamformerSet bfs_alone = build_beamformers(alone, grid, power, {2, 2});
            double clean = rate::instantaneous_rate(0, 0, alone, grid, bfs_alone, noise);

            ActivationVector both = make_activation({0, 1});
            rate::BeamformerSet bfs_both = build_beamformers(both, grid, power, {2, 2});
            double loaded = rate::instantaneous_rate(0, 0, both, grid, bfs_both, noise);

            violations += loaded > clean + 1e-9;
        }
        CHECK(violations == 0);
    }
}

TEST_CASE("slot throughputs aggregate per-user rates")
{
    rate::NoiseModel noise;
    Rng rng(101);

    SUBCASE("no served users, no utility")
    {
        ChannelGrid grid = random_grid(3, 2, 2, 8, rng);
        ActivationVector act = make_activation(std::vector<int>(3, kUnserved));
        rate::BeamformerSet bfs(3);
        rate::SlotRates rates = rate::slot_throughputs(act, grid, bfs, noise);
        CHECK(rates.per_user_rate.norm() == 0.0);
        CHECK(rates.utility == 0.0);
        for (int k = 0; k < 3; ++k)
            for (int j = 0; j < 2; ++j)
                CHECK(std::isnan(rates.pair_rate(k, j)));
    }

    SUBCASE("single user equals its own instantaneous rate")
    {
        ChannelGrid grid = random_grid(1, 1, 2, 8, rng);
        ActivationVector act = make_activation({0});
        Eigen::VectorXd power = Eigen::VectorXd::Constant(1, 1.0);
        rate::BeamformerSet bfs = build_beamformers(act, grid, power, {2});
        rate::SlotRates rates = rate::slot_throughputs(act, grid, bfs, noise);
        double direct = rate::instantaneous_rate(0, 0, act, grid, bfs, noise);
        CHECK(rates.utility == direct);
        CHECK(rates.per_user_rate(0) == direct);
        CHECK(rates.pair_rate(0, 0) == direct);
    }

    SUBCASE("network-scale slot matches a per-user double entry")
    {
        ChannelGrid grid = random_grid(8, 4, 4, 64, rng);
        ActivationVector act = make_activation({0, 0, 1, 1, 2, 2, 3, 3});
        Eigen::VectorXd power = Eigen::VectorXd::Constant(4, 1.0);
        std::vector<int> streams(8, 2);
        rate::BeamformerSet bfs = build_beamformers(act, grid, power, streams);

        rate::SlotRates rates = rate::slot_throughputs(act, grid, bfs, noise);
        double total = 0.0;
        for (int k = 0; k < 8; ++k)
        {
            double direct = rate::instantaneous_rate(k, act.assignment[k], act, grid, bfs, noise);
            CHECK(rates.per_user_rate(k) == direct);
            CHECK(direct >= 0.0);
            total += direct;
        }
        CHECK(rates.utility == doctest::Approx(total).epsilon(1e-12));
    }
}

TEST_CASE("horizon averaging is an arithmetic mean")
{
    Rng rng(103);

    SUBCASE("single slot and constant sequences")
    {
        rate::SlotRates one;
        one.per_user_rate = Eigen::Vector2d(1.5, 2.5);
        CHECK((rate::average_throughputs({one}) - one.per_user_rate).norm() == 0.0);

        std::vector<rate::SlotRates> constant(7, one);
        CHECK((rate::average_throughputs(constant) - one.per_user_rate).norm() < 1e-14);
    }

    SUBCASE("random slots match an independent accumulation")
    {
        const int horizon = 1000;
        std::vector<rate::SlotRates> slots(horizon);
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(3);
        for (int t = 0; t < horizon; ++t)
        {
            slots[t].per_user_rate = Eigen::Vector3d(rng.uniform(), rng.uniform(), rng.uniform());
            sum += slots[t].per_user_rate;
        }
        Eigen::VectorXd mean = rate::average_throughputs(slots);
        CHECK((mean - sum / horizon).norm() < 1e-12);
    }

    SUBCASE("empty horizon is rejected")
    {
        CHECK_THROWS_AS(rate::average_throughputs({}), std::invalid_argument);
    }
}

TEST_CASE("full-interference reference rate")
{
    rate::NoiseModel noise;
    const double noise_w = noise.power_w();
    Rng rng(107);
    const std::vector<int> one_ue_demand = {2};

    SUBCASE("no interferers reduces to the closed form")
    {
        ChannelGrid grid = random_grid(1, 1, 2, 8, rng);
        Eigen::VectorXd power = Eigen::VectorXd::Constant(1, 2.0);
        double got = rate::full_interference_rate(0, 0, grid, power, {2}, noise);
        CHECK(got == doctest::Approx(closed_form_rate(grid.at(0, 0).matrix, 2, 2.0, noise_w))
                         .epsilon(1e-9));
    }

    SUBCASE("vanishing interferer power converges to the clean rate")
    {
        ChannelGrid grid = random_grid(1, 2, 2, 8, rng);
        Eigen::VectorXd power(2);
        power << 1.0, 1e-12;
        double got = rate::full_interference_rate(0, 0, grid, power, one_ue_demand, noise);
        CHECK(got == doctest::Approx(closed_form_rate(grid.at(0, 0).matrix, 2, 1.0, noise_w))
                         .epsilon(1e-6));
    }

    SUBCASE("doubling an interferer's power never helps")
    {
        for (int trial = 0; trial < 100; ++trial)
        {
            ChannelGrid grid = random_grid(1, 2, 2, 8, rng);
            Eigen::VectorXd power(2);
            power << 1.0, 1.0;
            double base = rate::full_interference_rate(0, 0, grid, power, one_ue_demand, noise);
            power(1) = 2.0;
            double louder = rate::full_interference_rate(0, 0, grid, power, one_ue_demand, noise);
            CHECK(louder <= base + 1e-9);
        }
    }

    SUBCASE("rate table matches entrywise evaluation")
    {
        ChannelGrid grid = random_grid(3, 2, 2, 8, rng);
        Eigen::VectorXd power(2);
        power << 1.0, 2.0;
        std::vector<int> d3 = {2, 1, 2};
        Eigen::MatrixXd table = rate::full_interference_rate_table(grid, power, d3, noise);
        for (int k = 0; k < 3; ++k)
            for (int j = 0; j < 2; ++j)
                CHECK(table(k, j) == rate::full_interference_rate(k, j, grid, power, d3, noise));
    }
}

TEST_CASE("slot context reproduces the direct evaluation path")
{
    rate::NoiseModel noise;
    Rng rng(109);
    const int num_ues = 4;
    const int num_bs = 2;
    const std::vector<int> demands = {2, 2, 1, 2};
    Eigen::VectorXd power(num_bs);
    power << 1.0, 0.5;

    ChannelGrid grid = random_grid(num_ues, num_bs, 2, 8, rng);
    rate::SlotContext context(grid, power, demands, noise);
    CHECK(context.num_ues() == num_ues);
    CHECK(context.num_bs() == num_bs);

    SUBCASE("utilities and per-user rates match over many assignments")
    {
        for (int trial = 0; trial < 50; ++trial)
        {
            std::vector<int> assignment(num_ues);
            for (int& a : assignment)
                a = rng.uniform_int(num_bs);

            ActivationVector act = make_activation(assignment);
            rate::BeamformerSet bfs = build_beamformers(act, grid, power, demands);
            rate::SlotRates direct = rate::slot_throughputs(act, grid, bfs, noise);

            double cached = context.utility(assignment);
            CHECK(cached == doctest::Approx(direct.utility).epsilon(1e-12));

            Eigen::VectorXd rates = context.per_user_rates(assignment);
            CHECK((rates - direct.per_user_rate).norm() <=
                  1e-12 * std::max(1.0, direct.per_user_rate.norm()));
        }
    }

    SUBCASE("cached partitions equal standalone decompositions")
    {
        for (int k = 0; k < num_ues; ++k)
            for (int j = 0; j < num_bs; ++j)
            {
                bf::SvdPartition fresh = bf::svd_partition(grid.at(k, j).matrix, demands[k]);
                const bf::SvdPartition& cached = context.partition(k, j);
                CHECK((fresh.left - cached.left).norm() == 0.0);
                CHECK((fresh.singulars - cached.singulars).norm() == 0.0);
            }
    }

    SUBCASE("reference table matches the standalone computation")
    {
        Eigen::MatrixXd expect = rate::full_interference_rate_table(grid, power, demands, noise);
        CHECK((context.fi_rates() - expect).norm() == 0.0);
    }

    SUBCASE("invalid assignments are rejected")
    {
        CHECK_THROWS_AS((context.utility({0, 1})), std::invalid_argument);
        CHECK_THROWS_AS((context.utility({0, 1, 0, 5})), std::invalid_argument);
    }
}
