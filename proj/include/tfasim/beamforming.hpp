// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include "tfasim/channel.hpp"

namespace tfasim::bf {

// Top-n singular subspace of a channel matrix. Singular values are in
// non-increasing order; the phase of each left singular vector is fixed so its
// first non-negligible entry is real and non-negative, which makes the
// decomposition deterministic. rank_deficient marks blocks whose trailing
// singular values are numerically zero (the corresponding directions carry no
// signal and contribute zero rate).
struct SvdPartition
{
    Eigen::MatrixXcd left;     // N x n
    Eigen::VectorXd singulars; // n
    Eigen::MatrixXcd right;    // M x n
    bool rank_deficient = false;
};

SvdPartition svd_partition(const Eigen::MatrixXcd& channel, int num_streams);

// Per-link precoder/combiner. The combiner has orthonormal columns; the
// precoder is scaled so trace(F F*) equals per_user_power_w.
struct BeamformerPair
{
    Eigen::MatrixXcd precoder; // M x n
    Eigen::MatrixXcd combiner; // N x n
    int num_streams = 0;
    double per_user_power_w = 0.0;
};

// W = Phi_1, F = sqrt(P/n) * Gamma_1 from the direct-link SVD.
BeamformerPair make_beamformers(const Eigen::MatrixXcd& channel, int num_streams, double per_user_power_w);
BeamformerPair make_beamformers(const channel::ChannelRealization& link, int num_streams, double per_user_power_w);
BeamformerPair make_beamformers(const SvdPartition& partition, int num_streams, double per_user_power_w);

} // namespace tfasim::bf
