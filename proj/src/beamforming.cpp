// SPDX-License-Identifier: Apache-2.0

#include "tfasim/beamforming.hpp"

#include <cmath>
#include <stdexcept>

namespace tfasim::bf {

namespace {

// Rotate each (left, right) column pair by a common phase so the first
// non-negligible entry of the left vector is real and non-negative. The
// reconstruction Phi Sigma Gamma^* is unchanged.
void fix_column_phases(Eigen::MatrixXcd& left, Eigen::MatrixXcd& right)
{
    for (Eigen::Index c = 0; c < left.cols(); ++c)
    {
        double threshold = 1e-12 * left.col(c).norm();
        for (Eigen::Index r = 0; r < left.rows(); ++r)
        {
            std::complex<double> v = left(r, c);
            if (std::abs(v) > threshold)
            {
                std::complex<double> rot = std::conj(v) / std::abs(v);
                left.col(c) *= rot;
                right.col(c) *= rot;
                break;
            }
        }
    }
}

} // namespace

SvdPartition svd_partition(const Eigen::MatrixXcd& channel, int num_streams)
{
    const Eigen::Index n_rx = channel.rows();
    const Eigen::Index m_tx = channel.cols();
    if (num_streams < 1 || num_streams > std::min(n_rx, m_tx))
        throw std::invalid_argument("stream count must satisfy 1 <= n <= min(N, M)");
    if (!channel.allFinite())
        throw std::invalid_argument("channel matrix has non-finite entries");

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(channel, Eigen::ComputeThinU | Eigen::ComputeThinV);

    SvdPartition out;
    out.left = svd.matrixU().leftCols(num_streams);
    out.singulars = svd.singularValues().head(num_streams);
    out.right = svd.matrixV().leftCols(num_streams);
    fix_column_phases(out.left, out.right);

    double top = svd.singularValues()(0);
    out.rank_deficient = out.singulars(num_streams - 1) <= 1e-13 * std::max(top, 1e-300);
    return out;
}

BeamformerPair make_beamformers(const SvdPartition& partition, int num_streams, double per_user_power_w)
{
    if (per_user_power_w <= 0.0)
        throw std::invalid_argument("per-user power must be positive");
    if (num_streams < 1 || num_streams > partition.singulars.size())
        throw std::invalid_argument("stream count exceeds the partitioned subspace");

    BeamformerPair out;
    out.num_streams = num_streams;
    out.per_user_power_w = per_user_power_w;
    out.combiner = partition.left.leftCols(num_streams);
    out.precoder = std::sqrt(per_user_power_w / num_streams) * partition.right.leftCols(num_streams);
    return out;
}

BeamformerPair make_beamformers(const Eigen::MatrixXcd& channel, int num_streams, double per_user_power_w)
{
    return make_beamformers(svd_partition(channel, num_streams), num_streams, per_user_power_w);
}

BeamformerPair make_beamformers(const channel::ChannelRealization& link, int num_streams, double per_user_power_w)
{
    return make_beamformers(link.matrix, num_streams, per_user_power_w);
}

} // namespace tfasim::bf
