// SPDX-License-Identifier: Apache-2.0

#include "tfasim/rate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tfasim::rate {

namespace {

// log2 det of a Hermitian positive-definite matrix via Cholesky.
double log2det_hpd(const Eigen::MatrixXcd& m)
{
    Eigen::LLT<Eigen::MatrixXcd> llt(m);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("covariance matrix is not positive definite");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        acc += std::log2(std::real(llt.matrixLLT()(i, i)));
    return 2.0 * acc;
}

void check_pair(int ue, int bs, const assoc::ActivationVector& activation,
                const channel::ChannelGrid& channels, const BeamformerSet& beamformers)
{
    if (ue < 0 || ue >= channels.num_ues || bs < 0 || bs >= channels.num_bs)
        throw std::logic_error("rate evaluation: link index out of range");
    if (activation.assignment.at(ue) != bs)
        throw std::logic_error("rate evaluation: UE is not assigned to the requested BS");
    if (beamformers.size() != static_cast<std::size_t>(channels.num_ues))
        throw std::logic_error("rate evaluation: beamformer set size mismatch");
    if (!beamformers[ue].has_value())
        throw std::logic_error("rate evaluation: missing beamformer for a served UE");
}

} // namespace

double NoiseModel::power_w() const
{
    return std::pow(10.0, (psd_dbm_per_hz + 10.0 * std::log10(bandwidth_hz) - 30.0) / 10.0);
}

void NoiseModel::validate() const
{
    if (bandwidth_hz <= 0.0)
        throw std::invalid_argument("bandwidth must be positive");
}

CovarianceParts interference_covariance_parts(int ue, int bs, const assoc::ActivationVector& activation,
                                              const channel::ChannelGrid& channels,
                                              const BeamformerSet& beamformers, const NoiseModel& noise)
{
    check_pair(ue, bs, activation, channels, beamformers);
    const Eigen::MatrixXcd& combiner = beamformers[ue]->combiner;
    const Eigen::Index n = combiner.cols();

    CovarianceParts parts;
    parts.intra_cell = Eigen::MatrixXcd::Zero(n, n);
    parts.inter_cell = Eigen::MatrixXcd::Zero(n, n);

    for (int l = 0; l < channels.num_ues; ++l)
    {
        if (l == ue)
            continue;
        int serving = activation.assignment[l];
        if (serving == assoc::ActivationVector::kUnserved)
            continue;
        if (!beamformers[l].has_value())
            throw std::logic_error("rate evaluation: missing beamformer for a served UE");
        // (W* H_{k,i} F_{l,i})(W* H_{k,i} F_{l,i})^* accumulated per active link
        Eigen::MatrixXcd coupled = combiner.adjoint() * channels.at(ue, serving).matrix *
                                   beamformers[l]->precoder;
        if (serving == bs)
            parts.intra_cell.noalias() += coupled * coupled.adjoint();
        else
            parts.inter_cell.noalias() += coupled * coupled.adjoint();
    }
    parts.noise = noise.power_w() * (combiner.adjoint() * combiner);
    return parts;
}

Eigen::MatrixXcd interference_covariance(int ue, int bs, const assoc::ActivationVector& activation,
                                         const channel::ChannelGrid& channels,
                                         const BeamformerSet& beamformers, const NoiseModel& noise)
{
    return interference_covariance_parts(ue, bs, activation, channels, beamformers, noise).total();
}

double log2det_rate(const Eigen::MatrixXcd& covariance, const Eigen::MatrixXcd& signal)
{
    double r = log2det_hpd(covariance + signal) - log2det_hpd(covariance);
    return std::max(r, 0.0);
}

double instantaneous_rate(int ue, int bs, const assoc::ActivationVector& activation,
                          const channel::ChannelGrid& channels, const BeamformerSet& beamformers,
                          const NoiseModel& noise)
{
    Eigen::MatrixXcd y = interference_covariance(ue, bs, activation, channels, beamformers, noise);
    Eigen::MatrixXcd coupled =
        beamformers[ue]->combiner.adjoint() * channels.at(ue, bs).matrix * beamformers[ue]->precoder;
    Eigen::MatrixXcd signal = coupled * coupled.adjoint();
    return log2det_rate(y, signal);
}

SlotRates slot_throughputs(const assoc::ActivationVector& activation, const channel::ChannelGrid& channels,
                           const BeamformerSet& beamformers, const NoiseModel& noise)
{
    const int num_ues = channels.num_ues;
    SlotRates out;
    out.per_user_rate = Eigen::VectorXd::Zero(num_ues);
    out.pair_rate = Eigen::MatrixXd::Constant(num_ues, channels.num_bs,
                                              std::numeric_limits<double>::quiet_NaN());
    for (int k = 0; k < num_ues; ++k)
    {
        int j = activation.assignment.at(k);
        if (j == assoc::ActivationVector::kUnserved)
            continue;
        double r = instantaneous_rate(k, j, activation, channels, beamformers, noise);
        out.per_user_rate(k) = r;
        out.pair_rate(k, j) = r;
    }
    out.utility = out.per_user_rate.sum();
    return out;
}

Eigen::VectorXd average_throughputs(const std::vector<SlotRates>& slots)
{
    if (slots.empty())
        throw std::invalid_argument("average requires at least one slot");
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(slots.front().per_user_rate.size());
    for (const SlotRates& s : slots)
        acc += s.per_user_rate;
    return acc / static_cast<double>(slots.size());
}

double full_interference_rate(int ue, int bs, const channel::ChannelGrid& channels,
                              const Eigen::VectorXd& tx_power_w, const std::vector<int>& stream_demands,
                              const NoiseModel& noise)
{
    if (ue < 0 || ue >= channels.num_ues || bs < 0 || bs >= channels.num_bs)
        throw std::logic_error("full-interference rate: link index out of range");

    const int n = stream_demands.at(ue);
    bf::BeamformerPair pair = bf::make_beamformers(channels.at(ue, bs).matrix, n, tx_power_w(bs));
    const Eigen::MatrixXcd& w = pair.combiner;

    Eigen::MatrixXcd y = noise.power_w() * (w.adjoint() * w);
    for (int i = 0; i < channels.num_bs; ++i)
    {
        if (i == bs)
            continue;
        const Eigen::MatrixXcd& h = channels.at(ue, i).matrix;
        Eigen::MatrixXcd coupled = w.adjoint() * h;
        y.noalias() += (tx_power_w(i) / static_cast<double>(h.cols())) * (coupled * coupled.adjoint());
    }
    Eigen::MatrixXcd coupled = w.adjoint() * channels.at(ue, bs).matrix * pair.precoder;
    return log2det_rate(y, coupled * coupled.adjoint());
}

Eigen::MatrixXd full_interference_rate_table(const channel::ChannelGrid& channels,
                                             const Eigen::VectorXd& tx_power_w,
                                             const std::vector<int>& stream_demands,
                                             const NoiseModel& noise)
{
    Eigen::MatrixXd table(channels.num_ues, channels.num_bs);
    for (int k = 0; k < channels.num_ues; ++k)
        for (int j = 0; j < channels.num_bs; ++j)
            table(k, j) = full_interference_rate(k, j, channels, tx_power_w, stream_demands, noise);
    return table;
}

SlotContext::SlotContext(const channel::ChannelGrid& channels, Eigen::VectorXd tx_power_w,
                         std::vector<int> stream_demands, const NoiseModel& noise)
    : channels_(&channels),
      num_ues_(channels.num_ues),
      num_bs_(channels.num_bs),
      power_w_(std::move(tx_power_w)),
      demands_(std::move(stream_demands)),
      noise_(noise),
      noise_w_(noise.power_w())
{
    if (power_w_.size() != num_bs_)
        throw std::invalid_argument("slot context: one transmit power per BS required");
    if (demands_.size() != static_cast<std::size_t>(num_ues_))
        throw std::invalid_argument("slot context: one stream demand per UE required");

    partitions_.resize(static_cast<std::size_t>(num_ues_) * num_bs_);
    noise_terms_.resize(partitions_.size());
    for (int k = 0; k < num_ues_; ++k)
        for (int j = 0; j < num_bs_; ++j)
        {
            std::size_t idx = static_cast<std::size_t>(k) * num_bs_ + j;
            partitions_[idx] = bf::svd_partition(channels.at(k, j).matrix, demands_[k]);
            const Eigen::MatrixXcd& w = partitions_[idx].left;
            noise_terms_[idx] = noise_w_ * (w.adjoint() * w);
        }

    // Cross-coupling terms with unscaled precoder directions.
    cross_.resize(static_cast<std::size_t>(num_ues_) * num_bs_ * num_ues_ * num_bs_);
    for (int k = 0; k < num_ues_; ++k)
        for (int j = 0; j < num_bs_; ++j)
        {
            const Eigen::MatrixXcd& w = partitions_[static_cast<std::size_t>(k) * num_bs_ + j].left;
            for (int i = 0; i < num_bs_; ++i)
            {
                Eigen::MatrixXcd coupled = w.adjoint() * channels.at(k, i).matrix; // n_k x M_i
                for (int l = 0; l < num_ues_; ++l)
                {
                    const Eigen::MatrixXcd& dirs =
                        partitions_[static_cast<std::size_t>(l) * num_bs_ + i].right;
                    Eigen::MatrixXcd t = coupled * dirs;
                    std::size_t idx = ((static_cast<std::size_t>(k) * num_bs_ + j) * num_ues_ + l) * num_bs_ + i;
                    cross_[idx] = t * t.adjoint();
                }
            }
        }

    fi_rates_ = full_interference_rate_table(channels, power_w_, demands_, noise_);
}

const bf::SvdPartition& SlotContext::partition(int ue, int bs) const
{
    return partitions_[static_cast<std::size_t>(ue) * num_bs_ + bs];
}

const Eigen::MatrixXcd& SlotContext::cross_term(int ue, int serving_bs, int other_ue, int other_bs) const
{
    return cross_[((static_cast<std::size_t>(ue) * num_bs_ + serving_bs) * num_ues_ + other_ue) * num_bs_ +
                  other_bs];
}

Eigen::VectorXd SlotContext::per_user_rates(const std::vector<int>& assignment) const
{
    if (assignment.size() != static_cast<std::size_t>(num_ues_))
        throw std::invalid_argument("assignment length does not match the number of users");

    std::vector<int> active_users(num_bs_, 0);
    for (int l = 0; l < num_ues_; ++l)
    {
        int j = assignment[l];
        if (j < 0 || j >= num_bs_)
            throw std::invalid_argument("assignment refers to a BS index out of range");
        active_users[j] += 1;
    }
    // per-user transmit power P_j / Q_j, spread over that user's streams
    std::vector<double> stream_power(num_ues_);
    for (int l = 0; l < num_ues_; ++l)
        stream_power[l] = power_w_(assignment[l]) /
                          (static_cast<double>(active_users[assignment[l]]) * demands_[l]);

    Eigen::VectorXd rates(num_ues_);
    for (int k = 0; k < num_ues_; ++k)
    {
        int j = assignment[k];
        Eigen::MatrixXcd y = noise_terms_[static_cast<std::size_t>(k) * num_bs_ + j];
        for (int l = 0; l < num_ues_; ++l)
        {
            if (l == k)
                continue;
            y.noalias() += stream_power[l] * cross_term(k, j, l, assignment[l]);
        }
        Eigen::MatrixXcd signal = stream_power[k] * cross_term(k, j, k, j);
        rates(k) = log2det_rate(y, signal);
    }
    return rates;
}

double SlotContext::utility(const std::vector<int>& assignment) const
{
    return per_user_rates(assignment).sum();
}

} // namespace tfasim::rate
