// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "tfasim/association.hpp"
#include "tfasim/beamforming.hpp"
#include "tfasim/channel.hpp"

namespace tfasim::rate {

// Thermal noise: power spectral density (default -174 dBm/Hz) over an
// evaluation bandwidth. Rates are spectral efficiencies in bits/s/Hz; the
// bandwidth converts the PSD into the noise power entering the SINR and scales
// sum rates into bits/s.
struct NoiseModel
{
    double psd_dbm_per_hz = -174.0;
    double bandwidth_hz = 1e9;

    double power_w() const;
    void validate() const;
};

// Per-slot rate snapshot. pair_rate holds only the (k, j) entries that were
// actually evaluated; the rest stay NaN.
struct SlotRates
{
    Eigen::VectorXd per_user_rate; // K, bits/s/Hz
    double utility = 0.0;          // sum of per-user rates
    Eigen::MatrixXd pair_rate;     // K x J, NaN = not evaluated
};

// Serving-link beamformer per UE; disengaged for unserved users.
using BeamformerSet = std::vector<std::optional<bf::BeamformerPair>>;

// The three summands of the received-covariance matrix: interference from the
// serving BS's other users, interference from all other BSs' users, and noise.
struct CovarianceParts
{
    Eigen::MatrixXcd intra_cell;
    Eigen::MatrixXcd inter_cell;
    Eigen::MatrixXcd noise;

    Eigen::MatrixXcd total() const { return intra_cell + inter_cell + noise; }
};

CovarianceParts interference_covariance_parts(int ue, int bs, const assoc::ActivationVector& activation,
                                              const channel::ChannelGrid& channels,
                                              const BeamformerSet& beamformers, const NoiseModel& noise);

// Y_{k,j} = W* H_j (sum_{l in Q_j, l != k} F_l F_l*) H_j* W
//         + W* (sum_{i != j} sum_{l in Q_i} H_i F_l F_l* H_i*) W + N W*W.
Eigen::MatrixXcd interference_covariance(int ue, int bs, const assoc::ActivationVector& activation,
                                         const channel::ChannelGrid& channels,
                                         const BeamformerSet& beamformers, const NoiseModel& noise);

// log2 det(I + Y^-1 G) for Hermitian positive-definite Y and PSD G, evaluated
// through Cholesky factors as log2 det(Y + G) - log2 det(Y).
double log2det_rate(const Eigen::MatrixXcd& covariance, const Eigen::MatrixXcd& signal);

// Instantaneous rate of UE `ue` served by BS `bs` under the given activation.
double instantaneous_rate(int ue, int bs, const assoc::ActivationVector& activation,
                          const channel::ChannelGrid& channels, const BeamformerSet& beamformers,
                          const NoiseModel& noise);

// Per-user rates r_k = R_{k, beta_k} (0 when unserved) and their sum.
SlotRates slot_throughputs(const assoc::ActivationVector& activation, const channel::ChannelGrid& channels,
                           const BeamformerSet& beamformers, const NoiseModel& noise);

// Finite-horizon average of per-user rates over a slot sequence.
Eigen::VectorXd average_throughputs(const std::vector<SlotRates>& slots);

// Association-independent reference rate: the serving link runs SVD
// beamforming at full BS power while every other BS contributes spatially
// white interference at full power, Y = W*(sum_{i!=j} P_i/M_i H_i H_i*)W + N W*W.
double full_interference_rate(int ue, int bs, const channel::ChannelGrid& channels,
                              const Eigen::VectorXd& tx_power_w, const std::vector<int>& stream_demands,
                              const NoiseModel& noise);

Eigen::MatrixXd full_interference_rate_table(const channel::ChannelGrid& channels,
                                             const Eigen::VectorXd& tx_power_w,
                                             const std::vector<int>& stream_demands,
                                             const NoiseModel& noise);

// Precomputed per-slot evaluation state for combinatorial search. Caches the
// per-link SVD partitions and every cross-coupling term
//   X[k, j_serv, l, i] = (W_{k,j_serv}* H_{k,i} G_{l,i})(...)^*
// with unscaled precoder directions G, so that evaluating a candidate
// activation costs one small-matrix accumulation per user. Per-user transmit
// power P_i / Q_i is recomputed per candidate from the candidate's own loads.
class SlotContext
{
  public:
    SlotContext(const channel::ChannelGrid& channels, Eigen::VectorXd tx_power_w,
                std::vector<int> stream_demands, const NoiseModel& noise);

    int num_ues() const { return num_ues_; }
    int num_bs() const { return num_bs_; }
    const std::vector<int>& stream_demands() const { return demands_; }
    const Eigen::VectorXd& tx_power_w() const { return power_w_; }
    double noise_power_w() const { return noise_w_; }
    const NoiseModel& noise() const { return noise_; }
    const channel::ChannelGrid& channels() const { return *channels_; }

    // Cached unscaled SVD partition of link (ue, bs), n = stream_demands[ue].
    const bf::SvdPartition& partition(int ue, int bs) const;

    // Sum-rate utility of a full assignment (entries in [0, J)).
    double utility(const std::vector<int>& assignment) const;

    Eigen::VectorXd per_user_rates(const std::vector<int>& assignment) const;

    // Full-interference reference table, used by repair heuristics and the
    // load-balancing baseline.
    const Eigen::MatrixXd& fi_rates() const { return fi_rates_; }

  private:
    const Eigen::MatrixXcd& cross_term(int ue, int serving_bs, int other_ue, int other_bs) const;

    const channel::ChannelGrid* channels_;
    int num_ues_;
    int num_bs_;
    Eigen::VectorXd power_w_;
    std::vector<int> demands_;
    NoiseModel noise_;
    double noise_w_;
    std::vector<bf::SvdPartition> partitions_;  // K*J
    std::vector<Eigen::MatrixXcd> noise_terms_; // K*J, N * W*W
    std::vector<Eigen::MatrixXcd> cross_;       // K*J*K*J
    Eigen::MatrixXd fi_rates_;
};

} // namespace tfasim::rate
