// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "tfasim/rng.hpp"

namespace tfasim::channel {

// Uniform planar array, U rows by V columns. element_spacing_m == 0 selects
// half the carrier wavelength at sampling time.
struct ArrayGeometry
{
    int rows_u = 1;
    int cols_v = 1;
    double element_spacing_m = 0.0;

    int num_elements() const { return rows_u * cols_v; }
    double spacing_or_default(double wavelength_m) const
    {
        return element_spacing_m > 0.0 ? element_spacing_m : 0.5 * wavelength_m;
    }
    void validate() const;
};

enum class LinkState
{
    kLos,
    kNlos
};

const char* to_string(LinkState s);

// Large-scale propagation parameters. Defaults are the 73 GHz urban-micro
// values: exponents 2.0 / 3.4, shadowing 4.8 / 7.9 dB, breakpoint 27 m,
// decay 71 m, close-in reference distance 1 m.
struct LargeScaleParams
{
    double carrier_freq_hz = 73e9;
    double ref_distance_m = 1.0;
    double pathloss_exp_los = 2.0;
    double pathloss_exp_nlos = 3.4;
    double shadow_sigma_los_db = 4.8;
    double shadow_sigma_nlos_db = 7.9;
    double breakpoint_m = 27.0;
    double decay_eta_m = 71.0;

    double wavelength_m() const { return 299792458.0 / carrier_freq_hz; }
    void validate() const;
};

// Clustered small-scale model: C clusters of L rays each. Cluster centers are
// uniform in azimuth over [-pi, pi) and in elevation over [pi/3, 2pi/3);
// per-ray offsets are zero-mean Laplacian with the spreads below (given as
// standard deviations).
struct ClusterConfig
{
    int num_clusters = 5;
    int rays_per_cluster = 10;
    double azimuth_spread_rad = 5.0 * M_PI / 180.0;
    double elevation_spread_rad = 2.5 * M_PI / 180.0;

    void validate() const;
};

// One UE-BS link in one slot. `matrix` includes the large-scale amplitude
// 10^(-PL/20); pathloss_db includes the shadow term.
struct ChannelRealization
{
    Eigen::MatrixXcd matrix; // N_k x M_j
    LinkState link_state = LinkState::kLos;
    double pathloss_db = 0.0;
    int ue_index = 0;
    int bs_index = 0;
    int slot_index = 0;
};

// Per-link large-scale state, frozen once per deployment: link state, shadow
// draw and the resulting path loss. Small-scale fading is the only part
// resampled per slot.
struct LinkLargeScale
{
    LinkState state = LinkState::kLos;
    double shadow_db = 0.0;
    double pathloss_db = 0.0;
    double distance_m = 0.0;
    bool distance_clamped = false; // distance fell below the reference distance
};

struct LargeScaleCache
{
    int num_ues = 0;
    int num_bs = 0;
    std::vector<LinkLargeScale> links; // row-major, ue*num_bs + bs

    const LinkLargeScale& at(int ue, int bs) const { return links[static_cast<std::size_t>(ue) * num_bs + bs]; }
    LinkLargeScale& at(int ue, int bs) { return links[static_cast<std::size_t>(ue) * num_bs + bs]; }
};

// All K x J channel realizations of one slot.
struct ChannelGrid
{
    int num_ues = 0;
    int num_bs = 0;
    std::vector<ChannelRealization> links; // row-major, ue*num_bs + bs

    const ChannelRealization& at(int ue, int bs) const { return links[static_cast<std::size_t>(ue) * num_bs + bs]; }
    ChannelRealization& at(int ue, int bs) { return links[static_cast<std::size_t>(ue) * num_bs + bs]; }

    // Order-defined FNV-1a digest over all matrix entries and path losses.
    std::uint64_t checksum() const;
};

// UPA steering vector for azimuth phi and elevation theta, flattened row-major
// (u outer, v inner) with zero-based element indices, normalized to unit
// Euclidean norm. Entry (u,v) = exp(j*2*pi/lambda*d*(u sin(phi) sin(theta) + v cos(theta))) / sqrt(UV).
Eigen::VectorXcd array_response(double azimuth_rad, double elevation_rad,
                                const ArrayGeometry& geometry, double wavelength_m);

// LoS probability [min(d_BP/d, 1)(1 - e^(-d/eta)) + e^(-d/eta)]^2. Equals 1
// for d <= d_BP and decays beyond it.
double los_probability(double distance_m, const LargeScaleParams& params);

double nlos_probability(double distance_m, const LargeScaleParams& params);

LinkState sample_link_state(double distance_m, const LargeScaleParams& params, Rng& rng);

// Close-in path loss 20 log10(4 pi d0 / lambda) + 10 n log10(d/d0) + shadow,
// with the exponent selected by link state. The shadow term is supplied by the
// caller, so the function itself is deterministic. Distances below d0 are
// clamped to d0 and reported through `clamped`.
double path_loss_db(double distance_m, LinkState state, const LargeScaleParams& params,
                    double shadow_db, bool* clamped = nullptr);

// Draws state and shadow for a link and evaluates its path loss.
LinkLargeScale sample_link_large_scale(double distance_m, const LargeScaleParams& params, Rng& rng);

// Unit-average-power small-scale channel,
//   H = sqrt(N M / (C L)) * sum_c sum_l sqrt(gamma_c) e^(j psi_cl) a_ue a_bs^*.
// Cluster gains are i.i.d. exponential normalized to sum to C; each ray
// carries an independent uniform phase psi so rays combine incoherently and
// E[||H||_F^2] = N*M exactly.
Eigen::MatrixXcd sample_small_scale(const ClusterConfig& cfg, const ArrayGeometry& ue_geom,
                                    const ArrayGeometry& bs_geom, double wavelength_m, Rng& rng);

// Full per-slot link realization: frozen large-scale amplitude from the cache
// times a fresh small-scale draw.
ChannelRealization sample_channel(int ue, int bs, int slot, const LargeScaleCache& cache,
                                  const ClusterConfig& cfg, const ArrayGeometry& ue_geom,
                                  const ArrayGeometry& bs_geom, double wavelength_m, Rng& rng);

} // namespace tfasim::channel
