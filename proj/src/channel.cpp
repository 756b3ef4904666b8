// SPDX-License-Identifier: Apache-2.0

#include "tfasim/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace tfasim::channel {

void ArrayGeometry::validate() const
{
    if (rows_u < 1 || cols_v < 1)
        throw std::invalid_argument("array geometry needs at least one element per dimension");
    if (element_spacing_m < 0.0)
        throw std::invalid_argument("element spacing cannot be negative");
}

const char* to_string(LinkState s)
{
    return s == LinkState::kLos ? "los" : "nlos";
}

void LargeScaleParams::validate() const
{
    if (carrier_freq_hz <= 0.0)
        throw std::invalid_argument("carrier frequency must be positive");
    if (ref_distance_m <= 0.0 || breakpoint_m <= 0.0 || decay_eta_m <= 0.0)
        throw std::invalid_argument("reference, breakpoint, and decay distances must be positive");
    if (pathloss_exp_los < 0.0 || pathloss_exp_nlos < 0.0)
        throw std::invalid_argument("path loss exponents cannot be negative");
    if (shadow_sigma_los_db < 0.0 || shadow_sigma_nlos_db < 0.0)
        throw std::invalid_argument("shadowing sigmas cannot be negative");
}

void ClusterConfig::validate() const
{
    if (num_clusters < 1 || rays_per_cluster < 1)
        throw std::invalid_argument("cluster model needs at least one cluster and one ray");
    if (azimuth_spread_rad < 0.0 || elevation_spread_rad < 0.0)
        throw std::invalid_argument("angle spreads cannot be negative");
}

std::uint64_t ChannelGrid::checksum() const
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const ChannelRealization& link : links)
    {
        for (Eigen::Index c = 0; c < link.matrix.cols(); ++c)
            for (Eigen::Index r = 0; r < link.matrix.rows(); ++r)
            {
                std::complex<double> v = link.matrix(r, c);
                double re = v.real(), im = v.imag();
                h = fnv1a64(&re, sizeof re, h);
                h = fnv1a64(&im, sizeof im, h);
            }
        h = fnv1a64(&link.pathloss_db, sizeof link.pathloss_db, h);
    }
    return h;
}

Eigen::VectorXcd array_response(double azimuth_rad, double elevation_rad,
                                const ArrayGeometry& geometry, double wavelength_m)
{
    geometry.validate();
    if (wavelength_m <= 0.0)
        throw std::invalid_argument("wavelength must be positive");
    if (!std::isfinite(azimuth_rad) || !std::isfinite(elevation_rad))
        throw std::invalid_argument("array response angles must be finite");

    const int u_count = geometry.rows_u;
    const int v_count = geometry.cols_v;
    const double d = geometry.spacing_or_default(wavelength_m);
    const double k_wave = 2.0 * M_PI / wavelength_m;
    const double su = std::sin(azimuth_rad) * std::sin(elevation_rad);
    const double cv = std::cos(elevation_rad);
    const double norm = 1.0 / std::sqrt(static_cast<double>(u_count) * v_count);

    Eigen::VectorXcd a(u_count * v_count);
    for (int u = 0; u < u_count; ++u)
        for (int v = 0; v < v_count; ++v)
        {
            double phase = k_wave * d * (u * su + v * cv);
            a(u * v_count + v) = norm * std::complex<double>(std::cos(phase), std::sin(phase));
        }
    return a;
}

double los_probability(double distance_m, const LargeScaleParams& params)
{
    if (!(distance_m > 0.0))
        throw std::invalid_argument("distance must be positive");
    double decay = std::exp(-distance_m / params.decay_eta_m);
    double ratio = std::min(params.breakpoint_m / distance_m, 1.0);
    double bracket = ratio * (1.0 - decay) + decay;
    return bracket * bracket;
}

double nlos_probability(double distance_m, const LargeScaleParams& params)
{
    return 1.0 - los_probability(distance_m, params);
}

LinkState sample_link_state(double distance_m, const LargeScaleParams& params, Rng& rng)
{
    return rng.bernoulli(los_probability(distance_m, params)) ? LinkState::kLos : LinkState::kNlos;
}

double path_loss_db(double distance_m, LinkState state, const LargeScaleParams& params,
                    double shadow_db, bool* clamped)
{
    params.validate();
    if (!std::isfinite(distance_m))
        throw std::invalid_argument("distance must be finite");
    bool clip = distance_m < params.ref_distance_m;
    if (clamped != nullptr)
        *clamped = clip;
    double d = clip ? params.ref_distance_m : distance_m;
    double n = state == LinkState::kLos ? params.pathloss_exp_los : params.pathloss_exp_nlos;
    double free_space = 20.0 * std::log10(4.0 * M_PI * params.ref_distance_m / params.wavelength_m());
    return free_space + 10.0 * n * std::log10(d / params.ref_distance_m) + shadow_db;
}

LinkLargeScale sample_link_large_scale(double distance_m, const LargeScaleParams& params, Rng& rng)
{
    LinkLargeScale out;
    out.distance_m = distance_m;
    // probability evaluated at the clamped distance when nodes are co-located
    double d_eval = std::max(distance_m, params.ref_distance_m);
    out.state = sample_link_state(d_eval, params, rng);
    double sigma = out.state == LinkState::kLos ? params.shadow_sigma_los_db : params.shadow_sigma_nlos_db;
    out.shadow_db = sigma * rng.normal();
    out.pathloss_db = path_loss_db(distance_m, out.state, params, out.shadow_db, &out.distance_clamped);
    return out;
}

Eigen::MatrixXcd sample_small_scale(const ClusterConfig& cfg, const ArrayGeometry& ue_geom,
                                    const ArrayGeometry& bs_geom, double wavelength_m, Rng& rng)
{
    cfg.validate();
    ue_geom.validate();
    bs_geom.validate();
    if (wavelength_m <= 0.0)
        throw std::invalid_argument("wavelength must be positive");

    const int n_rx = ue_geom.num_elements();
    const int m_tx = bs_geom.num_elements();
    const int n_clusters = cfg.num_clusters;
    const int n_rays = cfg.rays_per_cluster;

    // Cluster gains: exponential draws normalized so they sum to C, i.e. unit
    // average ray power.
    std::vector<double> gains(n_clusters);
    double total = 0.0;
    for (double& g : gains)
    {
        g = rng.exponential();
        total += g;
    }
    for (double& g : gains)
        g *= static_cast<double>(n_clusters) / total;

    const double scale = std::sqrt(static_cast<double>(n_rx) * m_tx /
                                   (static_cast<double>(n_clusters) * n_rays));

    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n_rx, m_tx);
    for (int c = 0; c < n_clusters; ++c)
    {
        double aoa_center = rng.uniform(-M_PI, M_PI);
        double aod_center = rng.uniform(-M_PI, M_PI);
        double eoa_center = rng.uniform(M_PI / 3.0, 2.0 * M_PI / 3.0);
        double eod_center = rng.uniform(M_PI / 3.0, 2.0 * M_PI / 3.0);
        double amp = std::sqrt(gains[c]);
        for (int l = 0; l < n_rays; ++l)
        {
            double aoa = aoa_center + rng.laplace(cfg.azimuth_spread_rad);
            double eoa = eoa_center + rng.laplace(cfg.elevation_spread_rad);
            double aod = aod_center + rng.laplace(cfg.azimuth_spread_rad);
            double eod = eod_center + rng.laplace(cfg.elevation_spread_rad);
            double psi = rng.uniform(0.0, 2.0 * M_PI);
            std::complex<double> ray_gain =
                amp * std::complex<double>(std::cos(psi), std::sin(psi));
            Eigen::VectorXcd a_ue = array_response(aoa, eoa, ue_geom, wavelength_m);
            Eigen::VectorXcd a_bs = array_response(aod, eod, bs_geom, wavelength_m);
            h.noalias() += (scale * ray_gain) * (a_ue * a_bs.adjoint());
        }
    }
    return h;
}

ChannelRealization sample_channel(int ue, int bs, int slot, const LargeScaleCache& cache,
                                  const ClusterConfig& cfg, const ArrayGeometry& ue_geom,
                                  const ArrayGeometry& bs_geom, double wavelength_m, Rng& rng)
{
    if (ue < 0 || ue >= cache.num_ues || bs < 0 || bs >= cache.num_bs)
        throw std::logic_error("sample_channel: no large-scale cache entry for this link");
    const LinkLargeScale& ls = cache.at(ue, bs);

    ChannelRealization out;
    out.ue_index = ue;
    out.bs_index = bs;
    out.slot_index = slot;
    out.link_state = ls.state;
    out.pathloss_db = ls.pathloss_db;
    double amplitude = std::pow(10.0, -ls.pathloss_db / 20.0);
    out.matrix = amplitude * sample_small_scale(cfg, ue_geom, bs_geom, wavelength_m, rng);
    return out;
}

} // namespace tfasim::channel
