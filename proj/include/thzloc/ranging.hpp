#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>

#include "thzloc/channel.hpp"
#include "thzloc/vec3.hpp"

namespace thzloc {

/// Time-spread on-off keying pulse timing.
struct TsookParams {
    double pulse_duration = 100e-15;  // s
    double beta = 1000.0;             // symbol spacing / pulse duration
    int k_pulses = 1;

    void validate() const {
        if (!(pulse_duration > 0.0)) throw std::invalid_argument("TsookParams: pulse_duration must be > 0");
        if (!(beta >= 1.0)) throw std::invalid_argument("TsookParams: beta must be >= 1");
        if (k_pulses < 1) throw std::invalid_argument("TsookParams: k_pulses must be >= 1");
    }
};

enum class MeasurementStatus { ok, out_of_range, node_depleted };

struct Measurement {
    std::size_t anchor_index = 0;
    double estimated_distance = 0.0;  // m, > 0 when ok
    int pulses_used = 0;
    MeasurementStatus status = MeasurementStatus::ok;
};

/// Floor applied to noisy ranges that would otherwise be non-positive.
inline constexpr double kMinRange = 1e-6;  // m

/// Raw resolution c / B used as the ranging noise standard deviation.
/// An infinite bandwidth yields zero noise.
inline double tof_noise_std(double bandwidth) {
    if (!(bandwidth > 0.0)) throw std::invalid_argument("tof_noise_std: bandwidth must be positive");
    return kSpeedOfLight / bandwidth;
}

/// Distance from `k_pulses` averaged two-way ToF exchanges.
template <class Rng>
double measure_two_way_tof(double true_distance, double bandwidth, int k_pulses, Rng& rng) {
    if (!(true_distance >= 0.0)) throw std::invalid_argument("measure_two_way_tof: negative distance");
    if (k_pulses < 1) throw std::invalid_argument("measure_two_way_tof: k_pulses must be >= 1");
    const double sigma = tof_noise_std(bandwidth);
    if (sigma == 0.0) return std::max(true_distance, kMinRange);
    std::normal_distribution<double> noise(0.0, sigma);
    double sum = 0.0;
    for (int i = 0; i < k_pulses; ++i) sum += noise(rng);
    return std::max(true_distance + sum / k_pulses, kMinRange);
}

/// Direction from an anchor toward a node, radians.
struct Bearing {
    double azimuth = 0.0;    // from +x toward +y
    double elevation = 0.0;  // above the xy plane, [-pi/2, pi/2]
};

inline Bearing bearing_between(const Position3& from, const Position3& to) {
    const Position3 v = to - from;
    const double r = norm(v);
    if (r == 0.0) return {};
    return {std::atan2(v.y, v.x), std::asin(std::clamp(v.z / r, -1.0, 1.0))};
}

inline Position3 unit_vector(const Bearing& b) noexcept {
    return {std::cos(b.elevation) * std::cos(b.azimuth), std::cos(b.elevation) * std::sin(b.azimuth),
            std::sin(b.elevation)};
}

/// Perturbs azimuth and elevation independently by Normal(0, sigma).
template <class Rng>
Bearing measure_aoa(const Bearing& truth, double sigma, Rng& rng) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("measure_aoa: sigma must be >= 0");
    if (sigma == 0.0) return truth;
    std::normal_distribution<double> noise(0.0, sigma);
    Bearing b{truth.azimuth + noise(rng), truth.elevation + noise(rng)};
    b.elevation = std::clamp(b.elevation, -kPi / 2, kPi / 2);
    return b;
}

/// Distance at which the channel delivers `target_dbm`, by bisection.
/// Powers above what the lower bound yields return the lower bound.
template <class Channel>
double invert_received_power(const Channel& channel, double p_tx_dbm, double target_dbm) {
    double lo = kMinRange;
    double hi = 1.0;
    if (channel.received_power_dbm(p_tx_dbm, lo) <= target_dbm) return lo;
    while (channel.received_power_dbm(p_tx_dbm, hi) > target_dbm && hi < 1e9) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (channel.received_power_dbm(p_tx_dbm, mid) > target_dbm)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// RSS ranging: forward channel, log-normal perturbation, matched-model inversion.
template <class Rng>
double measure_rss_distance(double true_distance, const ChannelModel& channel, double p_tx_dbm, double sigma_db,
                            Rng& rng) {
    if (!(true_distance > 0.0)) throw std::invalid_argument("measure_rss_distance: distance must be positive");
    if (!(sigma_db >= 0.0)) throw std::invalid_argument("measure_rss_distance: sigma_db must be >= 0");
    double p_rx = channel.received_power_dbm(p_tx_dbm, true_distance);
    if (sigma_db > 0.0) p_rx += std::normal_distribution<double>(0.0, sigma_db)(rng);
    return invert_received_power(channel, p_tx_dbm, p_rx);
}

template <class Rng>
double measure_rss_distance(double true_distance, const ChannelParams& params, double p_tx_dbm, double sigma_db,
                            Rng& rng) {
    return measure_rss_distance(true_distance, ChannelModel(params), p_tx_dbm, sigma_db, rng);
}

}  // namespace thzloc
