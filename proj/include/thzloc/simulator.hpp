#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "thzloc/channel.hpp"
#include "thzloc/energy.hpp"
#include "thzloc/errors.hpp"
#include "thzloc/localization.hpp"
#include "thzloc/metrics.hpp"
#include "thzloc/random.hpp"
#include "thzloc/ranging.hpp"
#include "thzloc/topology.hpp"

namespace thzloc {

enum class LocalizationMethod { tof, aoa, rss };

inline std::string_view to_string(LocalizationMethod m) {
    switch (m) {
        case LocalizationMethod::tof: return "tof";
        case LocalizationMethod::aoa: return "aoa";
        case LocalizationMethod::rss: return "rss";
    }
    return "tof";
}

/// One experiment. SI units throughout (m, s, J, C, Hz); powers in dBm,
/// attenuations in dB. Defaults reproduce the reference deployment.
struct SimConfig {
    // deployment
    std::size_t grid_rows = 25;
    std::size_t grid_cols = 25;
    double spacing = 9e-3;
    std::size_t anchor_count = 4;
    AnchorScheme anchor_scheme = AnchorScheme::corners;
    MobilityPattern mobility = MobilityPattern::random_box;
    double anchor_error_sigma = 0.0;

    // energy
    double generator_voltage = 0.42;
    double e_rx_pulse = 0.1e-12;
    double e_tx_pulse = 1.0e-12;
    double e_max = 800e-12;
    double turn_off_threshold = 10e-12;
    double turn_on_threshold = 10e-12;
    HarvesterSource harvester_source = HarvesterSource::air_vibration;
    std::optional<double> t_cycle;  // unset: the source's nominal cycle
    double delta_q_mean = 6e-12;
    double delta_q_std = 0.6e-12;
    ProfileKind consumption_profile = ProfileKind::receive_only;
    int packet_bits = 8;
    std::optional<double> initial_energy;  // unset: Uniform[0, e_max] per iteration
    bool harvesting_enabled = true;
    bool energy_accounting = true;

    // radio
    double p_tx = -20.0;
    double sensitivity = -110.0;
    double frequency = 1e12;
    double bandwidth = 1e12;
    double a_env = 0.0;
    int n_subbands = 64;
    AbsorptionTable absorption;
    std::string absorption_table;  // path the table was loaded from, if any

    // ranging and localization
    LocalizationMethod method = LocalizationMethod::tof;
    int k_pulses = 1;
    bool ranging_noise = true;
    double pulse_duration = 100e-15;
    double beta = 1000.0;
    double aoa_sigma_deg = 0.75;
    double rss_sigma_db = 0.3;
    double t_tr = 0.1e-6;

    // run
    std::size_t iterations = 1000;
    double update_period = 0.1;
    std::uint64_t master_seed = 1;

    double effective_t_cycle() const { return t_cycle.value_or(default_cycle_duration(harvester_source)); }

    HarvesterParams harvester() const {
        return {harvester_source, effective_t_cycle(), delta_q_mean, delta_q_std, generator_voltage};
    }

    ConsumptionProfile profile() const { return {consumption_profile, packet_bits, e_rx_pulse, e_tx_pulse}; }

    ChannelParams channel() const { return {frequency, bandwidth, a_env, absorption, n_subbands}; }

    TsookParams tsook() const { return {pulse_duration, beta, k_pulses}; }
};

inline void validate(const SimConfig& c) {
    auto require = [](bool ok, const char* field, const char* msg) {
        if (!ok) throw ConfigError(field, msg);
    };
    require(c.grid_rows >= 1, "grid_rows", "must be >= 1");
    require(c.grid_cols >= 1, "grid_cols", "must be >= 1");
    require(c.spacing > 0.0 && std::isfinite(c.spacing), "spacing", "must be > 0");
    require(c.anchor_count >= 4 && c.anchor_count <= 9, "anchor_count", "must be in [4, 9]");
    require(c.mobility == MobilityPattern::none || c.grid_cols >= 2, "mobility",
            "needs a grid at least 2 columns wide");
    require(c.anchor_error_sigma >= 0.0, "anchor_error_sigma", "must be >= 0");
    require(c.generator_voltage > 0.0, "generator_voltage", "must be > 0");
    require(c.e_rx_pulse >= 0.0, "e_rx_pulse", "must be >= 0");
    require(c.e_tx_pulse >= 0.0, "e_tx_pulse", "must be >= 0");
    require(c.e_max > 0.0, "e_max", "must be > 0");
    require(c.turn_off_threshold >= 0.0 && c.turn_off_threshold <= c.e_max, "turn_off_threshold",
            "must be in [0, e_max]");
    require(c.turn_on_threshold >= c.turn_off_threshold && c.turn_on_threshold <= c.e_max, "turn_on_threshold",
            "must be in [turn_off_threshold, e_max]");
    require(!c.t_cycle || *c.t_cycle > 0.0, "t_cycle", "must be > 0");
    require(c.delta_q_mean > 0.0, "delta_q_mean", "must be > 0");
    require(c.delta_q_std >= 0.0, "delta_q_std", "must be >= 0");
    require(c.packet_bits >= 1, "packet_bits", "must be >= 1");
    require(!c.initial_energy || (*c.initial_energy >= 0.0 && *c.initial_energy <= c.e_max), "initial_energy",
            "must be in [0, e_max]");
    require(std::isfinite(c.p_tx), "p_tx", "must be finite");
    require(std::isfinite(c.sensitivity), "sensitivity", "must be finite");
    require(c.frequency > 0.0, "frequency", "must be > 0");
    require(c.bandwidth > 0.0 && c.bandwidth < 2.0 * c.frequency, "bandwidth", "must be in (0, 2 * frequency)");
    require(c.a_env >= 0.0, "a_env", "must be >= 0");
    require(c.n_subbands >= 1, "n_subbands", "must be >= 1");
    require(c.k_pulses >= 1, "k_pulses", "must be >= 1");
    require(c.pulse_duration > 0.0, "pulse_duration", "must be > 0");
    require(c.beta >= 1.0, "beta", "must be >= 1");
    require(c.aoa_sigma_deg >= 0.0, "aoa_sigma_deg", "must be >= 0");
    require(c.rss_sigma_db >= 0.0, "rss_sigma_db", "must be >= 0");
    require(c.t_tr >= 0.0, "t_tr", "must be >= 0");
    require(c.iterations >= 1, "iterations", "must be >= 1");
    require(c.update_period >= 0.0 && std::isfinite(c.update_period), "update_period", "must be >= 0");
}

struct NodeOutcome {
    Position3 true_position;
    std::variant<LocationEstimate, FailureCause> result;

    bool localized() const noexcept { return std::holds_alternative<LocationEstimate>(result); }
};

struct IterationOutcome {
    std::size_t iteration = 0;
    std::vector<NodeOutcome> nodes;
};

/// Latency of localizing m nodes with n anchors and k pulses per exchange.
constexpr double latency_model(double m, double n, double k, double t_tof, double t_tr) noexcept {
    return m * (n * k * t_tof + t_tr);
}

/// One two-way exchange: propagation both ways plus one symbol slot each way.
inline double estimate_t_tof(const TsookParams& params, double max_distance) {
    params.validate();
    if (!(max_distance >= 0.0)) throw std::invalid_argument("estimate_t_tof: negative distance");
    return 2.0 * max_distance / kSpeedOfLight + 2.0 * params.beta * params.pulse_duration;
}

/// Validated config with the derived topology and channel, shared read-only
/// by all workers of a run.
class Simulation {
public:
    explicit Simulation(SimConfig config)
        : config_((validate(config), std::move(config))),
          topology_(place_anchors(build_grid(config_.grid_rows, config_.grid_cols, config_.spacing),
                                  config_.anchor_count, config_.anchor_scheme)),
          channel_(config_.channel()) {
        const double d = topology_.extent_d;
        solver_options_.fallback_guess = Position3{d / 2, d / 2, d / 4};
    }

    const SimConfig& config() const noexcept { return config_; }
    const Topology& topology() const noexcept { return topology_; }
    const ChannelModel& channel() const noexcept { return channel_; }

    /// Worst-case anchor distance inside the mobility box.
    double max_anchor_distance() const {
        const double d = topology_.extent_d;
        if (config_.mobility == MobilityPattern::none) {
            double worst = 0.0;
            for (const auto& n : topology_.node_positions)
                for (const auto& a : topology_.anchor_positions) worst = std::max(worst, distance(n, a));
            return worst;
        }
        return std::sqrt(d * d + d * d + 0.25 * d * d);
    }

    AnchorSet anchors_for(std::size_t iteration) const {
        auto exact = AnchorSet::exact(topology_.anchor_positions);
        if (config_.anchor_error_sigma == 0.0) return exact;
        auto rng = RandomStream::for_iteration(config_.master_seed, iteration, StreamPurpose::anchor_error);
        return inject_anchor_error(exact, config_.anchor_error_sigma, rng);
    }

    NodeOutcome run_node(std::size_t iteration, std::size_t node, const AnchorSet& anchors) const {
        const auto& cfg = config_;
        const auto seed = cfg.master_seed;
        NodeOutcome out;
        auto mobility_rng = RandomStream::for_node(seed, iteration, node, StreamPurpose::mobility);
        out.true_position = displace_node(topology_.node_positions[node], topology_.extent_d, cfg.mobility, mobility_rng);

        const std::size_t n_anchors = anchors.positions.size();
        std::optional<EnergyState> energy;
        if (cfg.energy_accounting) {
            auto energy_rng = RandomStream::for_node(seed, iteration, node, StreamPurpose::initial_energy);
            const double e0 = cfg.initial_energy.value_or(energy_rng.uniform(0.0, cfg.e_max));
            EnergyState state =
                EnergyState::make(cfg.e_max, cfg.generator_voltage, cfg.turn_off_threshold, cfg.turn_on_threshold, e0);
            if (cfg.harvesting_enabled) {
                auto harvest_rng = RandomStream::for_node(seed, iteration, node, StreamPurpose::harvesting);
                state = harvest(state, cfg.update_period, cfg.harvester(), harvest_rng);
            }
            auto bits_rng = RandomStream::for_node(seed, iteration, node, StreamPurpose::operational_bits);
            const auto profile = cfg.profile();
            const int n = static_cast<int>(n_anchors);
            for (Phase phase : {Phase::operational, Phase::announcement}) {
                auto r = consume(state, phase_cost(profile, phase, n, cfg.k_pulses, bits_rng));
                state = r.state;
                if (r.depleted) {
                    out.result = FailureCause::energy_depleted;
                    return out;
                }
            }
            energy = state;
        }

        const double per_anchor_cost = cfg.k_pulses * (cfg.e_rx_pulse + cfg.e_tx_pulse);
        auto noise_rng = RandomStream::for_node(seed, iteration, node, StreamPurpose::ranging_noise);
        const double ranging_bandwidth = cfg.ranging_noise ? cfg.bandwidth : std::numeric_limits<double>::infinity();
        const double aoa_sigma = cfg.ranging_noise ? cfg.aoa_sigma_deg * kPi / 180.0 : 0.0;
        const double rss_sigma = cfg.ranging_noise ? cfg.rss_sigma_db : 0.0;

        std::vector<double> ranges;
        std::vector<Bearing> bearings;
        ranges.reserve(n_anchors);
        bearings.reserve(n_anchors);
        bool out_of_range = false;
        for (std::size_t a = 0; a < n_anchors; ++a) {
            const Position3& anchor = anchors.positions[a];
            const double d = distance(out.true_position, anchor);
            if (d > 0.0) {
                // reciprocal channel and equal transmit power: one check covers both directions
                if (!link_ok(channel_.received_power_dbm(cfg.p_tx, d), cfg.sensitivity)) {
                    out_of_range = true;
                    continue;
                }
            }
            if (energy) {
                auto r = consume(*energy, per_anchor_cost);
                *energy = r.state;
                if (r.depleted) {
                    out.result = FailureCause::energy_depleted;
                    return out;
                }
            }
            switch (cfg.method) {
                case LocalizationMethod::tof:
                    ranges.push_back(measure_two_way_tof(d, ranging_bandwidth, cfg.k_pulses, noise_rng));
                    break;
                case LocalizationMethod::rss:
                    ranges.push_back(d > 0.0 ? measure_rss_distance(d, channel_, cfg.p_tx, rss_sigma, noise_rng)
                                             : kMinRange);
                    break;
                case LocalizationMethod::aoa:
                    bearings.push_back(measure_aoa(bearing_between(anchor, out.true_position), aoa_sigma, noise_rng));
                    break;
            }
        }
        if (out_of_range) {
            out.result = FailureCause::out_of_range;
            return out;
        }
        if (cfg.method == LocalizationMethod::aoa)
            out.result = aoa_triangulate(anchors, bearings);
        else
            out.result = trilaterate(anchors, ranges, solver_options_);
        return out;
    }

    IterationOutcome run_iteration(std::size_t iteration) const {
        IterationOutcome out;
        out.iteration = iteration;
        const AnchorSet anchors = anchors_for(iteration);
        out.nodes.reserve(topology_.node_positions.size());
        for (std::size_t n = 0; n < topology_.node_positions.size(); ++n) out.nodes.push_back(run_node(iteration, n, anchors));
        return out;
    }

private:
    SimConfig config_;
    Topology topology_;
    ChannelModel channel_;
    TrilaterationOptions solver_options_;
};

inline IterationOutcome run_iteration(const SimConfig& config, std::size_t iteration) {
    return Simulation(config).run_iteration(iteration);
}

inline void accumulate(MetricsAccumulator& acc, const IterationOutcome& outcome) {
    for (const auto& n : outcome.nodes) {
        if (const auto* est = std::get_if<LocationEstimate>(&n.result))
            acc.add_success(localization_error(n.true_position, *est));
        else
            acc.add_failure(std::get<FailureCause>(n.result));
    }
}

/// Aggregate of all iterations. `samples` holds every error in
/// (iteration, node) order.
struct ExperimentResult {
    MetricsSummary summary;
    std::vector<double> samples;
};

/// 0 means one worker per hardware thread.
inline unsigned resolve_workers(unsigned workers) {
    if (workers > 0) return workers;
    return std::max(1u, std::thread::hardware_concurrency());
}

inline ExperimentResult run_experiment_detailed(const SimConfig& config, unsigned workers = 0) {
    const Simulation sim(config);
    const std::size_t iterations = sim.config().iterations;
    std::vector<MetricsAccumulator> per_iteration(iterations);
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto work = [&] {
        try {
            for (std::size_t i = next++; i < iterations; i = next++) accumulate(per_iteration[i], sim.run_iteration(i));
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = iterations;
        }
    };
    const unsigned n = std::min<std::size_t>(resolve_workers(workers), iterations);
    if (n <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < n; ++w) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);
    MetricsAccumulator total;
    for (const auto& acc : per_iteration) total.merge(acc);
    return {total.finish(), total.errors()};
}

inline MetricsSummary run_experiment(const SimConfig& config, unsigned workers = 0) {
    return run_experiment_detailed(config, workers).summary;
}

}  // namespace thzloc
