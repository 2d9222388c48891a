#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string_view>

namespace thzloc {

enum class HarvesterSource { air_vibration, rf_power };

inline std::string_view to_string(HarvesterSource s) {
    return s == HarvesterSource::air_vibration ? "air_vibration" : "rf_power";
}

/// Nominal compress-and-release cycle duration of each source, seconds.
constexpr double default_cycle_duration(HarvesterSource s) noexcept {
    return s == HarvesterSource::air_vibration ? 20e-3 : 1.71e-3;
}

struct HarvesterParams {
    HarvesterSource source = HarvesterSource::air_vibration;
    double t_cycle = 20e-3;          // s
    double delta_q_mean = 6e-12;     // C
    double delta_q_std = 0.6e-12;    // C
    double generator_voltage = 0.42; // V
};

/// C_cap = 2 E_max / V_g^2.
inline double capacitance(double e_max, double v_g) {
    if (!(e_max > 0.0)) throw std::invalid_argument("capacitance: e_max must be positive");
    if (!(v_g > 0.0)) throw std::invalid_argument("capacitance: generator voltage must be positive");
    return 2.0 * e_max / (v_g * v_g);
}

/// Capacitor charge of one nanonode with turn-off/turn-on hysteresis.
struct EnergyState {
    double energy = 0.0;       // J
    double capacity = 0.0;     // J, E_max
    double capacitance = 0.0;  // F
    bool is_on = false;
    double turn_off_threshold = 0.0;  // J
    double turn_on_threshold = 0.0;   // J

    static EnergyState make(double e_max, double v_g, double turn_off, double turn_on, double initial_energy) {
        if (turn_on < turn_off) throw std::invalid_argument("EnergyState: turn-on threshold below turn-off threshold");
        if (!(initial_energy >= 0.0) || initial_energy > e_max)
            throw std::invalid_argument("EnergyState: initial energy outside [0, E_max]");
        EnergyState s;
        s.capacity = e_max;
        s.capacitance = thzloc::capacitance(e_max, v_g);
        s.energy = initial_energy;
        s.turn_off_threshold = turn_off;
        s.turn_on_threshold = turn_on;
        s.is_on = initial_energy >= turn_on;
        return s;
    }
};

/// Harvesting cycle the capacitor is in at energy `e`, rounded up.
/// Returns nullopt once the capacitor is saturated (e >= E_max).
inline std::optional<std::uint64_t> cycle_index(double e, const EnergyState& state, double delta_q, double v_g) {
    if (e < 0.0) throw std::invalid_argument("cycle_index: negative energy");
    if (!(delta_q > 0.0)) throw std::invalid_argument("cycle_index: delta_q must be positive");
    if (e >= state.capacity) return std::nullopt;
    const double s = std::sqrt(2.0 * e / (state.capacitance * v_g * v_g));
    if (s >= 1.0) return std::nullopt;
    const double cycles = -v_g * state.capacitance / delta_q * std::log1p(-s);
    return static_cast<std::uint64_t>(std::ceil(cycles));
}

/// Capacitor energy after `n` cycles of charge `delta_q`, clamped to [0, E_max].
inline double energy_after_cycles(std::uint64_t n, const EnergyState& state, double delta_q, double v_g) {
    const double full = state.capacitance * v_g * v_g / 2.0;
    const double charge = -std::expm1(-delta_q * static_cast<double>(n) / (v_g * state.capacitance));
    return std::clamp(full * charge * charge, 0.0, state.capacity);
}

/// Runs floor(elapsed / t_cycle) whole cycles, each with its own Gaussian
/// charge truncated at zero. A node that is off turns back on once it
/// reaches the turn-on threshold.
template <class Rng>
EnergyState harvest(EnergyState state, double elapsed, const HarvesterParams& params, Rng& rng) {
    if (elapsed < 0.0) throw std::invalid_argument("harvest: negative elapsed time");
    if (!(params.t_cycle > 0.0)) throw std::invalid_argument("harvest: t_cycle must be positive");
    // Tolerates periods that are whole multiples of t_cycle up to rounding.
    const auto cycles = static_cast<std::uint64_t>(std::floor(elapsed / params.t_cycle + 1e-9));
    for (std::uint64_t c = 0; c < cycles; ++c) {
        double dq = params.delta_q_mean;
        if (params.delta_q_std > 0.0) dq = std::normal_distribution<double>(params.delta_q_mean, params.delta_q_std)(rng);
        if (dq <= 0.0) continue;
        const auto n = cycle_index(state.energy, state, dq, params.generator_voltage);
        if (!n) {
            state.energy = state.capacity;
            continue;
        }
        state.energy = std::max(state.energy, energy_after_cycles(*n + 1, state, dq, params.generator_voltage));
    }
    if (!state.is_on && state.energy >= state.turn_on_threshold) state.is_on = true;
    return state;
}

struct ConsumeResult {
    EnergyState state;
    bool depleted = false;
};

/// Charges `amount` atomically: an operation that would take the node below
/// its turn-off threshold is not executed and switches the node off.
inline ConsumeResult consume(EnergyState state, double amount) {
    if (amount < 0.0) throw std::invalid_argument("consume: negative amount");
    if (state.is_on && state.energy - amount >= state.turn_off_threshold) {
        state.energy -= amount;
        return {state, false};
    }
    state.is_on = false;
    return {state, true};
}

enum class ProfileKind { receive_only, transmit_only, transmit_sensing, transmit_actuation };

inline std::string_view to_string(ProfileKind k) {
    switch (k) {
        case ProfileKind::receive_only: return "receive_only";
        case ProfileKind::transmit_only: return "transmit_only";
        case ProfileKind::transmit_sensing: return "transmit_sensing";
        case ProfileKind::transmit_actuation: return "transmit_actuation";
    }
    return "receive_only";
}

struct ConsumptionProfile {
    ProfileKind kind = ProfileKind::receive_only;
    int packet_bits = 8;
    double e_rx_pulse = 0.1e-12;  // J
    double e_tx_pulse = 1.0e-12;  // J

    /// Expected cost of transmitting one packet of uniform random bits.
    double expected_packet_tx() const noexcept { return packet_bits / 2.0 * e_tx_pulse; }
    double sensing_cost() const noexcept { return expected_packet_tx() / 2.0; }
    double actuation_cost() const noexcept { return expected_packet_tx(); }
};

enum class Phase { operational, announcement, ranging };

/// Pulses in the localization-announcement codeword.
inline constexpr int kAnnouncementPulses = 3;

/// Energy a nanonode spends in one phase. Only pulses (logical 1) cost
/// energy; silences are free.
template <class Rng>
double phase_cost(const ConsumptionProfile& profile, Phase phase, int n_anchors, int k_pulses, Rng& rng) {
    if (n_anchors < 1) throw std::invalid_argument("phase_cost: n_anchors must be >= 1");
    if (k_pulses < 1) throw std::invalid_argument("phase_cost: k_pulses must be >= 1");
    switch (phase) {
        case Phase::announcement:
            return kAnnouncementPulses * profile.e_rx_pulse;
        case Phase::ranging:
            return static_cast<double>(n_anchors) * k_pulses * (profile.e_rx_pulse + profile.e_tx_pulse);
        case Phase::operational: {
            std::uniform_int_distribution<int> bit(0, 1);
            int ones = 0;
            for (int b = 0; b < profile.packet_bits; ++b) ones += bit(rng);
            switch (profile.kind) {
                case ProfileKind::receive_only: return ones * profile.e_rx_pulse;
                case ProfileKind::transmit_only: return ones * profile.e_tx_pulse;
                case ProfileKind::transmit_sensing: return ones * profile.e_tx_pulse + profile.sensing_cost();
                case ProfileKind::transmit_actuation: return ones * profile.e_tx_pulse + profile.actuation_cost();
            }
        }
    }
    return 0.0;
}

}  // namespace thzloc
