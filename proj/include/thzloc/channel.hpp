#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "thzloc/errors.hpp"

namespace thzloc {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s
inline constexpr double kPi = 3.14159265358979323846;

/// Medium absorption coefficient k(f) sampled at increasing frequencies.
/// Empty means vacuum (k = 0 everywhere).
class AbsorptionTable {
public:
    AbsorptionTable() = default;

    explicit AbsorptionTable(std::vector<std::pair<double, double>> entries) : entries_(std::move(entries)) {
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            const auto [f, k] = entries_[i];
            if (!(f > 0.0) || !std::isfinite(f)) throw std::invalid_argument("absorption table: frequency must be positive");
            if (!(k >= 0.0) || !std::isfinite(k)) throw std::invalid_argument("absorption table: k must be >= 0");
            if (i > 0 && !(f > entries_[i - 1].first))
                throw std::invalid_argument("absorption table: frequencies must be strictly increasing");
        }
    }

    bool empty() const noexcept { return entries_.empty(); }
    const std::vector<std::pair<double, double>>& entries() const noexcept { return entries_; }

    /// Linear interpolation, clamped to the end entries outside the table.
    double coefficient(double f) const noexcept {
        if (entries_.empty()) return 0.0;
        if (f <= entries_.front().first) return entries_.front().second;
        if (f >= entries_.back().first) return entries_.back().second;
        auto hi = std::upper_bound(entries_.begin(), entries_.end(), f,
                                   [](double v, const auto& e) { return v < e.first; });
        auto lo = hi - 1;
        const double t = (f - lo->first) / (hi->first - lo->first);
        return lo->second + t * (hi->second - lo->second);
    }

    friend bool operator==(const AbsorptionTable&, const AbsorptionTable&) = default;

private:
    std::vector<std::pair<double, double>> entries_;
};

inline double absorption_coefficient(const AbsorptionTable& table, double f) {
    if (!(f > 0.0)) throw std::invalid_argument("absorption_coefficient: frequency must be positive");
    return table.coefficient(f);
}

/// Reads "frequency_hz k_per_m" pairs, one per line; '#' starts a comment.
inline AbsorptionTable parse_absorption_table(std::istream& in) {
    std::vector<std::pair<double, double>> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double f = 0.0, k = 0.0;
        if (!(ls >> f)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw ConfigError("absorption_table", "line " + std::to_string(lineno) + ": expected 'frequency_hz k_per_m'");
        }
        std::string rest;
        if (!(ls >> k) || (ls >> rest))
            throw ConfigError("absorption_table", "line " + std::to_string(lineno) + ": expected 'frequency_hz k_per_m'");
        entries.emplace_back(f, k);
    }
    try {
        return AbsorptionTable(std::move(entries));
    } catch (const std::invalid_argument& e) {
        throw ConfigError("absorption_table", e.what());
    }
}

inline AbsorptionTable load_absorption_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("absorption_table", "cannot open '" + path + "'");
    return parse_absorption_table(in);
}

/// Absorption plus spreading loss in dB at a single frequency.
inline double path_loss_db(double d, double f, double k) {
    if (!(d > 0.0)) throw std::invalid_argument("path_loss_db: distance must be positive");
    if (!(f > 0.0)) throw std::invalid_argument("path_loss_db: frequency must be positive");
    if (!(k >= 0.0)) throw std::invalid_argument("path_loss_db: absorption must be >= 0");
    return k * d * 10.0 * std::log10(std::exp(1.0)) + 20.0 * std::log10(4.0 * kPi * f * d / kSpeedOfLight);
}

struct ChannelParams {
    double center_frequency = 1e12;  // Hz
    double bandwidth = 1e12;         // Hz
    double env_attenuation_db = 0.0;
    AbsorptionTable absorption;
    int n_subbands = 64;

    void validate() const {
        if (!(center_frequency > 0.0)) throw ConfigError("frequency", "must be > 0");
        if (!(bandwidth > 0.0) || !(bandwidth < 2.0 * center_frequency))
            throw ConfigError("bandwidth", "must satisfy 0 < bandwidth < 2 * frequency");
        if (!(env_attenuation_db >= 0.0)) throw ConfigError("a_env", "must be >= 0");
        if (n_subbands < 1) throw ConfigError("n_subbands", "must be >= 1");
    }
};

/// Attenuation equivalent to the mean linear power gain over equal sub-bands.
inline double band_attenuation_db(double d, const ChannelParams& params) {
    if (!(d > 0.0)) throw std::invalid_argument("band_attenuation_db: distance must be positive");
    const int n = params.n_subbands;
    const double lo = params.center_frequency - params.bandwidth / 2.0;
    const double width = params.bandwidth / n;
    if (n == 1)
        return path_loss_db(d, params.center_frequency, params.absorption.coefficient(params.center_frequency));
    double gain_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double f = lo + (i + 0.5) * width;
        gain_sum += std::pow(10.0, -path_loss_db(d, f, params.absorption.coefficient(f)) / 10.0);
    }
    return -10.0 * std::log10(gain_sum / n);
}

inline double received_power_dbm(double p_tx_dbm, double d, const ChannelParams& params) {
    return p_tx_dbm - band_attenuation_db(d, params) - params.env_attenuation_db;
}

/// Inclusive at the boundary.
constexpr bool link_ok(double p_rx_dbm, double sensitivity_dbm) noexcept { return p_rx_dbm >= sensitivity_dbm; }

/// band_attenuation_db with the per-sub-band frequencies and absorption
/// coefficients evaluated once, for the simulator's inner loop.
class ChannelModel {
public:
    explicit ChannelModel(ChannelParams params) : params_(std::move(params)) {
        params_.validate();
        const int n = params_.n_subbands;
        const double lo = params_.center_frequency - params_.bandwidth / 2.0;
        const double width = params_.bandwidth / n;
        for (int i = 0; i < n; ++i) {
            const double f = n == 1 ? params_.center_frequency : lo + (i + 0.5) * width;
            const double k = params_.absorption.coefficient(f);
            inv_f2_.push_back(1.0 / (f * f));
            k_.push_back(k);
            any_absorption_ = any_absorption_ || k > 0.0;
            inv_f2_mean_ += 1.0 / (f * f) / n;
        }
    }

    const ChannelParams& params() const noexcept { return params_; }

    double attenuation_db(double d) const {
        if (!(d > 0.0)) throw std::invalid_argument("attenuation_db: distance must be positive");
        const double spread = kSpeedOfLight / (4.0 * kPi * d);
        double mean = 0.0;
        if (!any_absorption_) {
            mean = inv_f2_mean_;
        } else {
            for (std::size_t i = 0; i < k_.size(); ++i) mean += std::exp(-k_[i] * d) * inv_f2_[i];
            mean /= static_cast<double>(k_.size());
        }
        return -10.0 * std::log10(spread * spread * mean);
    }

    double received_power_dbm(double p_tx_dbm, double d) const {
        return p_tx_dbm - attenuation_db(d) - params_.env_attenuation_db;
    }

private:
    ChannelParams params_;
    std::vector<double> inv_f2_;
    std::vector<double> k_;
    double inv_f2_mean_ = 0.0;
    bool any_absorption_ = false;
};

}  // namespace thzloc
