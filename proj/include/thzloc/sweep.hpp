#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thzloc/config.hpp"
#include "thzloc/simulator.hpp"

namespace thzloc {

/// One experiment of a sweep and the value/seed that produced it.
struct SweepPoint {
    std::string axis;
    json value;
    std::uint64_t seed = 0;
    MetricsSummary summary;
    std::vector<double> samples;
};

enum class SeedPolicy {
    derived,  // each point gets derive_point_seed(master, index)
    common,   // every point reuses the master seed (common random numbers)
};

struct SweepOptions {
    unsigned workers = 0;
    SeedPolicy seeds = SeedPolicy::derived;
    bool keep_samples = false;
};

/// Runs one experiment per value of `axis`, everything else taken from `base`.
inline std::vector<SweepPoint> sweep(const SimConfig& base, const std::string& axis, const std::vector<json>& values,
                                     const SweepOptions& options = {}) {
    std::vector<SimConfig> configs;
    for (std::size_t i = 0; i < values.size(); ++i) {
        SimConfig cfg = base;
        apply_field(cfg, axis, values[i]);
        cfg.master_seed =
            options.seeds == SeedPolicy::derived ? derive_point_seed(base.master_seed, i) : base.master_seed;
        validate(cfg);
        configs.push_back(std::move(cfg));
    }
    std::vector<SweepPoint> points;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        auto result = run_experiment_detailed(configs[i], options.workers);
        SweepPoint p{axis, values[i], configs[i].master_seed, std::move(result.summary), {}};
        if (options.keep_samples) p.samples = std::move(result.samples);
        points.push_back(std::move(p));
    }
    return points;
}

/// ToF, AoA and RSS localization on identical seeds and geometry, with
/// energy accounting switched off.
inline std::vector<SweepPoint> compare_methods(const SimConfig& base, const SweepOptions& options = {}) {
    SimConfig cfg = base;
    cfg.energy_accounting = false;
    SweepOptions opts = options;
    opts.seeds = SeedPolicy::common;
    return sweep(cfg, "method", {json("tof"), json("aoa"), json("rss")}, opts);
}

struct LatencyRow {
    double m = 0, n = 0, k = 0;
    double t_tof = 0, t_tr = 0;
    double t_loc = 0;
};

inline std::vector<LatencyRow> latency_table(const std::vector<double>& ms, const std::vector<double>& ns,
                                             const std::vector<double>& ks, double t_tof, double t_tr) {
    std::vector<LatencyRow> rows;
    for (double m : ms)
        for (double n : ns)
            for (double k : ks) {
                if (m < 0 || n < 0 || k < 0 || t_tof < 0 || t_tr < 0)
                    throw std::invalid_argument("latency_table: all inputs must be >= 0");
                rows.push_back({m, n, k, t_tof, t_tr, latency_model(m, n, k, t_tof, t_tr)});
            }
    return rows;
}

}  // namespace thzloc
