// Full-scale acceptance suite: one PASS/FAIL line per criterion P1..P11,
// each experiment at 625 nodes x 1000 iterations. Exit status is non-zero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "../support/grid_oracle.hpp"
#include "thzloc/thzloc.hpp"

using namespace thzloc;

namespace {

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [violated: " << what << "]";
        }
    }
};

int failures = 0;

void report(const char* id, Verdict& v) {
    std::printf("%s %s%s\n", id, v.pass ? "PASS" : "FAIL", v.detail.str().c_str());
    std::fflush(stdout);
    if (!v.pass) ++failures;
}

std::string mm(double m) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3fmm", m * 1e3);
    return buf;
}

std::string pct(double a) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", a);
    return buf;
}

std::vector<SweepPoint> run_sweep(const std::string& axis, const std::vector<json>& values,
                                  const SimConfig& base = {}) {
    return sweep(base, axis, values);
}

void p1_p2(const MetricsSummary& s) {
    Verdict p1;
    p1.detail << " median=" << mm(s.median) << " p95=" << mm(s.whisker_high);
    p1.require(s.median < 1e-3, "median < 1 mm");
    p1.require(s.whisker_high < 12e-3, "p95 < 12 mm");
    report("P1", p1);

    Verdict p2;
    p2.detail << " availability=" << pct(s.availability) << " depleted=" << s.failures.energy_depleted
              << " out_of_range=" << s.failures.out_of_range;
    p2.require(s.availability >= 0.85 && s.availability <= 0.95, "availability in [0.85, 0.95]");
    report("P2", p2);
}

void p3() {
    const auto pts = run_sweep("delta_q_mean", {json(2e-12), json(4e-12), json(6e-12), json(8e-12), json(10e-12)});
    Verdict v;
    const double gain = pts.back().summary.availability - pts.front().summary.availability;
    v.detail << " availability(2pC)=" << pct(pts.front().summary.availability)
             << " availability(10pC)=" << pct(pts.back().summary.availability) << " gain=" << pct(gain);
    v.require(gain >= 0.05 && gain <= 0.15, "gain in [0.05, 0.15]");
    double lo = 1e9, hi = 0;
    for (const auto& p : pts) lo = std::min(lo, p.summary.median), hi = std::max(hi, p.summary.median);
    const double ref = pts[2].summary.median;
    v.detail << " median range=[" << mm(lo) << ", " << mm(hi) << "]";
    v.require(hi <= 1.2 * ref && lo >= 0.8 * ref, "median within +-20% across the sweep");
    report("P3", v);
}

void p4() {
    const auto pts = run_sweep("update_period", {json(0.02), json(0.26)});
    Verdict v;
    const double a20 = pts[0].summary.availability, a260 = pts[1].summary.availability;
    v.detail << " availability(20ms)=" << pct(a20) << " availability(260ms)=" << pct(a260);
    v.require(std::abs(a20 - 0.80) <= 0.05, "availability(20 ms) = 0.80 +- 0.05");
    v.require(a260 >= 0.99, "availability(260 ms) >= 0.99");
    report("P4", v);
}

void p5() {
    const auto pts = run_sweep("bandwidth", {json(0.1e12), json(1e12)});
    Verdict v;
    const auto& lo = pts[0].summary;
    const auto& hi = pts[1].summary;
    v.detail << " median(0.1THz)=" << mm(lo.median) << " median(1THz)=" << mm(hi.median)
             << " availability=" << pct(lo.availability) << "/" << pct(hi.availability);
    v.require(lo.median >= 4e-3 && lo.median <= 6e-3, "median(0.1 THz) in [4, 6] mm");
    v.require(hi.median < 1e-3, "median(1 THz) < 1 mm");
    v.require(std::abs(lo.availability - hi.availability) <= 0.02, "availability flat within 2 points");
    report("P5", v);
}

void p6() {
    const auto pts = run_sweep("k_pulses", {json(1), json(2), json(3)});
    Verdict v;
    const double p95_1 = pts[0].summary.whisker_high, p95_3 = pts[2].summary.whisker_high;
    v.detail << " p95(k=1)=" << mm(p95_1) << " p95(k=3)=" << mm(p95_3) << " availability(k=1,2,3)="
             << pct(pts[0].summary.availability) << "," << pct(pts[1].summary.availability) << ","
             << pct(pts[2].summary.availability);
    v.require(p95_3 >= 6.5e-3 && p95_3 <= 9.5e-3, "p95(k=3) in [6.5, 9.5] mm");
    v.require(p95_1 >= 10.5e-3 && p95_1 <= 13.5e-3, "p95(k=1) in [10.5, 13.5] mm");
    for (std::size_t i = 1; i < pts.size(); ++i)
        v.require(pts[i].summary.availability <= pts[i - 1].summary.availability,
                  "availability non-increasing in k");
    report("P6", v);
}

void p7() {
    const auto pts = run_sweep("anchor_error_sigma", {json(0.8e-3)});
    Verdict v;
    const auto& s = pts[0].summary;
    v.detail << " median=" << mm(s.median) << " p95=" << mm(s.whisker_high);
    v.require(s.median >= 1.5e-3 && s.median <= 2.5e-3, "median in [1.5, 2.5] mm");
    v.require(s.whisker_high >= 16e-3 && s.whisker_high <= 24e-3, "p95 in [16, 24] mm");
    report("P7", v);
}

void p8() {
    std::vector<json> values;
    for (int db = 0; db <= 12; ++db) values.push_back(json(static_cast<double>(db)));
    const auto pts = run_sweep("a_env", values);
    Verdict v;
    const double base = pts[0].summary.availability;
    v.detail << " availability(A_ENV=0..12dB)=";
    for (std::size_t i = 0; i < pts.size(); ++i) v.detail << (i ? "," : "") << pct(pts[i].summary.availability);
    for (int db = 0; db <= 6; ++db)
        v.require(std::abs(pts[db].summary.availability - base) <= 0.02, "flat within 2 points up to 6 dB");
    double lowest = 1.0;
    for (int db = 7; db <= 12; ++db) lowest = std::min(lowest, pts[db].summary.availability);
    v.require(lowest <= base - 0.20, "drop of >= 20 points within [7, 12] dB");
    report("P8", v);
}

void p9() {
    Verdict v;
    const std::vector<json> profiles{json("receive_only"), json("transmit_only"), json("transmit_sensing"),
                                     json("transmit_actuation")};
    SimConfig rf;
    rf.harvester_source = HarvesterSource::rf_power;
    const auto rf_pts = run_sweep("consumption_profile", profiles, rf);
    const auto air_pts = run_sweep("consumption_profile", profiles);
    v.detail << " rf=";
    for (std::size_t i = 0; i < rf_pts.size(); ++i) {
        v.detail << (i ? "," : "") << pct(rf_pts[i].summary.availability);
        v.require(rf_pts[i].summary.availability >= 0.99, "rf availability >= 0.99 for every profile");
    }
    v.detail << " air=";
    for (std::size_t i = 0; i < air_pts.size(); ++i) v.detail << (i ? "," : "") << pct(air_pts[i].summary.availability);
    const double ta = air_pts[3].summary.availability;
    v.require(ta >= 0.30 && ta <= 0.50, "air transmit+actuation availability in [0.30, 0.50]");
    report("P9", v);
}

void p10() {
    const auto pts = compare_methods(SimConfig{});
    Verdict v;
    const double tof = pts[0].summary.median, aoa = pts[1].summary.median, rss = pts[2].summary.median;
    v.detail << " median tof=" << mm(tof) << " aoa=" << mm(aoa) << " rss=" << mm(rss)
             << " ratios=" << aoa / tof << "," << rss / tof;
    v.require(10 * tof < std::min(aoa, rss), "10 x ToF median < min(AoA, RSS)");
    report("P10", v);
}

void p11(const SimConfig& defaults, const ExperimentResult& default_run) {
    Verdict v;
    const std::vector<Position3> corners{{0, 0, 0}, {0.216, 0, 0}, {0, 0.216, 0}, {0.216, 0.216, 0}};
    const double d = 0.216;

    // zero-noise recovery
    double worst = 0;
    RandomStream rng(2024);
    for (int i = 0; i < 10000; ++i) {
        const Position3 p{rng.uniform(0, d), rng.uniform(0, d), rng.uniform(0, d / 2)};
        std::vector<double> r;
        for (const auto& a : corners) r.push_back(distance(a, p));
        worst = std::max(worst, distance(trilaterate(corners, r).position, p));
    }
    v.detail << " zero_noise_max=" << worst;
    v.require(worst < 1e-9, "zero-noise recovery < 1e-9 m");

    // charging curve round trip and monotonicity
    const auto state = EnergyState::make(800e-12, 0.42, 10e-12, 10e-12, 0.0);
    bool monotone = true, round_trip = true;
    double prev = -1;
    for (std::uint64_t n = 0; n < 6000; ++n) {
        const double e = energy_after_cycles(n, state, 6e-12, 0.42);
        if (e < state.capacity) {
            monotone &= state.capacity - e > 1e-12 * state.capacity ? e > prev : e >= prev;
            const auto idx = cycle_index(e, state, 6e-12, 0.42);
            round_trip &= idx && *idx <= n + 1 && energy_after_cycles(*idx, state, 6e-12, 0.42) >= e * (1 - 1e-12);
        }
        prev = e;
    }
    v.require(monotone, "charging curve strictly increasing");
    v.require(round_trip, "cycle index / energy round trip");

    // ToF noise std
    double sum = 0, sq = 0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const double x = measure_two_way_tof(0.1, 1e12, 1, rng) - 0.1;
        sum += x;
        sq += x * x;
    }
    const double sd = std::sqrt(sq / draws - std::pow(sum / draws, 2));
    v.detail << " tof_std/(c/B)=" << sd / (kSpeedOfLight / 1e12);
    v.require(std::abs(sd / (kSpeedOfLight / 1e12) - 1) <= 0.05, "ToF std = c/B +- 5%");

    // latency substitution
    v.require(latency_model(625, 4, 3, 1e-6, 0.1e-6) == 625 * (4 * 3 * 1e-6 + 0.1e-6), "latency substitution");
    v.require(std::abs(latency_model(625, 4, 3, 1e-6, 0.1e-6) - 7.5625e-3) < 1e-15, "latency 7.5625 ms");

    // worker-count determinism at full scale
    const auto eight = run_experiment_detailed(defaults, 8);
    std::ostringstream a, b;
    write_summary_csv(a, {make_row("none", "", defaults.master_seed, default_run.summary)});
    write_summary_csv(b, {make_row("none", "", defaults.master_seed, eight.summary)});
    v.require(a.str() == b.str() && default_run.samples == eight.samples, "identical results for 1 and 8 workers");

    // lattice oracle never beats the solver
    int oracle_wins = 0;
    RandomStream inst(77);
    for (int i = 0; i < 100; ++i) {
        const Position3 p{inst.uniform(0, d), inst.uniform(0, d), inst.uniform(0, d / 2)};
        std::vector<double> r;
        for (const auto& a : corners) r.push_back(std::max(distance(a, p) + inst.normal(0, kSpeedOfLight / 1e12), kMinRange));
        const auto est = trilaterate(corners, r);
        double cost = 0;
        for (std::size_t k = 0; k < 4; ++k) cost += std::pow(distance(est.position, corners[k]) - r[k], 2);
        const auto grid = oracle::lattice_minimum(corners, r, {0, 0, 0}, {d, d, d / 2}, 0.5e-3);
        if (grid.cost * (1 + 1e-12) + 1e-30 < cost) ++oracle_wins;
    }
    v.detail << " oracle_wins=" << oracle_wins << "/100";
    v.require(oracle_wins == 0, "grid oracle never beats the solver objective");
    report("P11", v);
}

}  // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    const SimConfig defaults;
    const auto default_run = run_experiment_detailed(defaults, 1);
    p1_p2(default_run.summary);
    p3();
    p4();
    p5();
    p6();
    p7();
    p8();
    p9();
    p10();
    p11(defaults, default_run);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("acceptance: %d of 11 criteria failed (%.0f s)\n", failures, secs);
    return failures == 0 ? 0 : 1;
}
