#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace thzloc {

enum class FailureCause { energy_depleted, out_of_range };

struct FailureCounts {
    std::size_t energy_depleted = 0;
    std::size_t out_of_range = 0;

    std::size_t total() const noexcept { return energy_depleted + out_of_range; }
    friend bool operator==(const FailureCounts&, const FailureCounts&) = default;
};

/// Boxplot descriptors of the localization error plus service availability.
/// Error fields are NaN when there were no successful estimates.
struct MetricsSummary {
    std::size_t count = 0;
    double mean = std::numeric_limits<double>::quiet_NaN();
    double median = std::numeric_limits<double>::quiet_NaN();
    double q1 = std::numeric_limits<double>::quiet_NaN();
    double q3 = std::numeric_limits<double>::quiet_NaN();
    double whisker_low = std::numeric_limits<double>::quiet_NaN();   // p5
    double whisker_high = std::numeric_limits<double>::quiet_NaN();  // p95
    std::vector<double> outliers;
    double availability = std::numeric_limits<double>::quiet_NaN();
    FailureCounts failures;
};

/// Percentile of sorted data by linear interpolation between closest ranks
/// (position (n - 1) * q).
inline double percentile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("percentile: empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Error descriptors of `errors`; leaves availability and failures untouched.
inline MetricsSummary boxplot_stats(std::vector<double> errors) {
    if (errors.empty()) throw std::invalid_argument("boxplot_stats: empty error list");
    std::sort(errors.begin(), errors.end());
    MetricsSummary s;
    s.count = errors.size();
    double sum = 0.0;
    for (double e : errors) sum += e;
    s.mean = sum / static_cast<double>(errors.size());
    s.median = percentile_sorted(errors, 0.50);
    s.q1 = percentile_sorted(errors, 0.25);
    s.q3 = percentile_sorted(errors, 0.75);
    s.whisker_low = percentile_sorted(errors, 0.05);
    s.whisker_high = percentile_sorted(errors, 0.95);
    for (double e : errors)
        if (e < s.whisker_low || e > s.whisker_high) s.outliers.push_back(e);
    return s;
}

inline double availability(std::size_t successes, std::size_t attempts) {
    if (attempts == 0) throw std::invalid_argument("availability: zero attempts");
    if (successes > attempts) throw std::invalid_argument("availability: more successes than attempts");
    return static_cast<double>(successes) / static_cast<double>(attempts);
}

/// Partial aggregate that can be merged in any order; finish() sorts, so the
/// result does not depend on how the samples were partitioned.
class MetricsAccumulator {
public:
    void add_success(double error) { errors_.push_back(error); }

    void add_failure(FailureCause cause) {
        if (cause == FailureCause::energy_depleted)
            ++failures_.energy_depleted;
        else
            ++failures_.out_of_range;
    }

    void merge(const MetricsAccumulator& other) {
        errors_.insert(errors_.end(), other.errors_.begin(), other.errors_.end());
        failures_.energy_depleted += other.failures_.energy_depleted;
        failures_.out_of_range += other.failures_.out_of_range;
    }

    std::size_t attempts() const noexcept { return errors_.size() + failures_.total(); }
    const std::vector<double>& errors() const noexcept { return errors_; }

    MetricsSummary finish() const {
        MetricsSummary s = errors_.empty() ? MetricsSummary{} : boxplot_stats(errors_);
        s.failures = failures_;
        if (attempts() > 0) s.availability = availability(errors_.size(), attempts());
        return s;
    }

private:
    std::vector<double> errors_;
    FailureCounts failures_;
};

}  // namespace thzloc
