#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "thzloc/config.hpp"
#include "thzloc/sweep.hpp"

namespace thzloc {

inline constexpr std::string_view kSummaryCsvHeader =
    "sweep_axis,sweep_value,seed,count,mean_m,median_m,q1_m,q3_m,p5_m,p95_m,availability,fail_energy,fail_range";

/// One line of the summary CSV.
struct SummaryRow {
    std::string sweep_axis;
    std::string sweep_value;
    std::uint64_t seed = 0;
    std::size_t count = 0;
    double mean = 0, median = 0, q1 = 0, q3 = 0, p5 = 0, p95 = 0;
    double availability = 0;
    std::size_t fail_energy = 0;
    std::size_t fail_range = 0;
};

/// Shortest round-trip text is not required here; 17 significant digits are.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::runtime_error("summary csv: bad number '" + std::string(s) + "'");
    return v;
}

template <class Int>
Int parse_integer(std::string_view s) {
    Int v{};
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::runtime_error("summary csv: bad integer '" + std::string(s) + "'");
    return v;
}

/// Text form of a sweep value: numbers with 17 significant digits, strings verbatim.
inline std::string value_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_null()) return "";
    return v.dump();
}

inline SummaryRow make_row(const std::string& axis, const std::string& value, std::uint64_t seed,
                           const MetricsSummary& s) {
    return {axis,         value,      seed,         s.count,    s.mean,
            s.median,     s.q1,       s.q3,         s.whisker_low, s.whisker_high,
            s.availability, s.failures.energy_depleted, s.failures.out_of_range};
}

inline SummaryRow make_row(const SweepPoint& p) { return make_row(p.axis, value_text(p.value), p.seed, p.summary); }

namespace detail {
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else if (c != '\r') {
            fields.back() += c;
        }
    }
    return fields;
}
}  // namespace detail

inline void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out << kSummaryCsvHeader << '\n';
    for (const auto& r : rows) {
        out << detail::csv_field(r.sweep_axis) << ',' << detail::csv_field(r.sweep_value) << ',' << r.seed << ','
            << r.count << ',' << format_double(r.mean) << ',' << format_double(r.median) << ','
            << format_double(r.q1) << ',' << format_double(r.q3) << ',' << format_double(r.p5) << ','
            << format_double(r.p95) << ',' << format_double(r.availability) << ',' << r.fail_energy << ','
            << r.fail_range << '\n';
    }
}

inline std::vector<SummaryRow> parse_summary_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("summary csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kSummaryCsvHeader) throw std::runtime_error("summary csv: unexpected header");
    std::vector<SummaryRow> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != 13) throw std::runtime_error("summary csv: expected 13 columns");
        SummaryRow r;
        r.sweep_axis = f[0];
        r.sweep_value = f[1];
        r.seed = parse_integer<std::uint64_t>(f[2]);
        r.count = parse_integer<std::size_t>(f[3]);
        r.mean = parse_double(f[4]);
        r.median = parse_double(f[5]);
        r.q1 = parse_double(f[6]);
        r.q3 = parse_double(f[7]);
        r.p5 = parse_double(f[8]);
        r.p95 = parse_double(f[9]);
        r.availability = parse_double(f[10]);
        r.fail_energy = parse_integer<std::size_t>(f[11]);
        r.fail_range = parse_integer<std::size_t>(f[12]);
        rows.push_back(std::move(r));
    }
    return rows;
}

inline json row_to_json(const SummaryRow& r) {
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    return json{{"sweep_axis", r.sweep_axis}, {"sweep_value", r.sweep_value}, {"seed", r.seed},
                {"count", r.count},           {"mean_m", num(r.mean)},        {"median_m", num(r.median)},
                {"q1_m", num(r.q1)},          {"q3_m", num(r.q3)},            {"p5_m", num(r.p5)},
                {"p95_m", num(r.p95)},        {"availability", num(r.availability)},
                {"fail_energy", r.fail_energy}, {"fail_range", r.fail_range}};
}

/// Run artifact: config echo plus one entry per sweep point.
inline json run_artifact_json(const std::string& command, const SimConfig& config,
                              const std::vector<SummaryRow>& rows) {
    json j;
    j["command"] = command;
    j["config"] = to_json(config);
    j["rows"] = json::array();
    for (const auto& r : rows) j["rows"].push_back(row_to_json(r));
    return j;
}

inline constexpr std::string_view kLatencyCsvHeader = "m,n,k,t_tof_s,t_tr_s,t_loc_s";

inline void write_latency_csv(std::ostream& out, const std::vector<LatencyRow>& rows) {
    out << kLatencyCsvHeader << '\n';
    for (const auto& r : rows)
        out << format_double(r.m) << ',' << format_double(r.n) << ',' << format_double(r.k) << ','
            << format_double(r.t_tof) << ',' << format_double(r.t_tr) << ',' << format_double(r.t_loc) << '\n';
}

inline json latency_json(const std::vector<LatencyRow>& rows) {
    json j = json::array();
    for (const auto& r : rows)
        j.push_back({{"m", r.m}, {"n", r.n}, {"k", r.k}, {"t_tof_s", r.t_tof}, {"t_tr_s", r.t_tr}, {"t_loc_s", r.t_loc}});
    return json{{"command", "latency"}, {"rows", j}};
}

}  // namespace thzloc
