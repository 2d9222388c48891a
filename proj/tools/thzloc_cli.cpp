// thzloc: command-line front end for the nanonode localization simulator.
//
//   thzloc run      [--config F] [--set key=value]... [--seed N] [--workers N]
//   thzloc sweep    --axis NAME --values v1,v2,... [common flags]
//   thzloc compare  [common flags]
//   thzloc latency  [--m LIST] [--n LIST] [--k LIST] [--t-tof S] [--t-tr S]
//
// Output goes to --out (default stdout) as CSV or JSON. Exit status: 0 ok,
// 2 configuration error, 3 runtime error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "thzloc/thzloc.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    unsigned workers = 0;
    std::string out;
    std::string format = "csv";
    std::string absorption_table;
    bool dump_samples = false;
};

void add_common(CLI::App& cmd, CommonOptions& o) {
    cmd.add_option("--config", o.config_path, "JSON config file; absent keys keep their defaults");
    cmd.add_option("--set", o.overrides, "Override one config key, e.g. --set bandwidth=0.1e12");
    cmd.add_option("--seed", o.seed, "Master seed");
    cmd.add_option("--workers", o.workers, "Worker threads (0 = hardware concurrency)");
    cmd.add_option("--out", o.out, "Output file (default stdout)");
    cmd.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    cmd.add_option("--absorption-table", o.absorption_table, "Absorption table file (frequency_hz k_per_m per line)");
    cmd.add_flag("--dump-samples", o.dump_samples,
                 "Write per-point error samples to <out>.samples/point_<i>.txt, one error per line");
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

thzloc::SimConfig resolve_config(const CommonOptions& o) {
    thzloc::SimConfig cfg = o.config_path.empty() ? thzloc::SimConfig{} : thzloc::load_config(o.config_path);
    for (const auto& kv : o.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw thzloc::ConfigError(kv, "expected key=value");
        thzloc::apply_field(cfg, kv.substr(0, eq), thzloc::parse_value_token(kv.substr(eq + 1)));
    }
    if (!o.absorption_table.empty()) thzloc::apply_field(cfg, "absorption_table", o.absorption_table);
    if (o.seed) cfg.master_seed = *o.seed;
    thzloc::validate(cfg);
    return cfg;
}

// Writes to the --out file, or stdout when none was given.
class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty()) return;
        file_.open(path);
        if (!file_) throw std::runtime_error("cannot open output '" + path + "'");
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

void dump_samples(const CommonOptions& o, const std::vector<thzloc::SweepPoint>& points) {
    if (!o.dump_samples) return;
    if (o.out.empty()) throw thzloc::ConfigError("dump-samples", "requires --out");
    const std::filesystem::path dir = o.out + ".samples";
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::ofstream f(dir / ("point_" + std::to_string(i) + ".txt"));
        for (double e : points[i].samples) f << thzloc::format_double(e) << '\n';
    }
}

void emit(const CommonOptions& o, const std::string& command, const thzloc::SimConfig& cfg,
          const std::vector<thzloc::SweepPoint>& points) {
    std::vector<thzloc::SummaryRow> rows;
    for (const auto& p : points) rows.push_back(thzloc::make_row(p));
    Output out(o.out);
    if (o.format == "json") {
        auto doc = thzloc::run_artifact_json(command, cfg, rows);
        for (std::size_t i = 0; i < points.size(); ++i) doc["rows"][i]["outlier_count"] = points[i].summary.outliers.size();
        out.stream() << doc.dump(2) << '\n';
    } else {
        thzloc::write_summary_csv(out.stream(), rows);
    }
    dump_samples(o, points);
}

int run_command(const CommonOptions& o) {
    const auto cfg = resolve_config(o);
    auto result = thzloc::run_experiment_detailed(cfg, o.workers);
    std::vector<thzloc::SweepPoint> points;
    points.push_back({"none", thzloc::json(""), cfg.master_seed, std::move(result.summary), std::move(result.samples)});
    emit(o, "run", cfg, points);
    return kExitOk;
}

int sweep_command(const CommonOptions& o, const std::string& axis, const std::string& values) {
    const auto cfg = resolve_config(o);
    std::vector<thzloc::json> parsed;
    for (const auto& v : split_list(values)) parsed.push_back(thzloc::parse_value_token(v));
    if (parsed.empty()) throw thzloc::ConfigError("values", "at least one value is required");
    const auto points = thzloc::sweep(cfg, axis, parsed, {o.workers, thzloc::SeedPolicy::derived, o.dump_samples});
    emit(o, "sweep", cfg, points);
    return kExitOk;
}

int compare_command(const CommonOptions& o) {
    const auto cfg = resolve_config(o);
    const auto points = thzloc::compare_methods(cfg, {o.workers, thzloc::SeedPolicy::common, o.dump_samples});
    emit(o, "compare", cfg, points);
    return kExitOk;
}

std::vector<double> parse_numbers(const std::string& text, const char* field) {
    std::vector<double> out;
    for (const auto& tok : split_list(text)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw thzloc::ConfigError(field, "not a number: '" + tok + "'");
        }
    }
    if (out.empty()) throw thzloc::ConfigError(field, "empty list");
    return out;
}

struct LatencyOptions {
    std::string m = "625", n = "4", k = "1";
    std::optional<double> t_tof, t_tr;
};

int latency_command(const CommonOptions& o, const LatencyOptions& l) {
    const auto cfg = resolve_config(o);
    const thzloc::Simulation sim(cfg);
    const double t_tof = l.t_tof.value_or(thzloc::estimate_t_tof(cfg.tsook(), sim.max_anchor_distance()));
    const double t_tr = l.t_tr.value_or(cfg.t_tr);
    if (t_tof < 0) throw thzloc::ConfigError("t-tof", "must be >= 0");
    if (t_tr < 0) throw thzloc::ConfigError("t-tr", "must be >= 0");
    const auto rows = thzloc::latency_table(parse_numbers(l.m, "m"), parse_numbers(l.n, "n"),
                                            parse_numbers(l.k, "k"), t_tof, t_tr);
    Output out(o.out);
    if (o.format == "json")
        out.stream() << thzloc::latency_json(rows).dump(2) << '\n';
    else
        thzloc::write_latency_csv(out.stream(), rows);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo simulator of two-way ToF localization for energy-harvesting THz nanonodes"};
    app.require_subcommand(1);

    CommonOptions common;
    auto* run = app.add_subcommand("run", "Run one experiment");
    add_common(*run, common);

    auto* sweep = app.add_subcommand("sweep", "Run one experiment per value of a config key");
    add_common(*sweep, common);
    std::string axis, values;
    sweep->add_option("--axis", axis, "Config key to vary")->required();
    sweep->add_option("--values", values, "Comma-separated values")->required();

    auto* compare = app.add_subcommand("compare", "ToF vs. AoA vs. RSS on identical seeds, energy accounting off");
    add_common(*compare, common);

    auto* latency = app.add_subcommand("latency", "Tabulate t_loc = m (n k t_tof + t_tr)");
    add_common(*latency, common);
    LatencyOptions lat;
    latency->add_option("--m", lat.m, "Node counts (comma-separated)");
    latency->add_option("--n", lat.n, "Anchor counts (comma-separated)");
    latency->add_option("--k", lat.k, "Pulses per exchange (comma-separated)");
    latency->add_option("--t-tof", lat.t_tof, "Seconds per exchange (default: estimated from the config)");
    latency->add_option("--t-tr", lat.t_tr, "Trilateration time per node, seconds (default: config t_tr)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*run) return run_command(common);
        if (*sweep) return sweep_command(common, axis, values);
        if (*compare) return compare_command(common);
        if (*latency) return latency_command(common, lat);
    } catch (const thzloc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitRuntime;
}
