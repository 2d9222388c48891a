#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "thzloc/report.hpp"

using namespace thzloc;

namespace {

struct Result {
    int status = -1;
    std::string out;
};

Result cli(const std::string& args) {
    const std::string cmd = std::string(THZLOC_CLI_PATH) + " " + args + " 2>/dev/null";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::filesystem::path scratch() {
    auto dir = std::filesystem::temp_directory_path() / ("thzloc_cli_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    return dir;
}

const std::string kSmall = "--set iterations=2 --set grid_rows=8 --set grid_cols=8";

std::vector<SummaryRow> rows_of(const std::string& text) {
    std::istringstream in(text);
    return parse_summary_csv(in);
}

}  // namespace

TEST(Cli, RunEmitsOneRow) {
    const auto r = cli("run " + kSmall);
    ASSERT_EQ(r.status, 0);
    const auto rows = rows_of(r.out);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].count + rows[0].fail_energy + rows[0].fail_range, 128u);
    EXPECT_EQ(rows[0].seed, 1u);
}

TEST(Cli, WorkersDoNotChangeOutput) {
    const auto a = cli("run " + kSmall + " --workers 1 --seed 9");
    const auto b = cli("run " + kSmall + " --workers 4 --seed 9");
    ASSERT_EQ(a.status, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, ConfigFileAndOverride) {
    const auto dir = scratch();
    std::ofstream(dir / "c.json") << R"({"iterations": 1, "grid_rows": 4, "grid_cols": 4, "bandwidth": 0.1e12})";
    const auto r = cli("run --config " + (dir / "c.json").string() + " --format json");
    ASSERT_EQ(r.status, 0);
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["config"]["bandwidth"], 0.1e12);
    EXPECT_EQ(j["config"]["spacing"], 9e-3);
    EXPECT_EQ(j["rows"].size(), 1u);
    EXPECT_TRUE(j["rows"][0].contains("outlier_count"));
}

TEST(Cli, SweepWritesFileAndSamples) {
    const auto dir = scratch();
    const auto out = (dir / "sweep.csv").string();
    const auto r = cli("sweep " + kSmall + " --axis delta_q_mean --values 2e-12,6e-12,10e-12 --out " + out +
                       " --dump-samples");
    ASSERT_EQ(r.status, 0);
    std::ifstream f(out);
    std::stringstream text;
    text << f.rdbuf();
    const auto rows = rows_of(text.str());
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].sweep_axis, "delta_q_mean");
    EXPECT_EQ(rows[0].sweep_value, format_double(2e-12));
    EXPECT_NE(rows[0].seed, rows[1].seed);
    std::ifstream samples(out + ".samples/point_0.txt");
    std::size_t lines = 0;
    for (std::string line; std::getline(samples, line);) ++lines;
    EXPECT_EQ(lines, rows[0].count);
}

TEST(Cli, Compare) {
    const auto r = cli("compare " + kSmall);
    ASSERT_EQ(r.status, 0);
    const auto rows = rows_of(r.out);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[1].sweep_value, "aoa");
    for (const auto& row : rows) EXPECT_EQ(row.fail_energy, 0u);
}

TEST(Cli, Latency) {
    const auto r = cli("latency --m 625 --n 4 --k 3 --t-tof 1e-6 --t-tr 0.1e-6 --format json");
    ASSERT_EQ(r.status, 0);
    const auto j = json::parse(r.out);
    EXPECT_NEAR(j["rows"][0]["t_loc_s"].get<double>(), 7.5625e-3, 1e-15);
    const auto grid = cli("latency --m 1,625 --n 4,8 --k 1");
    ASSERT_EQ(grid.status, 0);
    EXPECT_EQ(std::count(grid.out.begin(), grid.out.end(), '\n'), 5);
}

TEST(Cli, ConfigErrorsExitTwo) {
    EXPECT_EQ(cli("run --set spacing=-1").status, 2);
    EXPECT_EQ(cli("run --set nonsense=1").status, 2);
    EXPECT_EQ(cli("run --config /nonexistent.json").status, 2);
    EXPECT_EQ(cli("sweep " + kSmall + " --axis warp --values 1").status, 2);
    EXPECT_EQ(cli("run --absorption-table /nonexistent.txt").status, 2);
    EXPECT_EQ(cli("run --format xml").status, 2);
    EXPECT_EQ(cli("bogus").status, 2);
    EXPECT_EQ(cli("latency --m x").status, 2);
}

TEST(Cli, RuntimeErrorsExitThree) {
    EXPECT_EQ(cli("run " + kSmall + " --out /nonexistent/dir/out.csv").status, 3);
}

TEST(Cli, ShippedConfigsLoad) {
    for (const auto& entry : std::filesystem::directory_iterator(std::string(THZLOC_SOURCE_DIR) + "/configs")) {
        if (entry.path().extension() != ".json") continue;
        const auto r = cli("run --config " + entry.path().string() + " --set iterations=1");
        EXPECT_EQ(r.status, 0) << entry.path();
    }
}
