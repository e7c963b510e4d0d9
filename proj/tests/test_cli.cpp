#include <doctest.h>

#include <fcntl.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bess/cli.hpp"
#include "bess/discretizer.hpp"
#include "bess/harness.hpp"
#include "util.hpp"

using namespace bess;

namespace {

int run_cli(const std::vector<std::string>& args) {
    std::vector<std::string> full{"bess"};
    full.insert(full.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : full) argv.push_back(s.c_str());
    return cli::run(static_cast<int>(argv.size()), argv.data());
}

/// Redirect stdout to a file for the duration of a CLI call.
struct CaptureStdout {
    int saved;
    explicit CaptureStdout(const std::string& path) {
        std::fflush(stdout);
        saved = dup(1);
        const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        dup2(fd, 1);
        ::close(fd);
    }
    ~CaptureStdout() {
        std::fflush(stdout);
        dup2(saved, 1);
        ::close(saved);
    }
};

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

const std::string kConfig = test::repo_path("bess.conf");
const std::string kCurves = test::repo_path("curves.conf");

}  // namespace

TEST_CASE("project: optimizer clip onto a plain disk") {
    test::TempDir tmp;
    // a pure apparent-power circle, as in the approximate capability model
    test::write_file(tmp.file("disk.conf"), "[curve]\nvac_pu = 1\nvdc_pu = 1\ndisk = 0 0 1.0\n");
    const std::string out = tmp.file("out.txt");
    int code;
    {
        CaptureStdout cap(out);
        code = run_cli({"project", "--config", kConfig, "--curves", tmp.file("disk.conf"),
                        "--p0", "1.2", "--q0", "0", "--method", "opt"});
    }
    CHECK(code == 0);
    double p = 0, q = 0;
    int tight = 0;
    char status[32] = {0};
    REQUIRE(std::sscanf(slurp(out).c_str(), "%lf,%lf,%d,%31s", &p, &q, &tight, status) == 4);
    CHECK(p == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(std::abs(q) < 1e-6);
    CHECK(tight == 1);
    CHECK(std::string(status) == "feasible");
}

TEST_CASE("project: shipped curves clip at the active-power limit") {
    test::TempDir tmp;
    const std::string out = tmp.file("out.txt");
    int code;
    {
        CaptureStdout cap(out);
        code = run_cli({"project", "--config", kConfig, "--curves", kCurves, "--p0", "1.2",
                        "--q0", "0", "--method", "opt"});
    }
    CHECK(code == 0);
    double p = 0;
    REQUIRE(std::sscanf(slurp(out).c_str(), "%lf,", &p) == 1);
    CHECK(p == doctest::Approx(0.95).epsilon(1e-6));
}

TEST_CASE("project: fast method echoes a feasible point") {
    test::TempDir tmp;
    const std::string out = tmp.file("out.txt");
    int code;
    {
        CaptureStdout cap(out);
        code = run_cli({"project", "--config", kConfig, "--curves", kCurves, "--p0", "0.3",
                        "--q0", "0.2", "--method", "fast"});
    }
    CHECK(code == 0);
    double p = 0, q = 0;
    int tight = 0;
    char status[32] = {0};
    REQUIRE(std::sscanf(slurp(out).c_str(), "%lf,%lf,%d,%31s", &p, &q, &tight, status) == 4);
    CHECK(p == 0.3);
    CHECK(q == 0.2);
    CHECK(std::string(status) == "passthrough");
}

TEST_CASE("usage errors exit with 2") {
    // missing required --trace
    CHECK(run_cli({"simulate", "--config", kConfig, "--curves", kCurves, "--log", "/tmp/x",
                   "--metrics", "/tmp/y"}) == 2);
    // unknown flag
    CHECK(run_cli({"project", "--p0", "1", "--q0", "0", "--frobnicate", "1"}) == 2);
    // no subcommand
    CHECK(run_cli({}) == 2);
    // nonexistent config
    CHECK(run_cli({"project", "--config", "/nonexistent.conf", "--p0", "1", "--q0", "0"}) == 2);
    // resolution must divide 360
    CHECK(run_cli({"discretize", "--config", kConfig, "--curves", kCurves, "--resolution",
                   "7", "--out", "/tmp/t7.csv"}) == 2);
}

TEST_CASE("gen-trace then simulate, metrics recompute, determinism") {
    test::TempDir tmp;
    const std::string trace = tmp.file("trace.csv");
    REQUIRE(run_cli({"gen-trace", "--config", kConfig, "--seed", "42", "--duration-s", "60",
                     "--out", trace}) == 0);
    const Trace t = read_trace_csv(trace);
    CHECK(t.samples.size() == 600);

    const std::string log1 = tmp.file("log1.csv"), met1 = tmp.file("met1.csv");
    const std::string log2 = tmp.file("log2.csv"), met2 = tmp.file("met2.csv");
    const std::string sink = tmp.file("stdout.txt");
    for (const auto& [lg, mt] : {std::pair{log1, met1}, std::pair{log2, met2}}) {
        CaptureStdout cap(sink);
        REQUIRE(run_cli({"simulate", "--config", kConfig, "--curves", kCurves, "--trace", trace,
                         "--method", "opt", "--log", lg, "--metrics", mt}) == 0);
    }
    // identical inputs give identical outputs, latency column aside
    CHECK(slurp(met1) == slurp(met2));
    const TickLog a = read_ticklog_csv(log1), b = read_ticklog_csv(log2);
    REQUIRE(a.ticks.size() == b.ticks.size());
    for (std::size_t i = 0; i < a.ticks.size(); ++i) {
        CHECK(a.ticks[i].p == b.ticks[i].p);
        CHECK(a.ticks[i].q == b.ticks[i].q);
        CHECK(a.ticks[i].soc == b.ticks[i].soc);
        CHECK(a.ticks[i].status == b.ticks[i].status);
    }

    // metrics subcommand reproduces the simulate-side metrics file
    const std::string met3 = tmp.file("met3.csv");
    {
        CaptureStdout cap(met3);
        REQUIRE(run_cli({"metrics", "--config", kConfig, "--log", log1}) == 0);
    }
    CHECK(slurp(met3) == slurp(met1));
}

TEST_CASE("discretize writes a complete stamped table") {
    test::TempDir tmp;
    const std::string out = tmp.file("table.csv");
    REQUIRE(run_cli({"discretize", "--config", kConfig, "--curves", kCurves, "--vac", "1.0",
                     "--vdc", "1.0", "--soc", "0.5", "--out", out}) == 0);
    const RayTable t = load_table(out);
    CHECK(t.size() == 360);
    CHECK(t.ctx.soc == 0.5);
    const std::string text = slurp(out);
    CHECK(text.find("curve_hash=") != std::string::npos);
    CHECK(text.find("deg,smax_pu") != std::string::npos);

    // resolution flag
    const std::string out5 = tmp.file("table5.csv");
    REQUIRE(run_cli({"discretize", "--config", kConfig, "--curves", kCurves, "--resolution",
                     "5", "--out", out5}) == 0);
    CHECK(load_table(out5).size() == 72);
}

TEST_CASE("simulate seeds from a saved table and rejects mismatched curves") {
    test::TempDir tmp;
    const std::string trace = tmp.file("trace.csv");
    REQUIRE(run_cli({"gen-trace", "--config", kConfig, "--seed", "3", "--duration-s", "30",
                     "--out", trace}) == 0);
    const std::string table = tmp.file("table.csv");
    REQUIRE(run_cli({"discretize", "--config", kConfig, "--curves", kCurves, "--vac", "1.0",
                     "--vdc", "0.975", "--soc", "0.5", "--out", table}) == 0);

    const std::string sink = tmp.file("stdout.txt");
    const std::string log1 = tmp.file("l1.csv"), log2 = tmp.file("l2.csv");
    {
        CaptureStdout cap(sink);
        REQUIRE(run_cli({"simulate", "--config", kConfig, "--curves", kCurves, "--trace",
                         trace, "--method", "fast", "--table", table, "--log", log1,
                         "--metrics", tmp.file("m1.csv")}) == 0);
        REQUIRE(run_cli({"simulate", "--config", kConfig, "--curves", kCurves, "--trace",
                         trace, "--method", "fast", "--log", log2, "--metrics",
                         tmp.file("m2.csv")}) == 0);
    }
    // seeding must not change the outcome, only skip the first build
    CHECK(slurp(tmp.file("m1.csv")) == slurp(tmp.file("m2.csv")));

    // a table stamped with a different curve file is refused
    test::write_file(tmp.file("disk.conf"),
                     "[curve]\nvac_pu = 1\nvdc_pu = 1\ndisk = 0 0 1.0\n");
    CHECK(run_cli({"simulate", "--config", kConfig, "--curves", tmp.file("disk.conf"),
                   "--trace", trace, "--method", "fast", "--table", table, "--log",
                   tmp.file("l3.csv"), "--metrics", tmp.file("m3.csv")}) == 2);
}

TEST_CASE("bench writes both histograms") {
    test::TempDir tmp;
    const std::string trace = tmp.file("trace.csv");
    REQUIRE(run_cli({"gen-trace", "--config", kConfig, "--seed", "1", "--duration-s", "30",
                     "--f-vol", "0.06", "--out", trace}) == 0);
    const std::string out = tmp.file("lat");
    const std::string sink = tmp.file("stdout.txt");
    {
        CaptureStdout cap(sink);
        REQUIRE(run_cli({"bench", "--config", kConfig, "--curves", kCurves, "--trace", trace,
                         "--out", out, "--warmup", "50"}) == 0);
    }
    CHECK(slurp(out + ".opt.csv").find("bin_lo_us,bin_hi_us,count") == 0);
    CHECK(slurp(out + ".fast.csv").find("bin_lo_us,bin_hi_us,count") == 0);
    CHECK(slurp(sink).find("median ratio") != std::string::npos);
}
