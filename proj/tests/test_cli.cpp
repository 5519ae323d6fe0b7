#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include "latdecor/cli/run.hpp"

using namespace latdecor;
using namespace latdecor::cli;
namespace fs = std::filesystem;

namespace {

const char* kSweepSmall = R"(
id = "sweep_small"
kind = "sweep"
r = 2
seed = 5
N = 300
grid = [0, 2, 4]
[[observables]]
type = "siegel"
radius = 2.0
power = 2
[[observables]]
type = "siegel"
radius = 2.0
power = 2
[[flows]]
base = [1.0, 1.0]
direction = [0.0, 0.0]
[[flows]]
base = [1.0, 1.0]
direction = [1.0, 1.0]
)";

const char* kIntegralJoint = R"(
id = "joint_small"
kind = "integral"
m = 2
n = 1
seed = 3
N = 200
flows = [[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]]
[[observables]]
type = "siegel"
radius = 1.5
power = 2
[[observables]]
type = "constant"
value = 2.0
)";

const char* kIntegralMuI = R"(
id = "muI_small"
kind = "integral"
target = "muI"
m = 2
n = 1
seed = 3
N = 200
T = 2.0
set = [1, 3]
[[observables]]
type = "siegel"
radius = 1.5
power = 2
)";

const char* kCase = R"(
id = "case_small"
kind = "case"
m = 2
n = 1
r = 2
tuple = [[5.0, 5.0, 10.0], [0.1, 0.1, 0.2]]
[constants]
c = [2.2, 40.0]
)";

const char* kAffine = R"(
id = "affine_small"
kind = "affine"
seed = 2
N = 20
w = [1.0, 0.0]
L = [1.0, 8.0]
grid = 4
fiber_points = 2
[phi]
type = "offset_bump"
radius = 0.4
power = 2
center = [0.5, 0.5]
[psi]
type = "siegel"
radius = 1.0
power = 2
)";

const char* kCircle = R"(
id = "circle_small"
kind = "circle"
L = [1.0, 2.5]
phi = [[1, 1.0, 0.0], [-2, 0.0, 0.5]]
psi = [[1, 1.0, 0.0], [0, 3.0, 0.0]]
)";

ExperimentConfig parse(const char* text) { return parse_config(text, fs::temp_directory_path()); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n') + 1); }

std::size_t count(const std::string& hay, const std::string& needle) {
    std::size_t k = 0;
    for (std::size_t p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++k;
    return k;
}

/// Fresh scratch directory, removed on destruction.
struct ScratchDir {
    fs::path path;
    explicit ScratchDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("latdecor_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(path / name, std::ios::binary) << text;
        return path / name;
    }
};

fs::path golden(const std::string& name) {
    const char* dir = std::getenv("LATDECOR_GOLDEN_DIR");
    return fs::path(dir ? dir : "tests/golden") / name;
}

}  // namespace

TEST(Config, Errors) {
    const std::string good = kCircle;
    EXPECT_NO_THROW(parse(good.c_str()));
    auto bad = [&](const std::string& text) { EXPECT_THROW(parse_config(text, "."), ConfigError) << text; };
    bad("id = \"x\"\nkind = ");                                   // TOML syntax
    bad("kind = \"circle\"\nL = [1.0]\nphi = [[1, 1.0, 0.0]]\npsi = [[1, 1.0, 0.0]]");  // no id
    bad("id = \"x\"\nkind = \"bogus\"");
    bad("id = \"../x\"\nkind = \"theta\"");
    bad("id = \"x\"\nkind = \"theta\"\nformats = [\"pdf\"]");
    bad("id = \"x\"\nkind = \"theta\"\nmode = \"sideways\"");
    bad("id = \"x\"\nkind = \"theta\"\nm = 0");
    std::string no_seed = kSweepSmall;
    no_seed.replace(no_seed.find("seed = 5"), 8, "");
    bad(no_seed);
    std::string tiny = kSweepSmall;
    tiny.replace(tiny.find("N = 300"), 7, "N = 1");
    bad(tiny);
    std::string r3 = kSweepSmall;
    r3.replace(r3.find("r = 2"), 5, "r = 3");
    bad(r3);
    std::string unbalanced = kIntegralJoint;
    unbalanced.replace(unbalanced.find("[1.0, 0.0, 1.0]"), 15, "[1.0, 0.0, 2.0]");
    bad(unbalanced);
    std::string inadmissible = kIntegralMuI;
    inadmissible.replace(inadmissible.find("set = [1, 3]"), 12, "set = [1, 2]");
    bad(inadmissible);
    std::string bad_center = kAffine;
    bad_center.replace(bad_center.find("center = [0.5, 0.5]"), 19, "center = [0.3, 0.5]");
    bad(bad_center);
}

TEST(Csv, HeadersMatchGoldenFiles) {
    const std::pair<Report, std::string> cases[] = {
        {compute_theta(2, 1, ThetaMode::balanced), "theta_header.csv"},
        {compute(parse(kSweepSmall)), "sweep_header.csv"},
        {compute(parse(kIntegralJoint)), "integral_header.csv"},
        {compute(parse(kCase)), "case_header.csv"},
        {compute(parse(kAffine)), "affine_header.csv"},
        {compute(parse(kCircle)), "circle_header.csv"},
    };
    for (const auto& [report, file] : cases) {
        const std::string want = slurp(golden(file));
        ASSERT_FALSE(want.empty()) << file;
        EXPECT_EQ(first_line(emit_csv(report)), want) << file;
    }
}

TEST(Csv, FieldQuoting) {
    EXPECT_EQ(csv_field("plain"), "plain");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(csv_line({"a", "b c", "[1,2]"}), "a,b c,\"[1,2]\"\r\n");
    EXPECT_EQ(fmt17(0.1), "0.10000000000000001");
}

TEST(Csv, ThetaRows) {
    const std::string csv = emit_csv(compute_theta(2, 1, ThetaMode::balanced));
    EXPECT_EQ(count(csv, "\r\n"), 7u);  // header + 6 pairs
    EXPECT_THROW(compute_theta(1, 1, ThetaMode::balanced), ConfigError);
}

TEST(Json, RoundTripsEveryReport) {
    const Report reports[] = {
        compute_theta(2, 1, ThetaMode::balanced),
        compute_theta(2, 2, ThetaMode::unbalanced),
        compute(parse(kSweepSmall)),
        compute(parse(kIntegralJoint)),
        compute(parse(kIntegralMuI)),
        compute(parse(kCase)),
        compute(parse(kAffine)),
        compute(parse(kCircle)),
    };
    for (const auto& r : reports) {
        const json j = to_json(r);
        EXPECT_TRUE(j.contains("kind"));
        EXPECT_EQ(report_from_json(j), r) << j.dump();
        const std::string text = emit_json(r);
        EXPECT_EQ(report_from_json(json::parse(text)), r) << text;
    }
}

TEST(Json, SeventeenDigitsAndNull) {
    const std::string s = emit_json(json{{"a", 0.1}, {"b", std::nan("")}, {"c", json::array({1, 2})}});
    EXPECT_NE(s.find("0.10000000000000001"), std::string::npos) << s;
    EXPECT_NE(s.find("null"), std::string::npos) << s;
    EXPECT_THROW(report_from_json(json{{"kind", "nope"}}), ConfigError);
    EXPECT_THROW(report_from_json(json::array()), ConfigError);
}

TEST(Svg, OnePointPerRowAndOneFitLine) {
    SweepReport r;
    r.id = "synthetic";
    for (int k = 0; k < 9; ++k) {
        SweepRow row;
        row.delta = k;
        row.gap = std::exp(-0.5 * k);
        row.std_error = 1e-4;
        row.n = 100;
        r.sweep.rows.push_back(row);
    }
    r.sweep.fit = fit_decay(r.sweep.rows);
    const std::string svg = emit_svg(r);
    EXPECT_EQ(count(svg, "<circle class=\"point\""), 9u);
    EXPECT_EQ(count(svg, "<polyline class=\"fit\""), 1u);
    EXPECT_EQ(svg.rfind("<svg", 0) == 0 || svg.find("<svg") != std::string::npos, true);

    r.sweep.rows.resize(1);
    r.sweep.fit = fit_decay(r.sweep.rows);
    EXPECT_EQ(count(emit_svg(r), "<polyline class=\"fit\""), 0u);
    r.sweep.rows.clear();
    EXPECT_THROW(emit_svg(r), DomainError);
}

TEST(Sweep, TinySampleMarksEveryRowNoiseLimited) {
    std::string text = kSweepSmall;
    text.replace(text.find("N = 300"), 7, "N = 10");
    text.replace(text.find("grid = [0, 2, 4]"), 16, "grid = [4, 6, 8]");
    const auto r = std::get<SweepReport>(compute(parse(text.c_str())));
    for (const auto& row : r.sweep.rows) EXPECT_TRUE(row.noise_limited()) << row.delta;
    EXPECT_FALSE(r.sweep.fit.available);
}

TEST(Run, WritesArtifactsIdempotently) {
    ScratchDir dir("idem");
    const auto cfg = dir.write("c.toml", "formats = [\"csv\", \"json\", \"svg\"]\n" + std::string(kSweepSmall));
    std::ostringstream out, err;
    ASSERT_EQ(run_experiment(cfg, {std::nullopt, dir.path / "a"}, out, err), kExitOk) << err.str();
    ASSERT_EQ(run_experiment(cfg, {std::nullopt, dir.path / "b"}, out, err), kExitOk) << err.str();
    for (const char* f : {"sweep_small.csv", "sweep_small.json", "sweep_small.svg"}) {
        const std::string a = slurp(dir.path / "a" / f);
        EXPECT_FALSE(a.empty()) << f;
        EXPECT_EQ(a, slurp(dir.path / "b" / f)) << f;
    }
    EXPECT_NE(out.str().find("wrote "), std::string::npos);
    for (const auto& e : fs::directory_iterator(dir.path / "a")) EXPECT_NE(e.path().extension(), ".tmp");
}

TEST(Run, MalformedConfigWritesNothing) {
    ScratchDir dir("atomic");
    const auto cfg = dir.write("bad.toml", "id = \"bad\"\nkind = \"sweep\"\nseed = [\n");
    std::ostringstream out, err;
    EXPECT_EQ(run_experiment(cfg, {std::nullopt, dir.path / "out"}, out, err), kExitConfig);
    EXPECT_FALSE(fs::exists(dir.path / "out"));
    EXPECT_NE(err.str().find("config error"), std::string::npos);
}

TEST(Run, RenderFailureLeavesNoPartialFiles) {
    ScratchDir dir("partial");
    const Report r = compute(parse(kCircle));
    EXPECT_THROW(write_artifacts(r, "circle_small", dir.path / "out", {"csv", "svg"}), ConfigError);
    EXPECT_FALSE(fs::exists(dir.path / "out"));
}

TEST(Run, ExitCodes) {
    ScratchDir dir("codes");
    std::ostringstream out, err;
    EXPECT_EQ(run_experiment(dir.path / "missing.toml", {}, out, err), kExitConfig);
    const auto circle = dir.write("circle.toml", kCircle);
    EXPECT_EQ(run_experiment(circle, {ExperimentKind::sweep, dir.path / "o"}, out, err), kExitConfig);
    const auto svg = dir.write("svg.toml", "formats = [\"svg\"]\n" + std::string(kCircle));
    EXPECT_EQ(run_experiment(svg, {std::nullopt, dir.path / "o"}, out, err), kExitConfig);
    EXPECT_EQ(guarded([]() -> int { throw NumericalError("x"); }, err), kExitNumerical);
    EXPECT_EQ(guarded([]() -> int { throw InternalError("x"); }, err), kExitNumerical);
    EXPECT_EQ(guarded([]() -> int { throw DomainError("x"); }, err), kExitConfig);
    EXPECT_EQ(guarded([]() -> int { throw InvariantError("x"); }, err), kExitConfig);
}

TEST(Run, CasePrintsTrace) {
    ScratchDir dir("case");
    const auto cfg = dir.write("case.toml", kCase);
    std::ostringstream out, err;
    ASSERT_EQ(run_experiment(cfg, {ExperimentKind::case_trace, dir.path / "o"}, out, err), kExitOk) << err.str();
    EXPECT_NE(out.str().find("terminal: Case 1'_1"), std::string::npos) << out.str();
    EXPECT_TRUE(fs::exists(dir.path / "o" / "case_small.csv"));
}

#ifdef LATDECOR_TOOL_PATH
namespace {

int run_tool(const std::string& args, const fs::path& stdout_file) {
    const std::string cmd = std::string("\"") + LATDECOR_TOOL_PATH + "\" " + args + " > \"" + stdout_file.string() +
                            "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Tool, ThetaAndExitCodes) {
    ScratchDir dir("tool");
    const fs::path log = dir.path / "log.txt";
    ASSERT_EQ(run_tool("theta --m 2 --n 1", log), 0) << slurp(log);
    EXPECT_EQ(slurp(log), emit_csv(compute_theta(2, 1, ThetaMode::balanced)));
    EXPECT_EQ(run_tool("theta --m 1 --n 1", log), 2);
    EXPECT_EQ(run_tool("theta --m 2", log), 2);
    EXPECT_EQ(run_tool("sweep --config " + (dir.path / "nope.toml").string(), log), 2);
    const auto cfg = dir.write("circle.toml", kCircle);
    EXPECT_EQ(run_tool("circle --config " + cfg.string() + " --out " + (dir.path / "o").string(), log), 0)
        << slurp(log);
    EXPECT_TRUE(fs::exists(dir.path / "o" / "circle_small.json"));
    EXPECT_EQ(run_tool("sweep --config " + cfg.string(), log), 2);
}
#endif
