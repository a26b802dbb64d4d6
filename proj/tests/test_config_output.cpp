#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "chemovir/config.hpp"
#include "chemovir/output.hpp"

using namespace chemovir;

namespace {

RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_run_config(in, "test.ini");
}

constexpr const char* kFullConfig = R"([model]
system = ks_parabolic_elliptic
conversion = power_law
alpha = 1.5
kappa = 0
chi = 1.2
diff_u = 0.9

[grid]
geometry = radial_disk
length_x = 1
cells_x = 96

[stepper]
dt_init = 0.0001
dt_min = 1e-07
dt_max = 0.001
t_end = 1
blowup_threshold = 500

[initial]
family = concentrated_gaussian
seed = 7
mass_u = 30
width = 0.2

[diagnostics]
sample_interval = 0.01
q = 3

[output]
directory = sandbox
svg = false
snapshots = true

[sweep]
alpha_values = 0.5, 1.5
kappa_values = 0
seeds = 1, 2, 3
estimate_critical = true
bracket_lo = 0.5
bracket_hi = 1.5
iterations = 4
)";

}  // namespace

TEST_SUITE_BEGIN("config_output");

TEST_CASE("defaults survive a minimal file") {
    const RunConfig cfg = parse("[model]\nsystem = may_nowak\n");
    CHECK(cfg.setup.model.system == SystemKind::MayNowakChemotaxis);
    CHECK(cfg.setup.model.kappa == 0.0);
    CHECK(cfg.setup.grid.geometry == Geometry::Interval);
    CHECK(cfg.setup.stepper.dt_init == 1e-3);
    CHECK(cfg.setup.initial.seed == 1);
    CHECK(cfg.output.directory == "out");
    CHECK(cfg.output.svg);
    CHECK(!cfg.sweep.has_value());
}

TEST_CASE("every section parses into the right fields") {
    const RunConfig cfg = parse(kFullConfig);
    CHECK(cfg.setup.model.system == SystemKind::KSParabolicElliptic);
    CHECK(cfg.setup.model.conversion.kind == ConversionKind::PowerLaw);
    CHECK(cfg.setup.model.conversion.alpha == 1.5);
    CHECK(cfg.setup.model.chi == 1.2);
    CHECK(cfg.setup.model.diff_u == 0.9);
    CHECK(cfg.setup.grid.geometry == Geometry::RadialDisk);
    CHECK(cfg.setup.grid.cells_x == 96);
    CHECK(cfg.setup.stepper.dt_min == 1e-7);
    CHECK(cfg.setup.stepper.blowup_threshold == 500.0);
    CHECK(cfg.setup.initial.family == InitialFamily::ConcentratedGaussian);
    CHECK(cfg.setup.initial.seed == 7);
    CHECK(cfg.setup.initial.mass_u == 30.0);
    CHECK(cfg.setup.sample_interval == 0.01);
    CHECK(cfg.setup.q == 3.0);
    CHECK(cfg.output.directory == "sandbox");
    CHECK(!cfg.output.svg);
    CHECK(cfg.output.snapshots);
    REQUIRE(cfg.sweep.has_value());
    CHECK(cfg.sweep->alpha_values == std::vector<double>{0.5, 1.5});
    CHECK(cfg.sweep->seeds == std::vector<std::uint64_t>{1, 2, 3});
    CHECK(cfg.sweep->estimate_critical);
}

TEST_CASE("the echo of a parse re-parses to the same echo") {
    const RunConfig cfg = parse(kFullConfig);
    const std::string echo = serialize_run_config(cfg);
    const RunConfig cfg2 = parse(echo);
    CHECK(serialize_run_config(cfg2) == echo);
}

TEST_CASE("unknown keys and sections are rejected by name") {
    CHECK_THROWS_WITH_AS(parse("[model]\nkapa = 1\n"),
                         doctest::Contains("kapa"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("[backdoor]\nx = 1\n"),
                         doctest::Contains("backdoor"), ConfigError);
    CHECK_THROWS_AS(parse("stray = 1\n[model]\nkappa = 1\n"), ConfigError);
}

TEST_CASE("malformed values name the offending key") {
    CHECK_THROWS_WITH_AS(parse("[model]\nalpha = fast\n"),
                         doctest::Contains("alpha"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("[model]\nsystem = maynowak\n"),
                         doctest::Contains("may_nowak"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("[output]\nsvg = yes\n"),
                         doctest::Contains("svg"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("[grid]\ncells_x = 12.5\n"),
                         doctest::Contains("cells_x"), ConfigError);
}

TEST_CASE("semantic validation still applies after parsing") {
    CHECK_THROWS_AS(parse("[model]\nkappa = -1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("[grid]\ncells_x = 2\n"), std::invalid_argument);
}

TEST_CASE("a missing file is a config error") {
    CHECK_THROWS_AS(load_run_config("/nonexistent/nowhere.ini"), ConfigError);
}

TEST_CASE("shortest-exact number rendering round-trips") {
    for (double x : {0.1, 1.0, 3.141592653589793, 1e-7, 156207.0, 2.5e300}) {
        const std::string s = format_double(x);
        CHECK(std::stod(s) == x);
    }
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-2.5) == "-2.5");
}

TEST_CASE("diagnostics table renders absent cells as empty") {
    DiagnosticsRow full;
    full.t = 0.5;
    full.dt = 0.01;
    full.mass_u = 1.0;
    full.mass_v = 0.25;
    full.mass_w = 0.125;
    full.linf_u = 2.0;
    full.linf_w = 0.5;
    full.grad_v_lq = 0.75;
    full.functional_E = 1.5;
    full.mass_ode_residual = 0.0;

    DiagnosticsRow sparse;
    sparse.t = 1.0;
    sparse.dt = 0.02;
    sparse.mass_u = 1.0;
    sparse.mass_v = 0.25;
    sparse.linf_u = 2.0;

    const std::string csv = diagnostics_csv({full, sparse});
    CHECK(csv ==
          "t,dt,mass_u,mass_v,mass_w,linf_u,linf_w,grad_v_lq,functional_E,"
          "mass_ode_residual\n"
          "0.5,0.01,1,0.25,0.125,2,0.5,0.75,1.5,0\n"
          "1,0.02,1,0.25,,2,,,,\n");
}

TEST_CASE("sweep table carries one line per tuple") {
    SweepResult res;
    SweepEntry e;
    e.alpha = 1.5;
    e.kappa = 0.0;
    e.seed = 3;
    e.outcome.classification = Classification::BlowUp;
    e.outcome.t_detect = 0.25;
    e.outcome.peak_linf_u = 1000.0;
    e.outcome.peak_grad_v_lq = 50.0;
    res.entries.push_back(e);

    CHECK(sweep_summary_csv(res) ==
          "alpha,kappa,seed,classification,t_detect,peak_linf_u,peak_grad_v_lq,"
          "peak_linf_w\n"
          "1.5,0,3,BlowUp,0.25,1000,50,0\n");
}

TEST_CASE("study table leaves the first order cell empty") {
    std::vector<StudyRow> rows = {{0.1, 1e-2, {}}, {0.05, 2.5e-3, 2.0}};
    CHECK(study_csv(rows) ==
          "h,error,observed_order\n"
          "0.1,0.01,\n"
          "0.05,0.0025,2\n");
}

TEST_CASE("snapshot table matches the stored species") {
    auto grid = std::make_shared<const Grid>(
        build_grid({Geometry::Interval, 1.0, 1.0, 4, 1}));
    State s;
    s.t = 0.5;
    s.u = Field(grid, 2.0);
    s.v = Field(grid, 1.0);
    const std::string csv = snapshot_csv(s);
    CHECK(csv.substr(0, csv.find('\n')) == "t,x,u,v");
    CHECK(csv.find("0.5,0.125,2,1\n") != std::string::npos);
}

TEST_CASE("run summary embeds a re-parseable config echo") {
    RunConfig cfg = parse(kFullConfig);
    RunRecord rec;
    DiagnosticsRow row;
    row.t = 0.0;
    row.linf_u = 1.0;
    rec.series.push_back(row);
    rec.outcome.classification = Classification::BlowUp;
    rec.outcome.t_detect = 0.125;
    rec.outcome.dt_collapsed = true;
    rec.steps = 42;

    const std::string text = run_summary_json(cfg, rec);
    const auto j = nlohmann::json::parse(text);
    CHECK(j["classification"] == "BlowUp");
    CHECK(j["t_detect"] == 0.125);
    CHECK(j["dt_collapsed"] == true);
    CHECK(j["steps"] == 42);
    CHECK(j["rows"] == 1);

    const std::string echo = j["config_echo"].get<std::string>();
    std::istringstream in(echo);
    const RunConfig cfg2 = parse_run_config(in, "echo");
    CHECK(serialize_run_config(cfg2) == serialize_run_config(cfg));
}

TEST_CASE("monitor plot is a self-contained vector image") {
    std::vector<DiagnosticsRow> series;
    for (int i = 0; i < 20; ++i) {
        DiagnosticsRow r;
        r.t = 0.1 * i;
        r.linf_u = 1.0 + 0.1 * i;
        r.grad_v_lq = 0.5;
        r.linf_w = 0.25;
        series.push_back(r);
    }
    const std::string svg = monitors_svg(series);
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("linf_u") != std::string::npos);
    CHECK(svg.find("grad_v_lq") != std::string::npos);
    CHECK(svg.find("linf_w") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
}

TEST_CASE("text files write and fail loudly") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "chemovir_test_out";
    fs::create_directories(dir);
    const fs::path file = dir / "probe.txt";
    write_text_file(file, "payload\n");
    std::ifstream in(file);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    CHECK(content == "payload\n");
    fs::remove_all(dir);

    CHECK_THROWS_AS(write_text_file("/nonexistent/dir/file.txt", "x"), IoError);
}

TEST_SUITE_END();
