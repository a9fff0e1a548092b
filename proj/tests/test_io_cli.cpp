#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "evstudy/cli.hpp"
#include "evstudy/dgp.hpp"
#include "evstudy/inference.hpp"
#include "evstudy/io.hpp"
#include "evstudy/plot.hpp"
#include "fixtures.hpp"

using namespace evstudy;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir() {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        path_ = fs::temp_directory_path() / (std::string("evstudy_") + info->test_suite_name() + "_" + info->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

const std::string kFixtureCsv =
    "unit,time,treated,outcome\n"
    "treated,-2,1,0\ntreated,-1,1,1\ntreated,0,1,2\ntreated,1,1,4\n"
    "control,-2,0,0\ncontrol,-1,0,0\ncontrol,0,0,0\ncontrol,1,0,1\n";

}  // namespace

TEST(FormatDouble, ShortestRoundTrip) {
    EXPECT_EQ(io::format_double(0.1), "0.1");
    EXPECT_EQ(io::format_double(-2.0), "-2");
    EXPECT_EQ(io::format_double(4.25), "4.25");
    for (double v : {1.0 / 3.0, 1e-300, -123456.789, std::numeric_limits<double>::max()}) {
        EXPECT_EQ(io::parse_double(io::format_double(v), "v"), v);
    }
}

TEST(ParseNumbers, RejectsGarbage) {
    EXPECT_THROW((void)io::parse_double("1.5x", "outcome"), io::FormatError);
    EXPECT_THROW((void)io::parse_double("", "outcome"), io::FormatError);
    EXPECT_THROW((void)io::parse_integer("2.5", "treated"), io::FormatError);
    EXPECT_EQ(io::parse_integer("-7", "treated"), -7);
    EXPECT_EQ(io::parse_double("+2.5", "outcome"), 2.5);
}

TEST(SplitCsv, QuotedFields) {
    EXPECT_EQ(io::split_csv_line(R"(a,"b,c","d""e", f )"), (std::vector<std::string>{"a", "b,c", "d\"e", "f"}));
    EXPECT_EQ(io::split_csv_line("x,,y"), (std::vector<std::string>{"x", "", "y"}));
}

TEST(PanelCsv, ColumnsInAnyOrder) {
    std::istringstream in("outcome,treated,unit,time\n1.5,1,a,-1\n2,1,a,0\n3,1,a,1\n0,0,b,-1\n0,0,b,0\n0,0,b,1\n");
    const auto panel = PanelDataset::from_rows(io::read_panel_rows(in));
    EXPECT_EQ(panel.outcome(0, -1), 1.5);
    EXPECT_TRUE(panel.treated(0));
}

TEST(PanelCsv, FormatErrors) {
    auto bad = [](const std::string& text) {
        std::istringstream in(text);
        EXPECT_THROW((void)io::read_panel_rows(in), io::FormatError) << text;
    };
    bad("");
    bad("unit,time,outcome\na,1,2\n");
    bad("unit,time,treated,outcome,extra\n");
    bad("unit,time,treated,time\n");
    bad("unit,time,treated,outcome\na,1,1\n");
    bad("unit,time,treated,outcome\na,one,1,2\n");
}

TEST(PanelCsv, RoundTripIsExact) {
    const auto panel = fixtures::fuzz_panel(21);
    std::ostringstream out;
    io::write_panel_csv(out, panel);
    std::istringstream in(out.str());
    EXPECT_EQ(PanelDataset::from_rows(io::read_panel_rows(in)), panel);
}

TEST(EstimateTable, RoundTrip) {
    const auto panel = fixtures::fuzz_panel(22);
    BootstrapConfig config;
    config.replications = 10;
    std::vector<EventStudyEstimate> estimates;
    for (EstimatorTag tag : kAllEstimators) estimates.push_back(bootstrap(panel, tag, config));
    std::ostringstream out;
    io::write_estimate_table(out, estimates);
    EXPECT_EQ(out.str().substr(0, io::kEstimateHeader.size()), io::kEstimateHeader);
    std::istringstream in(out.str());
    const auto back = io::read_estimate_table(in);
    ASSERT_EQ(back.size(), 4u);
    for (const auto& e : back) {
        const auto it = std::find_if(estimates.begin(), estimates.end(),
                                     [&](const EventStudyEstimate& x) { return x.estimator == e.estimator; });
        ASSERT_NE(it, estimates.end());
        EXPECT_EQ(e.coefficients, it->coefficients);
        EXPECT_EQ(e.omitted, it->omitted);
        EXPECT_EQ(e.se, it->se);
        EXPECT_EQ(e.ci, it->ci);
    }
}

TEST(EstimateTable, OmittedRowsAreBlank) {
    std::ostringstream out;
    io::write_estimate_table(out, {twfe_closed_form(fixtures::four_cell_fixture())});
    EXPECT_EQ(out.str(),
              "estimator,relative_time,coefficient,std_error,ci_low,ci_high,omitted\n"
              "twfe,-3,-2,,,,0\n"
              "twfe,-2,-1,,,,0\n"
              "twfe,-1,,,,,1\n"
              "twfe,0,1,,,,0\n");
}

TEST(Cli, SimulateRowCountsAndDeterminism) {
    TempDir dir;
    auto r = run_cli({"simulate", "--out", (dir / "a.csv").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(line_count(slurp(dir / "a.csv")), 2601u);
    EXPECT_NE(r.out.find("seed=1"), std::string::npos);
    r = run_cli({"simulate", "--out", (dir / "b.csv").string()});
    EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));

    r = run_cli({"simulate", "--t-min", "-2", "--t-max", "1", "--n-treated", "1", "--n-control", "1", "--out",
                 (dir / "c.csv").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(line_count(slurp(dir / "c.csv")), 9u);
}

TEST(Cli, RoundTripMatchesDirectPipeline) {
    TempDir dir;
    DgpConfig config;
    config.seed = 77;
    ASSERT_EQ(run_cli({"simulate", "--seed", "77", "--out", (dir / "p.csv").string()}).code, 0);
    ASSERT_EQ(run_cli({"estimate", "--in", (dir / "p.csv").string(), "--estimator", "all", "-B", "20", "--out",
                       (dir / "e.csv").string()})
                  .code,
              0);
    const auto panel = simulate(config);
    BootstrapConfig boot;
    boot.replications = 20;
    std::vector<EventStudyEstimate> direct;
    for (EstimatorTag tag : kAllEstimators) direct.push_back(bootstrap(panel, tag, boot));
    std::ostringstream expected;
    io::write_estimate_table(expected, direct);
    EXPECT_EQ(slurp(dir / "e.csv"), expected.str());
}

TEST(Cli, EstimateBjsOnFixture) {
    TempDir dir;
    write_text(dir / "f.csv", kFixtureCsv);
    const auto r = run_cli({"estimate", "--in", (dir / "f.csv").string(), "--estimator", "bjs", "--out",
                            (dir / "e.csv").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(dir / "e.csv"),
              "estimator,relative_time,coefficient,std_error,ci_low,ci_high,omitted\n"
              "bjs,-3,,,,,1\n"
              "bjs,-2,1,,,,0\n"
              "bjs,-1,2,,,,0\n"
              "bjs,0,2,,,,0\n");
}

TEST(Cli, TreatmentDateShift) {
    TempDir dir;
    write_text(dir / "f.csv",
               "unit,time,treated,outcome\n"
               "treated,2008,1,0\ntreated,2009,1,1\ntreated,2010,1,2\ntreated,2011,1,4\n"
               "control,2008,0,0\ncontrol,2009,0,0\ncontrol,2010,0,0\ncontrol,2011,0,1\n");
    write_text(dir / "g.csv", kFixtureCsv);
    ASSERT_EQ(run_cli({"estimate", "-i", (dir / "f.csv").string(), "--treatment-date", "2011", "-o",
                       (dir / "a.csv").string()})
                  .code,
              0);
    ASSERT_EQ(run_cli({"estimate", "-i", (dir / "g.csv").string(), "-o", (dir / "b.csv").string()}).code, 0);
    EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
}

TEST(Cli, EstimateAllGivesFourBlocksUniversalEqualsTwfe) {
    TempDir dir;
    ASSERT_EQ(run_cli({"simulate", "--out", (dir / "p.csv").string()}).code, 0);
    ASSERT_EQ(run_cli({"estimate", "--in", (dir / "p.csv").string(), "--out", (dir / "e.csv").string()}).code, 0);
    const auto estimates = io::read_estimate_table(dir / "e.csv");
    ASSERT_EQ(estimates.size(), 4u);
    const EventStudyEstimate* twfe = nullptr;
    const EventStudyEstimate* universal = nullptr;
    for (const auto& e : estimates) {
        if (e.estimator == EstimatorTag::Twfe) twfe = &e;
        if (e.estimator == EstimatorTag::CsDcdhUniversal) universal = &e;
    }
    ASSERT_TRUE(twfe && universal);
    EXPECT_EQ(twfe->omitted, universal->omitted);
    for (const auto& [r, v] : twfe->coefficients) EXPECT_NEAR(universal->coefficients.at(r), v, 1e-8);
}

TEST(Cli, ExitCodes) {
    TempDir dir;
    write_text(dir / "f.csv", kFixtureCsv);
    write_text(dir / "missing_col.csv", "unit,time,outcome\na,-1,1\n");
    write_text(dir / "unbalanced.csv", "unit,time,treated,outcome\na,-1,1,0\na,0,1,0\na,1,1,0\nb,-1,0,0\nb,0,0,0\n");

    auto r = run_cli({"estimate", "-i", (dir / "missing_col.csv").string(), "-o", (dir / "x.csv").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_FALSE(fs::exists(dir / "x.csv"));
    EXPECT_EQ(run_cli({"estimate", "-i", (dir / "unbalanced.csv").string(), "-o", (dir / "x.csv").string()}).code, 2);
    EXPECT_FALSE(fs::exists(dir / "x.csv"));

    EXPECT_EQ(run_cli({"estimate", "-i", (dir / "f.csv").string(), "-e", "nope", "-o", (dir / "x.csv").string()}).code, 3);
    EXPECT_EQ(run_cli({"estimate", "-i", (dir / "f.csv").string(), "--bjs-pre", "5", "-o", (dir / "x.csv").string()}).code, 3);
    EXPECT_EQ(run_cli({"frobnicate"}).code, 3);
    EXPECT_EQ(run_cli({}).code, 3);
    EXPECT_EQ(run_cli({"simulate"}).code, 3);
    EXPECT_EQ(run_cli({"simulate", "--gamma", "abc", "--out", (dir / "x.csv").string()}).code, 3);
    EXPECT_EQ(run_cli({"simulate", "--n-treated", "0", "--out", (dir / "x.csv").string()}).code, 2);
    EXPECT_FALSE(fs::exists(dir / "x.csv"));

    EXPECT_EQ(run_cli({"estimate", "-i", (dir / "absent.csv").string(), "-o", (dir / "x.csv").string()}).code, 4);
    EXPECT_EQ(run_cli({"simulate", "--out", (dir / "no_dir" / "x.csv").string()}).code, 4);
    EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST(Cli, ConfigFileAndOverride) {
    TempDir dir;
    write_text(dir / "sim.cfg", "# small design\ngamma = 1  # slope\nt_min=-2\nt-max=1\nn_treated=1\nn_control=1\n");
    auto r = run_cli({"simulate", "--config", (dir / "sim.cfg").string(), "--n-control", "2", "--out",
                      (dir / "p.csv").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("gamma=1\n"), std::string::npos);
    EXPECT_NE(r.out.find("n_control=2\n"), std::string::npos);
    EXPECT_EQ(line_count(slurp(dir / "p.csv")), 13u);

    write_text(dir / "bad.cfg", "colour=blue\n");
    EXPECT_EQ(run_cli({"simulate", "--config", (dir / "bad.cfg").string(), "--out", (dir / "q.csv").string()}).code, 3);
    EXPECT_EQ(run_cli({"simulate", "--config", (dir / "none.cfg").string(), "--out", (dir / "q.csv").string()}).code, 4);
}

TEST(Cli, PlotSplitBjsAndDeterminism) {
    TempDir dir;
    ASSERT_EQ(run_cli({"simulate", "--out", (dir / "p.csv").string()}).code, 0);
    ASSERT_EQ(run_cli({"estimate", "-i", (dir / "p.csv").string(), "-B", "20", "-o", (dir / "e.csv").string()}).code, 0);
    auto r = run_cli({"plot", "-i", (dir / "e.csv").string(), "-o", (dir / "fig.svg").string(), "--split-bjs",
                      "--overlay-population", "0.5"});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* name : {"fig_twfe.svg", "fig_cs_dcdh_default.svg", "fig_cs_dcdh_universal.svg", "fig_bjs_pre.svg",
                             "fig_bjs_post.svg"}) {
        EXPECT_TRUE(fs::exists(dir / name)) << name;
    }
    EXPECT_FALSE(fs::exists(dir / "fig_bjs.svg"));
    const auto first = slurp(dir / "fig_twfe.svg");
    ASSERT_EQ(run_cli({"plot", "-i", (dir / "e.csv").string(), "-o", (dir / "fig.svg").string(), "--split-bjs",
                       "--overlay-population", "0.5"})
                  .code,
              0);
    EXPECT_EQ(slurp(dir / "fig_twfe.svg"), first);
    EXPECT_EQ(first.rfind("<svg", 0), 0u);
    EXPECT_NE(first.find("</svg>"), std::string::npos);
}

TEST(Cli, PlotSingleCoefficientAndEmptyTable) {
    TempDir dir;
    write_text(dir / "one.csv", std::string(io::kEstimateHeader) + "\ntwfe,0,0.5,0.1,0.3,0.7,0\n");
    ASSERT_EQ(run_cli({"plot", "-i", (dir / "one.csv").string(), "-o", (dir / "one.svg").string()}).code, 0);
    const auto svg = slurp(dir / "one_twfe.svg");
    EXPECT_NE(svg.find("<circle"), std::string::npos);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);

    write_text(dir / "empty.csv", std::string(io::kEstimateHeader) + "\n");
    EXPECT_EQ(run_cli({"plot", "-i", (dir / "empty.csv").string(), "-o", (dir / "e.svg").string()}).code, 2);
    EXPECT_EQ(run_cli({"plot", "-i", (dir / "absent.csv").string(), "-o", (dir / "e.svg").string()}).code, 4);
}

TEST(Cli, MonteCarloTable) {
    TempDir dir;
    const auto r = run_cli({"montecarlo", "--draws", "20", "--gamma", "0", "--t-min", "-3", "--t-max", "2",
                            "--n-treated", "5", "--n-control", "5", "-o", (dir / "mc.csv").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(slurp(dir / "mc.csv"));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, io::kMonteCarloHeader);
    int rows = 0;
    while (std::getline(in, line)) {
        const auto fields = io::split_csv_line(line);
        ASSERT_EQ(fields.size(), 6u);
        EXPECT_EQ(io::parse_double(fields[3], "population"), 0.0);
        ++rows;
    }
    // twfe, universal: 5 each; cs default: 5; bjs: 5.
    EXPECT_EQ(rows, 20);
    EXPECT_EQ(run_cli({"montecarlo", "--draws", "1", "-o", (dir / "mc2.csv").string()}).code, 3);
}

TEST(Plot, SvgHasNoRunDependentText) {
    const auto e = cs_dcdh_default(fixtures::four_cell_fixture());
    plot::PlotOptions options;
    options.population_gamma = 0.5;
    const auto a = plot::render_svg(e, options);
    EXPECT_EQ(a, plot::render_svg(e, options));
    EXPECT_EQ(plot::infer_t_min(e), -2);
}
