#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "blowup/commands.hpp"
#include "blowup/io.hpp"

using namespace blowup;
using json = nlohmann::json;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
const double nan_ = std::numeric_limits<double>::quiet_NaN();

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

const ModelParams m43 = ModelParams::make(4, 3.0);

}  // namespace

TEST(Numbers, NonFiniteAsStrings) {
    EXPECT_EQ(io::number(nan_), "nan");
    EXPECT_EQ(io::number(inf), "infinite");
    EXPECT_EQ(io::number(-inf), "-infinite");
    EXPECT_EQ(io::number(1.5), 1.5);
    EXPECT_TRUE(std::isnan(io::to_double("nan")));
    EXPECT_EQ(io::to_double("infinite"), inf);
    EXPECT_EQ(io::to_double(json(2)), 2.0);
    EXPECT_THROW(io::to_double("many"), DomainError);
    EXPECT_THROW(io::to_double(json::array()), DomainError);
}

TEST(Numbers, FormatRoundTrips) {
    for (double x : {0.0, -0.0, 1.0, 0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, -2.5, inf, -inf, nan_}) {
        EXPECT_TRUE(same(io::parse_double(io::format_double(x)), x)) << io::format_double(x);
    }
    EXPECT_EQ(io::format_double(0.5), "0.5");
    EXPECT_THROW(io::parse_double("1,5"), DomainError);
    EXPECT_THROW(io::parse_double(""), DomainError);
    EXPECT_THROW(io::parse_double("3x"), DomainError);
}

TEST(Reports, CriterionRoundTrip) {
    for (const auto& u : {RadialProfile::singular(m43, 2.0), RadialProfile::singular(m43, 1.0),
                          RadialProfile::truncated_singular(m43, 2.0, 10.0)}) {
        const auto r = check_blowup_criterion(u, m43);
        const auto back = io::criterion_report_from_json(json::parse(io::to_json(r).dump()));
        EXPECT_EQ(back.quantity, r.quantity);
        EXPECT_EQ(back.argmax_T, r.argmax_T);
        EXPECT_EQ(back.threshold, r.threshold);
        EXPECT_EQ(back.verdict, r.verdict);
        EXPECT_EQ(back.margin, r.margin);
        EXPECT_EQ(back.blowup_time_bound, r.blowup_time_bound);
    }
}

TEST(Reports, DivergentCriterionSerialization) {
    const auto m = ModelParams::make(3, 2.0);
    const auto r = check_blowup_criterion(RadialProfile::constant(1.0), m);
    const auto j = io::to_json(r);
    EXPECT_EQ(j.at("argmax_T"), "divergent");
    EXPECT_EQ(j.at("quantity"), "infinite");
    EXPECT_EQ(j.at("verdict"), "blowup_predicted");
    const auto back = io::criterion_report_from_json(j);
    EXPECT_FALSE(back.argmax_T.has_value());
    EXPECT_EQ(back.quantity, inf);

    const auto quiet = io::to_json(check_blowup_criterion(RadialProfile::singular(m43, 1.0), m43));
    EXPECT_EQ(quiet.at("blowup_time_bound"), "none");
    EXPECT_EQ(quiet.at("verdict"), "inconclusive");
}

TEST(Reports, ThresholdRoundTrip) {
    for (int d : {4, 10, 100}) {
        const auto r = threshold_report(d, 3.0);
        const auto back = io::threshold_report_from_json(json::parse(io::to_json(r).dump()));
        EXPECT_EQ(back.N_exact, r.N_exact);
        EXPECT_EQ(back.N_asymptotic, r.N_asymptotic);
        EXPECT_EQ(back.M_bound, r.M_bound);
        EXPECT_EQ(back.M_asymptotic, r.M_asymptotic);
        EXPECT_EQ(back.morrey_norm_uC, r.morrey_norm_uC);
    }
}

TEST(Reports, SummaryRoundTrip) {
    GridConfig g;
    g.n_cells = 512;
    for (double N : {2.0, 0.5}) {
        SimOptions opt;
        opt.T_ref = 0.5;
        const auto res = simulate(RadialProfile::truncated_singular(m43, N, 10.0), m43, g, 0.2, opt);
        const auto s = io::summarize(res, 3.0);
        const auto back = io::sim_summary_from_json(json::parse(io::to_json(s).dump()));
        EXPECT_EQ(back.status, s.status);
        EXPECT_EQ(back.t, s.t);
        EXPECT_TRUE(same(back.sup, s.sup));
        EXPECT_EQ(back.steps, s.steps);
        EXPECT_EQ(back.T_ref, s.T_ref);
        EXPECT_EQ(back.series_entries, s.series_entries);
        EXPECT_TRUE(same(back.barrier_max, s.barrier_max));
        EXPECT_EQ(back.moment_violations, s.moment_violations);
        EXPECT_TRUE(same(back.lower_bound_deficit, s.lower_bound_deficit));
    }
}

TEST(Reports, SummaryOfZeroRun) {
    SimOptions opt;
    opt.T_ref = 1.0;
    const auto res = simulate(RadialProfile::constant(0.0), m43, GridConfig{}, 0.1, opt);
    const auto s = io::summarize(res, 3.0);
    EXPECT_EQ(s.status, "survived");
    EXPECT_EQ(s.sup, 0.0);
    EXPECT_EQ(s.moment_violations, 0u);
    EXPECT_TRUE(std::isnan(s.lower_bound_deficit));
    EXPECT_EQ(io::to_json(s).at("lower_bound_deficit"), "nan");
}

TEST(Profiles, GrammarForEveryKind) {
    const json docs[] = {
        {{"kind", "singular"}, {"scale", 2.0}},
        {{"kind", "truncated_singular"}, {"scale", 0.5}, {"cap", 10.0}},
        {{"kind", "gaussian"}, {"amplitude", 3.0}, {"width", 0.5}},
        {{"kind", "indicator"}, {"amplitude", 1.0}, {"radius", 2.0}},
        {{"kind", "constant"}, {"level", 0.7}},
        {{"kind", "power_tail"}, {"amplitude", 1.0}, {"exponent", 3.0}},
        {{"kind", "sampled"}, {"r", {0.5, 1.0, 2.0}}, {"u", {3.0, 2.0, 1.0}}, {"tail_exponent", 2.0}},
    };
    for (const auto& doc : docs) {
        const auto u = io::profile_from_json(doc, m43);
        EXPECT_EQ(u.kind_name(), doc.at("kind").get<std::string>());
        // the serialized form reads back to a profile with identical values
        const auto again = io::profile_from_json(io::to_json(u), m43);
        for (double r : {0.01, 0.3, 1.0, 1.7, 5.0, 40.0}) EXPECT_EQ(again(r), u(r)) << doc.dump() << " r=" << r;
    }
}

TEST(Profiles, Defaults) {
    EXPECT_EQ(io::profile_from_json({{"kind", "gaussian"}}, m43)(0.0), 1.0);
    EXPECT_EQ(io::profile_from_json({{"kind", "singular"}}, m43)(1.0), singular_constant(4, 3.0));
    EXPECT_EQ(io::profile_from_json({{"kind", "indicator"}}, m43)(0.99), 1.0);
    EXPECT_EQ(io::profile_from_json({{"kind", "indicator"}}, m43)(1.01), 0.0);
}

TEST(Profiles, Rejections) {
    EXPECT_THROW(io::profile_from_json({{"kind", "triangle"}}, m43), DomainError);
    EXPECT_THROW(io::profile_from_json({{"scale", 1.0}}, m43), DomainError);
    EXPECT_THROW(io::profile_from_json(json::array(), m43), DomainError);
    EXPECT_THROW(io::profile_from_json({{"kind", "truncated_singular"}, {"scale", 1.0}}, m43), DomainError);
    EXPECT_THROW(io::profile_from_json({{"kind", "constant"}}, m43), DomainError);
    EXPECT_THROW(io::profile_from_json({{"kind", "singular"}}, ModelParams::make(3, 3.0)), DomainError);
}

TEST(Profiles, SampledFromCsvFile) {
    const auto dir = std::filesystem::temp_directory_path() / "blowup_io_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / "u0.csv");
        f << "r,u\n# comment\n0.5,4\n1,2\n2,1\n";
    }
    const json doc = {{"kind", "sampled"}, {"csv", "u0.csv"}, {"tail_exponent", 1.0}};
    const auto u = io::profile_from_json(doc, m43, dir);
    EXPECT_EQ(u(1.0), 2.0);
    EXPECT_NEAR(u(1.5), 2.0 - std::log(1.5) / std::log(2.0), 1e-15);  // linear in log r
    EXPECT_NEAR(u(4.0), 0.5, 1e-15);
    EXPECT_THROW(io::profile_from_json(doc, m43, dir / "missing"), DomainError);
    std::filesystem::remove_all(dir);
}

TEST(Profiles, TwoColumnCsvParsing) {
    std::istringstream ok("r,u\r\n1, 2\r\n\n3 ,4\n");
    const auto [r, u] = io::read_two_column_csv(ok);
    EXPECT_EQ(r, (std::vector<double>{1.0, 3.0}));
    EXPECT_EQ(u, (std::vector<double>{2.0, 4.0}));
    std::istringstream bad("1,2\nthree,4\n");
    EXPECT_THROW(io::read_two_column_csv(bad), DomainError);
}

TEST(Grid, JsonRoundTrip) {
    const json doc = {{"r_min", 0.4},       {"r_max", 8.0},           {"n_cells", 256},
                      {"spacing", "log"},   {"outer_neumann", true},  {"inner_dirichlet", true}};
    const auto g = io::grid_from_json(doc);
    EXPECT_EQ(g.r_min, 0.4);
    EXPECT_EQ(g.n_cells, 256);
    EXPECT_EQ(g.spacing, Spacing::log);
    EXPECT_TRUE(g.inner_dirichlet);
    const auto again = io::grid_from_json(io::to_json(g));
    EXPECT_EQ(io::to_json(again), io::to_json(g));
    EXPECT_THROW(io::grid_from_json({{"spacing", "chebyshev"}}), DomainError);
    EXPECT_THROW(io::grid_from_json({{"r_max", -1.0}}), DomainError);
}

TEST(Csv, HeaderDotSeparatorAndLf) {
    std::ostringstream out;
    io::write_thresholds_csv(out, threshold_report(4, 3.0));
    const auto text = out.str();
    EXPECT_EQ(text.find('\r'), std::string::npos);
    EXPECT_EQ(text.substr(0, text.find('\n')), "N_exact,N_asymptotic,M_bound,M_asymptotic,morrey_norm_uC");
    EXPECT_EQ(text.back(), '\n');
    EXPECT_NE(text.find("1.59576912"), std::string::npos);
}

TEST(Csv, LocaleIndependent) {
    // format_double never consults the global locale
    std::ostringstream out;
    out.imbue(std::locale::classic());
    io::csv_row(out, 1.25, "x", 3);
    EXPECT_EQ(out.str(), "1.25,x,3\n");
}

TEST(Csv, SeriesRoundTrip) {
    MomentSeries s;
    s.T_ref = 0.5;
    s.entries = {{0.0, 0.1, 1.0, 2.0}, {0.25, 0.2, 1.5, 2.5}, {0.5, nan_, 2.0, 3.0}};
    std::stringstream buf;
    io::write_series_csv(buf, s);
    const auto back = io::read_series_csv(buf, 0.5);
    ASSERT_EQ(back.entries.size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_EQ(back.entries[k].t, s.entries[k].t);
        EXPECT_TRUE(same(back.entries[k].W, s.entries[k].W));
        EXPECT_EQ(back.entries[k].mass_L1, s.entries[k].mass_L1);
        EXPECT_EQ(back.entries[k].sup_norm, s.entries[k].sup_norm);
    }
}

TEST(Csv, SnapshotColumns) {
    GridConfig g;
    g.n_cells = 64;
    const auto st = init_state(RadialProfile::gaussian(1.0, 1.0), g);
    std::ostringstream out;
    io::write_snapshot_csv(out, st);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "t,r,u");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, static_cast<int>(st.values.size()));
}

TEST(Csv, CriterionDivergentCells) {
    std::ostringstream out;
    io::write_criterion_csv(out, check_blowup_criterion(RadialProfile::constant(1.0), ModelParams::make(3, 2.0)));
    const auto text = out.str();
    const auto row = text.substr(text.find('\n') + 1);
    EXPECT_EQ(row.substr(0, row.find(',')), "infinite");
    EXPECT_NE(row.find(",divergent,"), std::string::npos);
}

TEST(Exponent, Parsing) {
    const auto a = cli::parse_exponent(std::string("3"));
    ASSERT_TRUE(a.ratio.has_value());
    EXPECT_EQ(a.value, 3.0);
    const auto b = cli::parse_exponent(std::string("5/3"));
    ASSERT_TRUE(b.ratio.has_value());
    EXPECT_EQ(b.ratio->num, 5);
    EXPECT_EQ(b.ratio->den, 3);
    const auto c = cli::parse_exponent(std::string("2.5"));
    EXPECT_FALSE(c.ratio.has_value());
    EXPECT_EQ(c.value, 2.5);
    EXPECT_EQ(cli::parse_exponent(json(2.5)).value, 2.5);
    EXPECT_TRUE(cli::parse_exponent(json("7/2")).ratio.has_value());
    for (const char* bad : {"", "x", "3/", "/2", "3/2/1", "2.5e"}) {
        EXPECT_THROW(cli::parse_exponent(std::string(bad)), DomainError) << bad;
    }
}

TEST(Exponent, ExactRatioReachesCriticalClassification) {
    cli::ExperimentConfig c;
    c.d = 3;
    c.p = cli::parse_exponent(std::string("5/3"));
    EXPECT_TRUE(classify_regime(c.params()).fujita_critical);
}

TEST(Config, FullDocument) {
    const json doc = {{"d", 4},
                      {"p", 3},
                      {"beta", 1.0},
                      {"T", 2.0},
                      {"profile", {{"kind", "truncated_singular"}, {"scale", 2.0}, {"cap", 10.0}}},
                      {"grid", {{"n_cells", 512}}},
                      {"t_max", 0.5},
                      {"record_interval", 0.01},
                      {"T_ref", 0.1},
                      {"snapshot_times", {0.001}},
                      {"refine", true},
                      {"blowup_sup_threshold", 1e7},
                      {"cfl_coeff", 0.2},
                      {"safety", 0.05},
                      {"sweep", {{"parameter", "scale"}, {"values", {1.0, 2.0}}}},
                      {"outputs", "out"}};
    const auto c = cli::config_from_json(doc, "/base");
    EXPECT_EQ(c.d, 4);
    EXPECT_EQ(c.params().p, 3.0);
    EXPECT_EQ(*c.beta, 1.0);
    EXPECT_EQ(c.weighted_T, 2.0);
    EXPECT_EQ(c.grid.n_cells, 512);
    EXPECT_EQ(c.t_max, 0.5);
    EXPECT_EQ(c.sim.record_interval, 0.01);
    EXPECT_EQ(*c.sim.T_ref, 0.1);
    EXPECT_EQ(c.sim.snapshot_times, std::vector<double>{0.001});
    EXPECT_TRUE(c.refine);
    EXPECT_EQ(c.sim.blowup_sup_threshold, 1e7);
    EXPECT_EQ(c.sim.step.cfl_coeff, 0.2);
    EXPECT_EQ(c.sim.step.safety, 0.05);
    EXPECT_EQ(c.sweep->values.size(), 2u);
    EXPECT_EQ(c.outputs, "out");
    EXPECT_EQ(c.base_dir, "/base");
    EXPECT_EQ(c.make_profile(c.params()).kind_name(), "truncated_singular");
}

TEST(Config, Rejections) {
    EXPECT_THROW(cli::config_from_json({{"dimension", 4}}), DomainError);
    EXPECT_THROW(cli::config_from_json(json::array()), DomainError);
    EXPECT_THROW(cli::ExperimentConfig{}.params(), DomainError);
    cli::ExperimentConfig c;
    c.d = 4;
    EXPECT_THROW(c.params(), DomainError);
    c.p = cli::parse_exponent(std::string("3"));
    EXPECT_THROW(c.make_profile(c.params()), DomainError);
    EXPECT_THROW(cli::load_config("/nonexistent/config.json"), DomainError);
}

TEST(Config, CriterionWithWeight) {
    auto c = cli::config_from_json({{"d", 3}, {"p", 2}, {"beta", 1.0}, {"profile", {{"kind", "gaussian"}}}});
    const auto j = cli::cmd_criterion(c);
    EXPECT_NEAR(io::to_double(j.at("weighted").at("bound")), 1.5 / std::sqrt(std::numbers::pi), 1e-8);
    EXPECT_EQ(j.at("weighted").at("T"), 1.0);
}

TEST(Config, SweepPreservesOrder) {
    auto c = cli::config_from_json({{"d", 4},
                                    {"p", 3},
                                    {"profile", {{"kind", "truncated_singular"}, {"scale", 1.0}, {"cap", 10.0}}},
                                    {"grid", {{"n_cells", 256}}},
                                    {"t_max", 0.05},
                                    {"sweep", {{"parameter", "scale"}, {"values", {2.0, 0.5, 1.6}}}}});
    const auto rows = cli::cmd_sweep(c);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].value, 2.0);
    EXPECT_EQ(rows[1].value, 0.5);
    EXPECT_EQ(rows[2].value, 1.6);
    EXPECT_EQ(rows[0].outcome, "blew_up");
    EXPECT_EQ(rows[1].outcome, "survived");
    c.sweep->values.clear();
    EXPECT_TRUE(cli::cmd_sweep(c).empty());
}
