#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "peit/experiments.hpp"
#include "peit/observables.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace peit;

namespace
{

std::filesystem::path scratch_dir(std::string const& name)
{
    auto const dir = std::filesystem::temp_directory_path() / ("peit_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

std::string slurp(std::filesystem::path const& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Table const& find_table(std::vector<Table> const& tables, std::string const& name)
{
    for (auto const& t : tables)
        if (t.name == name) return t;
    FAIL("missing table " << name);
    throw std::logic_error("unreachable");
}

std::vector<double> column(Table const& t, std::size_t c)
{
    std::vector<double> out;
    for (auto const& r : t.rows) out.push_back(r[c]);
    return out;
}

}  // namespace

TEST_CASE("csv format")
{
    Table t{"x", {"t", "value"}, {{0.1, 1.0 / 3.0}, {2.0, -1e-20}}};
    CHECK(to_csv(t) == "t,value\n0.1,0.333333333333\n2,-1e-20\n");
    Table bad{"bad", {"a", "b"}, {{1.0}}};
    CHECK_THROWS_AS(to_csv(bad), std::logic_error);
}

TEST_CASE("figure ids")
{
    for (auto id : all_figures()) CHECK(parse_figure_id(to_string(id)) == id);
    CHECK(all_figures().size() == 8);
    CHECK_THROWS_AS(parse_figure_id("fig9"), std::invalid_argument);
}

TEST_CASE("sweep validation and shape")
{
    SweepRequest req{{Mode::DoubleMod, 0.1}, {1.0, 1.0, 0.0, {}}, SweepAxis::Delta, {0.0},
                     SweepObservable::Envelope, 1.0, std::nullopt};
    auto const one = sweep(req);
    REQUIRE(one.values.size() == 1);
    CHECK(one.values[0][0] == doctest::Approx(3.0 * 0.1 / 32.0).epsilon(1e-12));
    CHECK(one.metadata.at("observable") == "envelope");

    req.grid = {};
    CHECK_THROWS_AS(sweep(req), std::invalid_argument);
    req.grid = {0.1, 0.1};
    CHECK_THROWS_AS(sweep(req), std::invalid_argument);
    req.grid = {0.3, 0.2, 0.1};
    CHECK_NOTHROW(sweep(req));
    req.axis = SweepAxis::Tau;
    req.grid = {0.1, -0.1};
    CHECK_THROWS_AS(sweep(req), std::invalid_argument);
}

TEST_CASE("envelope sweep: minimum at resonance, value 3 tau / 32")
{
    for (double tau : {0.01, 0.1, 0.5}) {
        SweepRequest req{{Mode::DoubleMod, tau}, {1.0, 1.0, 0.0, {}}, SweepAxis::Delta, linspace(-0.2, 0.2, 41),
                         SweepObservable::Envelope, 1.0, std::nullopt};
        auto const res = sweep(req);
        std::size_t best = 0;
        for (std::size_t i = 1; i < res.values.size(); ++i)
            if (res.values[i][0] < res.values[best][0]) best = i;
        CHECK(res.axis[best] == doctest::Approx(0.0));
    }

    ExperimentSpec spec{FigureId::Fig4Am, {{"tau", "0.01"}}, ".", 0, false};
    auto const tables = compute_figure(spec);
    REQUIRE(tables.size() == 1);
    auto const& t = tables[0];
    CHECK(t.header == std::vector<std::string>{"delta", "value"});
    CHECK(t.rows.size() == 81);
    CHECK(t.rows[40][0] == 0.0);
    CHECK(t.rows[40][1] == doctest::Approx(9.375e-4).epsilon(1e-12));
}

TEST_CASE("parallel and serial sweeps agree exactly")
{
    SweepRequest req{{Mode::DoubleMod, 0.5}, {1.0, 1.0, 0.0, DecaySpec::projector(1.0)}, SweepAxis::Delta,
                     linspace(-0.5, 0.5, 11), SweepObservable::Plateau, 20.0, std::nullopt};
    auto const serial = sweep_serial(req);
    for (int jobs : {0, 1, 2, 4}) {
        auto const par = sweep(req, jobs);
        CHECK(par.values == serial.values);
        CHECK(par.axis == serial.axis);
    }

    req.observable = SweepObservable::OscStats;
    req.axis = SweepAxis::Tau;
    req.params.decay = DecaySpec::none();
    req.grid = {0.1, 0.3, 0.7};
    CHECK(sweep(req, 3).values == sweep_serial(req).values);
}

TEST_CASE("reproduce fig2 writes five csv files and is byte-identical across runs")
{
    auto const a = scratch_dir("fig2a");
    auto const b = scratch_dir("fig2b");
    auto const files_a = reproduce_figure({FigureId::Fig2, {}, a, 0, false});
    auto const files_b = reproduce_figure({FigureId::Fig2, {}, b, 1, false});
    REQUIRE(files_a.size() == 5);
    REQUIRE(files_b.size() == 5);
    for (std::size_t i = 0; i < files_a.size(); ++i) {
        CHECK(files_a[i].filename() == files_b[i].filename());
        auto const text = slurp(files_a[i]);
        CHECK(text == slurp(files_b[i]));
        CHECK(text.find('\r') == std::string::npos);
    }
    CHECK(slurp(a / "fig2_single_tau0.1.csv").rfind("t,F_numeric,F_analytic\n", 0) == 0);
    CHECK(slurp(a / "fig2_double.csv").rfind("tau,t,F_numeric,F_analytic\n", 0) == 0);

    auto const svg = scratch_dir("fig2svg");
    auto const with_svg = reproduce_figure({FigureId::Fig2, {}, svg, 0, true});
    CHECK(with_svg.size() == 10);
    CHECK(slurp(svg / "fig2_double.svg").rfind("<svg", 0) == 0);

    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
    std::filesystem::remove_all(svg);
}

TEST_CASE("reproduce_figure errors")
{
    auto const dir = scratch_dir("err");
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "file") << "x";
    CHECK_THROWS_AS(reproduce_figure({FigureId::Fig2, {}, dir / "file" / "sub", 0, false}), io_error);
    CHECK_THROWS_AS(compute_figure({FigureId::Fig2, {{"gamma", "1"}}, dir, 0, false}), std::invalid_argument);
    CHECK_THROWS_AS(compute_figure({FigureId::Fig2, {{"tau", "fast"}}, dir, 0, false}), std::invalid_argument);
    CHECK_THROWS_AS(compute_figure({FigureId::Fig5, {{"decay", "heavy"}}, dir, 0, false}), std::invalid_argument);
    std::filesystem::remove_all(dir);
}

TEST_CASE("fig3 sweep matches the closed-form extrema")
{
    auto const tables = compute_figure({FigureId::Fig3, {}, ".", 0, false});
    for (auto const& t : tables) {
        for (auto const& r : t.rows) {
            if (r[0] > 1.0 + 1e-12) continue;
            CHECK(std::abs(r[1] - r[3]) <= 0.02);
            CHECK(std::abs(r[2] - r[4]) <= 0.02);
        }
    }
    // double-modulation centre approaches 1 as tau shrinks
    auto const centre = column(find_table(tables, "fig3_double"), 2);
    for (std::size_t i = 1; i < centre.size(); ++i) CHECK(centre[i] < centre[i - 1]);
}

TEST_CASE("fig5 panels: ordering at resonance and window-width stability")
{
    auto const tables = compute_figure({FigureId::Fig5, {}, ".", 0, false});
    CHECK(tables.size() == 10);
    double previous = 1.0;
    std::vector<double> widths;
    for (std::string label : {"tau0.8", "tau0.5", "tau0.2", "tau0.01", "standard"}) {
        auto const& b = find_table(tables, "fig5b_" + label);
        REQUIRE(b.rows.size() == 81);
        double const at_zero = b.rows[40][1];
        CHECK(at_zero < previous);
        previous = at_zero;
        if (label != "standard") widths.push_back(window_full_width(column(b, 0), column(b, 1)));
        auto const& a = find_table(tables, "fig5a_" + label);
        CHECK(a.header == std::vector<std::string>{"t", "absorption_numeric"});
        CHECK(a.rows.back()[0] == doctest::Approx(100.0));
    }
    auto const [lo, hi] = std::minmax_element(widths.begin(), widths.end());
    CHECK((*hi - *lo) / *lo < 0.25);
}
