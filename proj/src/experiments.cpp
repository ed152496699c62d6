#include "peit/experiments.hpp"

#include "peit/analytic.hpp"
#include "peit/observables.hpp"
#include "peit/open_system.hpp"
#include "peit/propagate.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <set>

namespace peit
{

namespace
{

// Evaluates f(0..n-1) on up to `jobs` threads and returns results by index.
// The exception of the lowest failing index is rethrown.
template <class R>
std::vector<R> ordered_map(std::size_t n, int jobs, std::function<R(std::size_t)> const& f)
{
    std::vector<R> out(n);
    std::vector<std::exception_ptr> errors(n);
    int const threads = jobs > 0 ? jobs : omp_get_max_threads();
    auto const count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(threads) if (!omp_in_parallel() && threads > 1)
    for (long i = 0; i < count; ++i) {
        auto const idx = static_cast<std::size_t>(i);
        try {
            out[idx] = f(idx);
        } catch (...) {
            errors[idx] = std::current_exception();
        }
    }
    for (auto const& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string short_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

double parse_number(std::string const& key, std::string const& text)
{
    double v = 0.0;
    auto const* first = text.data();
    auto const* last = text.data() + text.size();
    auto const [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
        throw std::invalid_argument("override " + key + ": '" + text + "' is not a finite number");
    }
    return v;
}

std::vector<double> parse_number_list(std::string const& key, std::string const& text)
{
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto const comma = text.find(',', start);
        auto const end = comma == std::string::npos ? text.size() : comma;
        out.push_back(parse_number(key, text.substr(start, end - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::set<std::string> const& override_keys()
{
    static std::set<std::string> const keys{"tau", "omega_c", "omega_p", "delta", "decay", "t_end", "probe"};
    return keys;
}

// Figure defaults with the spec's overrides applied.
struct FigureSetup
{
    SystemParams params;
    std::vector<double> taus;
    double t_end = 0.0;
    double probe = 0.0;
    int jobs = 0;
};

FigureSetup setup_for(ExperimentSpec const& spec, FigureSetup defaults)
{
    auto const& o = spec.overrides;
    auto number = [&](char const* key, double fallback) {
        auto const it = o.find(key);
        return it == o.end() ? fallback : parse_number(key, it->second);
    };
    FigureSetup s = defaults;
    s.params.omega_c = number("omega_c", s.params.omega_c);
    s.params.omega_p = number("omega_p", s.params.omega_p);
    s.params.delta = number("delta", s.params.delta);
    if (auto const it = o.find("decay"); it != o.end()) s.params.decay = DecaySpec::parse(it->second);
    if (auto const it = o.find("tau"); it != o.end()) s.taus = parse_number_list("tau", it->second);
    s.t_end = number("t_end", s.t_end);
    s.probe = number("probe", s.probe);
    s.jobs = spec.jobs;
    s.params.validate();
    for (double tau : s.taus) ModulationSchedule{Mode::DoubleMod, tau}.validate();
    return s;
}

using Task = std::function<Table()>;

std::vector<Table> run_tasks(std::vector<Task> const& tasks, int jobs)
{
    return ordered_map<Table>(tasks.size(), jobs, [&](std::size_t i) { return tasks[i](); });
}

std::vector<Table> figure2(ExperimentSpec const& spec)
{
    auto const single = setup_for(spec, {{1.0, 1.0, 0.0, {}}, {1.9, 1.6, 0.8, 0.1}, 60.0, 0.0, 0});
    auto const dbl = setup_for(spec, {{1.0, 1.0, 0.0, {}}, {0.1, 0.5, 0.8, 1.6, 1.9}, 60.0, 0.0, 0});
    auto const psi0 = dark_state(single.params);

    std::vector<Task> tasks;
    for (double tau : single.taus) {
        tasks.push_back([=] {
            Table t{"fig2_single_tau" + short_number(tau), {"t", "F_numeric", "F_analytic"}, {}};
            auto const traj = evolve_pure(psi0, {Mode::SingleMod, tau}, single.params, single.t_end);
            for (std::size_t i = 0; i < traj.times.size(); ++i) {
                t.rows.push_back({traj.times[i], fidelity(psi0, traj.states[i]),
                                  analytic::fidelity_single(traj.times[i], tau)});
            }
            return t;
        });
    }
    tasks.push_back([=] {
        Table t{"fig2_double", {"tau", "t", "F_numeric", "F_analytic"}, {}};
        for (double tau : dbl.taus) {
            auto const traj = evolve_pure(psi0, {Mode::DoubleMod, tau}, dbl.params, dbl.t_end);
            for (std::size_t i = 0; i < traj.times.size(); ++i) {
                t.rows.push_back({tau, traj.times[i], fidelity(psi0, traj.states[i]),
                                  analytic::fidelity_double(traj.times[i], tau)});
            }
        }
        return t;
    });
    return run_tasks(tasks, single.jobs);
}

std::vector<Table> figure3(ExperimentSpec const& spec)
{
    auto const s = setup_for(spec, {{1.0, 1.0, 0.0, {}}, linspace(0.1, 1.9, 19), 0.0, 100.0, 0});
    std::vector<Table> out;
    for (auto mode : {Mode::SingleMod, Mode::DoubleMod}) {
        SweepRequest req{{mode, s.taus.front()}, s.params, SweepAxis::Tau, s.taus,
                         SweepObservable::OscStats, s.probe, std::nullopt};
        auto const res = sweep(req, s.jobs);
        Table t{std::string("fig3_") + std::string(to_string(mode)),
                {"tau", "amplitude_numeric", "center_numeric", "amplitude_analytic", "center_analytic"},
                {}};
        for (std::size_t i = 0; i < res.axis.size(); ++i) {
            double const tau = res.axis[i];
            auto const ex = mode == Mode::SingleMod ? analytic::fidelity_single_extrema(tau)
                                                    : analytic::fidelity_double_extrema(tau);
            t.rows.push_back({tau, res.values[i][0], res.values[i][1], ex.amplitude(), ex.center()});
        }
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<Table> figure4_te(ExperimentSpec const& spec)
{
    auto const s = setup_for(spec, {{1.0, 1.0, -0.1, {}}, {0.1}, 200.0, 0.0, 0});
    std::vector<Table> out;
    auto const psi0 = dark_state(s.params);
    for (double tau : s.taus) {
        std::string const suffix = s.taus.size() > 1 ? "_tau" + short_number(tau) : "";
        auto const traj = evolve_pure(psi0, {Mode::DoubleMod, tau}, s.params, s.t_end);
        auto const c = analytic::detuned_coeffs(tau, s.params.delta);
        Table f{"fig4_te_fidelity" + suffix, {"t", "F_numeric", "F_analytic"}, {}};
        Table a{"fig4_te_absorption" + suffix, {"t", "absorption_numeric", "absorption_analytic"}, {}};
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            double const t = traj.times[i];
            f.rows.push_back({t, fidelity(psi0, traj.states[i]), analytic::fidelity_detuned(t, c)});
            a.rows.push_back({t, absorption_of(traj.states[i]), analytic::absorption_detuned(t, c)});
        }
        out.push_back(std::move(f));
        out.push_back(std::move(a));
    }
    return out;
}

std::vector<Table> figure4_am(ExperimentSpec const& spec)
{
    auto const s = setup_for(spec, {{1.0, 1.0, 0.0, {}}, {0.01, 0.1, 0.2, 0.5}, 0.0, 0.0, 0});
    std::vector<Table> out;
    for (double tau : s.taus) {
        SweepRequest req{{Mode::DoubleMod, tau}, s.params, SweepAxis::Delta, linspace(-0.5, 0.5, 81),
                         SweepObservable::Envelope, 1.0, std::nullopt};
        out.push_back(sweep(req, s.jobs).to_table("fig4_am_tau" + short_number(tau), 0));
    }
    return out;
}

// Absorption traces (panel a) and plateau-vs-detuning sweeps (panel b) for
// the modulated taus plus the unmodulated reference.
std::vector<Table> decay_figure(std::string const& prefix, FigureSetup const& s,
                                std::optional<DensityMatrix> const& initial, std::vector<double> const& delta_grid)
{
    std::vector<std::pair<std::string, ModulationSchedule>> schedules;
    for (double tau : s.taus) schedules.emplace_back("tau" + short_number(tau), ModulationSchedule{Mode::DoubleMod, tau});
    schedules.emplace_back("standard", ModulationSchedule{Mode::Standard, standard_reference_period});

    std::vector<Task> tasks;
    for (auto const& [label, schedule] : schedules) {
        tasks.push_back([=] {
            auto const rho0 = initial ? *initial : DensityMatrix::from_pure(dark_state(s.params));
            auto const traj = evolve_master(rho0, schedule, s.params, s.t_end, true, 10);
            auto const series = absorption_series(traj);
            Table t{prefix + "a_" + label, {"t", "absorption_numeric"}, {}};
            for (std::size_t i = 0; i < series.size(); ++i) t.rows.push_back({series.times()[i], series.values()[i]});
            return t;
        });
    }
    auto out = run_tasks(tasks, s.jobs);
    for (auto const& [label, schedule] : schedules) {
        SweepRequest req{schedule, s.params, SweepAxis::Delta, delta_grid, SweepObservable::Plateau, s.probe, initial};
        out.push_back(sweep(req, s.jobs).to_table(prefix + "b_" + label, 0));
    }
    return out;
}

std::vector<Table> figure5(ExperimentSpec const& spec, DecaySpec decay, std::string const& prefix)
{
    auto const s = setup_for(spec, {{1.0, 1.0, -0.1, decay}, {0.8, 0.5, 0.2, 0.01}, 100.0, 80.0, 0});
    return decay_figure(prefix, s, std::nullopt, linspace(-0.5, 0.5, 81));
}

std::vector<Table> figure6(ExperimentSpec const& spec, DecaySpec decay, std::string const& prefix)
{
    auto const s = setup_for(spec, {{std::sqrt(99.0), 1.0, 1.0, decay}, {0.8, 0.5, 0.2, 0.01}, 8.0, 8.0, 0});
    return decay_figure(prefix, s, mixed_initial(0.99, 0.01), linspace(-3.0, 3.0, 121));
}

std::vector<double> evaluate_point(SweepRequest const& r, double x)
{
    ModulationSchedule schedule = r.schedule;
    SystemParams params = r.params;
    if (r.axis == SweepAxis::Tau) {
        schedule.tau = x;
    } else {
        params.delta = x;
    }
    switch (r.observable) {
    case SweepObservable::Envelope:
        return {analytic::absorption_envelope(schedule.tau, params.delta)};
    case SweepObservable::Plateau: {
        auto const rho0 = r.initial ? *r.initial : DensityMatrix::from_pure(dark_state(params));
        auto const traj = evolve_master(rho0, schedule, params, r.probe);
        auto const p = plateau_value(absorption_series(traj), r.probe);
        return {p.value, p.flatness};
    }
    case SweepObservable::OscStats: {
        auto const psi0 = dark_state(params);
        auto const traj = evolve_pure(psi0, schedule, params, r.probe);
        auto const st = oscillation_stats(fidelity_series(traj, psi0), {0.0, traj.realized_end});
        return {st.amplitude, st.center};
    }
    }
    throw std::logic_error("unhandled sweep observable");
}

SweepResult sweep_shell(SweepRequest const& r)
{
    r.validate();
    SweepResult res;
    res.axis_name = std::string(to_string(r.axis));
    res.axis = r.grid;
    switch (r.observable) {
    case SweepObservable::Envelope:
        res.columns = {"envelope"};
        break;
    case SweepObservable::Plateau:
        res.columns = {"plateau", "flatness"};
        break;
    case SweepObservable::OscStats:
        res.columns = {"amplitude", "center"};
        break;
    }
    res.metadata = {
        {"mode", std::string(to_string(r.schedule.mode))},
        {"tau", format_number(r.schedule.tau)},
        {"omega_c", format_number(r.params.omega_c)},
        {"omega_p", format_number(r.params.omega_p)},
        {"delta", format_number(r.params.delta)},
        {"decay", r.params.decay.to_string()},
        {"observable", std::string(to_string(r.observable))},
        {"probe", format_number(r.probe)},
    };
    return res;
}

void write_svg(std::filesystem::path const& path, Table const& table)
{
    if (table.rows.empty() || table.header.size() < 2) return;
    // fig2_double carries a leading tau column; plot against t instead.
    std::size_t const xc = table.header.size() > 2 && table.header[0] == "tau" && table.header[1] == "t" ? 1 : 0;
    double xmin = table.rows.front()[xc], xmax = xmin;
    double ymin = table.rows.front()[xc + 1], ymax = ymin;
    for (auto const& row : table.rows) {
        xmin = std::min(xmin, row[xc]);
        xmax = std::max(xmax, row[xc]);
        for (std::size_t c = xc + 1; c < row.size(); ++c) {
            ymin = std::min(ymin, row[c]);
            ymax = std::max(ymax, row[c]);
        }
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;
    double const w = 640.0, h = 400.0, m = 50.0;
    auto px = [&](double x) { return m + (x - xmin) / (xmax - xmin) * (w - 2 * m); };
    auto py = [&](double y) { return h - m - (y - ymin) / (ymax - ymin) * (h - 2 * m); };
    char const* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\">\n";
    svg += "<rect x=\"50\" y=\"50\" width=\"540\" height=\"300\" fill=\"none\" stroke=\"black\"/>\n";
    svg += "<text x=\"320\" y=\"30\" text-anchor=\"middle\">" + table.name + "</text>\n";
    svg += "<text x=\"50\" y=\"370\">" + format_number(xmin) + "</text>\n";
    svg += "<text x=\"590\" y=\"370\" text-anchor=\"end\">" + format_number(xmax) + "</text>\n";
    svg += "<text x=\"45\" y=\"350\" text-anchor=\"end\">" + format_number(ymin) + "</text>\n";
    svg += "<text x=\"45\" y=\"55\" text-anchor=\"end\">" + format_number(ymax) + "</text>\n";
    for (std::size_t c = xc + 1; c < table.header.size(); ++c) {
        std::string const color = colors[(c - xc - 1) % 4];
        std::string points;
        auto flush = [&] {
            if (!points.empty()) {
                svg += "<polyline fill=\"none\" stroke=\"" + color + "\" points=\"" + points + "\"/>\n";
            }
            points.clear();
        };
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
            if (i > 0 && table.rows[i][xc] <= table.rows[i - 1][xc]) flush();
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(table.rows[i][xc]), py(table.rows[i][c]));
            points += buf;
        }
        flush();
        svg += "<text x=\"600\" y=\"" + std::to_string(70 + 20 * (c - xc - 1)) + "\" fill=\"" + color + "\">"
               + table.header[c] + "</text>\n";
    }
    svg += "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    out << svg;
    if (!out) throw io_error("cannot write " + path.string());
}

}  // namespace

std::string_view to_string(FigureId id)
{
    switch (id) {
    case FigureId::Fig2: return "fig2";
    case FigureId::Fig3: return "fig3";
    case FigureId::Fig4Te: return "fig4_te";
    case FigureId::Fig4Am: return "fig4_am";
    case FigureId::Fig5: return "fig5";
    case FigureId::Fig6: return "fig6";
    case FigureId::Fig7: return "fig7";
    case FigureId::Fig8: return "fig8";
    }
    return "?";
}

std::vector<FigureId> all_figures()
{
    return {FigureId::Fig2, FigureId::Fig3, FigureId::Fig4Te, FigureId::Fig4Am,
            FigureId::Fig5, FigureId::Fig6, FigureId::Fig7,   FigureId::Fig8};
}

FigureId parse_figure_id(std::string_view text)
{
    for (auto id : all_figures())
        if (to_string(id) == text) return id;
    throw std::invalid_argument("unknown figure id '" + std::string(text) + "'");
}

std::string_view to_string(SweepAxis axis)
{
    return axis == SweepAxis::Tau ? "tau" : "delta";
}

std::string_view to_string(SweepObservable observable)
{
    switch (observable) {
    case SweepObservable::Envelope: return "envelope";
    case SweepObservable::Plateau: return "plateau";
    case SweepObservable::OscStats: return "osc_stats";
    }
    return "?";
}

SweepAxis parse_sweep_axis(std::string_view text)
{
    if (text == "tau") return SweepAxis::Tau;
    if (text == "delta") return SweepAxis::Delta;
    throw std::invalid_argument("unknown sweep axis '" + std::string(text) + "'");
}

SweepObservable parse_sweep_observable(std::string_view text)
{
    for (auto o : {SweepObservable::Envelope, SweepObservable::Plateau, SweepObservable::OscStats})
        if (to_string(o) == text) return o;
    throw std::invalid_argument("unknown sweep observable '" + std::string(text) + "'");
}

std::string to_csv(Table const& table)
{
    std::string out;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) out += ',';
        out += table.header[i];
    }
    out += '\n';
    for (auto const& row : table.rows) {
        if (row.size() != table.header.size()) {
            throw std::logic_error("table " + table.name + ": row width differs from header");
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_number(row[i]);
        }
        out += '\n';
    }
    return out;
}

void write_csv(std::filesystem::path const& path, Table const& table)
{
    auto const text = to_csv(table);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw io_error("write failed for " + path.string());
}

void ExperimentSpec::validate() const
{
    for (auto const& [key, value] : overrides) {
        if (!override_keys().contains(key)) {
            throw std::invalid_argument("unknown override key '" + key + "'");
        }
        if (key == "decay") {
            DecaySpec::parse(value);
        } else if (key == "tau") {
            for (double tau : parse_number_list(key, value)) ModulationSchedule{Mode::DoubleMod, tau}.validate();
        } else {
            parse_number(key, value);
        }
    }
    if (jobs < 0) throw std::invalid_argument("jobs must be non-negative");
}

std::vector<Table> compute_figure(ExperimentSpec const& spec)
{
    spec.validate();
    switch (spec.figure) {
    case FigureId::Fig2: return figure2(spec);
    case FigureId::Fig3: return figure3(spec);
    case FigureId::Fig4Te: return figure4_te(spec);
    case FigureId::Fig4Am: return figure4_am(spec);
    case FigureId::Fig5: return figure5(spec, DecaySpec::projector(1.0), "fig5");
    case FigureId::Fig6: return figure6(spec, DecaySpec::projector(5.0), "fig6");
    case FigureId::Fig7: return figure5(spec, DecaySpec::lindblad(0.5, 0.5), "fig7");
    case FigureId::Fig8: return figure6(spec, DecaySpec::lindblad(2.5, 2.5), "fig8");
    }
    throw std::invalid_argument("unknown figure id");
}

std::vector<std::filesystem::path> reproduce_figure(ExperimentSpec const& spec)
{
    spec.validate();
    std::error_code ec;
    std::filesystem::create_directories(spec.output_dir, ec);
    if (ec || !std::filesystem::is_directory(spec.output_dir)) {
        throw io_error("cannot create output directory " + spec.output_dir.string());
    }
    std::vector<std::filesystem::path> written;
    for (auto const& table : compute_figure(spec)) {
        auto const csv = spec.output_dir / (table.name + ".csv");
        write_csv(csv, table);
        written.push_back(csv);
        if (spec.svg) {
            auto const svg = spec.output_dir / (table.name + ".svg");
            write_svg(svg, table);
            written.push_back(svg);
        }
    }
    return written;
}

void SweepRequest::validate() const
{
    if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
    for (double x : grid)
        if (!std::isfinite(x)) throw std::invalid_argument("sweep: non-finite grid value");
    if (grid.size() > 1) {
        bool const up = grid[1] > grid[0];
        for (std::size_t i = 1; i < grid.size(); ++i) {
            if (up ? !(grid[i] > grid[i - 1]) : !(grid[i] < grid[i - 1])) {
                throw std::invalid_argument("sweep: grid must be strictly monotone");
            }
        }
    }
    if (!(probe > 0.0) || !std::isfinite(probe)) throw std::invalid_argument("sweep: probe time must be positive");
    params.validate();
    if (axis == SweepAxis::Tau) {
        for (double tau : grid) ModulationSchedule{schedule.mode, tau}.validate();
    } else {
        schedule.validate();
    }
}

Table SweepResult::to_table(std::string name) const
{
    Table t{std::move(name), {axis_name}, {}};
    t.header.insert(t.header.end(), columns.begin(), columns.end());
    for (std::size_t i = 0; i < axis.size(); ++i) {
        std::vector<double> row{axis[i]};
        row.insert(row.end(), values[i].begin(), values[i].end());
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table SweepResult::to_table(std::string name, std::size_t column) const
{
    if (column >= columns.size()) throw std::out_of_range("sweep result column out of range");
    Table t{std::move(name), {axis_name, "value"}, {}};
    for (std::size_t i = 0; i < axis.size(); ++i) t.rows.push_back({axis[i], values[i][column]});
    return t;
}

SweepResult sweep(SweepRequest const& request, int jobs)
{
    auto res = sweep_shell(request);
    res.values = ordered_map<std::vector<double>>(request.grid.size(), jobs, [&](std::size_t i) {
        return evaluate_point(request, request.grid[i]);
    });
    return res;
}

SweepResult sweep_serial(SweepRequest const& request)
{
    auto res = sweep_shell(request);
    res.values.reserve(request.grid.size());
    for (double x : request.grid) res.values.push_back(evaluate_point(request, x));
    return res;
}

std::vector<double> linspace(double lo, double hi, std::size_t n)
{
    if (n == 0) return {};
    if (n == 1) return {lo};
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * double(i) / double(n - 1);
    out.back() = hi;
    return out;
}

}  // namespace peit
