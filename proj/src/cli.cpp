#include "peit/cli.hpp"

#include "peit/analytic.hpp"
#include "peit/experiments.hpp"
#include "peit/observables.hpp"
#include "peit/open_system.hpp"
#include "peit/propagate.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

namespace peit::cli
{

namespace
{

std::string exact(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(std::string_view s)
{
    auto const b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto const e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(std::string_view key, std::string_view text)
{
    auto const t = trim(text);
    double v = 0.0;
    auto const [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(key) + ": '" + std::string(text) + "' is not a finite number");
    }
    return v;
}

int to_int(std::string_view key, std::string_view text)
{
    auto const t = trim(text);
    int v = 0;
    auto const [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
        throw std::invalid_argument(std::string(key) + ": '" + std::string(text) + "' is not an integer");
    }
    return v;
}

std::vector<double> to_doubles(std::string_view key, std::string_view text)
{
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        auto const comma = text.find(',', start);
        out.push_back(to_double(key, text.substr(start, comma == std::string_view::npos ? text.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string_view to_string(OutputFormat f)
{
    return f == OutputFormat::Csv ? "csv" : "json";
}

OutputFormat parse_format(std::string_view text)
{
    if (text == "csv") return OutputFormat::Csv;
    if (text == "json") return OutputFormat::Json;
    throw std::invalid_argument("format must be csv or json, got '" + std::string(text) + "'");
}

std::string_view kind_name(DecaySpec::Kind k)
{
    switch (k) {
    case DecaySpec::Kind::None: return "none";
    case DecaySpec::Kind::Projector: return "projector";
    case DecaySpec::Kind::Lindblad: return "lindblad";
    }
    return "?";
}

DecaySpec::Kind parse_kind(std::string_view text)
{
    for (auto k : {DecaySpec::Kind::None, DecaySpec::Kind::Projector, DecaySpec::Kind::Lindblad})
        if (kind_name(k) == text) return k;
    throw std::invalid_argument("decay kind must be none, projector or lindblad, got '" + std::string(text) + "'");
}

// Output goes to --out, else $PEIT_OUT_DIR/<stem>.<ext>, else standard output.
void emit(std::string const& text, RunConfig const& cfg, std::string const& stem, std::ostream& out)
{
    std::filesystem::path path = cfg.out;
    if (path.empty()) {
        if (char const* dir = std::getenv("PEIT_OUT_DIR"); dir && *dir) {
            std::error_code ec;
            std::filesystem::create_directories(dir, ec);
            path = std::filesystem::path(dir) / (stem + "." + std::string(to_string(cfg.format)));
        }
    }
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open " + path.string() + " for writing");
    f << text;
    if (!f) throw io_error("write failed for " + path.string());
}

std::string render(Table const& table, OutputFormat format, std::map<std::string, std::string> const& metadata = {})
{
    if (format == OutputFormat::Csv) return to_csv(table);
    nlohmann::ordered_json j;
    j["name"] = table.name;
    j["columns"] = table.header;
    j["rows"] = table.rows;
    if (!metadata.empty()) j["metadata"] = metadata;
    return j.dump() + "\n";
}

std::map<std::string, std::string> describe(RunConfig const& cfg)
{
    return {{"mode", std::string(peit::to_string(cfg.schedule.mode))},
            {"tau", exact(cfg.schedule.tau)},
            {"omega_c", exact(cfg.params.omega_c)},
            {"omega_p", exact(cfg.params.omega_p)},
            {"delta", exact(cfg.params.delta)},
            {"decay", cfg.params.decay.to_string()},
            {"init", cfg.init.to_string()}};
}

Table simulate(RunConfig const& cfg)
{
    Table t{"simulate", {"t", "fidelity", "absorption", "rho_aa", "rho_bb", "rho_cc", "trace"}, {}};
    auto const reference = dark_state(cfg.params);
    if (cfg.init.is_pure() && cfg.params.decay.kind == DecaySpec::Kind::None) {
        auto const psi0 = cfg.init.pure(cfg.params);
        auto const traj = evolve_pure(psi0, cfg.schedule, cfg.params, cfg.t_end, cfg.samples_per_cycle);
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            auto const& s = traj.states[i];
            t.rows.push_back({traj.times[i], fidelity(reference, s), absorption_of(s), std::norm(s[level_a]),
                              std::norm(s[level_b]), std::norm(s[level_c]), 1.0});
        }
        return t;
    }
    auto const traj = evolve_master(cfg.init.density(cfg.params), cfg.schedule, cfg.params, cfg.t_end, true,
                                    cfg.samples_per_cycle);
    auto const f = fidelity_series(traj, reference);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        auto const& r = traj.states[i];
        t.rows.push_back({traj.times[i], f.values()[i], absorption_of(r), r(level_a, level_a).real(),
                          r(level_b, level_b).real(), r(level_c, level_c).real(), traj.traces[i]});
    }
    return t;
}

Table analytic_table(RunConfig const& cfg)
{
    double const tau = cfg.schedule.tau;
    double const step = tau / cfg.samples_per_cycle;
    auto const c = analytic::detuned_coeffs(tau, cfg.params.delta);
    Table t{"analytic", {"t", "F_single", "F_single_limit", "F_double", "F_detuned", "absorption_detuned"}, {}};
    auto const n = static_cast<long>(std::floor(cfg.t_end / step + 1e-9));
    for (long i = 0; i <= n; ++i) {
        double const time = step * static_cast<double>(i);
        t.rows.push_back({time, analytic::fidelity_single(time, tau), analytic::fidelity_single_limit(time),
                          analytic::fidelity_double(time, tau), analytic::fidelity_detuned(time, c),
                          analytic::absorption_detuned(time, c)});
    }
    return t;
}

struct Comparison
{
    std::string formula;
    Table table;
    double max_fidelity_deviation = 0.0;
    double max_absorption_deviation = 0.0;  // detuned formula only
};

Comparison compare(RunConfig const& cfg)
{
    if (!cfg.schedule.modulated()) {
        throw std::invalid_argument("compare: no closed form exists for the standard schedule");
    }
    if (cfg.params.decay.kind != DecaySpec::Kind::None || !cfg.init.is_pure()) {
        throw std::invalid_argument("compare: closed forms assume no decay and a pure initial state");
    }
    double const tau = cfg.schedule.tau;
    bool const detuned = cfg.schedule.mode == Mode::DoubleMod && cfg.params.delta != 0.0;
    Comparison r;
    r.formula = cfg.schedule.mode == Mode::SingleMod ? "single" : (detuned ? "detuned" : "double");
    r.table = {"compare", {"t", "F_numeric", "F_analytic", "abs_deviation"}, {}};
    if (detuned) {
        r.table.header.insert(r.table.header.end(), {"absorption_numeric", "absorption_analytic"});
    }
    auto const psi0 = cfg.init.pure(cfg.params);
    auto const traj = evolve_pure(psi0, cfg.schedule, cfg.params, cfg.t_end, cfg.samples_per_cycle);
    auto const c = analytic::detuned_coeffs(tau, cfg.params.delta);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        double const t = traj.times[i];
        double const num = fidelity(psi0, traj.states[i]);
        double const ana = r.formula == "single" ? analytic::fidelity_single(t, tau)
                           : detuned             ? analytic::fidelity_detuned(t, c)
                                                 : analytic::fidelity_double(t, tau);
        r.max_fidelity_deviation = std::max(r.max_fidelity_deviation, std::abs(num - ana));
        std::vector<double> row{t, num, ana, std::abs(num - ana)};
        if (detuned) {
            double const an = absorption_of(traj.states[i]);
            double const aa = analytic::absorption_detuned(t, c);
            r.max_absorption_deviation = std::max(r.max_absorption_deviation, std::abs(an - aa));
            row.insert(row.end(), {an, aa});
        }
        r.table.rows.push_back(std::move(row));
    }
    return r;
}

// Flag values as typed on the command line; applied after any config file.
struct Flags
{
    std::optional<std::string> config, mode, tau, omega_c, omega_p, delta, decay, init, t_end, spc, out, format,
        jobs;
};

void add_run_options(CLI::App* app, Flags& f)
{
    app->add_option("--config", f.config, "Config file ([SystemParams], [ModulationSchedule], [DecaySpec], [RunConfig])");
    app->add_option("--mode", f.mode, "standard | single | double");
    app->add_option("--tau", f.tau, "Modulation period");
    app->add_option("--omega-c", f.omega_c, "Coupling Rabi frequency");
    app->add_option("--omega-p", f.omega_p, "Probe Rabi frequency");
    app->add_option("--delta", f.delta, "Probe detuning");
    app->add_option("--decay", f.decay, "none | projector:gamma | lindblad:gamma_ab,gamma_ac");
    app->add_option("--init", f.init, "dark | mixed:p_bb,p_cc | amps:re_a,im_a,re_b,im_b,re_c,im_c");
    app->add_option("--t-end", f.t_end, "End time (truncated to whole cycles)");
    app->add_option("--samples-per-cycle", f.spc, "Samples per modulation cycle");
    app->add_option("--out", f.out, "Output file (directory for reproduce)");
    app->add_option("--format", f.format, "csv | json");
    app->add_option("--jobs", f.jobs, "Worker threads for sweeps (0 = all cores)");
}

RunConfig build_config(Flags const& f)
{
    RunConfig cfg;
    if (f.config) cfg = load_config(*f.config);
    auto apply = [&](std::optional<std::string> const& v, std::string_view section, std::string_view key) {
        if (v) set_key(cfg, section, key, *v);
    };
    apply(f.mode, "ModulationSchedule", "mode");
    apply(f.tau, "ModulationSchedule", "tau");
    apply(f.omega_c, "SystemParams", "omega_c");
    apply(f.omega_p, "SystemParams", "omega_p");
    apply(f.delta, "SystemParams", "delta");
    apply(f.decay, "DecaySpec", "spec");
    apply(f.init, "RunConfig", "init");
    apply(f.t_end, "RunConfig", "t_end");
    apply(f.spc, "RunConfig", "samples_per_cycle");
    apply(f.out, "RunConfig", "out");
    apply(f.format, "RunConfig", "format");
    apply(f.jobs, "RunConfig", "jobs");
    cfg.validate();
    return cfg;
}

std::string one_line(std::string s)
{
    for (auto& ch : s)
        if (ch == '\n' || ch == '\r') ch = ' ';
    return trim(s);
}

}  // namespace

std::string InitialState::to_string() const
{
    switch (kind) {
    case Kind::Dark: return "dark";
    case Kind::Mixed: return "mixed:" + exact(p_bb) + "," + exact(p_cc);
    case Kind::Amplitudes: {
        std::string s = "amps:";
        for (std::size_t i = 0; i < 3; ++i) {
            s += exact(amps[i].real()) + "," + exact(amps[i].imag());
            if (i < 2) s += ",";
        }
        return s;
    }
    }
    return "?";
}

InitialState InitialState::parse(std::string_view text)
{
    InitialState s;
    auto const t = trim(text);
    if (t == "dark") return s;
    if (t.rfind("mixed:", 0) == 0) {
        auto const v = to_doubles("init", std::string_view(t).substr(6));
        if (v.size() != 2) throw std::invalid_argument("init mixed needs two populations p_bb,p_cc");
        s.kind = Kind::Mixed;
        s.p_bb = v[0];
        s.p_cc = v[1];
        return s;
    }
    if (t.rfind("amps:", 0) == 0) {
        auto const v = to_doubles("init", std::string_view(t).substr(5));
        if (v.size() != 6) throw std::invalid_argument("init amps needs six numbers re_a,im_a,re_b,im_b,re_c,im_c");
        s.kind = Kind::Amplitudes;
        for (std::size_t i = 0; i < 3; ++i) s.amps[i] = Complex{v[2 * i], v[2 * i + 1]};
        return s;
    }
    throw std::invalid_argument("init must be dark, mixed:p_bb,p_cc or amps:..., got '" + t + "'");
}

PureState InitialState::pure(SystemParams const& params) const
{
    switch (kind) {
    case Kind::Dark: return dark_state(params);
    case Kind::Amplitudes: return PureState::normalized(Vec3({amps[0], amps[1], amps[2]}));
    case Kind::Mixed: break;
    }
    throw std::invalid_argument("mixed initial state has no pure-state form");
}

DensityMatrix InitialState::density(SystemParams const& params) const
{
    if (kind == Kind::Mixed) return mixed_initial(p_bb, p_cc);
    return DensityMatrix::from_pure(pure(params));
}

void RunConfig::validate() const
{
    schedule.validate();
    params.validate();
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be positive");
    if (samples_per_cycle < 1) throw std::invalid_argument("samples_per_cycle must be at least 1");
    if (jobs < 0) throw std::invalid_argument("jobs must be non-negative");
    init.density(params);
}

void set_key(RunConfig& cfg, std::string_view section, std::string_view key, std::string_view value)
{
    std::string const v = trim(value);
    auto fail = [&] {
        throw std::invalid_argument("unknown config key [" + std::string(section) + "] " + std::string(key));
    };
    if (section == "SystemParams") {
        if (key == "omega_c") cfg.params.omega_c = to_double(key, v);
        else if (key == "omega_p") cfg.params.omega_p = to_double(key, v);
        else if (key == "delta") cfg.params.delta = to_double(key, v);
        else fail();
    } else if (section == "ModulationSchedule") {
        if (key == "mode") cfg.schedule.mode = parse_mode(v);
        else if (key == "tau") cfg.schedule.tau = to_double(key, v);
        else fail();
    } else if (section == "DecaySpec") {
        auto& d = cfg.params.decay;
        if (key == "spec") d = DecaySpec::parse(v);
        else if (key == "kind") d.kind = parse_kind(v);
        else if (key == "gamma") d.gamma = to_double(key, v);
        else if (key == "gamma_ab") d.gamma_ab = to_double(key, v);
        else if (key == "gamma_ac") d.gamma_ac = to_double(key, v);
        else fail();
    } else if (section == "RunConfig") {
        if (key == "init") cfg.init = InitialState::parse(v);
        else if (key == "t_end") cfg.t_end = to_double(key, v);
        else if (key == "samples_per_cycle") cfg.samples_per_cycle = to_int(key, v);
        else if (key == "out") cfg.out = v;
        else if (key == "format") cfg.format = parse_format(v);
        else if (key == "jobs") cfg.jobs = to_int(key, v);
        else fail();
    } else {
        throw std::invalid_argument("unknown config section [" + std::string(section) + "]");
    }
}

std::string to_config(RunConfig const& cfg)
{
    std::ostringstream s;
    s << "[SystemParams]\n"
      << "omega_c = " << exact(cfg.params.omega_c) << "\n"
      << "omega_p = " << exact(cfg.params.omega_p) << "\n"
      << "delta = " << exact(cfg.params.delta) << "\n\n"
      << "[ModulationSchedule]\n"
      << "mode = " << peit::to_string(cfg.schedule.mode) << "\n"
      << "tau = " << exact(cfg.schedule.tau) << "\n\n"
      << "[DecaySpec]\n"
      << "kind = " << kind_name(cfg.params.decay.kind) << "\n"
      << "gamma = " << exact(cfg.params.decay.gamma) << "\n"
      << "gamma_ab = " << exact(cfg.params.decay.gamma_ab) << "\n"
      << "gamma_ac = " << exact(cfg.params.decay.gamma_ac) << "\n\n"
      << "[RunConfig]\n"
      << "init = " << cfg.init.to_string() << "\n"
      << "t_end = " << exact(cfg.t_end) << "\n"
      << "samples_per_cycle = " << cfg.samples_per_cycle << "\n"
      << "out = " << cfg.out << "\n"
      << "format = " << to_string(cfg.format) << "\n"
      << "jobs = " << cfg.jobs << "\n";
    return s.str();
}

RunConfig parse_config(std::string_view text, RunConfig base)
{
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto const nl = text.find('\n', pos);
        auto raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (auto const hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        auto const line = trim(raw);
        if (line.empty()) continue;
        try {
            if (line.front() == '[') {
                if (line.back() != ']') throw std::invalid_argument("unterminated section header");
                section = trim(std::string_view(line).substr(1, line.size() - 2));
                continue;
            }
            auto const eq = line.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("expected key = value");
            if (section.empty()) throw std::invalid_argument("key outside a section");
            set_key(base, section, trim(std::string_view(line).substr(0, eq)), std::string_view(line).substr(eq + 1));
        } catch (std::invalid_argument const& e) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return base;
}

RunConfig load_config(std::filesystem::path const& path, RunConfig base)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), base);
}

std::vector<CheckResult> run_selftest()
{
    std::vector<CheckResult> out;
    auto check = [&](std::string name, auto&& body) {
        try {
            auto const [ok, detail] = body();
            out.push_back({std::move(name), ok, detail});
        } catch (std::exception const& e) {
            out.push_back({std::move(name), false, std::string("exception: ") + e.what()});
        }
    };
    auto report = [](bool ok, char const* label, double v) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s=%.3g", label, v);
        return std::pair<bool, std::string>{ok, buf};
    };
    SystemParams const unit{1.0, 1.0, 0.0, {}};

    check("hamiltonians_hermitian", [&] {
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> u(0.0, 3.0);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            auto const h = build_hamiltonians({u(rng) + 0.01, u(rng), u(rng) - 1.5, {}});
            for (auto const* m : {&h.free, &h.coupling, &h.probe, &h.both}) worst = std::max(worst, hermiticity_defect(*m));
        }
        return report(worst <= 1e-14, "max_defect", worst);
    });
    check("cycle_unitarity", [&] {
        double worst = 0.0;
        for (auto mode : {Mode::SingleMod, Mode::DoubleMod}) {
            for (double tau : {0.01, 0.1, 1.0, 1.9}) {
                auto const u = cycle_unitary({mode, tau}, {1.3, 0.7, 0.2, {}});
                worst = std::max(worst, frobenius_norm(u.adjoint() * u - Mat3::identity()));
            }
        }
        return report(worst <= 1e-12, "max_defect", worst);
    });
    check("closed_forms_at_t0", [&] {
        double worst = 0.0;
        for (double tau : {0.01, 0.1, 0.5, 1.0, 1.6, 1.9}) {
            worst = std::max(worst, std::abs(analytic::fidelity_single(0.0, tau) - 1.0));
            worst = std::max(worst, std::abs(analytic::fidelity_double(0.0, tau) - 1.0));
        }
        return report(worst <= 1e-12, "max_deviation", worst);
    });
    check("envelope_at_resonance", [&] {
        double worst = 0.0;
        for (double tau : {0.01, 0.1, 0.5}) worst = std::max(worst, std::abs(analytic::absorption_envelope(tau, 0.0) - 3.0 * tau / 32.0));
        return report(worst <= 1e-12, "max_deviation", worst);
    });
    check("double_mod_numeric_vs_closed_form", [&] {
        auto const psi0 = dark_state(unit);
        auto const traj = evolve_pure(psi0, {Mode::DoubleMod, 0.1}, unit, 60.0);
        double worst = 0.0;
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            worst = std::max(worst, std::abs(fidelity(psi0, traj.states[i]) - analytic::fidelity_double(traj.times[i], 0.1)));
        }
        return report(worst <= 1e-4, "max_deviation", worst);
    });
    check("master_without_decay_matches_pure", [&] {
        SystemParams const p{1.3, 0.7, -0.2, {}};
        auto const psi0 = dark_state(p);
        auto const pure = evolve_pure(psi0, {Mode::SingleMod, 0.3}, p, 10.0, 3);
        auto const mixed = evolve_master(DensityMatrix::from_pure(psi0), {Mode::SingleMod, 0.3}, p, 10.0, true, 3);
        double worst = 0.0;
        for (std::size_t i = 0; i < pure.states.size(); ++i) {
            worst = std::max(worst, frobenius_norm(mixed.states[i].matrix() - DensityMatrix::from_pure(pure.states[i]).matrix()));
        }
        return report(worst <= 1e-8, "max_deviation", worst);
    });
    check("lindblad_trace_and_positivity", [&] {
        SystemParams const p{std::sqrt(99.0), 1.0, 1.0, DecaySpec::lindblad(2.5, 2.5)};
        auto const traj = evolve_master(mixed_initial(0.99, 0.01), {Mode::DoubleMod, 0.2}, p, 8.0, true, 4);
        double worst = 0.0;
        bool positive = true;
        for (std::size_t i = 0; i < traj.states.size(); ++i) {
            worst = std::max(worst, std::abs(traj.traces[i] - 1.0));
            positive = positive && traj.states[i].min_eigenvalue() >= -1e-8;
        }
        return report(worst <= 1e-8 && positive, "max_trace_deviation", worst);
    });
    check("effective_evolution_matches_repeated_cycles", [&] {
        auto const [h1, h2] = half_cycle_hamiltonians({Mode::DoubleMod, 0.1}, unit);
        Mat3 const heff = effective_hamiltonian(h1, h2, 0.1);
        Mat3 const step = expm_hermitian(heff, 0.1);
        auto const psi0 = dark_state(unit);
        Vec3 v = psi0.amplitudes();
        for (int n = 0; n < 1000; ++n) v = step * v;
        double const err = (evolve_eff(psi0, heff, 0.1, 1000).amplitudes() - v).norm();
        return report(err <= 1e-10, "deviation", err);
    });
    check("parallel_sweep_matches_serial", [&] {
        SweepRequest req{{Mode::DoubleMod, 0.5}, {1.0, 1.0, 0.0, DecaySpec::projector(1.0)}, SweepAxis::Delta,
                         linspace(-0.5, 0.5, 9), SweepObservable::Plateau, 10.0, std::nullopt};
        bool const same = sweep(req).values == sweep_serial(req).values;
        return std::pair<bool, std::string>{same, same ? "identical" : "results differ"};
    });
    check("config_round_trip", [&] {
        RunConfig c;
        c.schedule = {Mode::SingleMod, 0.37};
        c.params = {std::sqrt(99.0), 1.0, -0.1, DecaySpec::lindblad(0.5, 2.5)};
        c.init = InitialState::parse("mixed:0.99,0.01");
        c.t_end = 8.0;
        c.samples_per_cycle = 10;
        c.format = OutputFormat::Json;
        bool const same = parse_config(to_config(c)) == c;
        return std::pair<bool, std::string>{same, same ? "identical" : "config differs after round trip"};
    });
    return out;
}

int dispatch(int argc, char const* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Simulator for periodically modulated electromagnetically induced transparency", "peit"};
    app.require_subcommand(1);
    Flags flags;

    auto* simulate_cmd = app.add_subcommand("simulate", "Evolve one trajectory and print its observables");
    auto* analytic_cmd = app.add_subcommand("analytic", "Evaluate the closed-form fidelity and absorption on a grid");
    auto* compare_cmd = app.add_subcommand("compare", "Numeric vs closed-form fidelity with a max-deviation report");
    auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate an observable over a tau or delta grid");
    auto* reproduce_cmd = app.add_subcommand("reproduce", "Write the CSV data of one figure");
    auto* selftest_cmd = app.add_subcommand("selftest", "Run the invariant checks");
    for (auto* cmd : {simulate_cmd, analytic_cmd, compare_cmd, sweep_cmd, reproduce_cmd}) add_run_options(cmd, flags);

    std::string axis = "delta";
    std::string observable = "envelope";
    double from = -0.5;
    double to = 0.5;
    std::size_t points = 81;
    double probe = 80.0;
    sweep_cmd->add_option("--axis", axis, "tau | delta")->capture_default_str();
    sweep_cmd->add_option("--observable", observable, "envelope | plateau | osc_stats")->capture_default_str();
    sweep_cmd->add_option("--from", from, "First grid value")->capture_default_str();
    sweep_cmd->add_option("--to", to, "Last grid value")->capture_default_str();
    sweep_cmd->add_option("--points", points, "Number of grid points")->capture_default_str();
    sweep_cmd->add_option("--probe", probe, "Probe time for plateau / window end for osc_stats")->capture_default_str();

    std::string figure;
    bool svg = false;
    std::vector<std::string> sets;
    reproduce_cmd->add_option("figure", figure, "fig2 | fig3 | fig4_te | fig4_am | fig5 | fig6 | fig7 | fig8")->required();
    reproduce_cmd->add_flag("--svg", svg, "Also write an SVG line plot per CSV");
    reproduce_cmd->add_option("--set", sets, "Override key=value (tau, omega_c, omega_p, delta, decay, t_end, probe)");

    try {
        app.parse(argc, argv);
    } catch (CLI::CallForHelp const& e) {
        return app.exit(e, out, err);
    } catch (CLI::CallForAllHelp const& e) {
        return app.exit(e, out, err);
    } catch (CLI::CallForVersion const& e) {
        return app.exit(e, out, err);
    } catch (CLI::ParseError const& e) {
        err << "error: usage: " << one_line(e.what()) << "\n";
        return 2;
    }

    try {
        if (*selftest_cmd) {
            bool all = true;
            for (auto const& r : run_selftest()) {
                out << (r.passed ? "PASS " : "FAIL ") << r.name << " " << r.detail << "\n";
                all = all && r.passed;
            }
            return all ? 0 : 1;
        }
        if (*reproduce_cmd) {
            ExperimentSpec spec;
            spec.figure = parse_figure_id(figure);
            auto add = [&](std::optional<std::string> const& v, char const* key) {
                if (v) spec.overrides[key] = *v;
            };
            add(flags.tau, "tau");
            add(flags.omega_c, "omega_c");
            add(flags.omega_p, "omega_p");
            add(flags.delta, "delta");
            add(flags.decay, "decay");
            add(flags.t_end, "t_end");
            for (auto const& s : sets) {
                auto const eq = s.find('=');
                if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + s + "'");
                spec.overrides[trim(std::string_view(s).substr(0, eq))] = trim(std::string_view(s).substr(eq + 1));
            }
            if (flags.out) {
                spec.output_dir = *flags.out;
            } else if (char const* dir = std::getenv("PEIT_OUT_DIR"); dir && *dir) {
                spec.output_dir = dir;
            }
            spec.jobs = flags.jobs ? to_int("jobs", *flags.jobs) : 0;
            spec.svg = svg;
            for (auto const& p : reproduce_figure(spec)) out << p.string() << "\n";
            return 0;
        }

        RunConfig const cfg = build_config(flags);
        if (*simulate_cmd) {
            emit(render(simulate(cfg), cfg.format, describe(cfg)), cfg, "simulate", out);
        } else if (*analytic_cmd) {
            emit(render(analytic_table(cfg), cfg.format, describe(cfg)), cfg, "analytic", out);
        } else if (*compare_cmd) {
            auto const r = compare(cfg);
            if (!cfg.out.empty()) emit(render(r.table, cfg.format, describe(cfg)), cfg, "compare", out);
            if (cfg.format == OutputFormat::Json) {
                nlohmann::ordered_json j;
                j["formula"] = r.formula;
                j["samples"] = r.table.rows.size();
                j["max_abs_fidelity_deviation"] = r.max_fidelity_deviation;
                if (r.formula == "detuned") j["max_abs_absorption_deviation"] = r.max_absorption_deviation;
                out << j.dump() << "\n";
            } else {
                char buf[64];
                out << "formula=" << r.formula << "\n" << "samples=" << r.table.rows.size() << "\n";
                std::snprintf(buf, sizeof buf, "%.6g", r.max_fidelity_deviation);
                out << "max_abs_fidelity_deviation=" << buf << "\n";
                if (r.formula == "detuned") {
                    std::snprintf(buf, sizeof buf, "%.6g", r.max_absorption_deviation);
                    out << "max_abs_absorption_deviation=" << buf << "\n";
                }
            }
        } else if (*sweep_cmd) {
            SweepRequest req{cfg.schedule, cfg.params, parse_sweep_axis(axis), linspace(from, to, points),
                             parse_sweep_observable(observable), probe, std::nullopt};
            if (!cfg.init.is_pure() || cfg.init.kind != InitialState::Kind::Dark) req.initial = cfg.init.density(cfg.params);
            auto const res = cfg.jobs == 1 ? sweep_serial(req) : sweep(req, cfg.jobs);
            emit(render(res.to_table("sweep"), cfg.format, res.metadata), cfg, "sweep", out);
        }
        return 0;
    } catch (io_error const& e) {
        err << "error: io: " << one_line(e.what()) << "\n";
        return 5;
    } catch (std::invalid_argument const& e) {
        err << "error: invalid-config: " << one_line(e.what()) << "\n";
        return 3;
    } catch (std::domain_error const& e) {
        err << "error: numerical: " << one_line(e.what()) << "\n";
        return 4;
    } catch (std::exception const& e) {
        err << "error: internal: " << one_line(e.what()) << "\n";
        return 1;
    }
}

}  // namespace peit::cli
