#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include "lasso/control.hpp"
#include "lasso/fdsim.hpp"
#include "lasso/io.hpp"
#include "lasso/moments.hpp"
#include "lasso/spectral.hpp"

using namespace lasso;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    Config cfg;
    fs::path out;
    long resolution = 0;
    std::uint64_t seed = 42;
};

Problem problem_from(const Config& c, const std::string& key) {
    std::string p = c.str(key, "P1");
    if (p == "P1") return Problem::P1;
    if (p == "P2") return Problem::P2;
    throw Error(ErrorKind::config, "unknown problem '" + p + "'");
}

std::string csv(const std::function<void(std::ostream&)>& w) {
    std::ostringstream os;
    w(os);
    return os.str();
}

void put_json(const fs::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

SynthesisReport synthesize(const Run& r, const LassoGeometry& g, const PotentialSpec& q, const LassoGrid& grid,
                           const TargetState& t) {
    Problem p = problem_from(r.cfg, "synthesize.problem");
    std::string mode = r.cfg.str("synthesize.mode", "exact");
    SynthesisOptions so;
    so.eps = r.cfg.num("synthesize.eps", 0.0);
    if (mode == "shape") return p == Problem::P1 ? shape_control_p1(t.phi1, g, q, grid, so) : shape_control_p2(t.phi1, g, q, grid, so);
    if (mode == "velocity")
        return p == Problem::P1 ? velocity_control_p1(t.phi2, g, q, grid, so) : velocity_control_p2(t.phi2, g, q, grid, so);
    if (mode == "exact") return p == Problem::P1 ? exact_control_p1(t, g, q, grid, so) : exact_control_p2(t, g, q, grid, so);
    throw Error(ErrorKind::config, "unknown synthesize.mode '" + mode + "'");
}

int cmd_synthesize(const Run& r) {
    auto g = geometry_from(r.cfg);
    auto q = potential_from(r.cfg, g);
    auto grid = grid_from(r.cfg, g, r.resolution);
    auto t = target_from(r.cfg, grid, g);
    auto rep = verify(synthesize(r, g, q, grid, t), t, g, q, grid);
    write_text(r.out / "controls.csv", csv([&](std::ostream& os) { write_controls_csv(os, rep.controls); }));
    json j = to_json(rep);
    if (rep.mode == ControlMode::exact && q.is_zero()) {
        auto spec = spectrum_q0(g, 2.0 * std::numbers::pi * 40.0 / (g.l + 2.0 * g.a) + 10.0);
        auto tab = moment_residuals(rep.controls, t, spec, static_cast<std::size_t>(r.cfg.integer("synthesize.modes", 30)));
        write_text(r.out / "residuals.csv", csv([&](std::ostream& os) { write_residuals_csv(os, tab); }));
        j["moment_residuals"] = {{"modes", tab.entries.size()},
                                 {"max_shape", tab.max_res_shape()},
                                 {"max_velocity", tab.max_res_velocity()}};
    }
    put_json(r.out / "report.json", j);
    return 0;
}

int cmd_simulate(const Run& r) {
    auto g = geometry_from(r.cfg);
    auto q = potential_from(r.cfg, g);
    auto grid = grid_from(r.cfg, g, r.resolution);
    Problem p = problem_from(r.cfg, "simulate.problem");
    auto c = read_controls_csv(r.cfg.path("simulate.controls"), p);
    double T = r.cfg.num("simulate.T", c.horizon());
    SimOptions opt;
    opt.snapshot_stride = r.cfg.integer("simulate.snapshot_stride", 0);
    opt.energy_stride = r.cfg.integer("simulate.energy_stride", 0);
    opt.track_asymmetry = true;
    auto tr = simulate(g, q, c, T, grid, opt);
    write_text(r.out / "final_state.csv", csv([&](std::ostream& os) { write_state_csv(os, tr.u_T, tr.ut_T); }));
    write_text(r.out / "snapshots.csv", csv([&](std::ostream& os) { export_snapshots_csv(os, tr); }));
    put_json(r.out / "simulate.json", {{"T", tr.T},
                                       {"dt", tr.dt},
                                       {"steps", tr.steps},
                                       {"norm_H1_u", norm_H1(tr.u_T)},
                                       {"norm_L2_ut", norm_H(tr.ut_T)},
                                       {"vertex_residual_max", tr.vertex_residual_max},
                                       {"max_ring_asymmetry", tr.max_ring_asymmetry}});
    return 0;
}

int cmd_spectrum(const Run& r) {
    auto g = geometry_from(r.cfg);
    auto q = potential_from(r.cfg, g);
    std::string method = r.cfg.str("spectrum.method", q.is_zero() ? "closed_form" : "shooting");
    std::vector<EigenPair> s;
    if (method == "closed_form") {
        if (!q.is_zero()) throw Error(ErrorKind::config, "closed_form spectrum needs potential.kind = zero");
        s = spectrum_q0(g, r.cfg.num("spectrum.omega_max"));
    } else if (method == "shooting") {
        s = spectrum_shooting(q, static_cast<std::size_t>(r.cfg.integer("spectrum.count", 50)));
    } else {
        throw Error(ErrorKind::config, "unknown spectrum.method '" + method + "'");
    }
    write_text(r.out / "spectrum.csv", csv([&](std::ostream& os) { write_spectrum_csv(os, s); }));
    std::size_t doubles = 0;
    double worst = 0.0;
    for (const auto& e : s) {
        doubles += e.multiplicity == 2;
        worst = std::max(worst, e.vertex_residual());
    }
    double top = s.empty() ? 0.0 : s.back().omega;
    put_json(r.out / "spectrum.json", {{"method", method},
                                       {"count", s.size()},
                                       {"double_entries", doubles},
                                       {"max_vertex_residual", worst},
                                       {"omega_last", top},
                                       {"weyl_ratio", top > 0.0 ? static_cast<double>(weyl_count(s, top)) /
                                                                      ((g.l + 2.0 * g.a) / std::numbers::pi * top)
                                                                : 0.0}});
    return 0;
}

int cmd_gap(const Run& r) {
    double l = r.cfg.num("gap.l", 1.0);
    long num = r.cfg.integer("gap.ratio_num"), den = r.cfg.integer("gap.ratio_den");
    if (num <= 0 || den <= 0) throw Error(ErrorKind::config, "gap ratio must be positive");
    double c = l * static_cast<double>(num) / static_cast<double>(den);
    auto Ns = r.cfg.integers("gap.N");
    long Nmax = 0;
    for (long n : Ns) Nmax = std::max(Nmax, n);
    if (Nmax <= 1) throw Error(ErrorKind::config, "gap.N needs a value above 1");
    double wmax = 1.2 * std::numbers::pi * static_cast<double>(Nmax) / (l + c) + 10.0;
    auto s = spectrum_q0(c, l, wmax);
    json j;
    j["circumference"] = c;
    j["l"] = l;
    j["ratio"] = {num, den};
    auto& gaps = j["min_gap"] = json::array();
    for (long n : Ns) gaps.push_back({{"N", n}, {"gap", min_gap(s, static_cast<std::size_t>(n))}});
    auto& conv = j["convergents"] = json::array();
    for (auto [p, n] : convergents(num, den, static_cast<std::size_t>(r.cfg.integer("gap.convergents", 16))))
        conv.push_back({p, n});
    auto& cl = j["clusters"] = json::array();
    if (r.cfg.has("gap.clusters"))
        for (long n : r.cfg.integers("gap.clusters")) cl.push_back(to_json(verify_cluster(n, c, l)));
    put_json(r.out / "gap.json", j);
    return 0;
}

int cmd_demo(const Run& r) {
    auto g = geometry_from(r.cfg);
    auto q = potential_from(r.cfg, g);
    std::string which = r.cfg.str("demo.which");
    DemoKind k;
    if (which == "interior_only") k = DemoKind::interior_only;
    else if (which == "boundary_only") k = DemoKind::boundary_only;
    else throw Error(ErrorKind::config, "unknown demo.which '" + which + "'");
    long res = r.resolution > 0 ? r.resolution : r.cfg.integer("grid.resolution", 100);
    auto d = demo_noncontrollability(k, g, q.is_zero(), r.cfg.num("demo.T", 2.0 * g.T_star()),
                                     static_cast<std::size_t>(r.cfg.integer("demo.trials", 10)), r.seed, res);
    put_json(r.out / "demo.json", to_json(d));
    return 0;
}

int cmd_verify(const Run& r) {
    auto g = geometry_from(r.cfg);
    auto q = potential_from(r.cfg, g);
    auto grid = grid_from(r.cfg, g, r.resolution);
    auto t = target_from(r.cfg, grid, g);
    SynthesisReport rep;
    rep.controls = read_controls_csv(r.cfg.path("verify.controls"), problem_from(r.cfg, "synthesize.problem"));
    rep.time_horizon = r.cfg.num("verify.T", rep.controls.horizon());
    std::string mode = r.cfg.str("synthesize.mode", "exact");
    rep.mode = mode == "shape" ? ControlMode::shape : mode == "velocity" ? ControlMode::velocity : ControlMode::exact;
    rep.norms = detail::report_norms(rep.controls);
    rep = verify(rep, t, g, q, grid);
    put_json(r.out / "verify.json", to_json(rep));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Boundary and interior control of the wave equation on a lasso graph"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config;
    std::string out = ".";
    long resolution = 0;
    std::uint64_t seed = 0;
    bool seed_given = false;
    app.add_option("--config", config, "configuration file")->required();
    app.add_option("--out", out, "output directory");
    app.add_option("--resolution", resolution, "grid nodes per unit length, overrides grid.resolution");
    app.add_option("--seed", seed, "seed for randomized trials, overrides run.seed")->each([&](const std::string&) {
        seed_given = true;
    });

    std::map<std::string, int (*)(const Run&)> commands{{"synthesize", cmd_synthesize}, {"simulate", cmd_simulate},
                                                        {"spectrum", cmd_spectrum},     {"gap", cmd_gap},
                                                        {"demo", cmd_demo},             {"verify", cmd_verify}};
    for (const auto& [name, fn] : commands) app.add_subcommand(name);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        Run r;
        r.cfg = Config::load(config);
        r.out = out;
        r.resolution = resolution;
        r.seed = seed_given ? seed : static_cast<std::uint64_t>(r.cfg.integer("run.seed", 42));
        fs::create_directories(r.out);
        for (const auto& [name, fn] : commands)
            if (app.got_subcommand(name)) return fn(r);
    } catch (const SynthesisError& e) {
        std::cerr << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return e.kind() == ErrorKind::config ? 2 : 3;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "ConfigError: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
