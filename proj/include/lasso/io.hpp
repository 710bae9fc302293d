#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "control.hpp"
#include "error.hpp"
#include "graph_model.hpp"
#include "moments.hpp"
#include "spectral.hpp"

namespace lasso {

// flat "key = value" text with [section] headers; keys are addressed as "section.key"
class Config {
public:
    static Config parse(std::istream& in, const std::string& origin = "<config>") {
        Config c;
        c.origin_ = origin;
        std::string line, section;
        int no = 0;
        while (std::getline(in, line)) {
            ++no;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') throw c.error(no, "unterminated section header");
                section = trim(line.substr(1, line.size() - 2));
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos) throw c.error(no, "expected key = value");
            std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
            if (key.empty()) throw c.error(no, "empty key");
            c.values_[section.empty() ? key : section + "." + key] = val;
        }
        return c;
    }

    static Config load(const std::filesystem::path& p) {
        std::ifstream in(p);
        if (!in) throw Error(ErrorKind::config, "cannot open config file " + p.string());
        Config c = parse(in, p.string());
        c.dir_ = p.parent_path();
        return c;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    void set(const std::string& key, const std::string& v) { values_[key] = v; }

    std::string str(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw Error(ErrorKind::config, origin_ + ": missing key '" + key + "'");
        return it->second;
    }
    std::string str(const std::string& key, const std::string& def) const { return has(key) ? str(key) : def; }

    double num(const std::string& key) const {
        std::string s = str(key);
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != s.size() || !std::isfinite(v))
            throw Error(ErrorKind::config, origin_ + ": key '" + key + "' is not a finite number: " + s);
        return v;
    }
    double num(const std::string& key, double def) const { return has(key) ? num(key) : def; }

    long integer(const std::string& key) const {
        double v = num(key);
        if (v != std::round(v)) throw Error(ErrorKind::config, origin_ + ": key '" + key + "' must be an integer");
        return static_cast<long>(v);
    }
    long integer(const std::string& key, long def) const { return has(key) ? integer(key) : def; }

    std::vector<long> integers(const std::string& key) const {
        std::vector<long> out;
        std::stringstream ss(str(key));
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            Config tmp;
            tmp.origin_ = origin_;
            tmp.values_[key] = item;
            out.push_back(tmp.integer(key));
        }
        return out;
    }

    // relative paths resolve against the config file directory
    std::filesystem::path path(const std::string& key) const {
        std::filesystem::path p = str(key);
        return p.is_relative() ? dir_ / p : p;
    }

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    static std::string trim(const std::string& s) {
        auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return {};
        auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }
    Error error(int line, const std::string& what) const {
        return Error(ErrorKind::config, origin_ + ":" + std::to_string(line) + ": " + what);
    }

    std::string origin_;
    std::filesystem::path dir_;
    std::map<std::string, std::string> values_;
};

// ---------------------------------------------------------------- CSV input

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name, const std::string& origin) const {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw Error(ErrorKind::config, origin + ": missing column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    }
};

inline CsvTable read_csv(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw Error(ErrorKind::config, "cannot open data file " + p.string());
    CsvTable t;
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (t.header.empty()) {
            t.header = cells;
            continue;
        }
        if (cells.size() != t.header.size())
            throw Error(ErrorKind::config, p.string() + ":" + std::to_string(no) + ": wrong number of columns");
        std::vector<double> row;
        for (const auto& c : cells) {
            std::size_t pos = 0;
            double v = 0.0;
            try {
                v = std::stod(c, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos == 0 || !std::isfinite(v))
                throw Error(ErrorKind::config, p.string() + ":" + std::to_string(no) + ": bad number '" + c + "'");
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty()) throw Error(ErrorKind::config, p.string() + ": empty file");
    return t;
}

namespace detail {

// piecewise-linear interpolant through (x, v) pairs of one edge
inline std::function<double(double)> edge_interp(std::vector<std::pair<double, double>> pts, const std::string& what) {
    if (pts.size() < 2) throw Error(ErrorKind::config, what + ": each edge needs at least two samples");
    std::sort(pts.begin(), pts.end());
    return [pts = std::move(pts)](double x) {
        if (x <= pts.front().first) return pts.front().second;
        if (x >= pts.back().first) return pts.back().second;
        auto it = std::upper_bound(pts.begin(), pts.end(), std::make_pair(x, -HUGE_VAL));
        const auto& b = *it;
        const auto& a = *(it - 1);
        if (b.first == a.first) return b.second;
        return a.second + (b.second - a.second) * (x - a.first) / (b.first - a.first);
    };
}

inline std::array<std::function<double(double)>, 3> edge_columns(const CsvTable& t, const std::string& col,
                                                                 const std::string& origin) {
    auto ce = t.column("edge", origin), cx = t.column("x", origin), cv = t.column(col, origin);
    std::array<std::vector<std::pair<double, double>>, 3> pts;
    for (const auto& r : t.rows) {
        auto e = static_cast<long>(r[ce]);
        if (e < 1 || e > 3 || static_cast<double>(e) != r[ce])
            throw Error(ErrorKind::config, origin + ": edge must be 1, 2 or 3");
        pts[static_cast<std::size_t>(e - 1)].emplace_back(r[cx], r[cv]);
    }
    return {edge_interp(pts[0], origin), edge_interp(pts[1], origin), edge_interp(pts[2], origin)};
}

}  // namespace detail

inline ControlSet read_controls_csv(const std::filesystem::path& p, Problem problem) {
    auto t = read_csv(p);
    auto ct = t.column("t", p.string()), c1 = t.column("f1", p.string()), c2 = t.column("f2", p.string());
    if (t.rows.size() < 2) throw Error(ErrorKind::config, p.string() + ": need at least two time samples");
    double h = t.rows[1][ct] - t.rows[0][ct];
    if (!(h > 0.0)) throw Error(ErrorKind::config, p.string() + ": time column must increase");
    ControlSet c = ControlSet::zeros(problem, h, t.rows.size());
    std::size_t c3 = problem == Problem::P2 ? t.column("f3", p.string()) : 0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        if (std::abs(r[ct] - h * static_cast<double>(i)) > 1e-9 * std::max(1.0, r[ct]))
            throw Error(ErrorKind::config, p.string() + ": time samples must be uniform from 0");
        c.f1.samples[i] = r[c1];
        c.f2.samples[i] = r[c2];
        if (c.f3) c.f3->samples[i] = r[c3];
    }
    return c;
}

// ---------------------------------------------------------------- model from config

inline LassoGeometry geometry_from(const Config& c) {
    LassoGeometry g{c.num("geometry.l"), c.num("geometry.a")};
    g.validate();
    return g;
}

inline PotentialSpec potential_from(const Config& c, const LassoGeometry& g) {
    std::string kind = c.str("potential.kind", "zero");
    if (kind == "zero") return PotentialSpec::zero(g);
    if (kind == "constant") return PotentialSpec::constant(g, c.num("potential.value"));
    if (kind == "smooth")
        return PotentialSpec::from_functions(
            g, [](double x) { return 1.0 + 0.5 * std::sin(3.0 * x); },
            [](double x) { return 1.0 + 0.5 * std::cos(2.0 * x); }, [](double x) { return 1.0 + 0.5 * std::cos(2.0 * x); });
    if (kind == "table") {
        auto p = c.path("potential.file");
        auto f = detail::edge_columns(read_csv(p), "q", p.string());
        return PotentialSpec::from_functions(g, f[0], f[1], f[2]);
    }
    throw Error(ErrorKind::config, "unknown potential.kind '" + kind + "'");
}

inline LassoGrid grid_from(const Config& c, const LassoGeometry& g, long resolution_override = 0) {
    long n = resolution_override > 0 ? resolution_override : c.integer("grid.resolution", 200);
    auto grid = build_grid(g, n, c.num("grid.cfl", 0.5));
    std::string v = c.str("grid.vertex", "one_sided");
    if (v == "finite_volume") grid.vertex = VertexScheme::finite_volume;
    else if (v != "one_sided") throw Error(ErrorKind::config, "unknown grid.vertex '" + v + "'");
    return grid;
}

// smooth bumps on every edge; "mid" sets the value at the ring midpoint
inline TargetState builtin_target(const LassoGrid& grid, const LassoGeometry& g, double mid, bool shape,
                                  bool velocity) {
    auto bp = [](double x, double c, double w) {
        double s = (x - c) / w;
        return std::abs(s) < 1.0 ? std::pow(1.0 - s * s, 4) : 0.0;
    };
    double l = g.l, a = g.a;
    TargetState t;
    t.phi1 = GraphFunction::zeros(grid);
    t.phi2 = GraphFunction::zeros(grid);
    if (shape)
        t.phi1 = GraphFunction::sample(
            grid, [&](double x) { return 0.5 * bp(x, 0.5 * l, 0.3 * l); },
            [&](double x) { return 0.4 * bp(x, 0.4 * a, 0.25 * a) + mid * bp(x, a, 0.5 * a); },
            [&](double x) { return -0.3 * bp(x, 0.5 * a, 0.25 * a) + mid * bp(x, a, 0.5 * a); });
    if (velocity) {
        auto vr = [&](double x) { return -0.5 * bp(x, 0.6 * a, 0.3 * a) + mid * bp(x, a, 0.4 * a); };
        t.phi2 = GraphFunction::sample(grid, [&](double x) { return 0.7 * bp(x, 0.4 * l, 0.3 * l); }, vr, vr);
    }
    return t;
}

inline TargetState target_from(const Config& c, const LassoGrid& grid, const LassoGeometry& g) {
    std::string kind = c.str("target.kind", "builtin");
    std::string mode = c.str("synthesize.mode", "exact");
    bool shape = mode != "velocity", velocity = mode != "shape";
    if (kind == "zero") return builtin_target(grid, g, 0.0, false, false);
    if (kind == "builtin") return builtin_target(grid, g, c.num("target.mid", 0.3), shape, velocity);
    if (kind == "file") {
        auto p = c.path("target.file");
        auto t = read_csv(p);
        TargetState ts;
        auto sample = [&](const std::string& col) {
            auto f = detail::edge_columns(t, col, p.string());
            return GraphFunction::sample(grid, f[0], f[1], f[2]);
        };
        ts.phi1 = shape ? sample("phi1") : GraphFunction::zeros(grid);
        ts.phi2 = velocity ? sample("phi2") : GraphFunction::zeros(grid);
        return ts;
    }
    throw Error(ErrorKind::config, "unknown target.kind '" + kind + "'");
}

// ---------------------------------------------------------------- CSV output

inline void write_controls_csv(std::ostream& os, const ControlSet& c) {
    os.precision(17);
    os << "t,f1,f2" << (c.f3 ? ",f3" : "") << '\n';
    for (std::size_t i = 0; i < c.f1.size(); ++i) {
        os << c.f1.h * static_cast<double>(i) << ',' << c.f1.samples[i] << ',' << c.f2.samples[i];
        if (c.f3) os << ',' << c.f3->samples[i];
        os << '\n';
    }
}

inline void write_state_csv(std::ostream& os, const GraphFunction& u, const GraphFunction& ut) {
    os.precision(17);
    os << "edge,x,u,ut\n";
    for (int j = 0; j < 3; ++j)
        for (std::size_t i = 0; i < u.e[j].size(); ++i)
            os << (j + 1) << ',' << u.h * static_cast<double>(i) << ',' << u.e[j][i] << ',' << ut.e[j][i] << '\n';
}

inline void write_spectrum_csv(std::ostream& os, const std::vector<EigenPair>& s) {
    os.precision(17);
    os << "n,omega,multiplicity,family,phi_l,dphi1_0,dphi2_0,dphi3_0\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto& e = s[i];
        os << i + 1 << ',' << e.omega << ',' << e.multiplicity << ',' << to_string(e.family) << ',' << e.trace[0]
           << ',' << e.trace[1] << ',' << e.trace[2] << ',' << e.trace[3] << '\n';
    }
}

inline void write_residuals_csv(std::ostream& os, const MomentTable& t) {
    os.precision(17);
    os << "n,omega,res_shape,res_velocity\n";
    for (const auto& e : t.entries) os << e.n << ',' << e.omega << ',' << e.res_shape << ',' << e.res_velocity << '\n';
}

// ---------------------------------------------------------------- JSON

inline nlohmann::json to_json(const SynthesisReport& r) {
    nlohmann::json j;
    j["problem"] = to_string(r.controls.problem);
    j["mode"] = to_string(r.mode);
    j["time_horizon"] = r.time_horizon;
    j["eps"] = r.eps;
    j["norms"] = r.norms;
    j["endpoints_ok"] = r.endpoints_ok();
    auto& log = j["cascade_log"] = nlohmann::json::array();
    for (const auto& c : r.cascade_log) log.push_back({{"stage", c.stage}, {"residual", c.residual}});
    if (r.verified_error)
        j["verified_error"] = {{"shape_H1", (*r.verified_error)[0]}, {"velocity_L2", (*r.verified_error)[1]}};
    if (r.stability_quotient) j["stability_quotient"] = *r.stability_quotient;
    return j;
}

inline nlohmann::json to_json(const DemoReport& r) {
    nlohmann::json j;
    j["which"] = to_string(r.kind);
    j["T"] = r.T;
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    if (r.kind == DemoKind::interior_only) j["max_abs_a1"] = r.max_a1;
    else {
        j["max_ring_asymmetry"] = r.max_ring_asymmetry;
        j["antisym_omega"] = r.antisym_omega;
        j["antisym_max_coeff"] = r.antisym_max_coeff;
    }
    return j;
}

inline nlohmann::json to_json(const ClusterResult& r) {
    return {{"n", r.n}, {"centre", r.centre}, {"radius", r.radius}, {"roots", r.roots}, {"found", r.found()}};
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorKind::config, "cannot write " + p.string());
    out << s;
}

}  // namespace lasso
