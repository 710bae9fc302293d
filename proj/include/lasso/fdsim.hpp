#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "graph_model.hpp"
#include "wave_rep.hpp"

namespace lasso {

enum class Problem { P1, P2 };

inline const char* to_string(Problem p) { return p == Problem::P1 ? "P1" : "P2"; }

// P1: f1 Neumann datum u_x(l), f2 jump u2(0)-u1(0)
// P2: f1 flux source sum u_j'(0), f2 = u2(0)-u1(0), f3 = u3(0)-u1(0)
struct ControlSet {
    ControlTrace f1;
    ControlTrace f2;
    std::optional<ControlTrace> f3;
    Problem problem = Problem::P1;

    double horizon() const { return f1.horizon(); }

    static ControlSet zeros(Problem p, double h, std::size_t n_nodes) {
        ControlSet c;
        c.problem = p;
        c.f1 = ControlTrace::zeros(h, n_nodes, Regularity::L2);
        c.f2 = ControlTrace::zeros(h, n_nodes, Regularity::H1_zero_start);
        if (p == Problem::P2) c.f3 = ControlTrace::zeros(h, n_nodes, Regularity::H1_zero_start);
        return c;
    }

    ControlSet& operator+=(const ControlSet& o) {
        auto add = [](ControlTrace& a, const ControlTrace& b) {
            for (std::size_t i = 0; i < a.samples.size(); ++i) a.samples[i] += b.samples[i];
        };
        add(f1, o.f1);
        add(f2, o.f2);
        if (f3 && o.f3) add(*f3, *o.f3);
        return *this;
    }

    ControlSet& operator*=(double c) {
        for (double& v : f1.samples) v *= c;
        for (double& v : f2.samples) v *= c;
        if (f3)
            for (double& v : f3->samples) v *= c;
        return *this;
    }
};

struct WaveTrajectory {
    LassoGrid grid;
    double T = 0.0;
    double dt = 0.0;
    long steps = 0;
    std::vector<double> snapshot_times;
    std::vector<GraphFunction> snapshots;
    GraphFunction u_T;
    GraphFunction ut_T;
    std::vector<std::pair<double, double>> energy;
    double vertex_residual_max = 0.0;
    double max_ring_asymmetry = 0.0;  // max |u2 - u3| over all steps and nodes
};

struct SimOptions {
    long snapshot_stride = 0;  // 0: initial and final only
    long energy_stride = 0;    // 0: no energy history
    bool track_asymmetry = false;
};

namespace detail {

class LassoStepper {
public:
    LassoStepper(const LassoGeometry& geom, const PotentialSpec& q, const LassoGrid& grid, double dt)
        : g_(grid), dt_(dt) {
        (void)geom;
        long n[3] = {grid.n1, grid.n2, grid.n2};
        for (int j = 0; j < 3; ++j) {
            auto m = static_cast<std::size_t>(n[j]) + 1;
            qn_[j].resize(m);
            for (std::size_t i = 0; i < m; ++i) qn_[j][i] = q(static_cast<Edge>(j), grid.h * static_cast<double>(i));
        }
        double qm = 0.5 * (qn_[1].back() + qn_[2].back());
        qn_[1].back() = qn_[2].back() = qm;
        r2_ = dt_ * dt_ / (grid.h * grid.h);
    }

    // spatial operator u_xx - q u at every node except the vertex, ghost datum at x = l
    void apply(const GraphFunction& u, double neumann_l, GraphFunction& out) const {
        const double ih2 = 1.0 / (g_.h * g_.h);
        for (int j = 0; j < 3; ++j) {
            const auto& v = u.e[j];
            auto& o = out.e[j];
            std::size_t n = v.size() - 1;
            for (std::size_t i = 1; i < n; ++i) o[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) * ih2 - qn_[j][i] * v[i];
        }
        const auto& e1 = u.e[0];
        std::size_t n1 = e1.size() - 1;
        out.e[0][n1] = (2.0 * e1[n1 - 1] - 2.0 * e1[n1] + 2.0 * g_.h * neumann_l) * ih2 - qn_[0][n1] * e1[n1];
        std::size_t n2 = u.e[1].size() - 1;
        double um = u.e[1][n2];
        double lap = ((u.e[1][n2 - 1] + u.e[2][n2 - 1]) - 2.0 * um) * ih2 - qn_[1][n2] * um;
        out.e[1][n2] = out.e[2][n2] = lap;
    }

    static void close_vertex(GraphFunction& u, double j2, double j3, double source, double h) {
        double s = 0.0;
        for (int j = 0; j < 3; ++j) s += 4.0 * u.e[j][1] - u.e[j][2];
        double v = (s - 3.0 * (j2 + j3) - 2.0 * h * source) / 9.0;
        u.e[0][0] = v;
        u.e[1][0] = v + j2;
        u.e[2][0] = v + j3;
    }

    // second time derivative of the shared vertex value, jumps excluded
    double vertex_accel(const GraphFunction& u, double source) const {
        double s = 0.0, qs = 0.0;
        for (int j = 0; j < 3; ++j) {
            s += u.e[j][1] - u.e[j][0];
            qs += qn_[j][0] * u.e[j][0];
        }
        return 2.0 * s / (3.0 * g_.h * g_.h) - 2.0 * source / (3.0 * g_.h) - qs / 3.0;
    }

    static double flux_residual(const GraphFunction& u, double source, double h) {
        double s = 0.0;
        for (int j = 0; j < 3; ++j) s += (-3.0 * u.e[j][0] + 4.0 * u.e[j][1] - u.e[j][2]) / (2.0 * h);
        return std::abs(s - source);
    }

    double energy(const GraphFunction& um, const GraphFunction& u, const GraphFunction& up) const {
        double e = 0.0;
        for (int j = 0; j < 3; ++j) {
            const auto& v = u.e[j];
            std::size_t n = v.size() - 1;
            double kin = 0.0, pot = 0.0, grad = 0.0;
            for (std::size_t i = 0; i <= n; ++i) {
                double w = (i == 0 || i == n) ? 0.5 : 1.0;
                double ut = (up.e[j][i] - um.e[j][i]) / (2.0 * dt_);
                kin += w * ut * ut;
                pot += w * qn_[j][i] * v[i] * v[i];
            }
            for (std::size_t i = 0; i < n; ++i) {
                double d = (v[i + 1] - v[i]) / g_.h;
                grad += d * d;
            }
            e += 0.5 * g_.h * (kin + pot + grad);
        }
        return e;
    }

    const LassoGrid& grid() const { return g_; }

private:
    LassoGrid g_;
    double dt_;
    double r2_;
    std::array<std::vector<double>, 3> qn_;
};

inline double step_of(const LassoGrid& grid, double T) {
    auto M = static_cast<long>(std::ceil(T / (grid.cfl * grid.h) - 1e-9));
    return T / static_cast<double>(M);
}

struct BoundaryData {
    std::function<double(double)> neumann_l;
    std::function<double(double)> jump2;
    std::function<double(double)> jump3;
    std::function<double(double)> source;
};

inline WaveTrajectory run(const LassoGeometry& geom, const PotentialSpec& q, const LassoGrid& grid, double T,
                          const BoundaryData& bd, const GraphFunction* u0, const GraphFunction* v0,
                          const SimOptions& opt) {
    if (!(grid.cfl > 0.0) || grid.cfl > 1.0) throw Error(ErrorKind::cfl_violation, "cfl must lie in (0,1]");
    if (!(T > 0.0)) throw Error(ErrorKind::config, "simulation time must be positive");
    double dt = step_of(grid, T);
    auto M = static_cast<long>(std::lround(T / dt));
    LassoStepper st(geom, q, grid, dt);
    const double h = grid.h;

    WaveTrajectory tr;
    tr.grid = grid;
    tr.T = T;
    tr.dt = dt;
    tr.steps = M;

    GraphFunction um = u0 ? *u0 : GraphFunction::zeros(grid);
    GraphFunction u = um, up = um, lap = GraphFunction::zeros(grid);
    auto t_of = [dt](long k) { return dt * static_cast<double>(k); };

    st.apply(um, bd.neumann_l(0.0), lap);
    for (int j = 0; j < 3; ++j)
        for (std::size_t i = 1; i < u.e[j].size(); ++i) {
            double v = v0 ? v0->e[j][i] : 0.0;
            u.e[j][i] = um.e[j][i] + dt * v + 0.5 * dt * dt * lap.e[j][i];
        }
    const bool fv = grid.vertex == VertexScheme::finite_volume;
    auto jumps = [&](double t) { return bd.jump2(t) + bd.jump3(t); };
    auto set_vertex = [&](GraphFunction& w, double v, double t) {
        w.e[0][0] = v;
        w.e[1][0] = v + bd.jump2(t);
        w.e[2][0] = v + bd.jump3(t);
    };
    if (fv) {
        double v1 = um.e[0][0] + dt * (v0 ? v0->e[0][0] : 0.0) +
                    0.5 * dt * dt * st.vertex_accel(um, bd.source(0.0)) - (jumps(dt) - jumps(0.0)) / 3.0;
        set_vertex(u, v1, t_of(1));
    } else {
        LassoStepper::close_vertex(u, bd.jump2(t_of(1)), bd.jump3(t_of(1)), bd.source(t_of(1)), h);
    }

    auto snapshot = [&](long k, const GraphFunction& s) {
        tr.snapshot_times.push_back(t_of(k));
        tr.snapshots.push_back(s);
    };
    snapshot(0, um);
    auto asym = [&](const GraphFunction& s) {
        if (!opt.track_asymmetry) return;
        for (std::size_t i = 0; i < s.e[1].size(); ++i)
            tr.max_ring_asymmetry = std::max(tr.max_ring_asymmetry, std::abs(s.e[1][i] - s.e[2][i]));
    };
    asym(um);
    asym(u);

    for (long k = 1; k <= M; ++k) {
        double t = t_of(k);
        st.apply(u, bd.neumann_l(t), lap);
        const double dt2 = dt * dt;
        for (int j = 0; j < 3; ++j)
            for (std::size_t i = 1; i < u.e[j].size(); ++i)
                up.e[j][i] = 2.0 * u.e[j][i] - um.e[j][i] + dt2 * lap.e[j][i];
        double tn = t_of(k + 1);
        if (fv) {
            double v = 2.0 * u.e[0][0] - um.e[0][0] + dt2 * st.vertex_accel(u, bd.source(t)) -
                       (jumps(tn) - 2.0 * jumps(t) + jumps(t_of(k - 1))) / 3.0;
            set_vertex(up, v, tn);
        } else {
            LassoStepper::close_vertex(up, bd.jump2(tn), bd.jump3(tn), bd.source(tn), h);
        }
        tr.vertex_residual_max = std::max(tr.vertex_residual_max, LassoStepper::flux_residual(up, bd.source(tn), h));
        if (opt.energy_stride > 0 && k % opt.energy_stride == 0) tr.energy.emplace_back(t, st.energy(um, u, up));
        if (k < M && opt.snapshot_stride > 0 && k % opt.snapshot_stride == 0) snapshot(k, u);
        if (k == M) {
            tr.u_T = u;
            tr.ut_T = GraphFunction::zeros(grid);
            for (int j = 0; j < 3; ++j)
                for (std::size_t i = 0; i < u.e[j].size(); ++i)
                    tr.ut_T.e[j][i] = (up.e[j][i] - um.e[j][i]) / (2.0 * dt);
            snapshot(k, u);
        }
        std::swap(um, u);
        std::swap(u, up);
        if (k < M) asym(u);
    }
    for (const auto& s : tr.snapshots)
        for (const auto& v : s.e)
            for (double x : v)
                if (!std::isfinite(x)) throw Error(ErrorKind::non_finite, "simulation blew up");
    return tr;
}

inline std::function<double(double)> trace_fn(const ControlTrace* c) {
    if (!c) return [](double) { return 0.0; };
    return [c](double t) { return (*c)(t); };
}

// flux data at the starting step enter as the mean over (0, dt)
inline std::function<double(double)> flux_fn(const ControlTrace* c, double dt) {
    if (!c) return [](double) { return 0.0; };
    auto tr = std::make_shared<ControlTrace>(*c);
    return [tr, dt](double t) {
        if (t < 0.5 * dt) return 0.5 * ((*tr)(0.0) + (*tr)(dt));
        return (*tr)(t);
    };
}

}  // namespace detail

inline WaveTrajectory simulate_p1(const LassoGeometry& geom, const PotentialSpec& q, const ControlSet& c, double T,
                                  const LassoGrid& grid, const SimOptions& opt = {}) {
    detail::BoundaryData bd{detail::flux_fn(&c.f1, detail::step_of(grid, T)), detail::trace_fn(&c.f2),
                            detail::trace_fn(nullptr), detail::trace_fn(nullptr)};
    return detail::run(geom, q, grid, T, bd, nullptr, nullptr, opt);
}

inline WaveTrajectory simulate_p2(const LassoGeometry& geom, const PotentialSpec& q, const ControlSet& c, double T,
                                  const LassoGrid& grid, const SimOptions& opt = {}) {
    detail::BoundaryData bd{detail::trace_fn(nullptr), detail::trace_fn(&c.f2),
                            detail::trace_fn(c.f3 ? &*c.f3 : nullptr), detail::flux_fn(&c.f1, detail::step_of(grid, T))};
    return detail::run(geom, q, grid, T, bd, nullptr, nullptr, opt);
}

inline WaveTrajectory simulate(const LassoGeometry& geom, const PotentialSpec& q, const ControlSet& c, double T,
                               const LassoGrid& grid, const SimOptions& opt = {}) {
    return c.problem == Problem::P1 ? simulate_p1(geom, q, c, T, grid, opt) : simulate_p2(geom, q, c, T, grid, opt);
}

// uncontrolled evolution from (u0, v0)
inline WaveTrajectory simulate_free(const LassoGeometry& geom, const PotentialSpec& q, const GraphFunction& u0,
                                    const GraphFunction& v0, double T, const LassoGrid& grid,
                                    const SimOptions& opt = {}) {
    auto z = detail::trace_fn(nullptr);
    detail::BoundaryData bd{z, z, z, z};
    return detail::run(geom, q, grid, T, bd, &u0, &v0, opt);
}

inline std::pair<GraphFunction, GraphFunction> final_state(const WaveTrajectory& tr) { return {tr.u_T, tr.ut_T}; }

inline void export_snapshots_csv(std::ostream& os, const WaveTrajectory& tr) {
    os.precision(17);
    os << "t,edge,x,u\n";
    for (std::size_t k = 0; k < tr.snapshots.size(); ++k)
        for (int j = 0; j < 3; ++j)
            for (std::size_t i = 0; i < tr.snapshots[k].e[j].size(); ++i)
                os << tr.snapshot_times[k] << ',' << (j + 1) << ',' << tr.grid.h * static_cast<double>(i) << ','
                   << tr.snapshots[k].e[j][i] << '\n';
}

// single interval [0,L] with either end Dirichlet or Robin/Neumann; used as an oracle for the
// closed-form representations
struct IntervalEnd {
    enum Kind { dirichlet, robin } kind = dirichlet;
    double beta1 = 0.0;  // robin: beta1 u + beta2 u_x = g
    double beta2 = 1.0;
    std::function<double(double)> g = [](double) { return 0.0; };
};

struct ProbePoint {
    double x;
    double t;
};

inline std::vector<double> simulate_interval(const std::function<double(double)>& q, double L, const IntervalEnd& left,
                                             const IntervalEnd& right, double h, double cfl,
                                             const std::vector<ProbePoint>& probes) {
    auto n = static_cast<long>(std::lround(L / h));
    double dt = cfl * h;
    double tmax = 0.0;
    for (const auto& p : probes) tmax = std::max(tmax, p.t);
    auto M = static_cast<long>(std::lround(tmax / dt));
    std::vector<double> qn(static_cast<std::size_t>(n) + 1);
    for (long i = 0; i <= n; ++i) qn[static_cast<std::size_t>(i)] = q(h * static_cast<double>(i));
    std::vector<double> um(qn.size(), 0.0), u(qn.size(), 0.0), up(qn.size(), 0.0);
    std::vector<double> out(probes.size(), 0.0);
    const double r2 = dt * dt / (h * h);
    auto record = [&](long k, const std::vector<double>& v) {
        for (std::size_t p = 0; p < probes.size(); ++p)
            if (std::lround(probes[p].t / dt) == k) {
                double xi = probes[p].x / h;
                auto i = static_cast<std::size_t>(std::lround(xi));
                out[p] = v[i];
            }
    };
    auto ghost_left = [&](const std::vector<double>& v, double t) {
        return v[1] - 2.0 * h * (left.g(t) - left.beta1 * v[0]) / left.beta2;
    };
    auto ghost_right = [&](const std::vector<double>& v, double t) {
        std::size_t m = v.size() - 1;
        return v[m - 1] + 2.0 * h * (right.g(t) - right.beta1 * v[m]) / right.beta2;
    };
    auto step = [&](const std::vector<double>& prev, const std::vector<double>& cur, std::vector<double>& nxt, double t,
                    double tn, double factor) {
        auto m = static_cast<std::size_t>(n);
        for (std::size_t i = 1; i < m; ++i)
            nxt[i] = factor * (2.0 * cur[i] - prev[i]) + (1.0 - factor) * cur[i] +
                     (factor == 1.0 ? 1.0 : 0.5) * (r2 * (cur[i + 1] - 2.0 * cur[i] + cur[i - 1]) - dt * dt * qn[i] * cur[i]);
        if (left.kind == IntervalEnd::dirichlet)
            nxt[0] = left.g(tn);
        else
            nxt[0] = factor * (2.0 * cur[0] - prev[0]) + (1.0 - factor) * cur[0] +
                     (factor == 1.0 ? 1.0 : 0.5) * (r2 * (cur[1] - 2.0 * cur[0] + ghost_left(cur, t)) - dt * dt * qn[0] * cur[0]);
        if (right.kind == IntervalEnd::dirichlet)
            nxt[m] = right.g(tn);
        else
            nxt[m] = factor * (2.0 * cur[m] - prev[m]) + (1.0 - factor) * cur[m] +
                     (factor == 1.0 ? 1.0 : 0.5) * (r2 * (ghost_right(cur, t) - 2.0 * cur[m] + cur[m - 1]) - dt * dt * qn[m] * cur[m]);
    };
    record(0, um);
    // Taylor start from rest: u^1 = u^0 + dt^2/2 A u^0
    step(um, um, u, 0.0, dt, 0.0);
    record(1, u);
    for (long k = 1; k < M; ++k) {
        step(um, u, up, dt * static_cast<double>(k), dt * static_cast<double>(k + 1), 1.0);
        std::swap(um, u);
        std::swap(u, up);
        record(k + 1, u);
    }
    return out;
}

}  // namespace lasso
