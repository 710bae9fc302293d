#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "fdsim.hpp"
#include "graph_model.hpp"
#include "kernels.hpp"
#include "volterra.hpp"
#include "wave_rep.hpp"

namespace lasso {

enum class ControlMode { shape, velocity, exact };

inline const char* to_string(ControlMode m) {
    switch (m) {
    case ControlMode::shape: return "shape";
    case ControlMode::velocity: return "velocity";
    case ControlMode::exact: return "exact";
    }
    return "shape";
}

struct CascadeEntry {
    std::string stage;
    double residual = 0.0;
};

struct SynthesisReport {
    ControlSet controls;
    ControlMode mode = ControlMode::shape;
    double time_horizon = 0.0;
    double eps = 0.0;
    std::vector<double> norms;  // |f1|_L2, |f2|_H1 [, |f3|_H1]
    std::vector<CascadeEntry> cascade_log;
    std::optional<std::array<double, 2>> verified_error;  // rel H1 of u(T), rel L2 of u_t(T)
    std::optional<double> stability_quotient;

    double max_cascade_residual() const {
        double r = 0.0;
        for (const auto& c : cascade_log) r = std::max(r, c.residual);
        return r;
    }
    bool endpoints_ok() const {
        bool ok = controls.f1.endpoints_ok() && controls.f2.endpoints_ok();
        if (controls.f3) ok = ok && controls.f3->endpoints_ok();
        return ok;
    }
};

struct SynthesisOptions {
    double eps = 0.0;  // 0: min(a,l)/10
};

namespace detail {

inline long idx(double t, double h) { return std::lround(t / h); }

inline std::vector<double> cumulative(const std::vector<double>& v, double h, std::size_t start = 0) {
    std::vector<double> c(v.size(), 0.0);
    for (std::size_t i = start + 1; i < v.size(); ++i) c[i] = c[i - 1] + 0.5 * h * (v[i - 1] + v[i]);
    return c;
}

inline std::vector<double> centered_derivative(const std::vector<double>& v, double h) {
    ControlTrace t;
    t.h = h;
    t.samples = v;
    return t.derivative();
}

// int_{ih}^{mh} k_x(ih, s) B(mh - s) ds
inline double dx_convolution(const Kernel& k, long i, long m, const std::vector<double>& B) {
    if (m <= i) return 0.0;
    double s = 0.5 * (k.dx(i, i) * B[static_cast<std::size_t>(m - i)] + k.dx(i, m) * B[0]);
    for (long j = i + 1; j < m; ++j) s += k.dx(i, j) * B[static_cast<std::size_t>(m - j)];
    return s * k.h;
}

// peak eps^(-1/3) at s = 0, support (-eps, eps), C3 at the ends
inline double hat(double s, double eps) {
    double u = s / eps;
    if (std::abs(u) >= 1.0) return 0.0;
    double w = 1.0 - u * u;
    return std::pow(eps, -1.0 / 3.0) * w * w * w * w;
}

// even: hat, odd: s / eps times the hat
inline double bump_profile(double s, double eps, bool odd) { return odd ? s / eps * hat(s, eps) : hat(s, eps); }

// slope along the ring at the midpoint, from the e2 side to the e3 side
inline double ring_slope(const GraphFunction& f, long n2, double h) {
    auto i = static_cast<std::size_t>(n2 - 1);
    return (f.e[2][i] - f.e[1][i]) / (2.0 * h);
}

inline double default_eps(const LassoGeometry& g, double h, double requested) {
    double e = requested > 0.0 ? requested : std::min(g.a, g.l) / 10.0;
    return h * static_cast<double>(std::max(1L, std::lround(e / h)));
}

inline ControlTrace trace_of(std::vector<double> v, double h, Regularity tag) {
    ControlTrace c;
    c.h = h;
    c.samples = std::move(v);
    c.tag = tag;
    return c;
}

inline ControlTrace shifted(const ControlTrace& c, long by, std::size_t n_nodes) {
    ControlTrace s = ControlTrace::zeros(c.h, n_nodes, c.tag);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        long k = static_cast<long>(i) - by;
        if (k >= 0 && static_cast<std::size_t>(k) < c.size()) s.samples[i] = c.samples[static_cast<std::size_t>(k)];
    }
    return s;
}

// y(v) + int_{0}^{v} k(L - v, L - s) y(s) ds = phi(L - v), v in [0, L]
inline std::vector<double> reversed_vesk(const Kernel& k, const std::vector<double>& phi_edge, double h,
                                         double& residual) {
    long n = static_cast<long>(phi_edge.size()) - 1;
    VeskProblem p;
    p.t0 = 0.0;
    p.t1 = h * static_cast<double>(n);
    p.h = h;
    p.rhs.resize(phi_edge.size());
    for (long i = 0; i <= n; ++i) p.rhs[static_cast<std::size_t>(i)] = phi_edge[static_cast<std::size_t>(n - i)];
    p.kernel = [&k, n, h](double t, double s) { return k.at(n - idx(t, h), n - idx(s, h)); };
    auto y = solve_vesk(p);
    residual = vesk_collocation_residual(p, y);
    return y;
}

inline void require_h10(const GraphFunction& phi) {
    TargetState ts;
    ts.phi1 = phi;
    ts.validate();
}

inline std::vector<double> report_norms(const ControlSet& c) {
    std::vector<double> n{c.f1.norm_L2(), c.f2.norm_H1()};
    if (c.f3) n.push_back(c.f3->norm_H1());
    return n;
}

// odd: g(2T - t) = -g(t), even: g(2T - t) = g(t); the node at T takes the mean of both sides
inline ControlTrace reflect_extend(const ControlTrace& c, bool odd, Regularity tag) {
    std::size_t n = c.size() - 1;
    ControlTrace e = ControlTrace::zeros(c.h, 2 * n + 1, tag);
    double s = odd ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        e.samples[i] = c.samples[i];
        e.samples[2 * n - i] = s * c.samples[i];
    }
    e.samples[n] = 0.5 * (1.0 + s) * c.samples[n];
    return e;
}

inline ControlTrace average(const ControlTrace& a, const ControlTrace& b, Regularity tag) {
    ControlTrace r = ControlTrace::zeros(a.h, a.size(), tag);
    for (std::size_t i = 0; i < a.size(); ++i) r.samples[i] = 0.5 * (a.samples[i] + b.samples[i]);
    return r;
}

inline ControlSet combine_exact(const ControlSet& shape, const ControlSet& velocity) {
    ControlSet c;
    c.problem = shape.problem;
    c.f1 = average(reflect_extend(shape.f1, true, Regularity::L2), reflect_extend(velocity.f1, false, Regularity::L2),
                   Regularity::L2);
    c.f2 = average(reflect_extend(shape.f2, true, Regularity::H1_zero_both),
                   reflect_extend(velocity.f2, false, Regularity::H1_zero_both), Regularity::H1_zero_both);
    if (shape.f3 && velocity.f3)
        c.f3 = average(reflect_extend(*shape.f3, true, Regularity::H1_zero_both),
                       reflect_extend(*velocity.f3, false, Regularity::H1_zero_both), Regularity::H1_zero_both);
    return c;
}

// target state whose free evolution over time T ends at (phi1, phi2)
inline std::pair<GraphFunction, GraphFunction> evolve_backward(const LassoGeometry& geom, const PotentialSpec& q,
                                                               const TargetState& target, double T,
                                                               const LassoGrid& grid) {
    GraphFunction v = target.phi2;
    v *= -1.0;
    auto tr = simulate_free(geom, q, target.phi1, v, T, grid);
    GraphFunction u = tr.u_T, ut = tr.ut_T;
    ut *= -1.0;
    TargetState::snap_vertex(u);
    return {u, ut};
}

}  // namespace detail

// smooth bump control supported on [0, 2 eps] with u(l, l + eps) = target_value for the interval
// problem (Dirichlet data at 0, Neumann at l); eps is halved when the amplitude degenerates
inline ControlTrace bump_control(double target_value, double& eps, double l, const Kernel& k_folded,
                                 std::size_t n_nodes) {
    double h = k_folded.h;
    if (target_value == 0.0) return ControlTrace::zeros(h, n_nodes, Regularity::H1_zero_both);
    for (int tries = 0;; ++tries) {
        auto unit = ControlTrace::sample(h, h * static_cast<double>(n_nodes - 1),
                                         [eps](double t) { return detail::hat(t - eps, eps); },
                                         Regularity::H1_zero_both);
        double alpha = eval_interval_folded(k_folded, unit, RightBc::neumann, l, l, l + eps);
        if (std::abs(alpha) >= 1e-8) {
            for (double& v : unit.samples) v *= target_value / alpha;
            return unit;
        }
        if (tries == 5) throw Error(ErrorKind::degenerate_amplitude, "bump amplitude vanishes");
        eps *= 0.5;
    }
}

// ---------------------------------------------------------------- Problem 1

class P1Synthesizer {
public:
    P1Synthesizer(const LassoGeometry& geom, const PotentialSpec& q, const LassoGrid& grid,
                  const SynthesisOptions& opt = {})
        : geom_(geom), q_(q), grid_(grid), opt_(opt) {
        h_ = grid.h;
        n1_ = grid.n1;
        n2_ = grid.n2;
        N_ = n1_ + n2_;
        try {
            k1_ = solve_goursat(folded_e1(q), BcKind::dirichlet, geom.a, h_);
            k2_ = solve_goursat(ring_continued(q, Edge::e2), BcKind::dirichlet, geom.a, h_);
            k3_ = solve_goursat(ring_continued(q, Edge::e3), BcKind::dirichlet, geom.a, h_);
            w_ = solve_goursat_reflected_neumann(q, geom.T_star(), h_);
        } catch (const Error& e) {
            throw SynthesisError("kernels", e.what());
        }
        build_omega();
    }

    double T() const { return geom_.T_star(); }

    SynthesisReport shape(const GraphFunction& phi_in) const {
        SynthesisReport r;
        r.mode = ControlMode::shape;
        r.time_horizon = T();
        detail::require_h10(phi_in);
        GraphFunction phi = phi_in;
        TargetState::snap_vertex(phi);

        ControlTrace bump = ControlTrace::zeros(h_, nodes(), Regularity::H1_zero_both);
        midpoint_correction(phi, false, bump, r);

        Ring ring = solve_ring(phi, r, "ring");
        // shape: A = y, B = int y
        std::vector<double> B1 = detail::cumulative(ring.y1, h_), B2 = detail::cumulative(ring.y2, h_);
        std::vector<double> X = solve_x(phi.e[0], ring.y1, B1, ring.y2, B2, r);
        ControlSet c;
        c.problem = Problem::P1;
        c.f1 = detail::trace_of(detail::centered_derivative(X, h_), h_, Regularity::L2);
        c.f2 = jump_control(ring.y1, ring.y2, Regularity::H1_zero_both);
        for (std::size_t i = 0; i < c.f2.size(); ++i) c.f2.samples[i] += bump.samples[i];
        r.controls = std::move(c);
        r.norms = detail::report_norms(r.controls);
        return r;
    }

    SynthesisReport velocity(const GraphFunction& psi_in) const {
        SynthesisReport r;
        r.mode = ControlMode::velocity;
        r.time_horizon = T();
        GraphFunction psi = psi_in;
        ControlTrace bump = ControlTrace::zeros(h_, nodes(), Regularity::H1_zero_start);
        midpoint_correction(psi, true, bump, r);
        Ring ring = solve_ring(psi, r, "ring");
        // velocity: A = y', B = y; the unknown is f1 itself
        std::vector<double> Y1 = detail::cumulative(ring.y1, h_), Y2 = detail::cumulative(ring.y2, h_);
        std::vector<double> X = solve_x(psi.e[0], ring.y1, Y1, ring.y2, Y2, r);
        ControlSet c;
        c.problem = Problem::P1;
        c.f1 = detail::trace_of(X, h_, Regularity::L2);
        c.f2 = jump_control(Y1, Y2, Regularity::H1_zero_start);
        for (std::size_t i = 0; i < c.f2.size(); ++i) c.f2.samples[i] += bump.samples[i];
        r.controls = std::move(c);
        r.norms = detail::report_norms(r.controls);
        return r;
    }

    SynthesisReport exact(const TargetState& target) const {
        detail::require_h10(target.phi1);
        auto [u0, v0] = detail::evolve_backward(geom_, q_, target, T(), grid_);
        auto s = shape(u0);
        auto v = velocity(v0);
        SynthesisReport r;
        r.mode = ControlMode::exact;
        r.time_horizon = 2.0 * T();
        r.eps = s.eps;
        r.controls = detail::combine_exact(s.controls, v.controls);
        for (auto& e : s.cascade_log) r.cascade_log.push_back({"shape/" + e.stage, e.residual});
        for (auto& e : v.cascade_log) r.cascade_log.push_back({"velocity/" + e.stage, e.residual});
        r.norms = detail::report_norms(r.controls);
        return r;
    }

    const Kernel& k1() const { return k1_; }
    const Kernel& w() const { return w_; }

private:
    struct Ring {
        std::vector<double> y1, y2;  // y3 = y1
    };

    std::size_t nodes() const { return static_cast<std::size_t>(N_) + 1; }

    // jump controls near t = l carry the ring-midpoint value and slope of the target; the target is
    // replaced by what remains after the simulated responses
    void midpoint_correction(GraphFunction& target, bool velocity, ControlTrace& bump, SynthesisReport& r) const {
        const auto mid = static_cast<std::size_t>(n2_);
        Eigen::Vector2d goal(target.e[1][mid], detail::ring_slope(target, n2_, h_));
        if (goal.isZero(0.0)) return;
        double eps = detail::default_eps(geom_, h_, opt_.eps);
        r.eps = eps;
        GraphFunction v;
        for (int tries = 0;; ++tries) {
            std::array<ControlTrace, 2> unit;
            std::array<GraphFunction, 2> resp;
            Eigen::Matrix2d M;
            for (int k = 0; k < 2; ++k) {
                ControlSet u = ControlSet::zeros(Problem::P1, h_, nodes());
                for (long i = 0; i <= N_; ++i) {
                    double s = h_ * static_cast<double>(i) - geom_.l;
                    u.f2.samples[static_cast<std::size_t>(i)] = detail::bump_profile(s, eps, k == 1);
                }
                auto tr = simulate_p1(geom_, q_, u, T(), grid_);
                resp[k] = velocity ? tr.ut_T : tr.u_T;
                unit[k] = u.f2;
                M(0, k) = resp[k].e[1][mid];
                M(1, k) = detail::ring_slope(resp[k], n2_, h_);
            }
            Eigen::FullPivLU<Eigen::Matrix2d> lu(M);
            if (lu.rcond() >= 1e-8) {
                Eigen::Vector2d c = lu.solve(goal);
                v = resp[0];
                v *= c(0);
                GraphFunction w = resp[1];
                w *= c(1);
                v += w;
                for (long i = 0; i <= N_; ++i) {
                    auto k = static_cast<std::size_t>(i);
                    bump.samples[k] = c(0) * unit[0].samples[k] + c(1) * unit[1].samples[k];
                }
                break;
            }
            if (tries == 5) throw SynthesisError("bump", "degenerate amplitude at the ring midpoint");
            eps = std::max(h_, h_ * std::round(0.5 * eps / h_));
            r.eps = eps;
        }
        target -= v;
        target.e[1][mid] = 0.0;
        target.e[2][mid] = 0.0;
        TargetState::snap_vertex(target);
    }

    Ring solve_ring(const GraphFunction& target, SynthesisReport& r, const std::string& stage) const {
        Ring ring;
        double r2 = 0.0, r3 = 0.0;
        try {
            ring.y2 = detail::reversed_vesk(k2_, target.e[1], h_, r2);
            ring.y1 = detail::reversed_vesk(k3_, target.e[2], h_, r3);
        } catch (const Error& e) {
            throw SynthesisError(stage, e.what());
        }
        r.cascade_log.push_back({stage + "/e2", r2});
        r.cascade_log.push_back({stage + "/e3", r3});
        return ring;
    }

    ControlTrace jump_control(const std::vector<double>& y1, const std::vector<double>& y2, Regularity tag) const {
        ControlTrace f = ControlTrace::zeros(h_, nodes(), tag);
        for (long i = n1_; i <= N_; ++i) {
            auto k = static_cast<std::size_t>(i - n1_);
            f.samples[static_cast<std::size_t>(i)] = y2[k] - y1[k];
        }
        return f;
    }

    // Omega_m(r) = int_{zeta_m}^{r} w_x(zeta_m, u) du, zeta_m = (2m + 1) l
    void build_omega() {
        for (long m = 0;; ++m) {
            long z = (2 * m + 1) * n1_;
            if (z > w_.n) break;
            std::vector<double> om(static_cast<std::size_t>(w_.n) + 1, 0.0);
            for (long j = z + 1; j <= w_.n; ++j)
                om[static_cast<std::size_t>(j)] =
                    om[static_cast<std::size_t>(j - 1)] + 0.5 * h_ * (w_.dx(z, j - 1) + w_.dx(z, j));
            omega_.push_back(std::move(om));
        }
    }

    double kernel_m(long m, long i, long j) const {
        long z = (2 * m + 1) * n1_;
        return w_.at(z, z) - omega_[static_cast<std::size_t>(m)][static_cast<std::size_t>(i + n1_ - j)];
    }

    // stages B and C: X on [0, T] from the vertex balance on [0, a] and the e1 target on [a, T]
    std::vector<double> solve_x(const std::vector<double>& phi1, const std::vector<double>& A1,
                                const std::vector<double>& B1, const std::vector<double>& A2,
                                const std::vector<double>& B2, SynthesisReport& r) const {
        const long two_l = 2 * n1_;
        // integrated flux of the known Dirichlet parts
        std::vector<double> E(static_cast<std::size_t>(n2_) + 1, 0.0);
        for (long i = 0; i <= n2_; ++i) {
            double e = 0.0;
            for (long n = 0; n * two_l <= i; ++n) {
                long z = n * two_l;
                double c = n == 0 ? 1.0 : (n % 2 == 0 ? 2.0 : -2.0);
                auto k = static_cast<std::size_t>(i - z);
                e += c * (-A1[k] - k1_.at(z, z) * B1[k] + detail::dx_convolution(k1_, z, i, B1));
            }
            e += -A2[static_cast<std::size_t>(i)] + detail::dx_convolution(k2_, 0, i, B2);
            e += -A1[static_cast<std::size_t>(i)] + detail::dx_convolution(k3_, 0, i, B1);
            E[static_cast<std::size_t>(i)] = e;
        }

        std::vector<double> X;
        double resB = 0.0;
        try {
            for (long start = 0; start <= n2_; start += two_l) {
                long end = std::min(start + two_l - 1, n2_);
                VeskProblem p;
                p.t0 = 0.0;
                p.t1 = h_ * static_cast<double>(end);
                p.h = h_;
                p.rhs.assign(static_cast<std::size_t>(end) + 1, 0.0);
                for (long i = start; i <= end; ++i) {
                    double rhs = -0.5 * E[static_cast<std::size_t>(i)];
                    for (long m = 1; m * two_l <= i; ++m) {
                        long top = i - m * two_l;
                        double acc = 0.0;
                        for (long j = 0; j <= top; ++j) {
                            double wgt = (j == 0 || j == top) ? 0.5 : 1.0;
                            acc += wgt * X[static_cast<std::size_t>(j)] * kernel_m(m, i, j);
                        }
                        if (top == 0) acc = 0.0;
                        rhs -= (m % 2 == 0 ? 1.0 : -1.0) * (X[static_cast<std::size_t>(top)] + h_ * acc);
                    }
                    p.rhs[static_cast<std::size_t>(i)] = rhs;
                }
                p.kernel = [this](double t, double s) { return kernel_m(0, detail::idx(t, h_), detail::idx(s, h_)); };
                X = solve_vesk(p, X);
                resB = std::max(resB, vesk_collocation_residual(p, X, static_cast<std::size_t>(start)));
            }
        } catch (const Error& e) {
            throw SynthesisError("flux", e.what());
        }
        r.cascade_log.push_back({"flux", resB});

        // stage C
        ControlTrace Xk = detail::trace_of(X, h_, Regularity::L2);
        ControlTrace A1t = detail::trace_of(A1, h_, Regularity::L2);
        const double l = geom_.l, a = geom_.a, T = this->T();
        auto V = [&](double zeta) {
            if (detail::on_front(zeta, T)) return 0.5 * Xk(0.0);
            if (zeta > T) return 0.0;
            return Xk(T - zeta) + detail::kernel_convolution(w_, Xk, zeta, T);
        };
        VeskProblem p;
        p.t0 = 0.0;
        p.t1 = T;
        p.h = h_;
        p.rhs.assign(nodes(), 0.0);
        try {
            for (long iv = n2_ + 1; iv <= N_; ++iv) {
                long ix = iv - n2_;
                double x = h_ * static_cast<double>(ix);
                double rhs = phi1[static_cast<std::size_t>(ix)];
                rhs -= eval_interval_folded(k1_, A1t, RightBc::neumann, l, x, a);
                for (long n = 1;; ++n) {
                    double z = (2.0 * static_cast<double>(n) + 1.0) * l - x;
                    if (z > T && !detail::on_front(z, T)) break;
                    rhs -= (n % 2 == 0 ? 1.0 : -1.0) * V(z);
                }
                for (long n = 1;; ++n) {
                    double z = (2.0 * static_cast<double>(n) - 1.0) * l + x;
                    if (z > T && !detail::on_front(z, T)) break;
                    rhs -= (n % 2 == 0 ? 1.0 : -1.0) * V(z);
                }
                p.rhs[static_cast<std::size_t>(iv)] = rhs;
            }
            p.kernel = [this](double t, double s) { return w_.at(N_ - detail::idx(t, h_), N_ - detail::idx(s, h_)); };
            X = solve_vesk(p, X);
        } catch (const Error& e) {
            throw SynthesisError("pendant", e.what());
        }
        r.cascade_log.push_back({"pendant", vesk_collocation_residual(p, X, static_cast<std::size_t>(n2_) + 1)});
        return X;
    }

    LassoGeometry geom_;
    PotentialSpec q_;
    LassoGrid grid_;
    SynthesisOptions opt_;
    double h_ = 0.0;
    long n1_ = 0, n2_ = 0, N_ = 0;
    Kernel k1_, k2_, k3_, w_;
    std::vector<std::vector<double>> omega_;
};

inline SynthesisReport shape_control_p1(const GraphFunction& phi, const LassoGeometry& geom, const PotentialSpec& q,
                                        const LassoGrid& grid, const SynthesisOptions& opt = {}) {
    return P1Synthesizer(geom, q, grid, opt).shape(phi);
}

inline SynthesisReport velocity_control_p1(const GraphFunction& psi, const LassoGeometry& geom,
                                           const PotentialSpec& q, const LassoGrid& grid,
                                           const SynthesisOptions& opt = {}) {
    return P1Synthesizer(geom, q, grid, opt).velocity(psi);
}

inline SynthesisReport exact_control_p1(const TargetState& target, const LassoGeometry& geom, const PotentialSpec& q,
                                        const LassoGrid& grid, const SynthesisOptions& opt = {}) {
    return P1Synthesizer(geom, q, grid, opt).exact(target);
}

// ---------------------------------------------------------------- Problem 2

class P2Synthesizer {
public:
    P2Synthesizer(const LassoGeometry& geom, const PotentialSpec& q, const LassoGrid& grid,
                  const SynthesisOptions& opt = {})
        : geom_(geom), q_(q), grid_(grid) {
        h_ = grid.h;
        n1_ = grid.n1;
        n2_ = grid.n2;
        N0_ = std::max(n1_, n2_);
        eps_ = detail::default_eps(geom, h_, opt.eps);
        if (eps_ >= std::min(geom.a, geom.l)) throw Error(ErrorKind::config, "eps must be below min(a, l)");
        double horizon = geom.T_upper() + 2.0 * eps_;
        try {
            k_[0] = solve_goursat(folded_e1(q), BcKind::dirichlet, horizon, h_);
            k_[1] = solve_goursat(ring_continued(q, Edge::e2), BcKind::dirichlet, horizon, h_);
            k_[2] = solve_goursat(ring_continued(q, Edge::e3), BcKind::dirichlet, horizon, h_);
        } catch (const Error& e) {
            throw SynthesisError("kernels", e.what());
        }
    }

    double T_star() const { return geom_.T_upper(); }
    double eps() const { return eps_; }
    double T() const { return T_star() + eps_; }

    // phi(l) = phi(a) = 0, time T^*: waves never reflect
    SynthesisReport shape_special(const GraphFunction& phi) const {
        SynthesisReport r;
        r.mode = ControlMode::shape;
        r.time_horizon = T_star();
        r.controls = special_controls(phi, 0, r);
        r.norms = detail::report_norms(r.controls);
        return r;
    }

    SynthesisReport shape(const GraphFunction& phi_in) const {
        detail::require_h10(phi_in);
        GraphFunction phi = phi_in;
        TargetState::snap_vertex(phi);
        const long ne = detail::idx(eps_, h_);
        const double T = this->T();

        SynthesisReport r;
        r.mode = ControlMode::shape;
        r.time_horizon = T;
        r.eps = eps_;
        ControlSet bump;
        bool has_bump = end_bumps(phi, false, bump);
        r.controls = special_controls(phi, ne, r);
        if (has_bump) r.controls += bump;
        r.norms = detail::report_norms(r.controls);
        return r;
    }

    // velocity at T^*; with shift_to_T the controls are delayed by eps and the end values of psi
    // are carried by simulated bumps
    SynthesisReport velocity(const GraphFunction& psi_in, bool shift_to_T = false) const {
        SynthesisReport r;
        r.mode = ControlMode::velocity;
        r.time_horizon = T_star();
        GraphFunction psi = psi_in;
        const long ne = shift_to_T ? detail::idx(eps_, h_) : 0;
        ControlSet bump;
        bool has_bump = false;
        if (shift_to_T) {
            r.time_horizon = T();
            r.eps = eps_;
            has_bump = end_bumps(psi, true, bump);
        }
        std::array<std::vector<double>, 3> y, yd;
        for (int j = 0; j < 3; ++j) {
            auto v = solve_edge(j, psi.e[j], r);
            long start = N0_ - (j == 0 ? n1_ : n2_) + ne;
            v.insert(v.begin(), static_cast<std::size_t>(ne), 0.0);
            y[j] = detail::cumulative(v, h_, static_cast<std::size_t>(start));
            yd[j] = detail::centered_derivative(y[j], h_);
        }
        r.controls = assemble(y, yd, Regularity::H1_zero_start);
        if (has_bump) r.controls += bump;
        r.norms = detail::report_norms(r.controls);
        return r;
    }

    SynthesisReport exact(const TargetState& target) const {
        detail::require_h10(target.phi1);
        auto [u0, v0] = detail::evolve_backward(geom_, q_, target, T(), grid_);
        auto s = shape(u0);
        auto v = velocity(v0, true);
        SynthesisReport r;
        r.mode = ControlMode::exact;
        r.time_horizon = 2.0 * T();
        r.eps = eps_;
        r.controls = detail::combine_exact(s.controls, v.controls);
        for (auto& e : s.cascade_log) r.cascade_log.push_back({"shape/" + e.stage, e.residual});
        for (auto& e : v.cascade_log) r.cascade_log.push_back({"velocity/" + e.stage, e.residual});
        r.norms = detail::report_norms(r.controls);
        return r;
    }

    const Kernel& kernel(int j) const { return k_[static_cast<std::size_t>(j)]; }

private:
    // trace bumps arriving at x = l and at the ring midpoint at time T carry the value at x = l and
    // the midpoint value and ring slope, solved jointly from the simulated responses; the target keeps
    // the remainder
    bool end_bumps(GraphFunction& target, bool velocity, ControlSet& bump) const {
        const long ne = detail::idx(eps_, h_);
        const std::size_t nn = static_cast<std::size_t>(N0_ + ne) + 1;
        const auto pend = static_cast<std::size_t>(n1_), mid = static_cast<std::size_t>(n2_);
        auto functionals = [&](const GraphFunction& f) {
            return Eigen::Vector3d(f.e[0][pend], f.e[1][mid], detail::ring_slope(f, n2_, h_));
        };
        Eigen::Vector3d goal = functionals(target);
        if (goal.isZero(0.0)) return false;
        // edge, odd profile
        const std::pair<int, bool> units[3] = {{0, velocity}, {1, false}, {1, true}};
        std::array<ControlSet, 3> unit;
        std::array<GraphFunction, 3> resp;
        Eigen::Matrix3d M;
        for (int k = 0; k < 3; ++k) {
            auto [edge, odd] = units[k];
            std::array<std::vector<double>, 3> y, yd;
            for (auto& v : y) v.assign(nn, 0.0);
            double centre = h_ * static_cast<double>(N0_ - (edge == 0 ? n1_ : n2_) + ne);
            for (std::size_t i = 0; i < nn; ++i)
                y[static_cast<std::size_t>(edge)][i] =
                    detail::bump_profile(h_ * static_cast<double>(i) - centre, eps_, odd);
            for (int j = 0; j < 3; ++j) yd[j] = detail::centered_derivative(y[j], h_);
            unit[k] = assemble(y, yd, velocity ? Regularity::H1_zero_start : Regularity::H1_zero_both);
            auto tr = simulate_p2(geom_, q_, unit[k], T(), grid_);
            resp[k] = velocity ? tr.ut_T : tr.u_T;
            M.col(k) = functionals(resp[k]);
        }
        Eigen::FullPivLU<Eigen::Matrix3d> lu(M);
        if (lu.rcond() < 1e-8) throw SynthesisError("bump", "degenerate amplitude at the far ends");
        Eigen::Vector3d c = lu.solve(goal);
        for (int k = 0; k < 3; ++k) {
            unit[k] *= c(k);
            resp[k] *= c(k);
            target -= resp[k];
            if (k == 0) bump = unit[k];
            else bump += unit[k];
        }
        target.e[0][pend] = 0.0;
        target.e[1][mid] = 0.0;
        target.e[2][mid] = 0.0;
        if (!velocity) TargetState::snap_vertex(target);
        return true;
    }

    // special-case controls delayed by pad steps; traces vanish before their start
    ControlSet special_controls(const GraphFunction& phi, long pad, SynthesisReport& r) const {
        std::array<std::vector<double>, 3> y, yd;
        for (int j = 0; j < 3; ++j) {
            auto part = solve_edge(j, phi.e[j], r);
            y[j].assign(static_cast<std::size_t>(pad), 0.0);
            y[j].insert(y[j].end(), part.begin(), part.end());
            yd[j] = detail::centered_derivative(y[j], h_);
        }
        return assemble(y, yd, Regularity::H1_zero_both);
    }

    // vertex trace of edge j on [0, T^*], zero before T^* - L_j
    std::vector<double> solve_edge(int j, const std::vector<double>& target, SynthesisReport& r) const {
        long nL = j == 0 ? n1_ : n2_;
        double res = 0.0;
        std::vector<double> part;
        try {
            part = detail::reversed_vesk(k_[static_cast<std::size_t>(j)], target, h_, res);
        } catch (const Error& e) {
            throw SynthesisError("edge" + std::to_string(j + 1), e.what());
        }
        r.cascade_log.push_back({"edge" + std::to_string(j + 1), res});
        std::vector<double> y(static_cast<std::size_t>(N0_) + 1, 0.0);
        for (long i = 0; i <= nL; ++i) y[static_cast<std::size_t>(N0_ - nL + i)] = part[static_cast<std::size_t>(i)];
        return y;
    }

    ControlSet assemble(const std::array<std::vector<double>, 3>& y, const std::array<std::vector<double>, 3>& yd,
                        Regularity jump_tag) const {
        std::size_t n = y[0].size();
        ControlSet c;
        c.problem = Problem::P2;
        c.f1 = ControlTrace::zeros(h_, n, Regularity::L2);
        c.f2 = ControlTrace::zeros(h_, n, jump_tag);
        c.f3 = ControlTrace::zeros(h_, n, jump_tag);
        for (std::size_t i = 0; i < n; ++i) {
            c.f2.samples[i] = y[1][i] - y[0][i];
            c.f3->samples[i] = y[2][i] - y[0][i];
            double f = 0.0;
            for (int j = 0; j < 3; ++j)
                f += -yd[j][i] + detail::dx_convolution(k_[static_cast<std::size_t>(j)], 0, static_cast<long>(i), y[j]);
            c.f1.samples[i] = f;
        }
        return c;
    }

    LassoGeometry geom_;
    PotentialSpec q_;
    LassoGrid grid_;
    double h_ = 0.0;
    long n1_ = 0, n2_ = 0, N0_ = 0;
    double eps_ = 0.0;
    std::array<Kernel, 3> k_;
};

inline SynthesisReport shape_control_p2(const GraphFunction& phi, const LassoGeometry& geom, const PotentialSpec& q,
                                        const LassoGrid& grid, const SynthesisOptions& opt = {}) {
    return P2Synthesizer(geom, q, grid, opt).shape(phi);
}

inline SynthesisReport velocity_control_p2(const GraphFunction& psi, const LassoGeometry& geom,
                                           const PotentialSpec& q, const LassoGrid& grid,
                                           const SynthesisOptions& opt = {}) {
    return P2Synthesizer(geom, q, grid, opt).velocity(psi);
}

inline SynthesisReport exact_control_p2(const TargetState& target, const LassoGeometry& geom, const PotentialSpec& q,
                                        const LassoGrid& grid, const SynthesisOptions& opt = {}) {
    return P2Synthesizer(geom, q, grid, opt).exact(target);
}

// ---------------------------------------------------------------- verification

inline double relative(double err, double ref) { return ref > 0.0 ? err / ref : err; }

inline SynthesisReport verify(SynthesisReport r, const TargetState& target, const LassoGeometry& geom,
                              const PotentialSpec& q, const LassoGrid& grid) {
    auto tr = simulate(geom, q, r.controls, r.time_horizon, grid);
    GraphFunction du = tr.u_T, dv = tr.ut_T;
    du -= target.phi1;
    dv -= target.phi2;
    r.verified_error = std::array<double, 2>{relative(norm_H1(du), norm_H1(target.phi1)),
                                             relative(norm_H(dv), norm_H(target.phi2))};
    double num = 0.0;
    for (double n : detail::report_norms(r.controls)) num += n;
    double den = norm_H1(target.phi1) + norm_H(target.phi2);
    r.stability_quotient = den > 0.0 ? num / den : 0.0;
    return r;
}

// relative error of (u, u_t)(T) in the H1 x L2 product norm
inline double combined_error(const WaveTrajectory& tr, const TargetState& target) {
    GraphFunction du = tr.u_T, dv = tr.ut_T;
    du -= target.phi1;
    dv -= target.phi2;
    double e = std::hypot(norm_H1(du), norm_H(dv));
    double ref = std::hypot(norm_H1(target.phi1), norm_H(target.phi2));
    return relative(e, ref);
}

}  // namespace lasso
