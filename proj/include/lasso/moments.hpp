#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "error.hpp"
#include "fdsim.hpp"
#include "graph_model.hpp"
#include "spectral.hpp"

namespace lasso {

// sin(w tau) / w, continued to tau at w2 = 0 and sinh for w2 < 0
inline double sine_kernel(double w2, double tau) {
    if (w2 > 0.0) {
        double w = std::sqrt(w2);
        return std::sin(w * tau) / w;
    }
    if (w2 < 0.0) {
        double w = std::sqrt(-w2);
        return std::sinh(w * tau) / w;
    }
    return tau;
}

inline double cosine_kernel(double w2, double tau) {
    if (w2 > 0.0) return std::cos(std::sqrt(w2) * tau);
    if (w2 < 0.0) return std::cosh(std::sqrt(-w2) * tau);
    return 1.0;
}

// (a(T), a'(T)) for a'' + w2 a = F, a(0) = a'(0) = 0, F linear between samples on t_i = i h
inline std::array<double, 2> modal_response(const std::vector<double>& F, double h, double w2, double T) {
    double u = T / h;
    auto m = static_cast<std::size_t>(std::lround(u));
    if (std::abs(u - static_cast<double>(m)) > 1e-9 || m + 1 > F.size())
        throw Error(ErrorKind::config, "modal response needs T on the control grid");
    using G = boost::math::quadrature::gauss<double, 8>;
    double a = 0.0, ad = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double t0 = h * static_cast<double>(i), f0 = F[i], f1 = F[i + 1];
        auto lin = [&](double t) { return f0 + (f1 - f0) * (t - t0) / h; };
        a += G::integrate([&](double t) { return lin(t) * sine_kernel(w2, T - t); }, t0, t0 + h);
        ad += G::integrate([&](double t) { return lin(t) * cosine_kernel(w2, T - t); }, t0, t0 + h);
    }
    return {a, ad};
}

// modal forcing: P1 f1 phi(l) + f2 phi2'(0); P2 -f1 phi(0) + f2 phi2'(0) + f3 phi3'(0)
inline std::vector<double> modal_forcing(const ControlSet& c, const EigenPair& e) {
    std::vector<double> F(c.f1.size(), 0.0);
    for (std::size_t i = 0; i < F.size(); ++i) {
        if (c.problem == Problem::P1) F[i] = c.f1.samples[i] * e.trace[0] + c.f2.samples[i] * e.trace[2];
        else
            F[i] = -c.f1.samples[i] * e.vertex_value() + c.f2.samples[i] * e.trace[2] +
                   (c.f3 ? c.f3->samples[i] * e.trace[3] : 0.0);
    }
    return F;
}

inline double coefficient_a(const ControlSet& c, const EigenPair& e, double T) {
    return modal_response(modal_forcing(c, e), c.f1.h, e.omega * e.omega, T)[0];
}

inline double coefficient_adot(const ControlSet& c, const EigenPair& e, double T) {
    return modal_response(modal_forcing(c, e), c.f1.h, e.omega * e.omega, T)[1];
}

// P1 only: omega a(T) from the form with h' against cos, valid when f2(0) = f2(T) = 0
inline double coefficient_a_by_parts(const ControlSet& c, const EigenPair& e, double T) {
    if (c.problem != Problem::P1) throw Error(ErrorKind::config, "integration-by-parts form is for Problem 1");
    if (e.omega <= 0.0) throw Error(ErrorKind::config, "integration-by-parts form needs omega > 0");
    double h = c.f1.h, w = e.omega, alpha = e.trace[0], beta = e.trace[2] / w;
    auto m = static_cast<std::size_t>(std::lround(T / h));
    using G = boost::math::quadrature::gauss<double, 8>;
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double t0 = h * static_cast<double>(i), f0 = c.f1.samples[i], f1 = c.f1.samples[i + 1];
        double dh = (c.f2.samples[i + 1] - c.f2.samples[i]) / h;
        s += G::integrate(
            [&](double t) {
                double f = f0 + (f1 - f0) * (t - t0) / h;
                return f * alpha * std::sin(w * (T - t)) - dh * beta * std::cos(w * (T - t));
            },
            t0, t0 + h);
    }
    return s;
}

// <f, phi_n> on the graph, trapezoid on the sample grid
inline double project(const GraphFunction& f, const EigenPair& e) {
    double s = 0.0;
    for (int j = 0; j < 3; ++j) {
        const auto& v = f.e[static_cast<std::size_t>(j)];
        if (v.size() < 2) continue;
        double acc = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            double w = (i == 0 || i + 1 == v.size()) ? 0.5 : 1.0;
            acc += w * v[i] * e(static_cast<Edge>(j), f.h * static_cast<double>(i));
        }
        s += acc * f.h;
    }
    return s;
}

struct MomentEntry {
    std::size_t n = 0;  // 1-based
    double omega = 0.0;
    double alpha = 0.0;             // phi(l)
    double beta = 0.0;              // phi2'(0) / omega
    std::array<double, 3> kappa{};  // phi(0), phi1'(0) / omega, phi2'(0) / omega
    double a_T = 0.0;
    double adot_T = 0.0;
    double a_target = 0.0;
    double b_target = 0.0;
    double res_shape = 0.0;     // omega |a(T) - a*|, or |a(T) - a*| at omega = 0
    double res_velocity = 0.0;  // |a'(T) - b*|
};

struct MomentTable {
    double T = 0.0;
    std::size_t N = 0;
    Problem problem = Problem::P1;
    std::vector<MomentEntry> entries;

    double max_res_shape() const {
        double m = 0.0;
        for (const auto& e : entries) m = std::max(m, e.res_shape);
        return m;
    }
    double max_res_velocity() const {
        double m = 0.0;
        for (const auto& e : entries) m = std::max(m, e.res_velocity);
        return m;
    }
};

inline MomentEntry moment_entry(const ControlSet& c, const EigenPair& e, double T, std::size_t n) {
    MomentEntry m;
    m.n = n;
    m.omega = e.omega;
    m.alpha = e.trace[0];
    if (e.omega > 0.0) {
        m.beta = e.trace[2] / e.omega;
        m.kappa = {e.vertex_value(), e.trace[1] / e.omega, e.trace[2] / e.omega};
    } else {
        m.kappa = {e.vertex_value(), 0.0, 0.0};
    }
    auto r = modal_response(modal_forcing(c, e), c.f1.h, e.omega * e.omega, T);
    m.a_T = r[0];
    m.adot_T = r[1];
    return m;
}

// residuals of the final moment problems against direct target projections
inline MomentTable moment_residuals(const ControlSet& c, const TargetState& target,
                                    const std::vector<EigenPair>& spectrum, std::size_t N) {
    MomentTable t;
    t.T = c.horizon();
    t.N = std::min(N, spectrum.size());
    t.problem = c.problem;
    for (std::size_t i = 0; i < t.N; ++i) {
        const auto& e = spectrum[i];
        auto m = moment_entry(c, e, t.T, i + 1);
        m.a_target = project(target.phi1, e);
        m.b_target = project(target.phi2, e);
        double w = e.omega > 0.0 ? e.omega : 1.0;
        m.res_shape = w * std::abs(m.a_T - m.a_target);
        m.res_velocity = std::abs(m.adot_T - m.b_target);
        t.entries.push_back(m);
    }
    return t;
}

enum class DemoKind { interior_only, boundary_only };

inline const char* to_string(DemoKind k) { return k == DemoKind::interior_only ? "interior_only" : "boundary_only"; }

struct DemoReport {
    DemoKind kind = DemoKind::interior_only;
    double T = 0.0;
    std::size_t trials = 0;
    std::uint64_t seed = 42;
    double max_a1 = 0.0;                  // interior_only: constant-mode coefficient
    double max_ring_asymmetry = 0.0;      // boundary_only: max |u2 - u3| in fdsim
    std::vector<double> antisym_omega;    // boundary_only: first 5 ring-antisymmetric modes
    std::vector<double> antisym_max_coeff;
};

// random smooth control vanishing at t = 0 and t = T
inline ControlTrace random_control(std::mt19937_64& rng, double h, double T, Regularity tag) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::array<double, 4> c{};
    for (double& x : c) x = U(rng);
    return ControlTrace::sample(
        h, T,
        [&](double t) {
            double s = 0.0;
            for (std::size_t k = 0; k < c.size(); ++k)
                s += c[k] * std::sin(std::numbers::pi * static_cast<double>(k + 1) * t / T);
            return s;
        },
        tag);
}

inline DemoReport demo_noncontrollability(DemoKind kind, const LassoGeometry& geom, bool q0_flag, double T,
                                          std::size_t trials = 10, std::uint64_t seed = 42, long resolution = 100) {
    if (!q0_flag) throw Error(ErrorKind::config, "non-controllability demos are stated for q = 0");
    geom.validate();
    if (!(T > 0.0)) throw Error(ErrorKind::config, "demo horizon must be positive");
    auto grid = build_grid(geom, resolution);
    double h = grid.h;
    T = h * std::round(T / h);
    auto q = PotentialSpec::zero(geom);
    auto spec = spectrum_q0(geom, 2.0 * std::numbers::pi * 5.0 / geom.ring_length() + 1.0);

    DemoReport r;
    r.kind = kind;
    r.T = T;
    r.trials = trials;
    r.seed = seed;
    std::vector<const EigenPair*> anti;
    for (const auto& e : spec)
        if (e.family == Family::ring_antisym && anti.size() < 5) anti.push_back(&e);
    if (kind == DemoKind::boundary_only) {
        for (const auto* e : anti) r.antisym_omega.push_back(e->omega);
        r.antisym_max_coeff.assign(anti.size(), 0.0);
    }

    std::mt19937_64 rng(seed);
    auto n = static_cast<std::size_t>(std::lround(T / h)) + 1;
    for (std::size_t k = 0; k < trials; ++k) {
        ControlSet c = ControlSet::zeros(Problem::P1, h, n);
        if (kind == DemoKind::interior_only) {
            c.f2 = random_control(rng, h, T, Regularity::H1_zero_both);
            r.max_a1 = std::max(r.max_a1, std::abs(coefficient_a(c, spec.front(), T)));
        } else {
            c.f1 = random_control(rng, h, T, Regularity::L2);
            SimOptions opt;
            opt.track_asymmetry = true;
            auto tr = simulate_p1(geom, q, c, T, grid, opt);
            r.max_ring_asymmetry = std::max(r.max_ring_asymmetry, tr.max_ring_asymmetry);
            for (std::size_t i = 0; i < anti.size(); ++i)
                r.antisym_max_coeff[i] = std::max(r.antisym_max_coeff[i], std::abs(coefficient_a(c, *anti[i], T)));
        }
    }
    return r;
}

}  // namespace lasso
