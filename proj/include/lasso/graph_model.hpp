#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "error.hpp"

namespace lasso {

enum class Edge : int { e1 = 0, e2 = 1, e3 = 2 };

struct LassoGeometry {
    double l = 1.0;  // pendant edge
    double a = 1.0;  // each half-ring edge, circumference 2a

    double T_star() const { return a + l; }
    double T_upper() const { return std::max(a, l); }
    double ring_length() const { return 2.0 * a; }
    double total_length() const { return l + 2.0 * a; }

    void validate() const {
        if (!(l > 0.0) || !(a > 0.0) || !std::isfinite(l) || !std::isfinite(a))
            throw Error(ErrorKind::config, "edge lengths must be positive and finite");
    }
};

namespace detail {

// integer count for length*n, or -1 when not commensurate
inline long commensurate_count(double length, long n) {
    double x = length * static_cast<double>(n);
    double k = std::round(x);
    if (std::abs(x - k) > 1e-12 * std::max(1.0, std::abs(x))) return -1;
    return static_cast<long>(k);
}

}  // namespace detail

// one_sided: vertex value from the one-sided flux balance each step
// finite_volume: vertex value advanced by leapfrog on the half cells around it
enum class VertexScheme { one_sided, finite_volume };

struct LassoGrid {
    double h = 0.0;
    long n1 = 0;
    long n2 = 0;
    double dt = 0.0;
    double cfl = 0.5;
    long n_per_unit = 0;
    VertexScheme vertex = VertexScheme::one_sided;
};

inline LassoGrid build_grid(const LassoGeometry& geom, long n_per_unit, double cfl = 0.5) {
    geom.validate();
    if (n_per_unit <= 0) throw Error(ErrorKind::config, "resolution must be positive");
    if (!(cfl > 0.0) || cfl > 1.0) throw Error(ErrorKind::cfl_violation, "cfl must lie in (0,1]");
    long n1 = detail::commensurate_count(geom.l, n_per_unit);
    long n2 = detail::commensurate_count(geom.a, n_per_unit);
    if (n1 < 0 || n2 < 0)
        throw Error(ErrorKind::non_commensurate,
                    "l and a must be integer multiples of h = 1/" + std::to_string(n_per_unit));
    if (n1 < 2 || n2 < 2) throw Error(ErrorKind::non_commensurate, "each edge needs at least two cells");
    LassoGrid g;
    g.h = 1.0 / static_cast<double>(n_per_unit);
    g.n1 = n1;
    g.n2 = n2;
    g.cfl = cfl;
    g.dt = cfl * g.h;
    g.n_per_unit = n_per_unit;
    return g;
}

// uniform samples on [0, step*(size-1)], linear interpolation in between
struct SampledFunction {
    double step = 1.0;
    std::vector<double> v;

    double length() const { return v.empty() ? 0.0 : step * static_cast<double>(v.size() - 1); }

    double operator()(double x) const {
        if (v.empty()) return 0.0;
        if (v.size() == 1) return v[0];
        double u = x / step;
        if (u <= 0.0) return v.front();
        auto last = static_cast<double>(v.size() - 1);
        if (u >= last) return v.back();
        auto i = static_cast<std::size_t>(u);
        double r = u - static_cast<double>(i);
        if (r == 0.0) return v[i];
        return v[i] + r * (v[i + 1] - v[i]);
    }

    static SampledFunction sample(double length, long n, const std::function<double(double)>& f) {
        SampledFunction s;
        s.step = length / static_cast<double>(n);
        s.v.resize(static_cast<std::size_t>(n) + 1);
        for (long i = 0; i <= n; ++i) s.v[static_cast<std::size_t>(i)] = f(s.step * static_cast<double>(i));
        return s;
    }
};

// maps x >= 0 into [0,L] by even reflection about L and 2L-periodicity
inline double fold_coordinate(double x, double L) {
    double y = std::fmod(std::abs(x), 2.0 * L);
    return y > L ? 2.0 * L - y : y;
}

inline SampledFunction extend_potential_folded(const SampledFunction& q_edge, double horizon) {
    double L = q_edge.length();
    if (horizon < L * (1.0 - 1e-14)) throw Error(ErrorKind::config, "horizon shorter than edge");
    auto n = static_cast<long>(q_edge.v.size()) - 1;
    auto m = static_cast<long>(std::ceil(horizon / q_edge.step - 1e-9));
    SampledFunction out;
    out.step = q_edge.step;
    out.v.resize(static_cast<std::size_t>(m) + 1);
    for (long k = 0; k <= m; ++k) {
        long r = k % (2 * n);
        if (r > n) r = 2 * n - r;
        out.v[static_cast<std::size_t>(k)] = q_edge.v[static_cast<std::size_t>(r)];
    }
    return out;
}

inline SampledFunction reversed(const SampledFunction& f) {
    SampledFunction r = f;
    std::reverse(r.v.begin(), r.v.end());
    return r;
}

enum class PotentialKind { zero, constant, table };

struct PotentialSpec {
    PotentialKind kind = PotentialKind::zero;
    double c = 0.0;
    std::array<SampledFunction, 3> q;  // per edge, vertex at x = 0
    double l = 1.0;
    double a = 1.0;

    std::string description() const {
        switch (kind) {
        case PotentialKind::zero: return "zero";
        case PotentialKind::constant: return "constant";
        case PotentialKind::table: return "table";
        }
        return "table";
    }

    bool is_zero() const { return kind == PotentialKind::zero; }

    double operator()(Edge e, double x) const {
        switch (kind) {
        case PotentialKind::zero: return 0.0;
        case PotentialKind::constant: return c;
        case PotentialKind::table: return q[static_cast<int>(e)](x);
        }
        return 0.0;
    }

    // e1 potential in the vertex-based coordinate
    std::function<double(double)> edge(Edge e) const {
        return [p = *this, e](double x) { return p(e, x); };
    }

    static PotentialSpec zero(const LassoGeometry& g) {
        PotentialSpec p;
        p.l = g.l;
        p.a = g.a;
        p.q[0].step = g.l;
        p.q[0].v = {0.0, 0.0};
        p.q[1].step = p.q[2].step = g.a;
        p.q[1].v = p.q[2].v = {0.0, 0.0};
        return p;
    }

    static PotentialSpec constant(const LassoGeometry& g, double c) {
        if (!std::isfinite(c)) throw Error(ErrorKind::non_finite, "potential constant");
        if (c == 0.0) return zero(g);
        PotentialSpec p = zero(g);
        p.kind = PotentialKind::constant;
        p.c = c;
        for (auto& s : p.q) std::fill(s.v.begin(), s.v.end(), c);
        return p;
    }

    static PotentialSpec table(const LassoGeometry& g, SampledFunction q1, SampledFunction q2, SampledFunction q3) {
        PotentialSpec p;
        p.kind = PotentialKind::table;
        p.l = g.l;
        p.a = g.a;
        p.q = {std::move(q1), std::move(q2), std::move(q3)};
        for (const auto& s : p.q) {
            if (s.v.size() < 2) throw Error(ErrorKind::config, "potential table needs two samples per edge");
            for (double v : s.v)
                if (!std::isfinite(v)) throw Error(ErrorKind::non_finite, "potential sample");
        }
        if (std::abs(p.q[0].length() - g.l) > 1e-9 * g.l || std::abs(p.q[1].length() - g.a) > 1e-9 * g.a ||
            std::abs(p.q[2].length() - g.a) > 1e-9 * g.a)
            throw Error(ErrorKind::config, "potential table does not span the edges");
        return p;
    }

    static PotentialSpec from_functions(const LassoGeometry& g, const std::function<double(double)>& q1,
                                        const std::function<double(double)>& q2,
                                        const std::function<double(double)>& q3, long n_per_unit = 4000) {
        long n1 = std::max(2L, std::lround(g.l * static_cast<double>(n_per_unit)));
        long n2 = std::max(2L, std::lround(g.a * static_cast<double>(n_per_unit)));
        return table(g, SampledFunction::sample(g.l, n1, q1), SampledFunction::sample(g.a, n2, q2),
                     SampledFunction::sample(g.a, n2, q3));
    }
};

// e1 potential folded: even about l, then 2l-periodic
inline std::function<double(double)> folded_e1(const PotentialSpec& q) {
    if (q.kind != PotentialKind::table) return [c = q.kind == PotentialKind::constant ? q.c : 0.0](double) { return c; };
    return [q1 = q.q[0], l = q.l](double x) { return q1(fold_coordinate(x, l)); };
}

// e1 potential read from the boundary vertex, q(l - z), folded
inline std::function<double(double)> folded_e1_reversed(const PotentialSpec& q) {
    if (q.kind != PotentialKind::table) return folded_e1(q);
    return [q1 = q.q[0], l = q.l](double z) { return q1(l - fold_coordinate(z, l)); };
}

// ring potential seen from the vertex along e2 (j=1) or e3 (j=2), 2a-periodic
inline std::function<double(double)> ring_continued(const PotentialSpec& q, Edge e) {
    if (q.kind != PotentialKind::table) return folded_e1(q);
    int j = static_cast<int>(e);
    int o = j == 1 ? 2 : 1;
    return [qj = q.q[j], qo = q.q[o], a = q.a](double x) {
        double y = std::fmod(std::abs(x), 2.0 * a);
        if (y < a) return qj(y);
        if (y > a) return qo(2.0 * a - y);
        return 0.5 * (qj(a) + qo(a));
    };
}

// samples on every edge, vertex at x = 0; e2 and e3 share the node x = a
struct GraphFunction {
    double h = 0.0;
    std::array<std::vector<double>, 3> e;

    static GraphFunction zeros(const LassoGrid& g) {
        GraphFunction f;
        f.h = g.h;
        f.e[0].assign(static_cast<std::size_t>(g.n1) + 1, 0.0);
        f.e[1].assign(static_cast<std::size_t>(g.n2) + 1, 0.0);
        f.e[2].assign(static_cast<std::size_t>(g.n2) + 1, 0.0);
        return f;
    }

    static GraphFunction sample(const LassoGrid& g, const std::function<double(double)>& f1,
                                const std::function<double(double)>& f2, const std::function<double(double)>& f3) {
        GraphFunction f = zeros(g);
        const std::function<double(double)>* fs[3] = {&f1, &f2, &f3};
        for (int j = 0; j < 3; ++j)
            for (std::size_t i = 0; i < f.e[j].size(); ++i) f.e[j][i] = (*fs[j])(g.h * static_cast<double>(i));
        return f;
    }

    GraphFunction& operator+=(const GraphFunction& o) {
        for (int j = 0; j < 3; ++j)
            for (std::size_t i = 0; i < e[j].size(); ++i) e[j][i] += o.e[j][i];
        return *this;
    }
    GraphFunction& operator-=(const GraphFunction& o) {
        for (int j = 0; j < 3; ++j)
            for (std::size_t i = 0; i < e[j].size(); ++i) e[j][i] -= o.e[j][i];
        return *this;
    }
    GraphFunction& operator*=(double c) {
        for (auto& v : e)
            for (double& x : v) x *= c;
        return *this;
    }
    friend GraphFunction operator-(GraphFunction a, const GraphFunction& b) { return a -= b; }
    friend GraphFunction operator+(GraphFunction a, const GraphFunction& b) { return a += b; }
    friend GraphFunction operator*(double c, GraphFunction a) { return a *= c; }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : e)
            for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
};

namespace detail {

inline double trapezoid_sq(const std::vector<double>& v, double h) {
    if (v.size() < 2) return 0.0;
    double s = 0.5 * (v.front() * v.front() + v.back() * v.back());
    for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i] * v[i];
    return s * h;
}

inline std::vector<double> derivative(const std::vector<double>& v, double h) {
    std::size_t n = v.size();
    std::vector<double> d(n, 0.0);
    if (n < 2) return d;
    d[0] = (v[1] - v[0]) / h;
    d[n - 1] = (v[n - 1] - v[n - 2]) / h;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    return d;
}

}  // namespace detail

inline double norm_H(const GraphFunction& f) {
    double s = 0.0;
    for (const auto& v : f.e) s += detail::trapezoid_sq(v, f.h);
    return std::sqrt(s);
}

inline double norm_H1(const GraphFunction& f) {
    double s = 0.0;
    for (const auto& v : f.e) s += detail::trapezoid_sq(v, f.h) + detail::trapezoid_sq(detail::derivative(v, f.h), f.h);
    return std::sqrt(s);
}

inline double inner_H(const GraphFunction& f, const GraphFunction& g) {
    double s = 0.0;
    for (int j = 0; j < 3; ++j) {
        const auto& a = f.e[j];
        const auto& b = g.e[j];
        if (a.size() < 2) continue;
        double t = 0.5 * (a.front() * b.front() + a.back() * b.back());
        for (std::size_t i = 1; i + 1 < a.size(); ++i) t += a[i] * b[i];
        s += t * f.h;
    }
    return s;
}

enum class SpaceTag { H10, H, H1 };

inline const char* to_string(SpaceTag t) {
    switch (t) {
    case SpaceTag::H10: return "H10";
    case SpaceTag::H: return "H";
    case SpaceTag::H1: return "H1";
    }
    return "H";
}

struct TargetState {
    GraphFunction phi1;
    GraphFunction phi2;
    SpaceTag space_tag = SpaceTag::H10;

    // largest mismatch among the vertex traces and the two ring ends at x = a
    static double vertex_mismatch(const GraphFunction& f) {
        double v1 = f.e[0].front(), v2 = f.e[1].front(), v3 = f.e[2].front();
        double m = std::max({std::abs(v1 - v2), std::abs(v1 - v3), std::abs(v2 - v3)});
        return std::max(m, std::abs(f.e[1].back() - f.e[2].back()));
    }

    void validate() const {
        if (space_tag != SpaceTag::H10) return;
        double tol = 1e-9 * std::max(norm_H1(phi1), 1e-300);
        double m = vertex_mismatch(phi1);
        if (m > tol && m > 0.0)
            throw Error(ErrorKind::target_not_h10,
                        "shape target is discontinuous at the vertex (mismatch " + std::to_string(m) + ")");
    }

    // replace the coupled node values by their mean
    static void snap_vertex(GraphFunction& f) {
        double v = (f.e[0].front() + f.e[1].front() + f.e[2].front()) / 3.0;
        f.e[0].front() = f.e[1].front() = f.e[2].front() = v;
        double m = 0.5 * (f.e[1].back() + f.e[2].back());
        f.e[1].back() = f.e[2].back() = m;
    }
};

}  // namespace lasso
