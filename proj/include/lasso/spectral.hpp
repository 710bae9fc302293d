#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "error.hpp"
#include "graph_model.hpp"

namespace lasso {

// ring lengths below are circumferences: the ring of a LassoGeometry has circumference 2a

enum class Family { constant, ring_antisym, generic };

inline const char* to_string(Family f) {
    switch (f) {
    case Family::constant: return "constant";
    case Family::ring_antisym: return "ring_antisym";
    case Family::generic: return "generic";
    }
    return "generic";
}

namespace detail {

// (y, y') across a cell of length d where -y'' = k2 y
inline void propagate(double k2, double d, double& y, double& yp) {
    double ny, nyp;
    if (k2 > 0.0) {
        double k = std::sqrt(k2), c = std::cos(k * d), s = std::sin(k * d);
        ny = y * c + yp * s / k;
        nyp = -y * k * s + yp * c;
    } else if (k2 < 0.0) {
        double k = std::sqrt(-k2), c = std::cosh(k * d), s = std::sinh(k * d);
        ny = y * c + yp * s / k;
        nyp = y * k * s + yp * c;
    } else {
        ny = y + yp * d;
        nyp = yp;
    }
    y = ny;
    yp = nyp;
}

// integrals over a cell of C^2, C S, S^2 for the fundamental pair C(0)=1, S'(0)=1
inline std::array<double, 3> cell_integrals(double k2, double d) {
    double x = k2 * d * d;
    if (std::abs(x) < 1e-4) {
        return {d - k2 * d * d * d / 3.0 + k2 * k2 * std::pow(d, 5) / 15.0,
                d * d / 2.0 - k2 * std::pow(d, 4) / 6.0 + k2 * k2 * std::pow(d, 6) / 45.0,
                d * d * d / 3.0 - k2 * std::pow(d, 5) / 15.0 + 2.0 * k2 * k2 * std::pow(d, 7) / 315.0};
    }
    if (k2 > 0.0) {
        double k = std::sqrt(k2), s2 = std::sin(2.0 * k * d), s = std::sin(k * d);
        return {d / 2.0 + s2 / (4.0 * k), s * s / (2.0 * k2), (d / 2.0 - s2 / (4.0 * k)) / k2};
    }
    double k = std::sqrt(-k2), s2 = std::sinh(2.0 * k * d), s = std::sinh(k * d);
    return {d / 2.0 + s2 / (4.0 * k), s * s / (2.0 * k * k), (s2 / (4.0 * k) - d / 2.0) / (k * k)};
}

}  // namespace detail

// solution of -y'' + q y = omega^2 y along one edge with q constant per cell, vertex at x = 0
struct EdgeProfile {
    double step = 0.0;
    std::vector<double> k2;     // omega^2 - q per cell
    std::vector<double> y, yp;  // at the nodes

    static EdgeProfile build(const std::vector<double>& k2_cells, double step, double y0, double yp0) {
        EdgeProfile p;
        p.step = step;
        p.k2 = k2_cells;
        p.y.assign(k2_cells.size() + 1, 0.0);
        p.yp.assign(k2_cells.size() + 1, 0.0);
        p.y[0] = y0;
        p.yp[0] = yp0;
        for (std::size_t i = 0; i < k2_cells.size(); ++i) {
            double a = p.y[i], b = p.yp[i];
            detail::propagate(k2_cells[i], step, a, b);
            p.y[i + 1] = a;
            p.yp[i + 1] = b;
        }
        return p;
    }

    double length() const { return step * static_cast<double>(k2.size()); }

    std::pair<double, double> at(double x) const {
        if (k2.empty()) return {y.empty() ? 0.0 : y[0], 0.0};
        double u = std::clamp(x / step, 0.0, static_cast<double>(k2.size()));
        auto i = std::min(static_cast<std::size_t>(u), k2.size() - 1);
        double a = y[i], b = yp[i];
        detail::propagate(k2[i], x - step * static_cast<double>(i), a, b);
        return {a, b};
    }
    double operator()(double x) const { return at(x).first; }

    double inner(const EdgeProfile& o) const {
        double s = 0.0;
        for (std::size_t i = 0; i < k2.size(); ++i) {
            auto I = detail::cell_integrals(k2[i], step);
            s += y[i] * o.y[i] * I[0] + (y[i] * o.yp[i] + yp[i] * o.y[i]) * I[1] + yp[i] * o.yp[i] * I[2];
        }
        return s;
    }

    // L2 product with a profile on the same cells but possibly another frequency
    double cross(const EdgeProfile& o) const {
        if (k2 == o.k2) return inner(o);
        double s = 0.0;
        for (std::size_t i = 0; i < k2.size(); ++i) {
            double kmax = std::sqrt(std::max({std::abs(k2[i]), std::abs(o.k2[i]), 1.0}));
            auto pieces = static_cast<long>(std::ceil(kmax * step));
            double d = step / static_cast<double>(pieces);
            for (long p = 0; p < pieces; ++p) {
                double x0 = d * static_cast<double>(p);
                auto f = [&](double t) {
                    double a = y[i], b = yp[i], c = o.y[i], e = o.yp[i];
                    detail::propagate(k2[i], x0 + t, a, b);
                    detail::propagate(o.k2[i], x0 + t, c, e);
                    return a * c;
                };
                s += boost::math::quadrature::gauss<double, 20>::integrate(f, 0.0, d);
            }
        }
        return s;
    }

    // a x + b o on the same cells
    static EdgeProfile combine(double a, const EdgeProfile& x, double b, const EdgeProfile& o) {
        EdgeProfile p = x;
        for (std::size_t i = 0; i < p.y.size(); ++i) {
            p.y[i] = a * x.y[i] + b * o.y[i];
            p.yp[i] = a * x.yp[i] + b * o.yp[i];
        }
        return p;
    }
};

struct EigenPair {
    double omega = 0.0;
    int multiplicity = 1;
    Family family = Family::generic;
    // phi(l), then d phi_j(0) on e1, e2, e3 with the derivative taken along the edge away from the vertex
    std::array<double, 4> trace{};
    double norm_check = 0.0;
    std::array<EdgeProfile, 3> profile;

    double operator()(Edge e, double x) const { return profile[static_cast<std::size_t>(e)](x); }
    double vertex_value() const { return profile[0].y.front(); }

    // continuity mismatch plus Kirchhoff sum at the vertex
    double vertex_residual() const {
        double m = std::max(std::abs(profile[1].y.front() - vertex_value()), std::abs(profile[2].y.front() - vertex_value()));
        return m + std::abs(trace[1] + trace[2] + trace[3]);
    }
};

namespace detail {

inline double graph_inner(const std::array<EdgeProfile, 3>& a, const std::array<EdgeProfile, 3>& b) {
    return a[0].inner(b[0]) + a[1].inner(b[1]) + a[2].inner(b[2]);
}

}  // namespace detail

inline double inner(const EigenPair& a, const EigenPair& b) {
    return a.profile[0].cross(b.profile[0]) + a.profile[1].cross(b.profile[1]) + a.profile[2].cross(b.profile[2]);
}

namespace detail {

// normalizes, fixes the sign and fills traces
inline EigenPair finish_pair(double omega, std::array<EdgeProfile, 3> prof, double l) {
    double n2 = graph_inner(prof, prof);
    double s = 1.0 / std::sqrt(n2);
    EigenPair e;
    e.omega = omega;
    for (auto& p : prof) p = EdgeProfile::combine(s, p, 0.0, p);
    double phil = prof[0].at(l).first;
    double lead = std::abs(phil) > 1e-9 ? phil : prof[1].yp.front();
    if (lead < 0.0)
        for (auto& p : prof) p = EdgeProfile::combine(-1.0, p, 0.0, p);
    e.profile = std::move(prof);
    e.trace = {e.profile[0].at(l).first, e.profile[0].yp.front(), e.profile[1].yp.front(), e.profile[2].yp.front()};
    e.norm_check = std::abs(std::sqrt(graph_inner(e.profile, e.profile)) - 1.0);
    return e;
}

inline double root_in(const std::function<double(double)>& f, double lo, double hi, double flo, double fhi) {
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    std::uintmax_t iters = 200;
    auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-13 * std::max(1.0, std::abs(a)); };
    auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
    return 0.5 * (r.first + r.second);
}

}  // namespace detail

// 2 cos(w l) cos(w c) - 2 cos(w l) - sin(w l) sin(w c), c the ring circumference
inline double char_q0(double omega, double circumference, double l) {
    double cl = std::cos(omega * l), sl = std::sin(omega * l);
    return 2.0 * cl * std::cos(omega * circumference) - 2.0 * cl - sl * std::sin(omega * circumference);
}

// factor of char_q0 = -2 sin(w c / 2) D(w) belonging to the modes symmetric about the ring midpoint
inline double char_symmetric_q0(double omega, double circumference, double l) {
    double h = 0.5 * circumference;
    return 2.0 * std::cos(omega * l) * std::sin(omega * h) + std::sin(omega * l) * std::cos(omega * h);
}

namespace detail {

inline std::array<EdgeProfile, 3> q0_profiles(double omega, double c, double l, double C, double B, double D) {
    double h = 0.5 * c, w2 = omega * omega;
    // pendant C cos(w (l - x)); ring psi(s) = B cos(w (s - h)) + D sin(w (s - h)), e3 at s = c - x
    double psi0 = B * std::cos(omega * h) - D * std::sin(omega * h);
    double dpsi0 = B * omega * std::sin(omega * h) + D * omega * std::cos(omega * h);
    double dpsic = -B * omega * std::sin(omega * h) + D * omega * std::cos(omega * h);
    return {EdgeProfile::build({w2}, l, C * std::cos(omega * l), C * omega * std::sin(omega * l)),
            EdgeProfile::build({w2}, h, psi0, dpsi0), EdgeProfile::build({w2}, h, psi0, -dpsic)};
}

inline std::vector<double> scan_roots(const std::function<double(double)>& f, double lo, double hi, double step) {
    std::vector<double> roots;
    double a = lo, fa = f(a);
    if (fa == 0.0) roots.push_back(a);
    while (a < hi) {
        double b = std::min(hi, a + step), fb = f(b);
        if (fb == 0.0) roots.push_back(b);
        else if (fa != 0.0 && (fa < 0.0) != (fb < 0.0)) roots.push_back(root_in(f, a, b, fa, fb));
        a = b;
        fa = fb;
    }
    return roots;
}

}  // namespace detail

// q = 0 spectrum up to omega_max: constant mode, antisymmetric ring modes at 2 pi k / c and the roots of the
// symmetric factor; one entry per eigenfunction
inline std::vector<EigenPair> spectrum_q0(double circumference, double l, double omega_max) {
    if (!(circumference > 0.0) || !(l > 0.0) || !(omega_max > 0.0))
        throw Error(ErrorKind::config, "spectrum_q0 needs positive lengths and omega_max");
    const double c = circumference, h = 0.5 * c, L = l + c;
    const double step = std::numbers::pi / (16.0 * L);
    auto Ds = [c, l](double w) { return char_symmetric_q0(w, c, l); };

    auto roots = detail::scan_roots(Ds, 0.5 * step, omega_max, step);
    for (std::size_t i = 1; i < roots.size(); ++i) {
        if (roots[i] - roots[i - 1] >= 2.0 * step) continue;
        double lo = std::max(0.5 * step, roots[i - 1] - 2.0 * step), hi = std::min(omega_max, roots[i] + 2.0 * step);
        auto fine = detail::scan_roots(Ds, lo, hi, step / 8.0);
        for (std::size_t k = 1; k < fine.size(); ++k)
            if (fine[k] - fine[k - 1] < step / 4.0)
                throw Error(ErrorKind::scan_too_coarse, "roots closer than the refined scan step");
    }

    std::vector<EigenPair> out;
    {
        std::array<EdgeProfile, 3> p = detail::q0_profiles(0.0, c, l, 1.0, 1.0, 0.0);
        auto e = detail::finish_pair(0.0, p, l);
        e.family = Family::constant;
        out.push_back(std::move(e));
    }
    std::vector<double> lambda1;
    for (long k = 1;; ++k) {
        double w = 2.0 * std::numbers::pi * static_cast<double>(k) / c;
        if (w > omega_max) break;
        lambda1.push_back(w);
        auto e = detail::finish_pair(w, detail::q0_profiles(w, c, l, 0.0, 0.0, 1.0), l);
        e.family = Family::ring_antisym;
        if (std::abs(Ds(w)) < 1e-10 * (1.0 + w * w)) e.multiplicity = 2;
        out.push_back(std::move(e));
    }
    for (double w : roots) {
        for (double v : lambda1)
            if (std::abs(w - v) < 1e-9 * (1.0 + v) && std::abs(Ds(v)) < 1e-10 * (1.0 + v * v)) w = v;
        // continuity C cos(w l) = B cos(w h), Kirchhoff C sin(w l) + 2 B sin(w h) = 0
        Eigen::Matrix2d M;
        M << std::cos(w * l), -std::cos(w * h), std::sin(w * l), 2.0 * std::sin(w * h);
        Eigen::JacobiSVD<Eigen::Matrix2d> svd(M, Eigen::ComputeFullV);
        Eigen::Vector2d v = svd.matrixV().col(1);
        auto e = detail::finish_pair(w, detail::q0_profiles(w, c, l, v(0), v(1), 0.0), l);
        e.family = Family::generic;
        if (std::find(lambda1.begin(), lambda1.end(), w) != lambda1.end()) e.multiplicity = 2;
        out.push_back(std::move(e));
    }
    std::stable_sort(out.begin(), out.end(), [](const EigenPair& a, const EigenPair& b) { return a.omega < b.omega; });
    return out;
}

inline std::vector<EigenPair> spectrum_q0(const LassoGeometry& g, double omega_max) {
    return spectrum_q0(2.0 * g.a, g.l, omega_max);
}

// shooting with cellwise constant potential and exact cell propagators
class Shooter {
public:
    Shooter(const PotentialSpec& q, long cells_per_unit = 1000) : l_(q.l), a_(q.a) {
        bool flat = q.kind != PotentialKind::table;
        long n1 = flat ? 1 : std::max(8L, std::lround(l_ * static_cast<double>(cells_per_unit)));
        long n2 = flat ? 1 : std::max(8L, std::lround(a_ * static_cast<double>(cells_per_unit)));
        d_ = {l_ / static_cast<double>(n1), a_ / static_cast<double>(n2), a_ / static_cast<double>(n2)};
        long n[3] = {n1, n2, n2};
        for (int j = 0; j < 3; ++j) {
            auto e = static_cast<Edge>(j);
            for (long i = 0; i < n[j]; ++i) qc_[j].push_back(q(e, d_[j] * (static_cast<double>(i) + 0.5)));
        }
        zero_ = q.is_zero();
    }

    double l() const { return l_; }
    double a() const { return a_; }

    struct Vertex {
        double u, up;               // pendant solution with y(l) = 1, y'(l) = 0, at the vertex
        double c1, c1p, s1, s1p;    // ring fundamental pair after one turn
    };

    Vertex vertex(double omega) const {
        double w2 = omega * omega;
        Vertex v{};
        double z = 1.0, zp = 0.0;
        for (auto it = qc_[0].rbegin(); it != qc_[0].rend(); ++it) detail::propagate(w2 - *it, d_[0], z, zp);
        v.u = z;
        v.up = -zp;
        double c = 1.0, cp = 0.0, s = 0.0, sp = 1.0;
        for (double q : qc_[1]) {
            detail::propagate(w2 - q, d_[1], c, cp);
            detail::propagate(w2 - q, d_[1], s, sp);
        }
        for (auto it = qc_[2].rbegin(); it != qc_[2].rend(); ++it) {
            detail::propagate(w2 - *it, d_[2], c, cp);
            detail::propagate(w2 - *it, d_[2], s, sp);
        }
        v.c1 = c;
        v.c1p = cp;
        v.s1 = s;
        v.s1p = sp;
        return v;
    }

    // rows: ring periodicity, Kirchhoff; columns: pendant amplitude, ring slope / max(1, omega)
    Eigen::Matrix2d system(double omega) const {
        auto v = vertex(omega);
        double ws = std::max(1.0, omega);
        Eigen::Matrix2d M;
        M << v.u * (v.c1 - 1.0), v.s1 * ws, v.up - v.c1p * v.u, (1.0 - v.s1p) * ws;
        return M;
    }

    double secular(double omega) const { return system(omega).determinant() / std::max(1.0, omega); }

    std::array<EdgeProfile, 3> profiles(double omega, double alpha, double p) const {
        auto v = vertex(omega);
        double w2 = omega * omega;
        double y0 = alpha * v.u;
        std::array<std::vector<double>, 3> k2;
        for (int j = 0; j < 3; ++j)
            for (double q : qc_[j]) k2[j].push_back(w2 - q);
        double psic_p = v.c1p * y0 + v.s1p * p;
        return {EdgeProfile::build(k2[0], d_[0], y0, alpha * v.up), EdgeProfile::build(k2[1], d_[1], y0, p),
                EdgeProfile::build(k2[2], d_[2], y0, -psic_p)};
    }

    bool zero_potential() const { return zero_; }

private:
    double l_, a_;
    std::array<double, 3> d_{};
    std::array<std::vector<double>, 3> qc_;
    bool zero_ = false;
};

// first n_max eigenpairs of the lasso with potential q (omega^2 >= 0)
inline std::vector<EigenPair> spectrum_shooting(const PotentialSpec& q, std::size_t n_max, long cells_per_unit = 1000) {
    Shooter sh(q, cells_per_unit);
    const double L = sh.l() + 2.0 * sh.a();
    const double step = std::numbers::pi / (16.0 * L);
    auto f = [&sh](double w) { return sh.secular(w); };
    struct Root {
        double w;
        int m;
    };
    std::vector<Root> roots;
    auto count = [&roots] {
        std::size_t n = 0;
        for (const auto& r : roots) n += static_cast<std::size_t>(r.m);
        return n;
    };

    double w0 = 0.0, f0 = f(0.0);
    if (std::abs(f0) < 1e-12) roots.push_back({0.0, 1});
    double wa = step, fa = f(wa), wprev = w0, fprev = f0;
    while (count() < n_max) {
        double wb = wa + step, fb = f(wb);
        if (fa == 0.0) roots.push_back({wa, 1});
        else if (fb != 0.0 && (fa < 0.0) != (fb < 0.0)) roots.push_back({detail::root_in(f, wa, wb, fa, fb), 1});
        else if (wprev > 0.0 && fprev != 0.0 && fb != 0.0 && (fprev < 0.0) == (fa < 0.0) && (fa < 0.0) == (fb < 0.0) &&
                 std::abs(fa) < std::abs(fprev) && std::abs(fa) < std::abs(fb)) {
            // a dip towards zero: tangency or a pair inside one step
            double s = fa < 0.0 ? -1.0 : 1.0;
            auto g = [&](double w) { return s * f(w); };
            auto m = boost::math::tools::brent_find_minima(g, wprev, wb, 50);
            if (std::abs(m.second) <= 1e-10) roots.push_back({m.first, 2});
            else if (m.second < 0.0) {
                roots.push_back({detail::root_in(f, wprev, m.first, fprev, f(m.first)), 1});
                roots.push_back({detail::root_in(f, m.first, wb, f(m.first), fb), 1});
            }
        }
        wprev = wa;
        fprev = fa;
        wa = wb;
        fa = fb;
    }
    std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) { return a.w < b.w; });

    std::vector<EigenPair> out;
    for (const auto& r : roots) {
        if (r.m == 2) {
            // the whole (alpha, p) plane solves the vertex system; start from the mode without pendant part
            auto a = sh.profiles(r.w, 0.0, 1.0), b = sh.profiles(r.w, 1.0, 0.0);
            double na = detail::graph_inner(a, a);
            double ab = detail::graph_inner(a, b) / na;
            for (int j = 0; j < 3; ++j)
                b[static_cast<std::size_t>(j)] = EdgeProfile::combine(1.0, b[static_cast<std::size_t>(j)], -ab, a[static_cast<std::size_t>(j)]);
            for (auto* p : {&a, &b}) {
                auto e = detail::finish_pair(r.w, *p, sh.l());
                e.multiplicity = 2;
                e.family = std::abs(e.trace[0]) < 1e-9 ? Family::ring_antisym : Family::generic;
                out.push_back(std::move(e));
            }
            continue;
        }
        Eigen::JacobiSVD<Eigen::Matrix2d> svd(sh.system(r.w), Eigen::ComputeFullV);
        Eigen::Vector2d v = svd.matrixV().col(1);
        auto e = detail::finish_pair(r.w, sh.profiles(r.w, v(0), v(1) * std::max(1.0, r.w)), sh.l());
        if (r.w == 0.0 && sh.zero_potential()) e.family = Family::constant;
        else if (std::abs(e.trace[0]) < 1e-9 && std::abs(e.trace[1]) < 1e-9 * (1.0 + r.w)) e.family = Family::ring_antisym;
        out.push_back(std::move(e));
    }
    if (out.size() > n_max) out.resize(n_max);
    return out;
}

// smallest distance between the first n frequencies; a double frequency gives 0
inline double min_gap(const std::vector<EigenPair>& spectrum, std::size_t n) {
    n = std::min(n, spectrum.size());
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (spectrum[i].multiplicity == 2) g = 0.0;
        if (i > 0) g = std::min(g, std::abs(spectrum[i].omega - spectrum[i - 1].omega));
    }
    return g;
}

inline std::size_t weyl_count(const std::vector<EigenPair>& spectrum, double omega) {
    return static_cast<std::size_t>(
        std::count_if(spectrum.begin(), spectrum.end(), [omega](const EigenPair& e) { return e.omega <= omega; }));
}

// convergents p/n of num/den from its exact continued fraction
inline std::vector<std::pair<long, long>> convergents(long num, long den, std::size_t count) {
    if (den <= 0 || num < 0) throw Error(ErrorKind::config, "convergents need num >= 0 and den > 0");
    std::vector<std::pair<long, long>> out;
    long h1 = 1, h2 = 0, k1 = 0, k2 = 1;
    while (out.size() < count && den != 0) {
        long q = num / den, r = num % den;
        long h = q * h1 + h2, k = q * k1 + k2;
        out.emplace_back(h, k);
        h2 = h1;
        h1 = h;
        k2 = k1;
        k1 = k;
        num = den;
        den = r;
    }
    return out;
}

// a double is a rational already; this makes the denominator explicit
inline std::pair<long, long> rationalize(double x, long den = 1'000'000'000L) {
    long num = std::lround(x * static_cast<double>(den));
    long g = std::gcd(num, den);
    return {num / g, den / g};
}

inline std::vector<std::pair<long, long>> convergents(double x, std::size_t count) {
    auto [p, q] = rationalize(x);
    return convergents(p, q, count);
}

struct ClusterResult {
    long n = 0;
    double centre = 0.0;
    double radius = 0.0;
    std::vector<double> roots;  // real roots of char_q0 in (centre - radius, centre + radius), with multiplicity
    bool found() const { return roots.size() >= 2; }
};

// roots of char_q0 near 2 pi n / l inside radius 1 / (l ln n), from its two factors
inline ClusterResult verify_cluster(long n, double circumference, double l) {
    if (n < 2) throw Error(ErrorKind::config, "cluster index must be at least 2");
    ClusterResult r;
    r.n = n;
    r.centre = 2.0 * std::numbers::pi * static_cast<double>(n) / l;
    r.radius = 1.0 / (l * std::log(static_cast<double>(n)));
    double lo = r.centre - r.radius, hi = r.centre + r.radius;
    for (long k = static_cast<long>(std::ceil(lo * circumference / (2.0 * std::numbers::pi)));; ++k) {
        double w = 2.0 * std::numbers::pi * static_cast<double>(k) / circumference;
        if (w >= hi) break;
        if (w > lo) r.roots.push_back(w);
    }
    auto Ds = [circumference, l](double w) { return char_symmetric_q0(w, circumference, l); };
    for (double w : detail::scan_roots(Ds, lo, hi, r.radius / 512.0))
        if (w > lo && w < hi) r.roots.push_back(w);
    std::sort(r.roots.begin(), r.roots.end());
    return r;
}

// max over modes n in [from, to] (1-based, omega > 0) of max(|phi_n(l)|, |d phi_n,j(0)| / n)
inline double fitted_c3(const std::vector<EigenPair>& spectrum, std::size_t from, std::size_t to) {
    double c = 0.0;
    std::size_t n = 0;
    for (const auto& e : spectrum) {
        if (e.omega <= 0.0) continue;
        ++n;
        if (n < from) continue;
        if (n > to) break;
        double d = std::max({std::abs(e.trace[1]), std::abs(e.trace[2]), std::abs(e.trace[3])});
        c = std::max({c, std::abs(e.trace[0]), d / static_cast<double>(n)});
    }
    return c;
}

}  // namespace lasso
