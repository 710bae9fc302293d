#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "error.hpp"
#include "kernels.hpp"

namespace lasso {

enum class Regularity { L2, H1, H1_zero_start, H1_zero_both };

inline const char* to_string(Regularity r) {
    switch (r) {
    case Regularity::L2: return "L2";
    case Regularity::H1: return "H1";
    case Regularity::H1_zero_start: return "H1_zero_start";
    case Regularity::H1_zero_both: return "H1_zero_both";
    }
    return "L2";
}

// samples on t_i = i h, zero for t < 0, linear in between, linear continuation past the end
struct ControlTrace {
    double h = 0.01;
    std::vector<double> samples;
    Regularity tag = Regularity::L2;
    std::vector<double> cumulative;

    double horizon() const { return samples.empty() ? 0.0 : h * static_cast<double>(samples.size() - 1); }
    std::size_t size() const { return samples.size(); }

    static ControlTrace zeros(double h, std::size_t n_nodes, Regularity tag = Regularity::L2) {
        ControlTrace c;
        c.h = h;
        c.samples.assign(n_nodes, 0.0);
        c.tag = tag;
        return c;
    }

    static ControlTrace sample(double h, double T, const std::function<double(double)>& f,
                               Regularity tag = Regularity::L2) {
        auto n = static_cast<std::size_t>(std::lround(T / h));
        ControlTrace c = zeros(h, n + 1, tag);
        for (std::size_t i = 0; i <= n; ++i) c.samples[i] = f(h * static_cast<double>(i));
        return c;
    }

    double operator()(double t) const {
        if (samples.empty()) return 0.0;
        double u = t / h;
        double r = std::round(u);
        if (std::abs(u - r) < 1e-9) {
            if (r < 0.0) return 0.0;
            auto i = static_cast<std::size_t>(r);
            if (i < samples.size()) return samples[i];
            u = r;
        }
        if (u < 0.0) return 0.0;
        auto last = samples.size() - 1;
        if (u >= static_cast<double>(last)) {
            if (last == 0) return samples[0];
            return samples[last] + (u - static_cast<double>(last)) * (samples[last] - samples[last - 1]);
        }
        auto i = static_cast<std::size_t>(u);
        double w = u - static_cast<double>(i);
        return samples[i] + w * (samples[i + 1] - samples[i]);
    }

    void compute_cumulative() {
        cumulative.assign(samples.size(), 0.0);
        for (std::size_t i = 1; i < samples.size(); ++i)
            cumulative[i] = cumulative[i - 1] + 0.5 * h * (samples[i - 1] + samples[i]);
    }

    // local cubic through the four nearest samples, one-sided near the ends
    double cubic(double t) const {
        auto n = static_cast<long>(samples.size());
        if (n < 4) return (*this)(t);
        long i0 = static_cast<long>(std::floor(t / h)) - 1;
        i0 = std::clamp(i0, 0L, n - 4);
        double u = t / h - static_cast<double>(i0);
        double f[4];
        for (int k = 0; k < 4; ++k) f[k] = samples[static_cast<std::size_t>(i0 + k)];
        return -f[0] * (u - 1) * (u - 2) * (u - 3) / 6 + f[1] * u * (u - 2) * (u - 3) / 2 -
               f[2] * u * (u - 1) * (u - 3) / 2 + f[3] * u * (u - 1) * (u - 2) / 6;
    }

    // int_{t0}^{t1} of the cubic interpolant, t0 >= 0
    double integral(double t0, double t1) const {
        static const double xg[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                     0.8611363115940526};
        static const double wg[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                     0.3478548451374538};
        if (samples.empty() || t1 <= t0) return 0.0;
        auto pieces = std::max(1L, static_cast<long>(std::ceil((t1 - t0) / h - 1e-9)));
        double d = (t1 - t0) / static_cast<double>(pieces), s = 0.0;
        for (long p = 0; p < pieces; ++p) {
            double c = t0 + d * (static_cast<double>(p) + 0.5);
            for (int k = 0; k < 4; ++k) s += wg[k] * cubic(c + 0.5 * d * xg[k]);
        }
        return 0.5 * d * s;
    }

    bool endpoints_ok() const {
        if (samples.empty()) return true;
        switch (tag) {
        case Regularity::H1_zero_start: return samples.front() == 0.0;
        case Regularity::H1_zero_both: return samples.front() == 0.0 && samples.back() == 0.0;
        default: return true;
        }
    }

    std::vector<double> derivative() const {
        std::size_t n = samples.size();
        std::vector<double> d(n, 0.0);
        if (n < 3) return d;
        for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (samples[i + 1] - samples[i - 1]) / (2.0 * h);
        d[0] = (-3.0 * samples[0] + 4.0 * samples[1] - samples[2]) / (2.0 * h);
        d[n - 1] = (3.0 * samples[n - 1] - 4.0 * samples[n - 2] + samples[n - 3]) / (2.0 * h);
        return d;
    }

    double norm_L2() const {
        if (samples.size() < 2) return 0.0;
        double s = 0.5 * (samples.front() * samples.front() + samples.back() * samples.back());
        for (std::size_t i = 1; i + 1 < samples.size(); ++i) s += samples[i] * samples[i];
        return std::sqrt(s * h);
    }

    double norm_H1() const {
        ControlTrace d;
        d.h = h;
        d.samples = derivative();
        double a = norm_L2(), b = d.norm_L2();
        return std::sqrt(a * a + b * b);
    }
};

namespace detail {

inline bool on_grid(double x, double h, long& idx) {
    double u = x / h;
    double r = std::round(u);
    if (std::abs(u - r) > 1e-9) return false;
    idx = static_cast<long>(r);
    return true;
}

// int_x^t k(x,s) g(t-s) ds by composite trapezoid
inline double kernel_convolution(const Kernel& k, const ControlTrace& g, double x, double t) {
    if (t <= x) return 0.0;
    long i = 0, m = 0;
    if (std::abs(g.h - k.h) < 1e-14 * k.h && on_grid(x, k.h, i) && on_grid(t, k.h, m)) {
        if (m > k.n) throw Error(ErrorKind::horizon_exceeded, "t beyond kernel horizon");
        double s = 0.5 * (k.at(i, i) * g(static_cast<double>(m - i) * g.h) + k.at(i, m) * g(0.0));
        for (long j = i + 1; j < m; ++j) s += k.at(i, j) * g.samples[static_cast<std::size_t>(m - j)];
        return s * k.h;
    }
    long M = std::max(1L, static_cast<long>(std::ceil((t - x) / std::min(k.h, g.h) - 1e-9)));
    double ds = (t - x) / static_cast<double>(M);
    double s = 0.5 * (k.eval(x, x) * g(t - x) + k.eval(x, t) * g(0.0));
    for (long j = 1; j < M; ++j) {
        double sj = x + ds * static_cast<double>(j);
        s += k.eval(x, sj) * g(t - sj);
    }
    return s * ds;
}

// a node sitting exactly on a wavefront takes the mean of both sides
inline bool on_front(double x, double t) { return std::abs(x - t) <= 1e-9 * std::max(1.0, std::abs(t)); }

inline void require_horizon(const Kernel& k, double t) {
    if (t > k.horizon * (1.0 + 1e-12) + 1e-12)
        throw Error(ErrorKind::horizon_exceeded,
                    "t = " + std::to_string(t) + " beyond kernel horizon " + std::to_string(k.horizon));
}

}  // namespace detail

inline double eval_halfline_dirichlet(const Kernel& k, const ControlTrace& g, double x, double t) {
    detail::require_horizon(k, t);
    if (detail::on_front(x, t)) return 0.5 * g(0.0);
    if (x > t) return 0.0;
    return g(t - x) + detail::kernel_convolution(k, g, x, t);
}

// f from beta1 u + beta2 u_x = g:  -beta2 f' + beta1 f = g, f(0) = 0
inline ControlTrace neumann_source(const ControlTrace& g, double beta1, double beta2) {
    if (beta2 == 0.0) throw Error(ErrorKind::bad_bc, "beta2 must be nonzero");
    double lam = beta1 / beta2;
    double e = std::exp(lam * g.h);
    ControlTrace f = ControlTrace::zeros(g.h, g.size(), Regularity::H1_zero_start);
    double acc = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) {
        acc = e * acc + 0.5 * g.h * (e * g.samples[i - 1] + g.samples[i]);
        f.samples[i] = -acc / beta2;
    }
    return f;
}

inline double eval_halfline_neumann(const Kernel& k, const ControlTrace& g, double beta1, double beta2, double x,
                                    double t) {
    if (beta2 == 0.0) throw Error(ErrorKind::bad_bc, "beta2 must be nonzero");
    if (beta1 != 0.0 && !k.identically_zero())
        throw Error(ErrorKind::unsupported_bc, "mixed boundary data needs a matching kernel");
    if (k.bc != BcKind::neumann && !k.identically_zero())
        throw Error(ErrorKind::unsupported_bc, "kernel must satisfy the Neumann condition");
    detail::require_horizon(k, t);
    if (x > t && !detail::on_front(x, t)) return 0.0;
    ControlTrace f = neumann_source(g, beta1, beta2);
    if (detail::on_front(x, t)) return 0.5 * f(0.0);
    return f(t - x) + detail::kernel_convolution(k, f, x, t);
}

enum class RightBc { dirichlet, neumann };

// Dirichlet data h at x = 0, homogeneous condition at x = l; kernel from the folded potential
inline double eval_interval_folded(const Kernel& k, const ControlTrace& hc, RightBc right, double l, double x,
                                   double t) {
    detail::require_horizon(k, t);
    double u = 0.0;
    for (long n = 0;; ++n) {
        double xi = 2.0 * static_cast<double>(n) * l + x;
        if (xi > t && !detail::on_front(xi, t)) break;
        double sgn = right == RightBc::dirichlet ? 1.0 : (n % 2 == 0 ? 1.0 : -1.0);
        u += sgn * eval_halfline_dirichlet(k, hc, xi, t);
    }
    for (long n = 1;; ++n) {
        double xi = 2.0 * static_cast<double>(n) * l - x;
        if (xi > t && !detail::on_front(xi, t)) break;
        double sgn = right == RightBc::dirichlet ? -1.0 : (n % 2 == 1 ? 1.0 : -1.0);
        u += sgn * eval_halfline_dirichlet(k, hc, xi, t);
    }
    return u;
}

// Dirichlet 0 at x = 0, Neumann datum p at x = l measured along z = l - x
inline double eval_interval_neumann_control(const Kernel& w, const ControlTrace& p, double l, double x, double t) {
    detail::require_horizon(w, t);
    ControlTrace P = ControlTrace::zeros(p.h, p.size(), Regularity::H1_zero_start);
    for (std::size_t i = 1; i < p.size(); ++i) P.samples[i] = P.samples[i - 1] - 0.5 * p.h * (p.samples[i - 1] + p.samples[i]);
    auto V = [&](double zeta) {
        if (detail::on_front(zeta, t)) return 0.5 * P(0.0);
        return zeta > t ? 0.0 : P(t - zeta) + detail::kernel_convolution(w, P, zeta, t);
    };
    double z = l - x;
    double u = 0.0;
    for (long n = 0;; ++n) {
        double zeta = 2.0 * static_cast<double>(n) * l + z;
        if (zeta > t && !detail::on_front(zeta, t)) break;
        u += (n % 2 == 0 ? 1.0 : -1.0) * V(zeta);
    }
    for (long n = 1;; ++n) {
        double zeta = 2.0 * static_cast<double>(n) * l - z;
        if (zeta > t && !detail::on_front(zeta, t)) break;
        u += (n % 2 == 0 ? 1.0 : -1.0) * V(zeta);
    }
    return u;
}

}  // namespace lasso
