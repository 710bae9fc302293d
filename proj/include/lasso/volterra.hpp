#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "error.hpp"

namespace lasso {

// y(t) + sign * int_{t0}^t K(t,s) y(s) ds = g(t) on the nodes t0 + i h
struct VeskProblem {
    double t0 = 0.0;
    double t1 = 1.0;
    double h = 0.01;
    std::function<double(double, double)> kernel;
    std::vector<double> rhs;
    int sign = 1;

    std::size_t nodes() const { return rhs.size(); }
    double node(std::size_t i) const { return t0 + h * static_cast<double>(i); }

    void check() const {
        if (!(h > 0.0)) throw Error(ErrorKind::config, "vesk step must be positive");
        double n = (t1 - t0) / h;
        if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n))
            throw Error(ErrorKind::config, "vesk step does not divide the interval");
        if (rhs.size() != static_cast<std::size_t>(std::lround(n)) + 1)
            throw Error(ErrorKind::config, "vesk rhs size does not match the grid");
        if (sign != 1 && sign != -1) throw Error(ErrorKind::config, "vesk sign must be +1 or -1");
    }
};

// trapezoid product integration by forward substitution; nodes below
// known.size() are taken from `known` instead of being solved
inline std::vector<double> solve_vesk(const VeskProblem& p, std::span<const double> known = {}) {
    p.check();
    std::size_t n = p.nodes();
    std::vector<double> y(n, 0.0);
    const double sh = static_cast<double>(p.sign) * p.h;
    std::size_t first = std::min(known.size(), n);
    for (std::size_t i = 0; i < first; ++i) y[i] = known[i];
    std::vector<double> row(n);
    for (std::size_t i = first; i < n; ++i) {
        if (i == 0) {
            y[0] = p.rhs[0];
            continue;
        }
        double ti = p.node(i);
        double acc = 0.5 * p.kernel(ti, p.node(0)) * y[0];
        for (std::size_t j = 1; j < i; ++j) acc += p.kernel(ti, p.node(j)) * y[j];
        double d = 1.0 + 0.5 * sh * p.kernel(ti, ti);
        if (std::abs(d) < 1e-12) throw Error(ErrorKind::singular_diagonal, "at t = " + std::to_string(ti));
        y[i] = (p.rhs[i] - sh * acc) / d;
        if (!std::isfinite(y[i])) throw Error(ErrorKind::non_finite, "vesk solution at t = " + std::to_string(ti));
    }
    return y;
}

// sup norm of the collocation residual under the same trapezoid rule
inline double vesk_collocation_residual(const VeskProblem& p, std::span<const double> y, std::size_t from = 0) {
    double r = 0.0;
    for (std::size_t i = std::max<std::size_t>(from, 1); i < y.size(); ++i) {
        double ti = p.node(i);
        double acc = 0.5 * (p.kernel(ti, p.node(0)) * y[0] + p.kernel(ti, ti) * y[i]);
        for (std::size_t j = 1; j < i; ++j) acc += p.kernel(ti, p.node(j)) * y[j];
        r = std::max(r, std::abs(y[i] + p.sign * p.h * acc - p.rhs[i]));
    }
    if (from == 0 && !y.empty()) r = std::max(r, std::abs(y[0] - p.rhs[0]));
    return r;
}

namespace detail {

// composite Simpson on nodes 0..m, with a 3/8 panel when m is odd
inline double simpson(const std::function<double(std::size_t)>& f, std::size_t m, double h) {
    if (m == 0) return 0.0;
    if (m == 1) return 0.5 * h * (f(0) + f(1));
    double s = 0.0;
    std::size_t end = m;
    if (m % 2 == 1) {
        end = m - 3;
        s += 3.0 * h / 8.0 * (f(end) + 3.0 * f(end + 1) + 3.0 * f(end + 2) + f(end + 3));
    }
    if (end > 0) {
        double t = f(0) + f(end);
        for (std::size_t j = 1; j < end; ++j) t += (j % 2 ? 4.0 : 2.0) * f(j);
        s += t * h / 3.0;
    }
    return s;
}

}  // namespace detail

inline double vesk_residual(const VeskProblem& p, std::span<const double> y) {
    double r = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double ti = p.node(i);
        double integral = detail::simpson([&](std::size_t j) { return p.kernel(ti, p.node(j)) * y[j]; }, i, p.h);
        r = std::max(r, std::abs(y[i] + p.sign * integral - p.rhs[i]));
    }
    return r;
}

inline void dump_vesk(std::ostream& os, const VeskProblem& p, std::span<const double> y) {
    os << "t,y,residual\n";
    for (std::size_t i = 0; i < y.size(); ++i) {
        double ti = p.node(i);
        double integral = detail::simpson([&](std::size_t j) { return p.kernel(ti, p.node(j)) * y[j]; }, i, p.h);
        os << ti << ',' << y[i] << ',' << (y[i] + p.sign * integral - p.rhs[i]) << '\n';
    }
}

}  // namespace lasso
