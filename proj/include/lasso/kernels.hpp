#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "error.hpp"
#include "graph_model.hpp"

namespace lasso {

enum class BcKind { dirichlet, neumann };

inline const char* to_string(BcKind b) { return b == BcKind::dirichlet ? "dirichlet" : "neumann"; }

inline BcKind bc_from_beta(double beta1, double beta2) {
    if (beta1 == 1.0 && beta2 == 0.0) return BcKind::dirichlet;
    if (beta1 == 0.0 && beta2 == 1.0) return BcKind::neumann;
    throw Error(ErrorKind::unsupported_bc, "only (1,0) and (0,1) are supported by the kernel solver");
}

// k(x_i, s_j) on 0 <= i <= j <= n, x_i = i h
struct Kernel {
    double horizon = 0.0;
    double h = 0.0;
    long n = 0;
    BcKind bc = BcKind::dirichlet;
    double q0 = 0.0;
    std::vector<double> values;
    std::vector<double> diag_trace;

    static std::size_t offset(long i, long j) {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(j + 1) / 2 + static_cast<std::size_t>(i);
    }
    double sigma() const { return bc == BcKind::dirichlet ? -1.0 : 1.0; }

    double at(long i, long j) const { return values[offset(i, j)]; }
    // x < 0 through the odd/even extension
    double at_mirror(long i, long j) const { return i >= 0 ? at(i, j) : sigma() * at(-i, j); }

    bool identically_zero() const {
        for (double v : values)
            if (v != 0.0) return false;
        return true;
    }
    double max_abs() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }

    void check_range(double x, double s) const {
        if (s > horizon * (1.0 + 1e-12) + 1e-12 || x < -1e-12 || x > s + 1e-12)
            throw Error(ErrorKind::horizon_exceeded,
                        "kernel evaluated at (" + std::to_string(x) + ", " + std::to_string(s) + "), horizon " +
                            std::to_string(horizon));
    }

    double eval(double x, double s) const {
        check_range(x, s);
        double u = std::max(0.0, x / h), w = std::min(static_cast<double>(n), s / h);
        u = std::min(u, w);
        long i0 = std::min(static_cast<long>(u), n);
        long j0 = std::min(static_cast<long>(w), n);
        double al = u - static_cast<double>(i0), be = w - static_cast<double>(j0);
        if (al == 0.0 && be == 0.0) return at(i0, j0);
        if (j0 == n) {
            if (i0 == n) return at(n, n);
            return at(i0, n) + al * (at(i0 + 1, n) - at(i0, n));
        }
        if (i0 < j0) {
            double a00 = at(i0, j0), a01 = at(i0, j0 + 1);
            double a10 = at(i0 + 1, j0), a11 = at(i0 + 1, j0 + 1);
            return (1 - al) * (1 - be) * a00 + (1 - al) * be * a01 + al * (1 - be) * a10 + al * be * a11;
        }
        double kd = at(i0, i0), ku = at(i0, i0 + 1), kn = at(i0 + 1, i0 + 1);
        return kd + al * (kn - ku) + be * (ku - kd);
    }

    // d/dx k at a node
    double dx(long i, long j) const {
        if (i == 0) {
            if (bc == BcKind::neumann) return 0.0;
            if (j == 0) return -0.5 * q0;
            if (j == 1) return at(1, 1) / h;
            return (-3.0 * at(0, j) + 4.0 * at(1, j) - at(2, j)) / (2.0 * h);
        }
        if (i < j) return (at(i + 1, j) - at(i - 1, j)) / (2.0 * h);
        return (3.0 * at(i, i) - 4.0 * at_mirror(i - 1, i) + at_mirror(i - 2, i)) / (2.0 * h);
    }
};

namespace detail {

inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t hsh = 1469598103934665603ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        hsh ^= p[i];
        hsh *= 1099511628211ULL;
    }
    return hsh;
}

}  // namespace detail

// characteristic coordinates xi=(s+x)/2, eta=(s-x)/2 with half step delta=h/2;
// K = d(xi) + sigma d(eta) - int int q K, marched row by row in xi
template <class Q>
Kernel solve_goursat(const Q& q, BcKind bc, double horizon, double h) {
    if (!(horizon > 0.0) || !(h > 0.0)) throw Error(ErrorKind::config, "kernel horizon and step must be positive");
    Kernel k;
    k.bc = bc;
    k.h = h;
    k.n = static_cast<long>(std::ceil(horizon / h - 1e-9));
    k.horizon = h * static_cast<double>(k.n);
    k.q0 = q(0.0);
    const long N = k.n;
    const long P = 2 * N;
    const double delta = 0.5 * h;
    const double c4 = 0.25 * delta * delta;
    const double sg = k.sigma();

    std::vector<double> qv(static_cast<std::size_t>(P) + 1);
    for (long m = 0; m <= P; ++m) qv[static_cast<std::size_t>(m)] = q(delta * static_cast<double>(m));
    std::vector<double> d(static_cast<std::size_t>(P) + 1, 0.0);
    for (long m = 1; m <= P; ++m)
        d[static_cast<std::size_t>(m)] =
            d[static_cast<std::size_t>(m - 1)] -
            0.25 * delta * (qv[static_cast<std::size_t>(m - 1)] + qv[static_cast<std::size_t>(m)]);

    k.values.assign(Kernel::offset(0, N + 1), 0.0);
    k.diag_trace.assign(static_cast<std::size_t>(N) + 1, 0.0);

    std::vector<double> Sp(static_cast<std::size_t>(N) + 2, 0.0), Gp(Sp.size(), 0.0);
    std::vector<double> Sc(Sp.size(), 0.0), Gc(Sp.size(), 0.0);
    bool zero_q = true;
    for (double v : qv) zero_q = zero_q && v == 0.0;
    if (zero_q) return k;

    for (long p = 1; p <= P; ++p) {
        long rmax = std::min(p, P - p);
        for (long r = 0; r <= rmax; ++r) {
            auto ur = static_cast<std::size_t>(r);
            if (r == 0) {
                double K = d[static_cast<std::size_t>(p)] + sg * d[0];
                Sc[0] = 0.0;
                Gc[0] = qv[static_cast<std::size_t>(p)] * K;
                if ((p & 1L) == 0) k.values[Kernel::offset(p / 2, p / 2)] = K;
                continue;
            }
            double s_pm_r, g_pm_r;  // (p-1, r)
            if (r <= p - 1) {
                s_pm_r = Sp[ur];
                g_pm_r = Gp[ur];
            } else {
                s_pm_r = sg * Sc[ur - 1];
                g_pm_r = sg * Gc[ur - 1];
            }
            double s_p_rm = Sc[ur - 1], g_p_rm = Gc[ur - 1];
            double s_pm_rm = Sp[ur - 1], g_pm_rm = Gp[ur - 1];
            double known = (s_pm_r + s_p_rm) - s_pm_rm + c4 * (g_pm_rm + (g_pm_r + g_p_rm));
            double qpr = qv[static_cast<std::size_t>(p - r)];
            double K0 = d[static_cast<std::size_t>(p)] + sg * d[ur];
            double K = (K0 - known) / (1.0 + c4 * qpr);
            double G = qpr * K;
            Sc[ur] = known + c4 * G;
            Gc[ur] = G;
            if (((p - r) & 1L) == 0) {
                long i = (p - r) / 2, j = (p + r) / 2;
                k.values[Kernel::offset(i, j)] = K;
            }
        }
        for (long r = 0; r <= rmax; ++r)
            if (!std::isfinite(Sc[static_cast<std::size_t>(r)]))
                throw Error(ErrorKind::non_finite, "goursat march diverged");
        std::swap(Sp, Sc);
        std::swap(Gp, Gc);
    }
    for (long i = 0; i <= N; ++i) k.diag_trace[static_cast<std::size_t>(i)] = d[static_cast<std::size_t>(2 * i)];
    return k;
}

inline Kernel solve_goursat(const std::function<double(double)>& q, double beta1, double beta2, double horizon,
                            double h) {
    return solve_goursat(q, bc_from_beta(beta1, beta2), horizon, h);
}

inline Kernel solve_goursat(const SampledFunction& q_ext, BcKind bc, double horizon) {
    return solve_goursat([&](double x) { return q_ext(x); }, bc, horizon, q_ext.step);
}

// w for the e1 problem driven from x = l: potential q(l - z) folded, Neumann at z = 0
inline Kernel solve_goursat_reflected_neumann(const PotentialSpec& q, double horizon, double h) {
    return solve_goursat(folded_e1_reversed(q), BcKind::neumann, horizon, h);
}

inline Kernel solve_goursat_reflected_neumann(const SampledFunction& q1, double horizon, double h) {
    double l = q1.length();
    return solve_goursat([&](double z) { return q1(l - fold_coordinate(z, l)); }, BcKind::neumann, horizon, h);
}

inline std::vector<double> normal_derivative_at_zero(const Kernel& k) {
    std::vector<double> r(static_cast<std::size_t>(k.n) + 1);
    for (long j = 0; j <= k.n; ++j) r[static_cast<std::size_t>(j)] = k.dx(0, j);
    return r;
}

inline void export_kernel_csv(std::ostream& os, const Kernel& k, long stride = 1) {
    os << "x,s,k\n";
    os.precision(17);
    for (long j = 0; j <= k.n; j += stride)
        for (long i = 0; i <= j; i += stride) os << k.h * i << ',' << k.h * j << ',' << k.at(i, j) << '\n';
}

inline std::uint64_t kernel_cache_key(const std::function<double(double)>& q, BcKind bc, double h, double horizon) {
    long n = static_cast<long>(std::ceil(horizon / h - 1e-9));
    std::uint64_t key = 1469598103934665603ULL;
    for (long m = 0; m <= 2 * n; ++m) {
        double v = q(0.5 * h * static_cast<double>(m));
        key = detail::fnv1a(&v, sizeof v, key);
    }
    int b = static_cast<int>(bc);
    key = detail::fnv1a(&b, sizeof b, key);
    key = detail::fnv1a(&h, sizeof h, key);
    return detail::fnv1a(&n, sizeof n, key);
}

inline void save_kernel(const std::string& path, const Kernel& k, std::uint64_t key) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::config, "cannot write kernel cache " + path);
    const char magic[8] = {'L', 'K', 'E', 'R', 'N', 'E', 'L', '1'};
    int b = static_cast<int>(k.bc);
    f.write(magic, 8);
    f.write(reinterpret_cast<const char*>(&key), sizeof key);
    f.write(reinterpret_cast<const char*>(&b), sizeof b);
    f.write(reinterpret_cast<const char*>(&k.h), sizeof k.h);
    f.write(reinterpret_cast<const char*>(&k.horizon), sizeof k.horizon);
    f.write(reinterpret_cast<const char*>(&k.n), sizeof k.n);
    f.write(reinterpret_cast<const char*>(&k.q0), sizeof k.q0);
    f.write(reinterpret_cast<const char*>(k.values.data()), static_cast<std::streamsize>(k.values.size() * sizeof(double)));
    f.write(reinterpret_cast<const char*>(k.diag_trace.data()),
            static_cast<std::streamsize>(k.diag_trace.size() * sizeof(double)));
}

// returns false when the file is absent or was built for another key
inline bool load_kernel(const std::string& path, std::uint64_t key, Kernel& k) {
    std::ifstream f(path, std::ios::binary);
    if (!f) return false;
    char magic[8];
    std::uint64_t stored = 0;
    int b = 0;
    f.read(magic, 8);
    f.read(reinterpret_cast<char*>(&stored), sizeof stored);
    if (!f || std::memcmp(magic, "LKERNEL1", 8) != 0 || stored != key) return false;
    Kernel out;
    f.read(reinterpret_cast<char*>(&b), sizeof b);
    f.read(reinterpret_cast<char*>(&out.h), sizeof out.h);
    f.read(reinterpret_cast<char*>(&out.horizon), sizeof out.horizon);
    f.read(reinterpret_cast<char*>(&out.n), sizeof out.n);
    f.read(reinterpret_cast<char*>(&out.q0), sizeof out.q0);
    if (!f || out.n < 0) return false;
    out.bc = static_cast<BcKind>(b);
    out.values.resize(Kernel::offset(0, out.n + 1));
    out.diag_trace.resize(static_cast<std::size_t>(out.n) + 1);
    f.read(reinterpret_cast<char*>(out.values.data()), static_cast<std::streamsize>(out.values.size() * sizeof(double)));
    f.read(reinterpret_cast<char*>(out.diag_trace.data()),
           static_cast<std::streamsize>(out.diag_trace.size() * sizeof(double)));
    if (!f) return false;
    k = std::move(out);
    return true;
}

}  // namespace lasso
