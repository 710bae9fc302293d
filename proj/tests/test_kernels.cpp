#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "lasso/kernels.hpp"

using namespace lasso;

namespace {

// closed forms for q = c: Dirichlet -c x J1(z)/z, Neumann -c s J1(z)/z, z^2 = c(s^2 - x^2)
double bessel_ratio(double c, double x, double s) {
    double z2 = c * (s * s - x * x);
    if (std::abs(z2) < 1e-14) return 0.5;
    if (z2 > 0) {
        double z = std::sqrt(z2);
        return std::cyl_bessel_j(1.0, z) / z;
    }
    double y = std::sqrt(-z2);
    return std::cyl_bessel_i(1.0, y) / y;
}

double closed_dirichlet(double c, double x, double s) { return -c * x * bessel_ratio(c, x, s); }
double closed_neumann(double c, double x, double s) { return -c * s * bessel_ratio(c, x, s); }

// global successive approximation on the characteristic lattice, step delta,
// rectangle integrals by cumulative 2D trapezoid over the full square
double picard_value(const std::function<double(double)>& q, double sigma, double H, double delta, double x,
                    double s) {
    long M = std::lround(H / delta);
    auto idx = [M](long p, long r) { return static_cast<std::size_t>(p * (M + 1) + r); };
    std::vector<double> K((M + 1) * (M + 1), 0.0), K0(K.size()), S(K.size());
    std::vector<double> d(M + 1, 0.0);
    for (long m = 1; m <= M; ++m) d[m] = d[m - 1] - 0.25 * delta * (q(std::abs((m - 1) * delta)) + q(m * delta));
    for (long p = 0; p <= M; ++p)
        for (long r = 0; r <= M; ++r) K0[idx(p, r)] = d[p] + sigma * d[r];
    K = K0;
    for (int it = 0; it < 200; ++it) {
        std::fill(S.begin(), S.end(), 0.0);
        for (long p = 1; p <= M; ++p)
            for (long r = 1; r <= M; ++r) {
                auto G = [&](long pp, long rr) { return q(std::abs(pp - rr) * delta) * K[idx(pp, rr)]; };
                S[idx(p, r)] = S[idx(p - 1, r)] + S[idx(p, r - 1)] - S[idx(p - 1, r - 1)] +
                               0.25 * delta * delta * (G(p, r) + G(p - 1, r) + G(p, r - 1) + G(p - 1, r - 1));
            }
        double change = 0;
        for (std::size_t i = 0; i < K.size(); ++i) {
            double nv = K0[i] - S[i];
            change = std::max(change, std::abs(nv - K[i]));
            K[i] = nv;
        }
        if (change < 1e-14) break;
    }
    long p = std::lround((s + x) / 2 / delta), r = std::lround((s - x) / 2 / delta);
    return K[idx(p, r)];
}

}  // namespace

TEST(Goursat, ZeroPotentialGivesZero) {
    auto zero = [](double) { return 0.0; };
    for (auto bc : {BcKind::dirichlet, BcKind::neumann}) {
        auto k = solve_goursat(zero, bc, 2.0, 0.01);
        EXPECT_TRUE(k.identically_zero());
        for (double v : normal_derivative_at_zero(k)) EXPECT_EQ(v, 0.0);
        for (double v : k.diag_trace) EXPECT_EQ(v, 0.0);
    }
}

TEST(Goursat, ConstantDiagonalExact) {
    for (double c : {1.0, -2.5, 3.0}) {
        auto k = solve_goursat([c](double) { return c; }, BcKind::dirichlet, 2.0, 0.01);
        for (long i = 0; i <= k.n; ++i) {
            EXPECT_NEAR(k.at(i, i), -c * i * k.h / 2, 1e-14 * (1 + std::abs(c) * i * k.h));
            EXPECT_EQ(k.at(i, i), k.diag_trace[i]);
        }
        for (long j = 0; j <= k.n; ++j) EXPECT_EQ(k.at(0, j), 0.0);
    }
}

TEST(Goursat, OppositePotentialOppositeDiagonal) {
    auto q = [](double x) { return 1 + std::sin(2 * x); };
    auto k1 = solve_goursat(q, BcKind::neumann, 1.5, 0.01);
    auto k2 = solve_goursat([&](double x) { return -q(x); }, BcKind::neumann, 1.5, 0.01);
    for (long i = 0; i <= k1.n; ++i) EXPECT_EQ(k1.diag_trace[i], -k2.diag_trace[i]);
}

TEST(Goursat, BesselClosedFormsSecondOrder) {
    for (double c : {1.0, -1.0}) {
        for (auto bc : {BcKind::dirichlet, BcKind::neumann}) {
            double prev = 0;
            for (double h : {0.02, 0.01, 0.005}) {
                auto k = solve_goursat([c](double) { return c; }, bc, 2.0, h);
                double e = 0;
                for (long j = 0; j <= k.n; ++j)
                    for (long i = 0; i <= j; ++i) {
                        double x = i * h, s = j * h;
                        double ex = bc == BcKind::dirichlet ? closed_dirichlet(c, x, s) : closed_neumann(c, x, s);
                        e = std::max(e, std::abs(k.at(i, j) - ex));
                    }
                EXPECT_LT(e, 1e-3);
                if (prev > 0) {
                    EXPECT_GE(prev / e, 3.0);
                    EXPECT_LE(prev / e, 5.0);
                }
                prev = e;
            }
        }
    }
}

TEST(Goursat, PicardOracleAtDoubleResolution) {
    // q = 1, Dirichlet, horizon 2: k(0.5, 1.0)
    auto one = [](double) { return 1.0; };
    double oracle = picard_value(one, -1.0, 1.5, 0.0125, 0.5, 1.0);
    auto k = solve_goursat(one, BcKind::dirichlet, 2.0, 0.05);
    double v = k.eval(0.5, 1.0);
    EXPECT_NEAR(v, oracle, 2e-4);
    EXPECT_NEAR(v, closed_dirichlet(1.0, 0.5, 1.0), 2e-4);
    EXPECT_NEAR(oracle, -0.22728358440399504, 1e-5);

    auto qv = [](double x) { return std::cos(3 * x) + x; };
    for (auto bc : {BcKind::dirichlet, BcKind::neumann}) {
        double sg = bc == BcKind::dirichlet ? -1.0 : 1.0;
        double o = picard_value(qv, sg, 1.0, 0.0125, 0.25, 1.25);
        auto kk = solve_goursat(qv, bc, 1.5, 0.05);
        EXPECT_NEAR(kk.eval(0.25, 1.25), o, 1e-3);
        auto kf = solve_goursat(qv, bc, 1.5, 0.025);
        EXPECT_LT(std::abs(kf.eval(0.25, 1.25) - o), std::abs(kk.eval(0.25, 1.25) - o) + 1e-12);
    }
}

TEST(Goursat, PdeResidualSecondOrder) {
    auto q = [](double x) { return 1 + x * x + 0.5 * std::sin(3 * x); };
    double prev = 0;
    for (double h : {0.02, 0.01, 0.005}) {
        auto k = solve_goursat(q, BcKind::dirichlet, 2.0, h);
        long st = std::lround(0.1 / h);
        double r = 0;
        for (long j = 3 * st; j < k.n; j += st)
            for (long i = st; i + 2 * st <= j; i += st) {
                double kss = (k.at(i, j + 1) - 2 * k.at(i, j) + k.at(i, j - 1)) / (h * h);
                double kxx = (k.at(i + 1, j) - 2 * k.at(i, j) + k.at(i - 1, j)) / (h * h);
                r = std::max(r, std::abs(kss - kxx + q(i * h) * k.at(i, j)));
            }
        if (prev > 0) {
            EXPECT_GE(prev / r, 3.0);
            EXPECT_LE(prev / r, 5.0);
        }
        prev = r;
    }
}

TEST(Goursat, NormalDerivative) {
    double c = 2.0;
    double prev = 0;
    for (double h : {0.02, 0.01, 0.005}) {
        auto k = solve_goursat([c](double) { return c; }, BcKind::dirichlet, 2.0, h);
        auto r = normal_derivative_at_zero(k);
        EXPECT_EQ(r[0], -c / 2);
        double e = 0;
        for (long j = 0; j <= k.n; ++j) {
            double s = j * h;
            double ex = -c * bessel_ratio(c, 0.0, s);
            e = std::max(e, std::abs(r[j] - ex));
        }
        if (prev > 0) EXPECT_GE(prev / e, 3.0);
        prev = e;
        auto kn = solve_goursat([c](double) { return c; }, BcKind::neumann, 2.0, h);
        for (double v : normal_derivative_at_zero(kn)) EXPECT_EQ(v, 0.0);
        double mx = kn.max_abs(), worst = 0;
        for (long j = 2; j <= kn.n; ++j)
            worst = std::max(worst, std::abs(-3 * kn.at(0, j) + 4 * kn.at(1, j) - kn.at(2, j)) / (2 * h));
        EXPECT_LT(worst, 1e-2 * mx);
    }
}

TEST(Goursat, ReflectedNeumann) {
    auto q1 = SampledFunction::sample(1.0, 200, [](double x) { return x; });
    auto w = solve_goursat_reflected_neumann(q1, 3.0, 0.01);
    for (long i = 0; i <= 100; ++i) {
        double x = i * 0.01;
        EXPECT_NEAR(w.at(i, i), -(x - x * x / 2) / 2, 1e-13);
    }
    auto one = SampledFunction::sample(1.0, 10, [](double) { return 1.0; });
    auto w1 = solve_goursat_reflected_neumann(one, 2.0, 0.01);
    auto kn = solve_goursat([](double) { return 1.0; }, BcKind::neumann, 2.0, 0.01);
    EXPECT_EQ(w1.values, kn.values);
    EXPECT_NEAR(w1.eval(0.5, 1.5), closed_neumann(1.0, 0.5, 1.5), 1e-4);
    auto z = SampledFunction::sample(1.0, 10, [](double) { return 0.0; });
    EXPECT_TRUE(solve_goursat_reflected_neumann(z, 2.0, 0.01).identically_zero());
}

TEST(Goursat, InterpolationAndRange) {
    auto k = solve_goursat([](double) { return 1.0; }, BcKind::dirichlet, 1.0, 0.01);
    EXPECT_NEAR(k.eval(0.305, 0.7), closed_dirichlet(1.0, 0.305, 0.7), 1e-5);
    EXPECT_NEAR(k.eval(0.503, 0.507), closed_dirichlet(1.0, 0.503, 0.507), 1e-5);
    try {
        k.eval(0.2, 1.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::horizon_exceeded);
    }
    EXPECT_THROW(bc_from_beta(0.6, 0.8), Error);
}

TEST(Goursat, CacheRoundTrip) {
    std::function<double(double)> q = [](double x) { return 1 + x; };
    auto k = solve_goursat(q, BcKind::dirichlet, 1.0, 0.02);
    auto key = kernel_cache_key(q, BcKind::dirichlet, 0.02, 1.0);
    auto path = (std::filesystem::temp_directory_path() / "lasso_kernel_cache.bin").string();
    save_kernel(path, k, key);
    Kernel back;
    EXPECT_FALSE(load_kernel(path, key + 1, back));
    ASSERT_TRUE(load_kernel(path, key, back));
    EXPECT_EQ(back.values, k.values);
    EXPECT_EQ(back.n, k.n);
    std::ostringstream os;
    export_kernel_csv(os, k, 10);
    EXPECT_NE(os.str().find("x,s,k"), std::string::npos);
    std::filesystem::remove(path);
}
