#include <gtest/gtest.h>

#include <cmath>

#include "lasso/volterra.hpp"

using namespace lasso;

namespace {

VeskProblem model(double h, double T, std::function<double(double, double)> k, std::function<double(double)> g,
                  int sign) {
    VeskProblem p;
    p.t0 = 0;
    p.t1 = T;
    p.h = h;
    p.kernel = std::move(k);
    p.sign = sign;
    auto n = static_cast<std::size_t>(std::lround(T / h));
    p.rhs.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) p.rhs[i] = g(p.node(i));
    return p;
}

double max_err(const VeskProblem& p, const std::vector<double>& y, double (*f)(double)) {
    double e = 0;
    for (std::size_t i = 0; i < y.size(); ++i) e = std::max(e, std::abs(y[i] - f(p.node(i))));
    return e;
}

}  // namespace

TEST(Vesk, ZeroKernelIsIdentity) {
    auto p = model(0.01, 1.0, [](double, double) { return 0.0; }, [](double t) { return std::sin(t); }, 1);
    auto y = solve_vesk(p);
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_EQ(y[i], p.rhs[i]);
    EXPECT_EQ(vesk_residual(p, y), 0.0);
}

TEST(Vesk, ExponentialDecay) {
    double prev = 0;
    for (double h : {0.02, 0.01, 0.005}) {
        auto p = model(h, 2.0, [](double, double) { return 1.0; }, [](double) { return 1.0; }, 1);
        auto y = solve_vesk(p);
        double e = max_err(p, y, [](double t) { return std::exp(-t); });
        EXPECT_LT(e, 0.1 * h * h + 1e-15);
        EXPECT_LT(vesk_collocation_residual(p, y), 1e-12);
        if (prev > 0) {
            EXPECT_GE(prev / e, 3.0);
            EXPECT_LE(prev / e, 5.0);
        }
        prev = e;
    }
}

TEST(Vesk, SinhResolvent) {
    double prev = 0;
    for (double h : {0.02, 0.01, 0.005}) {
        auto p = model(h, 2.0, [](double t, double s) { return t - s; }, [](double t) { return t; }, -1);
        auto y = solve_vesk(p);
        double e = max_err(p, y, [](double t) { return std::sinh(t); });
        EXPECT_LT(e, 1e-3);
        if (prev > 0) {
            EXPECT_GE(prev / e, 3.0);
            EXPECT_LE(prev / e, 5.0);
        }
        prev = e;
    }
}

TEST(Vesk, SimpsonResidual) {
    auto p = model(1e-3, 2.0, [](double, double) { return 1.0; }, [](double) { return 1.0; }, 1);
    auto y = solve_vesk(p);
    EXPECT_LT(vesk_residual(p, y), 1e-5);
    y[700] += 0.1;
    EXPECT_GE(vesk_residual(p, y), 0.05);
}

TEST(Vesk, KnownPrefixMatchesFullSolve) {
    auto p = model(0.01, 1.5, [](double t, double s) { return std::cos(t * s) - 0.5; },
                   [](double t) { return 1 + t * t; }, 1);
    auto full = solve_vesk(p);
    std::vector<double> prefix(full.begin(), full.begin() + 60);
    auto cont = solve_vesk(p, prefix);
    for (std::size_t i = 0; i < full.size(); ++i) EXPECT_NEAR(cont[i], full[i], 1e-14);
}

TEST(Vesk, GronwallBound) {
    auto p = model(0.01, 2.0, [](double t, double s) { return 2.0 * std::sin(3 * t + s); },
                   [](double t) { return std::cos(t); }, -1);
    auto y = solve_vesk(p);
    double ym = 0;
    for (double v : y) ym = std::max(ym, std::abs(v));
    EXPECT_LE(ym, std::exp(2.0 * 2.0) * 1.0);
}

TEST(Vesk, SingularDiagonal) {
    auto p = model(0.5, 1.0, [](double, double) { return 4.0; }, [](double) { return 1.0; }, -1);
    try {
        solve_vesk(p);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::singular_diagonal);
    }
}

TEST(Vesk, BadStep) {
    auto p = model(0.01, 1.0, [](double, double) { return 0.0; }, [](double) { return 0.0; }, 1);
    p.t1 = 1.005;
    EXPECT_THROW(solve_vesk(p), Error);
}
