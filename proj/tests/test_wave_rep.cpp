#include <gtest/gtest.h>

#include <cmath>

#include "lasso/wave_rep.hpp"
#include "rep_oracle.hpp"

using namespace lasso;
using namespace lasso::testing;

namespace {

Kernel zero_kernel(BcKind bc, double T, double h) {
    return solve_goursat([](double) { return 0.0; }, bc, T, h);
}

double bump(double t) { return t > 0 && t < 1 ? std::pow(std::sin(M_PI * t), 4) : 0.0; }

}  // namespace

TEST(ControlTrace, EvaluationAndCumulative) {
    auto c = ControlTrace::sample(0.1, 1.0, [](double t) { return t * t; });
    EXPECT_EQ(c(-0.05), 0.0);
    EXPECT_EQ(c(0.3), c.samples[3]);
    EXPECT_NEAR(c(0.35), 0.5 * (0.09 + 0.16), 1e-15);
    EXPECT_NEAR(c(1.1), 1.0 + (1.0 - 0.81), 1e-12);
    c.compute_cumulative();
    EXPECT_NEAR(c.cumulative.back(), 1.0 / 3.0, 2e-3);
    c.tag = Regularity::H1_zero_both;
    EXPECT_FALSE(c.endpoints_ok());
    c.tag = Regularity::H1_zero_start;
    EXPECT_TRUE(c.endpoints_ok());
}

TEST(HalfLine, DAlembertAndCausality) {
    auto k = zero_kernel(BcKind::dirichlet, 2.0, 0.01);
    auto g = ControlTrace::sample(0.01, 2.0, bump);
    EXPECT_EQ(eval_halfline_dirichlet(k, g, 0.3, 1.0), g(0.7));
    EXPECT_EQ(eval_halfline_dirichlet(k, g, 1.2, 1.0), 0.0);
    EXPECT_EQ(eval_halfline_dirichlet(k, g, 1.0, 1.0), 0.0);
    EXPECT_THROW(eval_halfline_dirichlet(k, g, 0.5, 2.5), Error);
}

TEST(HalfLine, NeumannReducesToIntegral) {
    auto k = zero_kernel(BcKind::neumann, 2.0, 0.01);
    auto g = ControlTrace::sample(0.01, 2.0, [](double t) { return std::cos(t); });
    EXPECT_NEAR(eval_halfline_neumann(k, g, 0.0, 1.0, 0.5, 1.5), -std::sin(1.0), 1e-5);
    auto z = ControlTrace::zeros(0.01, 201);
    EXPECT_EQ(eval_halfline_neumann(k, z, 0.0, 1.0, 0.5, 1.5), 0.0);
    EXPECT_THROW(eval_halfline_neumann(k, g, 1.0, 0.0, 0.5, 1.5), Error);
}

TEST(HalfLine, NeumannConstantPotentialMatchesOracle) {
    // q = 1, g = bump: u(0.25, 1.0)
    double prev = 0;
    for (double h : {0.01, 0.005, 0.0025}) {
        auto k = solve_goursat([](double) { return 1.0; }, BcKind::neumann, 1.0, h);
        auto g = ControlTrace::sample(h, 1.0, bump);
        double rep = eval_halfline_neumann(k, g, 0.0, 1.0, 0.25, 1.0);
        IntervalEnd left, right;
        left.kind = IntervalEnd::robin;
        left.g = bump;
        auto fd = simulate_interval([](double) { return 1.0; }, 1.5, left, right, h, 0.5, {{0.25, 1.0}});
        double e = std::abs(rep - fd[0]);
        EXPECT_LT(e, 2e-3);
        if (prev > 0) EXPECT_GT(prev / e, 3.0);
        prev = e;
    }
}

TEST(HalfLine, RobinWithZeroPotential) {
    double h = 0.0025;
    auto k = zero_kernel(BcKind::neumann, 2.0, h);
    auto g = ControlTrace::sample(h, 2.0, bump);
    double rep = eval_halfline_neumann(k, g, 0.5, 1.0, 0.4, 1.6);
    IntervalEnd left, right;
    left.kind = IntervalEnd::robin;
    left.beta1 = 0.5;
    left.g = bump;
    auto fd = simulate_interval([](double) { return 0.0; }, 2.5, left, right, h, 0.5, {{0.4, 1.6}});
    EXPECT_NEAR(rep, fd[0], 1e-4);
    auto kq = solve_goursat([](double) { return 1.0; }, BcKind::neumann, 2.0, h);
    EXPECT_THROW(eval_halfline_neumann(kq, g, 0.5, 1.0, 0.4, 1.6), Error);
}

TEST(HalfLine, DirichletQuadraticControl) {
    // q = 1, g = t^2 at (0.5, 1.5)
    double h = 0.0025;
    auto k = solve_goursat([](double) { return 1.0; }, BcKind::dirichlet, 1.5, h);
    auto g = ControlTrace::sample(h, 1.5, [](double t) { return t * t; });
    IntervalEnd left, right;
    left.g = [](double t) { return t * t; };
    auto fd = simulate_interval([](double) { return 1.0; }, 2.0, left, right, h, 0.5, {{0.5, 1.5}});
    EXPECT_NEAR(eval_halfline_dirichlet(k, g, 0.5, 1.5), fd[0], 1e-4);
}

TEST(Interval, FirstReflectionSigns) {
    double l = 1.0;
    auto k = zero_kernel(BcKind::dirichlet, 3.0, 0.01);
    auto hc = ControlTrace::sample(0.01, 3.0, bump);
    double x = 0.3, t = 1.5;
    EXPECT_NEAR(eval_interval_folded(k, hc, RightBc::dirichlet, l, x, t), hc(t - x) - hc(t - 2 * l + x), 1e-15);
    EXPECT_NEAR(eval_interval_folded(k, hc, RightBc::neumann, l, x, t), hc(t - x) + hc(t - 2 * l + x), 1e-15);
    // second Dirichlet image of the Neumann case enters with a minus sign
    t = 2.6;
    EXPECT_NEAR(eval_interval_folded(k, hc, RightBc::neumann, l, x, t),
                hc(t - x) + hc(t - 2 + x) - hc(t - 2 - x) - hc(t - 4 + x), 1e-15);
}

TEST(Interval, NeumannControlZeroPotential) {
    double l = 1.0, h = 0.01;
    auto w = zero_kernel(BcKind::neumann, 3.0, h);
    auto p = ControlTrace::sample(h, 3.0, bump);
    EXPECT_EQ(eval_interval_neumann_control(w, p, l, 0.4, 0.5), 0.0);
    ControlTrace P = ControlTrace::zeros(h, p.size());
    for (std::size_t i = 1; i < p.size(); ++i) P.samples[i] = P.samples[i - 1] - 0.5 * h * (p.samples[i - 1] + p.samples[i]);
    EXPECT_NEAR(eval_interval_neumann_control(w, p, l, 0.4, 1.2), P(1.2 - l + 0.4), 1e-15);
}

TEST(Interval, NeumannControlConstantPotentialOracle) {
    // q = 1, p = 1 on [0, 0.5], l = 1, x = 0.5, t = 2.2
    double h = 0.0025, l = 1.0;
    auto q1 = SampledFunction::sample(l, 10, [](double) { return 1.0; });
    auto w = solve_goursat_reflected_neumann(q1, 2.2, h);
    auto pf = [](double t) { return t <= 0.5 ? 1.0 : 0.0; };
    auto p = ControlTrace::sample(h, 2.2, pf);
    double rep = eval_interval_neumann_control(w, p, l, 0.5, 2.2);
    IntervalEnd left, right;
    right.kind = IntervalEnd::robin;
    right.g = [&](double t) { return -pf(t); };
    auto fd = simulate_interval([](double) { return 1.0; }, l, left, right, h, 0.5, {{0.5, 2.2}});
    EXPECT_NEAR(rep, fd[0], 5e-3);
}

TEST(Interval, FoldedSineOracle) {
    double h = 0.0025, l = 1.0;
    auto qf = [](double x) { return std::sin(M_PI * x); };
    auto k = solve_goursat([&](double x) { return qf(fold_coordinate(x, l)); }, BcKind::dirichlet, 3.7, h);
    auto hc = ControlTrace::sample(h, 3.7, bump);
    IntervalEnd left, right;
    left.g = bump;
    auto fdd = simulate_interval(qf, l, left, right, h, 0.5, {{0.3, 3.7}});
    EXPECT_NEAR(eval_interval_folded(k, hc, RightBc::dirichlet, l, 0.3, 3.7), fdd[0], 2e-4);
    right.kind = IntervalEnd::robin;
    auto fdn = simulate_interval(qf, l, left, right, h, 0.5, {{0.3, 3.7}});
    EXPECT_NEAR(eval_interval_folded(k, hc, RightBc::neumann, l, 0.3, 3.7), fdn[0], 2e-4);
}

TEST(Representation, Linearity) {
    auto k = solve_goursat([](double x) { return 1 + x; }, BcKind::dirichlet, 2.0, 0.01);
    auto g1 = ControlTrace::sample(0.01, 2.0, bump);
    auto g2 = ControlTrace::sample(0.01, 2.0, [](double t) { return t * t; });
    auto g3 = g1;
    for (std::size_t i = 0; i < g3.size(); ++i) g3.samples[i] = 2.0 * g1.samples[i] - 3.0 * g2.samples[i];
    double a = eval_halfline_dirichlet(k, g1, 0.4, 1.7), b = eval_halfline_dirichlet(k, g2, 0.4, 1.7);
    EXPECT_NEAR(eval_halfline_dirichlet(k, g3, 0.4, 1.7), 2 * a - 3 * b, 1e-12);
}

TEST(Representation, SecondOrderAgainstOracle) {
    for (auto f : {Formula::wf1, Formula::wf1d, Formula::fold, Formula::fold2, Formula::ndp}) {
        auto r = formula_order(f, 3, 42);
        EXPECT_GE(r.ratio1, 3.0) << name(f);
        EXPECT_LE(r.ratio1, 5.0) << name(f);
        EXPECT_GE(r.ratio2, 3.0) << name(f);
        EXPECT_LE(r.ratio2, 5.0) << name(f);
    }
}
