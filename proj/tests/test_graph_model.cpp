#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lasso/graph_model.hpp"

using namespace lasso;

TEST(Geometry, HalfTimes) {
    LassoGeometry g{0.5, 1.0};
    EXPECT_EQ(g.T_star(), 1.5);
    EXPECT_EQ(g.T_upper(), 1.0);
    LassoGeometry b{-1.0, 1.0};
    EXPECT_THROW(b.validate(), Error);
}

TEST(Grid, Commensurate) {
    auto g = build_grid({1.0, 1.0}, 100);
    EXPECT_DOUBLE_EQ(g.h, 0.01);
    EXPECT_EQ(g.n1, 100);
    EXPECT_EQ(g.n2, 100);
    EXPECT_DOUBLE_EQ(g.dt, 0.005);
    auto g2 = build_grid({2.0, 1.0}, 50);
    EXPECT_DOUBLE_EQ(g2.h, 0.02);
    EXPECT_EQ(g2.n1, 100);
    EXPECT_EQ(g2.n2, 50);
}

TEST(Grid, IrrationalRejected) {
    try {
        build_grid({1.0, 0.6180339887498949}, 100);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::non_commensurate);
    }
    EXPECT_THROW(build_grid({1.0, 1.0}, 100, 1.5), Error);
}

TEST(Folded, ZeroAndTent) {
    auto z = SampledFunction::sample(1.0, 10, [](double) { return 0.0; });
    auto ze = extend_potential_folded(z, 4.0);
    for (double v : ze.v) EXPECT_EQ(v, 0.0);

    auto id = SampledFunction::sample(1.0, 10, [](double x) { return x; });
    auto t = extend_potential_folded(id, 4.0);
    ASSERT_EQ(t.v.size(), 41u);
    EXPECT_DOUBLE_EQ(t.v[0], 0.0);
    EXPECT_DOUBLE_EQ(t.v[10], 1.0);
    EXPECT_DOUBLE_EQ(t.v[20], 0.0);
    EXPECT_DOUBLE_EQ(t.v[30], 1.0);
    EXPECT_DOUBLE_EQ(t.v[40], 0.0);
    EXPECT_DOUBLE_EQ(t.v[13], id.v[7]);
}

TEST(Folded, SineReflection) {
    auto s = SampledFunction::sample(1.0, 100, [](double x) { return std::sin(std::numbers::pi * x); });
    auto e = extend_potential_folded(s, 3.0);
    EXPECT_NEAR(e(1.25), std::sin(0.75 * std::numbers::pi), 1e-15);
    for (std::size_t i = 0; i < s.v.size(); ++i) EXPECT_EQ(e.v[i], s.v[i]);
    for (long n = 0; n <= 1; ++n)
        for (std::size_t i = 0; i <= 100; ++i) {
            std::size_t plus = 200 * static_cast<std::size_t>(n) + i;
            if (plus < e.v.size()) EXPECT_EQ(e.v[plus], s.v[i]);
            if (n > 0 && 200 * static_cast<std::size_t>(n) >= i) EXPECT_EQ(e.v[200 * n - i], s.v[i]);
        }
}

TEST(Folded, CallableMatchesSamples) {
    LassoGeometry g{1.0, 0.5};
    auto q = PotentialSpec::from_functions(
        g, [](double x) { return x * x; }, [](double x) { return 1 + x; }, [](double x) { return 2 - x; }, 100);
    auto f = folded_e1(q);
    EXPECT_NEAR(f(1.3), 0.49, 1e-12);
    EXPECT_NEAR(f(2.2), 0.04, 1e-12);
    auto r = folded_e1_reversed(q);
    EXPECT_NEAR(r(0.0), 1.0, 1e-12);
    EXPECT_NEAR(r(1.0), 0.0, 1e-12);
    EXPECT_NEAR(r(1.5), 0.25, 1e-12);
    auto ring = ring_continued(q, Edge::e2);
    EXPECT_NEAR(ring(0.25), 1.25, 1e-12);
    EXPECT_NEAR(ring(0.75), 2 - 0.25, 1e-12);
    EXPECT_NEAR(ring(1.25), 1.25, 1e-12);
    auto ring3 = ring_continued(q, Edge::e3);
    EXPECT_NEAR(ring3(0.75), 1.25, 1e-12);
}

TEST(Norms, ConstantsAndSine) {
    auto g = build_grid({1.0, 1.0}, 200);
    auto zero = GraphFunction::zeros(g);
    EXPECT_EQ(norm_H(zero), 0.0);
    EXPECT_EQ(norm_H1(zero), 0.0);
    auto one = [](double) { return 1.0; };
    auto c = GraphFunction::sample(g, one, one, one);
    EXPECT_NEAR(norm_H(c), std::sqrt(3.0), 1e-13);
    EXPECT_NEAR(norm_H1(c), std::sqrt(3.0), 1e-13);

    auto zf = [](double) { return 0.0; };
    auto sine = [](double x) { return std::sin(std::numbers::pi * x); };
    double prev_err = 0;
    for (long n : {100, 200, 400}) {
        auto gg = build_grid({1.0, 1.0}, n);
        auto s = GraphFunction::sample(gg, sine, zf, zf);
        EXPECT_NEAR(norm_H(s) * norm_H(s), 0.5, 1e-12);
        double err = std::abs(norm_H1(s) * norm_H1(s) - (0.5 + std::numbers::pi * std::numbers::pi / 2));
        EXPECT_LT(err, 1e-2);
        if (prev_err > 0) EXPECT_LT(err, prev_err);
        prev_err = err;
    }
}

TEST(Norms, Homogeneous) {
    auto g = build_grid({1.0, 0.5}, 100);
    auto f = GraphFunction::sample(
        g, [](double x) { return std::cos(3 * x); }, [](double x) { return 1 + x * x; },
        [](double x) { return 1 - x; });
    double n0 = norm_H(f), n1 = norm_H1(f);
    auto f2 = -3.5 * f;
    EXPECT_NEAR(norm_H(f2), 3.5 * n0, 1e-12 * n0);
    EXPECT_NEAR(norm_H1(f2), 3.5 * n1, 1e-12 * n1);
}

TEST(Target, VertexValidation) {
    auto g = build_grid({1.0, 1.0}, 50);
    auto v = [](double x) { return 1 + x; };
    TargetState t;
    t.phi1 = GraphFunction::sample(g, v, v, v);
    t.phi2 = GraphFunction::zeros(g);
    EXPECT_NO_THROW(t.validate());
    t.phi1.e[1][0] += 1e-6;
    try {
        t.validate();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::target_not_h10);
    }
    t.space_tag = SpaceTag::H;
    EXPECT_NO_THROW(t.validate());
    t.space_tag = SpaceTag::H10;
    TargetState::snap_vertex(t.phi1);
    EXPECT_NO_THROW(t.validate());
    t.phi1.e[2].back() += 1e-3;
    EXPECT_THROW(t.validate(), Error);
}
