#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lasso/io.hpp"

using namespace lasso;
namespace fs = std::filesystem;

namespace {

Config from_text(const std::string& s) {
    std::istringstream in(s);
    return Config::parse(in);
}

fs::path scratch() {
    auto d = fs::temp_directory_path() / "lasso_io_test";
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST(Io, ParsesSectionsAndComments) {
    auto c = from_text("# top\nseed = 7\n[geometry]\nl = 1.5  # pendant\na=0.5\n\n[spectrum]\nns = 13, 34 ,89\n");
    EXPECT_EQ(c.integer("seed"), 7);
    EXPECT_DOUBLE_EQ(c.num("geometry.l"), 1.5);
    EXPECT_DOUBLE_EQ(c.num("geometry.a"), 0.5);
    EXPECT_EQ(c.integers("spectrum.ns"), (std::vector<long>{13, 34, 89}));
    EXPECT_DOUBLE_EQ(c.num("grid.cfl", 0.5), 0.5);
    EXPECT_EQ(c.str("potential.kind", "zero"), "zero");
}

TEST(Io, RejectsMalformedInput) {
    EXPECT_THROW(from_text("[geometry\nl=1\n"), Error);
    EXPECT_THROW(from_text("l 1\n"), Error);
    auto c = from_text("[geometry]\nl = abc\na = nan\nn = 1.5\n");
    EXPECT_THROW(c.num("geometry.l"), Error);
    EXPECT_THROW(c.num("geometry.a"), Error);
    EXPECT_THROW(c.integer("geometry.n"), Error);
    try {
        c.str("geometry.missing");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::config);
        EXPECT_NE(std::string(e.what()).find("geometry.missing"), std::string::npos);
    }
    EXPECT_THROW(geometry_from(from_text("[geometry]\nl = -1\na = 1\n")), Error);
}

TEST(Io, MissingFileNamesPath) {
    auto c = from_text("[geometry]\nl=1\na=1\n[target]\nkind = file\nfile = /nonexistent/target.csv\n");
    auto g = geometry_from(c);
    auto grid = grid_from(c, g, 20);
    try {
        target_from(c, grid, g);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::config);
        EXPECT_NE(std::string(e.what()).find("/nonexistent/target.csv"), std::string::npos);
    }
}

TEST(Io, TargetFileRoundTrip) {
    auto dir = scratch();
    LassoGeometry g{1.0, 1.0};
    auto grid = build_grid(g, 40);
    auto t = builtin_target(grid, g, 0.3, true, true);
    {
        std::ofstream out(dir / "t.csv");
        out.precision(17);
        out << "edge,x,phi1,phi2\n";
        for (int j = 0; j < 3; ++j)
            for (std::size_t i = 0; i < t.phi1.e[j].size(); ++i)
                out << j + 1 << ',' << grid.h * static_cast<double>(i) << ',' << t.phi1.e[j][i] << ','
                    << t.phi2.e[j][i] << '\n';
    }
    std::ofstream(dir / "run.cfg") << "[geometry]\nl=1\na=1\n[target]\nkind=file\nfile=t.csv\n";
    auto c = Config::load(dir / "run.cfg");
    auto r = target_from(c, grid, g);
    EXPECT_LT((r.phi1 - t.phi1).max_abs(), 1e-15);
    EXPECT_LT((r.phi2 - t.phi2).max_abs(), 1e-15);
}

TEST(Io, PotentialKinds) {
    LassoGeometry g{1.0, 0.5};
    EXPECT_TRUE(potential_from(from_text(""), g).is_zero());
    auto qc = potential_from(from_text("[potential]\nkind=constant\nvalue=2\n"), g);
    EXPECT_DOUBLE_EQ(qc(Edge::e2, 0.3), 2.0);
    auto qs = potential_from(from_text("[potential]\nkind=smooth\n"), g);
    EXPECT_NEAR(qs(Edge::e1, 0.5), 1.0 + 0.5 * std::sin(1.5), 1e-6);
    EXPECT_THROW(potential_from(from_text("[potential]\nkind=bogus\n"), g), Error);
}

TEST(Io, CsvAndJsonWriters) {
    auto c = ControlSet::zeros(Problem::P2, 0.5, 3);
    c.f1.samples = {0.0, 1.0, 0.25};
    std::ostringstream os;
    write_controls_csv(os, c);
    EXPECT_EQ(os.str(), "t,f1,f2,f3\n0,0,0,0\n0.5,1,0,0\n1,0.25,0,0\n");

    auto s = spectrum_q0(2.0, 1.0, 7.0);
    std::ostringstream ss;
    write_spectrum_csv(ss, s);
    EXPECT_NE(ss.str().find(",2,ring_antisym,"), std::string::npos);

    DemoReport d;
    d.max_a1 = 0.0;
    auto j = to_json(d);
    EXPECT_EQ(j["which"], "interior_only");
    EXPECT_EQ(j["seed"], 42);
}
