#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "mpirecon/error.hpp"
#include "mpirecon/phantom.hpp"
#include "test_support.hpp"

using namespace mpirecon;

TEST(Phantom, DiskAreaMatchesCircle) {
    const auto f = rasterize(PhantomSpec::disk({0.0, 0.0}, 0.5), 512, 512);
    const double fraction = f.sum() / static_cast<double>(f.size());
    EXPECT_NEAR(fraction, M_PI * 0.25 / 4.0, 0.01 * M_PI * 0.25 / 4.0);
}

TEST(Phantom, ZeroRadiusIsEmpty) {
    const auto f = rasterize(PhantomSpec::disk({0.0, 0.0}, 0.0), 16, 16);
    EXPECT_EQ(f.max(), 0.0);
}

TEST(Phantom, GeometryOutsideDomainRejected) {
    EXPECT_THROW(rasterize(PhantomSpec::disk({0.0, 0.0}, 1e9), 16, 16), InvalidArgument);
    EXPECT_THROW(rasterize(PhantomSpec::bar({0.9, 0.0}, 0.5, 0.1, 0.0), 16, 16), InvalidArgument);
    EXPECT_THROW(rasterize(PhantomSpec::disk({0.0, 0.0}, 0.3), 4, 4), InvalidArgument);
    EXPECT_THROW(PhantomSpec::disk({0.0, 0.0}, 0.3, 1.5).validate(), InvalidArgument);
}

TEST(Phantom, BuiltinsAreBinaryWithMargin) {
    const auto suite = builtin_phantoms();
    ASSERT_GE(suite.size(), 5u);
    for (const auto& spec : suite) {
        SCOPED_TRACE(spec.name);
        const auto f = rasterize(spec, 512, 512);
        EXPECT_GT(f.sum(), 0.0);
        for (double v : f.values()) EXPECT_TRUE(v == 0.0 || v == spec.intensity);
        for (std::size_t k = 0; k < 512; ++k) {
            EXPECT_EQ(f(k, 0), 0.0);
            EXPECT_EQ(f(k, 511), 0.0);
            EXPECT_EQ(f(0, k), 0.0);
            EXPECT_EQ(f(511, k), 0.0);
        }
        EXPECT_EQ(builtin_phantom(spec.name).name, spec.name);
    }
    EXPECT_THROW(builtin_phantom("nope"), InvalidArgument);
}

TEST(Phantom, AnnulusHasHole) {
    const auto spec = builtin_phantom("annulus");
    const auto f = rasterize(spec, 128, 128);
    const auto i = static_cast<std::size_t>((spec.center[0] + 1.0) * 64.0);
    const auto j = static_cast<std::size_t>((spec.center[1] + 1.0) * 64.0);
    EXPECT_EQ(f(i, j), 0.0);
}

TEST(PhantomIo, RoundTripWithinQuantization) {
    const auto dir = test::temp_dir("phantom_io");
    const auto f = test::random_field(37, 21, 5);
    const auto path = dir + "/f.pgm";
    save_field(f, path);
    const auto g = load_field(path);
    ASSERT_EQ(g.nx(), 37u);
    ASSERT_EQ(g.ny(), 21u);
    const double step = (f.max() - f.min()) / 65535.0;
    for (std::size_t k = 0; k < f.size(); ++k) EXPECT_LE(std::abs(g[k] - f[k]), 0.5 * step + 1e-12);
    EXPECT_EQ(range_path_for(path), dir + "/f.range");
}

TEST(PhantomIo, ConstantFieldRoundTrip) {
    const auto dir = test::temp_dir("phantom_const");
    save_field(ScalarField(512, 512, 0.75), dir + "/c.pgm");
    const auto g = load_field(dir + "/c.pgm");
    EXPECT_EQ(g.nx(), 512u);
    EXPECT_EQ(g.ny(), 512u);
    for (double v : g.values()) EXPECT_EQ(v, 0.75);
}

TEST(PhantomIo, TopRowIsLargestY) {
    const auto dir = test::temp_dir("phantom_orient");
    ScalarField f(8, 8);
    f(0, 7) = 1.0;
    save_field(f, dir + "/o.pgm");
    const auto bytes = test::read_file(dir + "/o.pgm");
    const auto header_end = bytes.size() - 8 * 8 * 2;
    EXPECT_EQ(static_cast<unsigned char>(bytes[header_end]), 0xFF);
    EXPECT_EQ(static_cast<unsigned char>(bytes[header_end + 1]), 0xFF);
}

TEST(PhantomIo, MalformedInputs) {
    const auto dir = test::temp_dir("phantom_bad");
    {
        std::ofstream out(dir + "/bad.pgm");
        out << "P2\n2 2\n255\n0 0 0 0\n";
    }
    EXPECT_THROW(load_field(dir + "/bad.pgm"), IoError);
    {
        std::ofstream out(dir + "/short.pgm", std::ios::binary);
        out << "P5\n4 4\n65535\n";
        out << "abc";
    }
    EXPECT_THROW(load_field(dir + "/short.pgm"), IoError);
    EXPECT_THROW(load_field(dir + "/missing.pgm"), IoError);
}

TEST(PhantomIo, MissingSidecarMapsToUnitRange) {
    const auto dir = test::temp_dir("phantom_nosidecar");
    {
        std::ofstream out(dir + "/p.pgm", std::ios::binary);
        out << "P5\n2 1\n255\n";
        out.put(static_cast<char>(0));
        out.put(static_cast<char>(255));
    }
    const auto f = load_field(dir + "/p.pgm");
    EXPECT_EQ(f[0], 0.0);
    EXPECT_EQ(f[1], 1.0);
}

TEST(Phantom, FromFileResamples) {
    const auto dir = test::temp_dir("phantom_file");
    save_field(rasterize(PhantomSpec::disk({0.0, 0.0}, 0.5), 64, 64), dir + "/d.pgm");
    PhantomSpec s;
    s.kind = PhantomKind::from_file;
    s.path = dir + "/d.pgm";
    const auto f = rasterize(s, 32, 32);
    EXPECT_EQ(f.nx(), 32u);
    EXPECT_NEAR(f.sum() / 1024.0, M_PI * 0.25 / 4.0, 0.03);
}
