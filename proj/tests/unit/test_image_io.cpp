#include <gtest/gtest.h>

#include <cstring>
#include <fstream>

#include "emholo/image_io.hpp"
#include "emholo/log.hpp"
#include "test_support.hpp"

using namespace emholo;
namespace fs = std::filesystem;

namespace {

class ImageIo : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("emholo_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path file(const std::string& name) const { return dir_ / name; }

    void write_raw(const std::string& name, const std::string& bytes) const {
        std::ofstream os(file(name), std::ios::binary);
        os << bytes;
    }

    fs::path dir_;
};

RealGrid2D float_grid(std::size_t w, std::size_t h, unsigned seed) {
    auto g = fixtures::random_real(w, h, seed, -3.0, 3.0, 2e-6);
    for (auto& v : g) v = static_cast<double>(static_cast<float>(v));
    return g;
}

} // namespace

TEST_F(ImageIo, PfmRoundTripIsBitIdentical) {
    const auto g = float_grid(13, 7, 1);
    ImageMeta meta;
    meta.wavelength = 532e-9;
    meta.pitch_x = 2e-6;
    meta.pitch_y = 2e-6;
    save_pfm(file("a.pfm"), g, meta);
    const auto loaded = load_image(file("a.pfm"));
    EXPECT_TRUE(loaded.has_sidecar);
    EXPECT_EQ(loaded.grid.storage(), g.storage());
    EXPECT_EQ(loaded.meta.wavelength, 532e-9);
    EXPECT_EQ(loaded.grid.pitch_x(), 2e-6);
    EXPECT_TRUE(fs::exists(sidecar_path(file("a.pfm"))));
}

TEST_F(ImageIo, PfmReadsBigEndian) {
    std::string data = "Pf\n2 2\n1.0\n";
    const float values[4] = {1.0f, 2.0f, 3.0f, 4.0f};
    for (float v : values) {
        unsigned char b[4];
        std::memcpy(b, &v, 4);
        for (int i = 3; i >= 0; --i) data.push_back(static_cast<char>(b[i]));
    }
    write_raw("be.pfm", data);
    set_warning_sink([](std::string_view) {});
    const auto img = load_image(file("be.pfm"));
    set_warning_sink(nullptr);
    // rows are stored bottom first
    EXPECT_EQ(img.grid(0, 1), 1.0);
    EXPECT_EQ(img.grid(1, 1), 2.0);
    EXPECT_EQ(img.grid(0, 0), 3.0);
    EXPECT_EQ(img.grid(1, 0), 4.0);
}

TEST_F(ImageIo, PgmSixteenBitQuantization) {
    const auto g = fixtures::random_real(20, 11, 2, 0.5, 1.5, 1.12e-6);
    save_pgm(file("a.pgm"), g, meta_for(g.geometry(), 675e-9), 16);
    const auto loaded = load_image(file("a.pgm"));
    const double range = max_value(g) - min_value(g);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_LE(std::fabs(loaded.grid[i] - g[i]) / range, 1.0 / 65535);
}

TEST_F(ImageIo, PgmEightBit) {
    const auto g = fixtures::random_real(9, 9, 3, 0.0, 1.0);
    save_pgm(file("b.pgm"), g, meta_for(g.geometry(), 675e-9), 8);
    const auto loaded = load_image(file("b.pgm"));
    const double range = max_value(g) - min_value(g);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_LE(std::fabs(loaded.grid[i] - g[i]) / range, 0.5 / 255 + 1e-12);
}

TEST_F(ImageIo, MissingSidecarUsesDefaultsAndWarns) {
    save_pfm(file("c.pfm"), float_grid(4, 4, 4), meta_for(Geometry{4, 4, 3e-6, 3e-6}, 500e-9));
    fs::remove(sidecar_path(file("c.pfm")));
    std::vector<std::string> warnings;
    set_warning_sink([&](std::string_view m) { warnings.emplace_back(m); });
    const auto img = load_image(file("c.pfm"));
    set_warning_sink(nullptr);
    EXPECT_FALSE(img.has_sidecar);
    EXPECT_EQ(img.meta.wavelength, 675e-9);
    EXPECT_EQ(img.meta.pitch_x, 1.12e-6);
    EXPECT_EQ(img.grid.pitch_x(), 1.12e-6);
    EXPECT_EQ(warnings.size(), 1u);
}

TEST_F(ImageIo, RejectsMalformedHeaders) {
    write_raw("bad1.pfm", "P6\n2 2\n255\n");
    write_raw("bad2.pfm", "PF\n2 2\n-1.0\n");
    write_raw("bad3.pfm", "Pf\n2 x\n-1.0\n");
    write_raw("bad4.pfm", "Pf\n2 2\n-1.0\n1234");
    write_raw("bad5.pfm", "Pf\n100000 100000\n-1.0\n");
    write_raw("bad6.pgm", "P5\n2 2\n70000\n");
    write_raw("bad7.pfm", "Pf\n2 2\n0\n");
    set_warning_sink([](std::string_view) {});
    for (const char* name : {"bad1.pfm", "bad2.pfm", "bad3.pfm", "bad4.pfm", "bad5.pfm", "bad6.pgm", "bad7.pfm"}) {
        EXPECT_THROW(load_image(file(name)), IoError) << name;
    }
    EXPECT_THROW(load_image(file("does_not_exist.pfm")), IoError);
    set_warning_sink(nullptr);
}

TEST_F(ImageIo, ErrorsNamePosition) {
    write_raw("trunc.pfm", "Pf\n2 2\n-1.0\n1234");
    set_warning_sink([](std::string_view) {});
    try {
        load_image(file("trunc.pfm"));
        FAIL();
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("byte"), std::string::npos);
    }
    set_warning_sink(nullptr);
}

TEST_F(ImageIo, RejectsNonFiniteSamples) {
    std::string data = "Pf\n2 2\n-1.0\n";
    const float values[4] = {1.0f, std::numeric_limits<float>::quiet_NaN(), 3.0f, 4.0f};
    data.append(reinterpret_cast<const char*>(values), sizeof(values));
    write_raw("nan.pfm", data);
    set_warning_sink([](std::string_view) {});
    try {
        load_image(file("nan.pfm"));
        FAIL();
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("(1, 1)"), std::string::npos) << e.what();
    }
    set_warning_sink(nullptr);
}

TEST_F(ImageIo, RejectsUnknownSidecarKey) {
    save_pfm(file("d.pfm"), float_grid(4, 4, 5), meta_for(Geometry{4, 4, 1e-6, 1e-6}, 675e-9));
    std::ofstream(sidecar_path(file("d.pfm")), std::ios::app) << "colour = red\n";
    EXPECT_THROW(load_image(file("d.pfm")), IoError);
}
