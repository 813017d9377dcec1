#include <cstdint>
#include <fstream>
#include <string>

#include "doctest.h"
#include "helpers.hpp"
#include "vbm3d/errors.hpp"
#include "vbm3d/video.hpp"
#include "vbm3d/video_io.hpp"

using namespace vbm3d;

namespace {

std::string tmp(const std::string& name) { return testutil::temp_dir() + "/" + name; }

Video integer_video(int w, int h, int f, std::uint32_t seed) {
    Video v = testutil::random_video(w, h, f, seed);
    for (float& s : v.data) s = static_cast<float>(static_cast<int>(s));
    return v;
}

}  // namespace

TEST_CASE("format_index expands exactly one integer conversion") {
    CHECK(format_index("f%03d.png", 7) == "f007.png");
    CHECK(format_index("%d", 12) == "12");
    CHECK(format_index("a%04u_b.pgm", 3) == "a0003_b.pgm");
    CHECK(format_index("pre%%x_%02i.pfm", 5) == "pre%x_05.pfm");
    CHECK_THROWS_AS(format_index("noconv.png", 0), ConfigError);
    CHECK_THROWS_AS(format_index("two%d_%d.png", 0), ConfigError);
    CHECK_THROWS_AS(format_index("bad%s.png", 0), ConfigError);
    CHECK_THROWS_AS(format_index("float%f.png", 0), ConfigError);
    CHECK_THROWS_AS(format_index("only%%.png", 0), ConfigError);
}

TEST_CASE("png sequence round-trips integer videos") {
    const Video v = integer_video(17, 13, 10, 50);
    save_sequence(v, tmp("rt_%03d.png"));
    const Video r = load_sequence(tmp("rt_%03d.png"), 0, 9);
    CHECK(r.frames == 10);
    CHECK(r.width == 17);
    CHECK(r.height == 13);
    CHECK(testutil::max_abs_diff(v, r) == 0.0);
}

TEST_CASE("single-frame range loads one frame") {
    const Video v = integer_video(8, 8, 5, 51);
    save_sequence(v, tmp("single_%d.png"));
    const Video r = load_sequence(tmp("single_%d.png"), 3, 3);
    CHECK(r.frames == 1);
    for (int y = 0; y < 8; y++)
        for (int x = 0; x < 8; x++) CHECK(r.at(x, y, 0) == v.at(x, y, 3));
}

TEST_CASE("pgm sequence round-trips integer videos") {
    const Video v = integer_video(9, 6, 3, 52);
    save_sequence(v, tmp("rt_%d.pgm"));
    const Video r = load_sequence(tmp("rt_%d.pgm"), 0, 2);
    CHECK(testutil::max_abs_diff(v, r) == 0.0);
}

TEST_CASE("pfm is a lossless float container") {
    Video v = testutil::random_video(11, 7, 4, 53, -100.f, 400.f);
    v.at(0, 0, 0) = -3.25f;
    v.at(1, 0, 0) = 312.5f;
    save_sequence(v, tmp("rt_%d.pfm"));
    const Video r = load_sequence(tmp("rt_%d.pfm"), 0, 3);
    CHECK(v.data == r.data);
}

TEST_CASE("8-bit export clamps and rounds") {
    Video v(4, 1, 1);
    v.at(0, 0, 0) = 300.f;
    v.at(1, 0, 0) = -4.f;
    v.at(2, 0, 0) = 127.6f;
    v.at(3, 0, 0) = 12.f;
    for (const char* pat : {"clamp_%d.png", "clamp_%d.pgm"}) {
        save_sequence(v, tmp(pat));
        const Video r = load_sequence(tmp(pat), 0, 0);
        CHECK(r.at(0, 0, 0) == 255.f);
        CHECK(r.at(1, 0, 0) == 0.f);
        CHECK(r.at(2, 0, 0) == 128.f);
        CHECK(r.at(3, 0, 0) == 12.f);
    }
}

TEST_CASE("16-bit pgm samples are widened without rescaling") {
    std::ofstream out(tmp("wide_0.pgm"), std::ios::binary);
    out << "P5\n2 1\n65535\n";
    const unsigned char bytes[4] = {0x01, 0x00, 0xFF, 0xFE};  // big-endian 256, 65534
    out.write(reinterpret_cast<const char*>(bytes), 4);
    out.close();
    const Video r = load_sequence(tmp("wide_%d.pgm"), 0, 0);
    CHECK(r.at(0, 0, 0) == 256.f);
    CHECK(r.at(1, 0, 0) == 65534.f);
}

TEST_CASE("pgm comments and whitespace are tolerated") {
    std::ofstream out(tmp("cmt_0.pgm"), std::ios::binary);
    out << "P5 # comment after magic\n# full comment line\n 3\t1 \n255\n";
    const unsigned char bytes[3] = {7, 8, 9};
    out.write(reinterpret_cast<const char*>(bytes), 3);
    out.close();
    const Video r = load_sequence(tmp("cmt_%d.pgm"), 0, 0);
    CHECK(r.at(0, 0, 0) == 7.f);
    CHECK(r.at(2, 0, 0) == 9.f);
}

TEST_CASE("missing frame file raises an io error naming the file") {
    const Video v = integer_video(4, 4, 2, 54);
    save_sequence(v, tmp("gap_%d.png"));
    CHECK_THROWS_AS(load_sequence(tmp("gap_%d.png"), 0, 5), IoError);
    try {
        load_sequence(tmp("gap_%d.png"), 0, 5);
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("gap_2") != std::string::npos);
    }
}

TEST_CASE("mismatched frame dimensions raise a format error") {
    save_sequence(Video(6, 6, 1, 1.f), tmp("mix_%d.png"));
    save_sequence(Video(5, 6, 1, 1.f), tmp("mix_onewide_%d.png"));
    std::filesystem::copy_file(tmp("mix_onewide_0.png"), tmp("mix_1.png"),
                               std::filesystem::copy_options::overwrite_existing);
    CHECK_THROWS_AS(load_sequence(tmp("mix_%d.png"), 0, 1), FormatError);
}

TEST_CASE("unsupported save extension is a config error") {
    const Video v(2, 2, 1);
    CHECK_THROWS_AS(save_sequence(v, tmp("bad_%d.tiff")), ConfigError);
    CHECK_THROWS_AS(save_sequence(v, tmp("noext_%d")), ConfigError);
}

TEST_CASE("save_sequence starts numbering at the given first index") {
    const Video v = integer_video(4, 3, 2, 55);
    save_sequence(v, tmp("offs_%02d.png"), 7);
    const Video r = load_sequence(tmp("offs_%02d.png"), 7, 8);
    CHECK(testutil::max_abs_diff(v, r) == 0.0);
}

TEST_CASE("format detection is by content, not extension") {
    const Video v = integer_video(5, 4, 1, 56);
    save_sequence(v, tmp("act_png_%d.pgm"));  // pgm bytes...
    std::filesystem::rename(tmp("act_png_0.pgm"), tmp("act_png_0.png"));  // ...png name
    const Video r = load_sequence(tmp("act_png_%d.png"), 0, 0);
    CHECK(testutil::max_abs_diff(v, r) == 0.0);
}
