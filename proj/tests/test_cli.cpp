#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "vbm3d/flow.hpp"
#include "vbm3d/video.hpp"
#include "vbm3d/video_io.hpp"

using namespace vbm3d;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
};

// Runs the installed CLI binary with stdout captured and stderr discarded.
CliResult run_cli(const std::string& args) {
    static int counter = 0;
    const std::string capture = testutil::temp_dir() + "/cli_out_" + std::to_string(counter++);
    const std::string cmd =
        std::string(VBM3D_CLI_PATH) + " " + args + " > " + capture + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = rc < 0 ? rc : WEXITSTATUS(rc);
    std::ifstream in(capture, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    std::filesystem::remove(capture);
    return r;
}

std::string dir() {
    static const std::string d = [] {
        const std::string p = testutil::temp_dir() + "/cli";
        std::filesystem::create_directories(p);
        return p;
    }();
    return d;
}

std::string file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 16x16x3 clean ramp clip saved once for the fast tests
const std::string& clean_pattern() {
    static const std::string pat = [] {
        const std::string p = dir() + "/clean_%02d.png";
        save_sequence(testutil::smooth_video(16, 16, 3, 5), p, 0);
        return p;
    }();
    return pat;
}

}  // namespace

TEST_CASE("cli denoise produces loadable output and psnr lines") {
    const std::string out = dir() + "/den_%02d.png";
    const std::string basic = dir() + "/den_basic_%02d.png";
    const CliResult r = run_cli("denoise -i " + clean_pattern() + " -f 0 -l 2 -sigma 10 -o " + out +
                                " --basic " + basic + " --ref " + clean_pattern());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("psnr_basic ") != std::string::npos);
    CHECK(r.out.find("psnr_final ") != std::string::npos);
    const Video v = load_sequence(out, 0, 2);
    CHECK(v.width == 16);
    CHECK(v.frames == 3);
    CHECK(load_sequence(basic, 0, 2).frames == 3);
}

TEST_CASE("cli exit codes distinguish config and io failures") {
    CHECK(run_cli("denoise -i " + clean_pattern() + " -f 0 -l 2 -o " + dir() + "/x_%d.png")
              .exit_code == 1);  // missing -sigma
    CHECK(run_cli("denoise -i " + clean_pattern() + " -f 0 -l 2 -sigma -5 -o " + dir() +
                  "/x_%d.png")
              .exit_code == 1);  // negative sigma
    CHECK(run_cli("denoise -i " + dir() + "/missing_%d.png -f 0 -l 2 -sigma 10 -o " + dir() +
                  "/x_%d.png")
              .exit_code == 2);  // input does not exist
    CHECK(run_cli("denoise -i " + clean_pattern() + " -f 0 -l 2 -sigma 10 -o " + dir() +
                  "/x_%d.png --bogus")
              .exit_code == 1);  // unknown flag
    CHECK(run_cli("nonsense").exit_code == 1);
    CHECK(run_cli("help").exit_code == 0);
}

TEST_CASE("cli optical-flow flags are validated") {
    const std::string base = "denoise -i " + clean_pattern() + " -f 0 -l 2 -sigma 10 -o " + dir() +
                             "/of_%02d.png";
    CHECK(run_cli(base + " --of").exit_code == 1);             // no flow source
    CHECK(run_cli(base + " --fflow " + dir() + "/f_%d.flo").exit_code == 1);  // fflow without bflow
    CHECK(run_cli(base + " --fflow a_%d.flo --bflow b_%d.flo").exit_code == 1);  // flows without --of
    CHECK(run_cli(base + " --of --flow-bm").exit_code == 0);   // built-in fallback works
}

TEST_CASE("cli st and ms variants run") {
    const std::string base = "denoise -i " + clean_pattern() + " -f 0 -l 2 -sigma 10";
    CHECK(run_cli(base + " -o " + dir() + "/st_%02d.png --st").exit_code == 0);
    CHECK(run_cli(base + " -o " + dir() + "/ms_%02d.png --ms lanczos --scales 2 --frec 1").exit_code ==
          0);
    // scale count the clip cannot support
    CHECK(run_cli(base + " -o " + dir() + "/msbad_%02d.png --ms dct --scales 4").exit_code == 1);
    // --scales without --ms
    CHECK(run_cli(base + " -o " + dir() + "/msbad2_%02d.png --scales 2").exit_code == 1);
    // --basic cannot be combined with --ms
    CHECK(run_cli(base + " -o " + dir() + "/msbad3_%02d.png --ms dct --basic " + dir() +
                  "/b_%02d.png")
              .exit_code == 1);
}

TEST_CASE("cli noise is seed-reproducible") {
    const std::string out1 = dir() + "/noise_a_%02d.png";
    const std::string out2 = dir() + "/noise_b_%02d.png";
    CHECK(run_cli("noise -i " + clean_pattern() + " -f 0 -l 2 -sigma 20 -o " + out1 +
                  " --seed 7")
              .exit_code == 0);
    CHECK(run_cli("noise -i " + clean_pattern() + " -f 0 -l 2 -sigma 20 -o " + out2 +
                  " --seed 7")
              .exit_code == 0);
    for (int i = 0; i < 3; i++) {
        const std::string a = format_index(out1, i), b = format_index(out2, i);
        CHECK(file_bytes(a) == file_bytes(b));
        CHECK(!file_bytes(a).empty());
    }
    const std::string out3 = dir() + "/noise_c_%02d.png";
    CHECK(run_cli("noise -i " + clean_pattern() + " -f 0 -l 2 -sigma 20 -o " + out3 +
                  " --seed 8")
              .exit_code == 0);
    CHECK(file_bytes(format_index(out1, 0)) != file_bytes(format_index(out3, 0)));
}

TEST_CASE("cli psnr prints inf for identical inputs") {
    const CliResult r =
        run_cli("psnr -i " + clean_pattern() + " --ref " + clean_pattern() + " -f 0 -l 2");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("inf") != std::string::npos);
}

TEST_CASE("cli psnr matches the library on distinct inputs") {
    const std::string noisy = dir() + "/pn_%02d.png";
    REQUIRE(run_cli("noise -i " + clean_pattern() + " -f 0 -l 2 -sigma 20 -o " + noisy +
                    " --seed 3")
                .exit_code == 0);
    const CliResult r = run_cli("psnr -i " + noisy + " --ref " + clean_pattern() + " -f 0 -l 2");
    CHECK(r.exit_code == 0);
    const double got = std::stod(r.out);
    const Video a = load_sequence(noisy, 0, 2);
    const Video b = load_sequence(clean_pattern(), 0, 2);
    CHECK(got == doctest::Approx(psnr(a, b)).epsilon(1e-4));
}

TEST_CASE("cli flow-bm writes parseable flo files") {
    // static pair: flow must be zero everywhere
    Video v(24, 24, 2);
    const Video base = testutil::random_video(24, 24, 1, 9);
    std::copy(base.frame(0), base.frame(0) + base.frame_size(), v.frame(0));
    std::copy(base.frame(0), base.frame(0) + base.frame_size(), v.frame(1));
    const std::string pat = dir() + "/static_%d.png";
    save_sequence(v, pat, 0);
    const std::string fwd = dir() + "/flow_%d.flo";
    const std::string bwd = dir() + "/bflow_%d.flo";
    const CliResult r = run_cli("flow-bm -i " + pat + " -f 0 -l 1 -o " + fwd + " --backward-o " +
                                bwd + " --block 8 --radius 4");
    CHECK(r.exit_code == 0);
    const FlowField f = load_flo(format_index(fwd, 0));
    CHECK(f.width == 24);
    CHECK(f.height == 24);
    for (const float u : f.u) CHECK(u == 0.f);
    const FlowField b = load_flo(format_index(bwd, 1));
    for (const float u : b.u) CHECK(u == 0.f);
}

TEST_CASE("cli denoise accepts precomputed flows") {
    const int w = 16, h = 16, frames = 3;
    const FlowSequence flows = testutil::constant_flows(w, h, frames, 0.f, 0.f);
    const std::string fwd = dir() + "/pf_%d.flo", bwd = dir() + "/pb_%d.flo";
    for (int t = 0; t < frames - 1; t++) {
        write_flo(flows.forward[t], format_index(fwd, t));
        write_flo(flows.backward[t], format_index(bwd, t + 1));
    }
    const CliResult r = run_cli("denoise -i " + clean_pattern() + " -f 0 -l 2 -sigma 10 -o " +
                                dir() + "/pfout_%02d.png --of --fflow " + fwd + " --bflow " + bwd);
    CHECK(r.exit_code == 0);
}

TEST_CASE("cli bench emits a deterministic csv") {
    const std::string manifest = dir() + "/manifest.txt";
    {
        std::ofstream m(manifest);
        m << "# comment\n";
        m << "rampA " << clean_pattern() << " 0 2\n";
        m << "rampB clean_%02d.png 0 2\n";  // relative to the manifest's directory
        m << "missing " << dir() << "/no_such_%d.png 0 2\n";
    }
    const std::string args = "bench --manifest " + manifest +
                             " --sigmas 10,20 --modes plain,st --seed 5 --threads 2";
    const CliResult r1 = run_cli(args);
    CHECK(r1.exit_code == 0);
    const CliResult r2 = run_cli(args);
    CHECK(r2.out == r1.out);

    std::istringstream lines(r1.out);
    std::string header;
    REQUIRE(std::getline(lines, header));
    CHECK(header == "sigma,mode,rampA,rampB,missing,average");
    int rows = 0;
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        rows++;
        // exactly one NA cell: the missing sequence, not the relative-path one
        std::size_t nas = 0;
        for (std::size_t p = line.find("NA"); p != std::string::npos; p = line.find("NA", p + 1))
            nas++;
        CHECK(nas == 1);
    }
    CHECK(rows == 4);  // 2 sigmas x 2 modes
    CHECK(r1.out.find("10,plain,") != std::string::npos);
    CHECK(r1.out.find("20,st,") != std::string::npos);

    // single-thread run must produce byte-identical results
    const CliResult r3 = run_cli("bench --manifest " + manifest +
                                 " --sigmas 10,20 --modes plain,st --seed 5 --threads 1");
    CHECK(r3.out == r1.out);
}

TEST_CASE("cli bench rejects empty manifests and bad modes") {
    const std::string empty = dir() + "/empty.txt";
    std::ofstream(empty) << "# nothing\n";
    CHECK(run_cli("bench --manifest " + empty + " --sigmas 10").exit_code == 1);
    const std::string manifest = dir() + "/m2.txt";
    std::ofstream(manifest) << "rampA " << clean_pattern() << " 0 2\n";
    CHECK(run_cli("bench --manifest " + manifest + " --sigmas 10 --modes warp").exit_code == 1);
    CHECK(run_cli("bench --manifest " + manifest + " --sigmas abc").exit_code == 1);
}

TEST_CASE("cli profile files are honored") {
    const std::string prof = dir() + "/fast.cfg";
    {
        std::ofstream p(prof);
        p << "name fast\n";
        p << "step1.transform dct\n";
        p << "step1.max_matches 8\n";
        p << "step2.max_matches 8\n";
    }
    const CliResult r = run_cli("denoise -i " + clean_pattern() + " -f 0 -l 2 -sigma 10 -o " +
                                dir() + "/prof_%02d.png --profile " + prof);
    CHECK(r.exit_code == 0);
    CHECK(run_cli("denoise -i " + clean_pattern() + " -f 0 -l 2 -sigma 10 -o " + dir() +
                  "/prof2_%02d.png --profile " + dir() + "/nope.cfg")
              .exit_code == 2);
}

TEST_CASE("cli thread count does not change denoise bytes") {
    const std::string noisy = dir() + "/tn_%02d.png";
    REQUIRE(run_cli("noise -i " + clean_pattern() + " -f 0 -l 2 -sigma 15 -o " + noisy +
                    " --seed 21")
                .exit_code == 0);
    const std::string o1 = dir() + "/t1_%02d.png", o4 = dir() + "/t4_%02d.png";
    CHECK(run_cli("denoise -i " + noisy + " -f 0 -l 2 -sigma 15 -o " + o1 + " --threads 1")
              .exit_code == 0);
    CHECK(run_cli("denoise -i " + noisy + " -f 0 -l 2 -sigma 15 -o " + o4 + " --threads 4")
              .exit_code == 0);
    for (int i = 0; i < 3; i++)
        CHECK(file_bytes(format_index(o1, i)) == file_bytes(format_index(o4, i)));
}
