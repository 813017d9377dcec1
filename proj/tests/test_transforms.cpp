#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "vbm3d/errors.hpp"
#include "vbm3d/transforms.hpp"

using namespace vbm3d;

namespace {

GroupStack random_stack(int k, int kt, int n, unsigned seed) {
    GroupStack g;
    g.spec = PatchSpec{k, kt};
    g.n = n;
    g.coords.assign(n, PatchCoord{0, 0, 0});
    g.coeffs.resize(g.slice_size() * n);
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> uni(-128.0, 384.0);
    for (double& c : g.coeffs) c = uni(gen);
    return g;
}

GroupStack constant_stack(int k, int kt, int n, double value) {
    GroupStack g;
    g.spec = PatchSpec{k, kt};
    g.n = n;
    g.coords.assign(n, PatchCoord{0, 0, 0});
    g.coeffs.assign(g.slice_size() * n, value);
    return g;
}

double l2_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (const double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("constant single patch concentrates in one DCT coefficient") {
    const double c = 3.25;
    GroupStack g = constant_stack(8, 1, 1, c);
    forward_3d(g, TransformId::kDct2d);
    CHECK(g.coeffs[0] == doctest::Approx(8.0 * c).epsilon(1e-13));
    for (std::size_t i = 1; i < g.coeffs.size(); i++)
        CHECK(std::fabs(g.coeffs[i]) < 1e-12);
}

TEST_CASE("two identical slices put all group energy into the Haar sum slice") {
    GroupStack g = random_stack(8, 1, 2, 17);
    std::copy(g.slice(0), g.slice(0) + g.slice_size(), g.slice(1));
    forward_3d(g, TransformId::kDct2d);
    for (std::size_t i = 0; i < g.slice_size(); i++)
        CHECK(std::fabs(g.slice(1)[i]) < 1e-10);
}

TEST_CASE("identical temporal planes zero the kt=2 difference plane") {
    GroupStack g = random_stack(8, 2, 4, 23);
    const int plane = 64;
    for (int s = 0; s < g.n; s++)
        std::copy(g.slice(s), g.slice(s) + plane, g.slice(s) + plane);
    forward_3d(g, TransformId::kDct2d);
    for (int s = 0; s < g.n; s++)
        for (int i = 0; i < plane; i++)
            CHECK(std::fabs(g.slice(s)[plane + i]) < 1e-10);
}

TEST_CASE("forward then inverse round-trips within 1e-8") {
    unsigned seed = 100;
    for (const int k : {7, 8})
        for (const int kt : {1, 2})
            for (const int n : {1, 2, 4, 8, 16})
                for (const TransformId id : {TransformId::kDct2d, TransformId::kBior15}) {
                    if (id == TransformId::kBior15 && k != 8) continue;
                    GroupStack g = random_stack(k, kt, n, seed++);
                    const std::vector<double> orig = g.coeffs;
                    forward_3d(g, id);
                    inverse_3d(g, id);
                    double err = 0.0;
                    for (std::size_t i = 0; i < orig.size(); i++)
                        err = std::max(err, std::fabs(orig[i] - g.coeffs[i]));
                    CHECK(err < 1e-8);
                }
}

TEST_CASE("orthonormal path preserves energy to 1e-10 relative") {
    unsigned seed = 900;
    for (const int k : {7, 8})
        for (const int kt : {1, 2})
            for (const int n : {1, 4, 16}) {
                GroupStack g = random_stack(k, kt, n, seed++);
                const double before = l2_norm(g.coeffs);
                forward_3d(g, TransformId::kDct2d);
                const double after = l2_norm(g.coeffs);
                CHECK(std::fabs(after - before) / before < 1e-10);
            }
}

TEST_CASE("transforms are linear") {
    GroupStack a = random_stack(8, 1, 4, 41);
    GroupStack b = random_stack(8, 1, 4, 42);
    for (const TransformId id : {TransformId::kDct2d, TransformId::kBior15}) {
        GroupStack combo = a;
        for (std::size_t i = 0; i < combo.coeffs.size(); i++)
            combo.coeffs[i] = 2.5 * a.coeffs[i] - 0.75 * b.coeffs[i];
        GroupStack fa = a, fb = b;
        forward_3d(fa, id);
        forward_3d(fb, id);
        forward_3d(combo, id);
        for (std::size_t i = 0; i < combo.coeffs.size(); i++) {
            const double want = 2.5 * fa.coeffs[i] - 0.75 * fb.coeffs[i];
            CHECK(combo.coeffs[i] == doctest::Approx(want).epsilon(1e-9));
        }
    }
}

TEST_CASE("inverse of a pure group-DC spectrum is a constant stack") {
    for (const TransformId id : {TransformId::kDct2d, TransformId::kBior15}) {
        GroupStack g = constant_stack(8, 1, 4, 0.0);
        const std::vector<std::size_t> mask = dc_mask(g.spec, g.n, id);
        REQUIRE(mask.size() == 1);
        g.coeffs[mask[0]] = 32.0;
        inverse_3d(g, id);
        // orthonormal DC basis value: 32 / sqrt(4 * 64) = 2 (bior shares it for constants)
        for (const double v : g.coeffs) CHECK(v == doctest::Approx(2.0).epsilon(1e-12));
    }
}

TEST_CASE("inverse of zero is zero") {
    GroupStack g = constant_stack(8, 2, 8, 0.0);
    inverse_3d(g, TransformId::kBior15);
    for (const double v : g.coeffs) CHECK(v == 0.0);
}

TEST_CASE("dc_mask marks exactly the support of a constant stack's spectrum") {
    for (const TransformId id : {TransformId::kDct2d, TransformId::kBior15})
        for (const int n : {1, 4, 16})
            for (const int kt : {1, 2}) {
                GroupStack g = constant_stack(8, kt, n, 5.0);
                forward_3d(g, id);
                std::vector<std::size_t> nonzero;
                for (std::size_t i = 0; i < g.coeffs.size(); i++)
                    if (std::fabs(g.coeffs[i]) > 1e-9) nonzero.push_back(i);
                const std::vector<std::size_t> mask = dc_mask(g.spec, n, id);
                REQUIRE(mask.size() == 1);
                CHECK(nonzero == mask);
            }
}

TEST_CASE("per-slice dc mask has one position per slice") {
    const std::vector<std::size_t> mask =
        dc_mask(PatchSpec{8, 1}, 4, TransformId::kDct2d, DcMaskMode::kPerSliceDc);
    REQUIRE(mask.size() == 4);
    for (int s = 0; s < 4; s++) CHECK(mask[s] == static_cast<std::size_t>(s) * 64);
}

TEST_CASE("bior rejects non-power-of-two patch sizes") {
    GroupStack g = random_stack(7, 1, 4, 3);
    CHECK_THROWS_AS(forward_3d(g, TransformId::kBior15), ConfigError);
    GroupStack h = random_stack(7, 1, 4, 5);
    CHECK_THROWS_AS(inverse_3d(h, TransformId::kBior15), ConfigError);
}

TEST_CASE("group size must be a power of two") {
    GroupStack g = random_stack(8, 1, 3, 4);
    g.coords.resize(3);
    CHECK_THROWS_AS(forward_3d(g, TransformId::kDct2d), ConfigError);
}

TEST_CASE("plain 2D DCT is orthonormal on arbitrary sizes") {
    std::mt19937 gen(77);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (const auto [w, h] : {std::pair{5, 9}, std::pair{16, 16}, std::pair{1, 7}}) {
        std::vector<double> img(static_cast<std::size_t>(w) * h);
        for (double& v : img) v = uni(gen);
        std::vector<double> spec(img.size()), back(img.size());
        dct_2d(img.data(), spec.data(), w, h, false);
        CHECK(std::fabs(l2_norm(spec) - l2_norm(img)) / l2_norm(img) < 1e-12);
        dct_2d(spec.data(), back.data(), w, h, true);
        for (std::size_t i = 0; i < img.size(); i++)
            CHECK(back[i] == doctest::Approx(img[i]).epsilon(1e-12));
    }
}

TEST_CASE("2D DCT maps a constant image to a single DC coefficient") {
    const int w = 6, h = 4;
    std::vector<double> img(w * h, 2.0), spec(w * h);
    dct_2d(img.data(), spec.data(), w, h, false);
    CHECK(spec[0] == doctest::Approx(2.0 * std::sqrt(24.0)).epsilon(1e-13));
    for (std::size_t i = 1; i < spec.size(); i++) CHECK(std::fabs(spec[i]) < 1e-12);
}

TEST_CASE("group coordinate ordering puts the reference first") {
    MatchList l;
    l.push_back({{1, 1, 0}, -3.0});
    l.push_back({{5, 2, 1}, 0.5});
    l.push_back({{2, 7, 2}, 4.0});
    const std::vector<PatchCoord> coords = group_coords(l, {5, 2, 1});
    REQUIRE(coords.size() == 3);
    CHECK(coords[0] == PatchCoord{5, 2, 1});
    CHECK(coords[1] == PatchCoord{1, 1, 0});
    CHECK(coords[2] == PatchCoord{2, 7, 2});
}

TEST_CASE("extract_group copies patch pixels slice-major") {
    Video v(8, 8, 2);
    for (int t = 0; t < 2; t++)
        for (int y = 0; y < 8; y++)
            for (int x = 0; x < 8; x++) v.at(x, y, t) = static_cast<float>(100 * t + 10 * y + x);
    const std::vector<PatchCoord> coords = {{1, 2, 0}, {3, 0, 0}};
    const GroupStack g = extract_group(v, coords, PatchSpec{2, 2});
    REQUIRE(g.n == 2);
    REQUIRE(g.coeffs.size() == 16);
    // slice 0, temporal plane 0: rows y=2..3 starting at x=1
    CHECK(g.coeffs[0] == 21.0);
    CHECK(g.coeffs[1] == 22.0);
    CHECK(g.coeffs[2] == 31.0);
    CHECK(g.coeffs[3] == 32.0);
    // slice 0, temporal plane 1: same window in frame 1
    CHECK(g.coeffs[4] == 121.0);
    // slice 1 starts at the second patch
    CHECK(g.coeffs[8] == 3.0);
    CHECK(g.coeffs[12] == 103.0);
}
