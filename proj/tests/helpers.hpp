#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "vbm3d/flow.hpp"
#include "vbm3d/patch.hpp"
#include "vbm3d/search.hpp"
#include "vbm3d/video.hpp"

namespace testutil {

using vbm3d::Video;

// Uniform random samples in [lo, hi]; mt19937 so fixtures are reproducible.
inline Video random_video(int w, int h, int f, std::uint32_t seed, float lo = 0.f,
                          float hi = 255.f) {
    Video v(w, h, f);
    std::mt19937 gen(seed);
    std::uniform_real_distribution<float> dist(lo, hi);
    for (float& s : v.data) s = dist(gen);
    return v;
}

// Band-limited content: a few random sinusoids, values around mid-gray.
inline Video smooth_video(int w, int h, int f, std::uint32_t seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> ph(0.0, 6.28318530717958648);
    const double p1 = ph(gen), p2 = ph(gen), p3 = ph(gen);
    Video v(w, h, f);
    for (int t = 0; t < f; t++)
        for (int y = 0; y < h; y++)
            for (int x = 0; x < w; x++)
                v.at(x, y, t) = static_cast<float>(
                    128.0 + 45.0 * std::sin(0.13 * x + 0.4 * t + p1) * std::cos(0.11 * y + p2) +
                    30.0 * std::sin(0.05 * (x + y) + 0.2 * t + p3));
    return v;
}

// Smooth random texture tiled onto every frame with a per-frame integer
// translation (dx, dy), wrapping around the borders, so ground-truth motion is
// exactly constant.
inline Video translating_texture(int w, int h, int f, int dx, int dy, std::uint32_t seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<float> dist(0.f, 255.f);
    std::vector<float> tex(static_cast<std::size_t>(w) * h);
    for (float& s : tex) s = dist(gen);
    // Box-blur the raw noise a little so block matching has gradients to lock
    // onto; wrap-around keeps the translation exact.
    std::vector<float> blurred(tex.size());
    for (int y = 0; y < h; y++)
        for (int x = 0; x < w; x++) {
            float acc = 0.f;
            for (int by = -1; by <= 1; by++)
                for (int bx = -1; bx <= 1; bx++)
                    acc += tex[static_cast<std::size_t>((y + by + h) % h) * w + (x + bx + w) % w];
            blurred[static_cast<std::size_t>(y) * w + x] = acc / 9.f;
        }
    Video v(w, h, f);
    for (int t = 0; t < f; t++)
        for (int y = 0; y < h; y++)
            for (int x = 0; x < w; x++) {
                const int sx = ((x - dx * t) % w + w) % w;
                const int sy = ((y - dy * t) % h + h) % h;
                v.at(x, y, t) = blurred[static_cast<std::size_t>(sy) * w + sx];
            }
    return v;
}

// Constant flow fields covering an entire sequence (forward (dx,dy), backward
// (-dx,-dy)), e.g. the exact motion of translating_texture.
inline vbm3d::FlowSequence constant_flows(int w, int h, int frames, float dx, float dy) {
    vbm3d::FlowSequence flows;
    for (int t = 0; t + 1 < frames; t++) {
        vbm3d::FlowField fwd;
        fwd.width = w;
        fwd.height = h;
        fwd.direction = vbm3d::FlowDirection::kForward;
        fwd.u.assign(static_cast<std::size_t>(w) * h, dx);
        fwd.v.assign(static_cast<std::size_t>(w) * h, dy);
        vbm3d::FlowField bwd = fwd;
        bwd.direction = vbm3d::FlowDirection::kBackward;
        for (float& s : bwd.u) s = -dx;
        for (float& s : bwd.v) s = -dy;
        flows.forward.push_back(std::move(fwd));
        flows.backward.push_back(std::move(bwd));
    }
    return flows;
}

// Brute-force oracle for local_search: every in-bounds patch of the window,
// canonical sort, truncation to n_b.
inline vbm3d::MatchList brute_local_search(const Video& v, vbm3d::PatchCoord center,
                                           vbm3d::PatchCoord ref, int window, vbm3d::PatchSpec spec,
                                           int n_b, double d) {
    vbm3d::MatchList out;
    for (int y = 0; y + spec.k <= v.height; y++)
        for (int x = 0; x + spec.k <= v.width; x++) {
            if (x < center.x - (window - 1) / 2 || x > center.x + window / 2) continue;
            if (y < center.y - (window - 1) / 2 || y > center.y + window / 2) continue;
            const vbm3d::PatchCoord q{x, y, center.t};
            out.push_back({q, vbm3d::patch_distance(v, ref, q, spec, d)});
        }
    std::sort(out.begin(), out.end(), vbm3d::match_less);
    if (static_cast<int>(out.size()) > n_b) out.resize(n_b);
    return out;
}

// Long-double power series for the modified Bessel function I0, the oracle for
// the float/double implementation.
inline long double bessel_i0_ld(long double x) {
    const long double q = x * x / 4.0L;
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k < 500; k++) {
        term *= q / (static_cast<long double>(k) * k);
        sum += term;
        if (term < sum * 1e-25L) break;
    }
    return sum;
}

inline double max_abs_diff(const Video& a, const Video& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); i++)
        m = std::max(m, std::fabs(static_cast<double>(a.data[i]) - b.data[i]));
    return m;
}

template <typename T>
double max_abs_diff(const std::vector<T>& a, const std::vector<T>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); i++)
        m = std::max(m, std::fabs(static_cast<double>(a[i]) - static_cast<double>(b[i])));
    return m;
}

// Per-process scratch directory for tests that touch the filesystem.
inline std::string temp_dir() {
    static const std::string dir = [] {
        namespace fs = std::filesystem;
        const fs::path p =
            fs::temp_directory_path() / ("vbm3d_tests_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p.string();
    }();
    return dir;
}

}  // namespace testutil
