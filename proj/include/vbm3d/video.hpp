#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace vbm3d {

// Planar grayscale frame stack. Samples are float with nominal range [0,255];
// out-of-range values are representable (noise is never clamped internally).
// Storage is row-major within a frame, frames ordered by time.
struct Video {
    int width = 0;
    int height = 0;
    int frames = 0;
    std::vector<float> data;

    Video() = default;
    Video(int w, int h, int f, float fill = 0.f);

    std::size_t samples() const { return data.size(); }
    std::size_t frame_size() const { return static_cast<std::size_t>(width) * height; }

    float& at(int x, int y, int t) { return data[frame_size() * t + static_cast<std::size_t>(y) * width + x]; }
    float at(int x, int y, int t) const { return data[frame_size() * t + static_cast<std::size_t>(y) * width + x]; }

    float* frame(int t) { return data.data() + frame_size() * t; }
    const float* frame(int t) const { return data.data() + frame_size() * t; }

    bool same_dims(const Video& o) const {
        return width == o.width && height == o.height && frames == o.frames;
    }
};

struct NoiseSpec {
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

// Seedable portable Gaussian source: mt19937_64 driving a Box-Muller transform.
// Both pieces are fixed by standard/documented formulas, so the sample stream is
// reproducible across platforms and builds for a given seed.
class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : gen_(seed) {}

    // One standard normal draw.
    double normal();

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// v = u + n with n i.i.d. N(0, sigma^2). Samples are not clamped.
Video add_awgn(const Video& u, const NoiseSpec& spec);

// 10*log10(peak^2 / MSE) over all samples of all frames; +infinity when MSE = 0.
double psnr(const Video& a, const Video& b, double peak = 255.0);

}  // namespace vbm3d
