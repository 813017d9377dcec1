#include "vbm3d/video.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "vbm3d/errors.hpp"

namespace vbm3d {

Video::Video(int w, int h, int f, float fill) : width(w), height(h), frames(f) {
    if (w < 1 || h < 1 || f < 1) throw ConfigError("video dimensions must be positive");
    data.assign(static_cast<std::size_t>(w) * h * f, fill);
}

double GaussianRng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // 53-bit uniforms; u1 is in (0,1] so the logarithm stays finite.
    constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53
    constexpr double kTwoPi = 6.283185307179586476925287;
    const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * kInv53;
    const double u2 = static_cast<double>(gen_() >> 11) * kInv53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = kTwoPi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

Video add_awgn(const Video& u, const NoiseSpec& spec) {
    Video v = u;
    if (spec.sigma == 0.0) return v;
    GaussianRng rng(spec.seed);
    for (float& s : v.data) s = static_cast<float>(s + spec.sigma * rng.normal());
    return v;
}

double psnr(const Video& a, const Video& b, double peak) {
    if (!a.same_dims(b)) throw ConfigError("psnr: dimension mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.data.size(); i++) {
        const double d = static_cast<double>(a.data[i]) - b.data[i];
        sum += d * d;
    }
    const double mse = sum / static_cast<double>(a.data.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

}  // namespace vbm3d
