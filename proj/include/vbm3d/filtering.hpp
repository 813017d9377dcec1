#pragma once

#include <vector>

#include "vbm3d/transforms.hpp"
#include "vbm3d/video.hpp"

namespace vbm3d {

// Separable Kaiser taper over the k x k patch footprint, peak 1 at the center.
struct KaiserWindow {
    int k = 0;
    double beta = 0.0;
    std::vector<double> values;  // k*k, row-major

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * k + x]; }
};

// Zeroth-order modified Bessel function of the first kind, by series expansion
// (terms added until below 1e-18 relative).
double bessel_i0(double x);

KaiserWindow kaiser_window(int k, double beta);

// Output of one collaborative-filtering pass over a group.
struct ShrinkResult {
    GroupStack stack;          // filtered patches (pixel domain)
    double weight = 0.0;       // aggregation weight
    long retained = 0;         // hard threshold: kept coefficient count (N_hard)
    double alpha_energy = 0.0; // Wiener: sum of squared attenuations
};

// Hard thresholding: transform, zero coefficients with |c| <= lambda3d*sigma
// except the dc_mask positions, inverse transform.
// weight = 1 / (max(sigma^2, eps) * N_hard).
ShrinkResult ht_shrink(const GroupStack& g, TransformId id, double sigma, double lambda3d,
                       DcMaskMode dc_mode = DcMaskMode::kGroupDc);

// Empirical Wiener filtering: attenuation alpha = o^2/(o^2 + sigma^2) computed
// from the oracle spectrum, applied to every noisy coefficient (DC included).
// weight = 1 / (max(sigma^2, eps) * max(sum alpha^2, eps)).
ShrinkResult wiener_shrink(const GroupStack& g_noisy, const GroupStack& g_oracle, TransformId id,
                           double sigma);

// Weighted-sum accumulators for overlapping patch estimates.
struct AggBuffer {
    int width = 0, height = 0, frames = 0;
    std::vector<double> num, den;

    AggBuffer() = default;
    AggBuffer(int w, int h, int f);
};

// num += weight*K*value, den += weight*K over every patch footprint of the
// result. For kt=2 the same 2D window is applied to both temporal slices.
void aggregate(AggBuffer& buf, const ShrinkResult& result, const KaiserWindow& window);

// num/den where covered; uncovered pixels copy from fallback.
Video normalize(const AggBuffer& buf, const Video& fallback);

}  // namespace vbm3d
