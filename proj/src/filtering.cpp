#include "vbm3d/filtering.hpp"

#include <algorithm>
#include <cmath>

#include "vbm3d/errors.hpp"

namespace vbm3d {

namespace {

// Degenerate-sigma guard for the 1/sigma^2 weights.
constexpr double kSigmaEps = 1e-12;
// Degenerate all-zero-oracle guard for the 1/sum(alpha^2) Wiener weight.
constexpr double kAlphaEps = 1e-30;

}  // namespace

double bessel_i0(double x) {
    const double q = x * x / 4.0;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 1000; k++) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < sum * 1e-18) break;
    }
    return sum;
}

KaiserWindow kaiser_window(int k, double beta) {
    if (k < 1 || beta < 0.0) throw ConfigError("kaiser_window: invalid parameters");
    KaiserWindow w;
    w.k = k;
    w.beta = beta;
    std::vector<double> line(k, 1.0);
    if (k > 1) {
        double peak = 0.0;
        for (int i = 0; i < k; i++) {
            const double u = 2.0 * i / (k - 1) - 1.0;
            line[i] = bessel_i0(beta * std::sqrt(1.0 - u * u));
            peak = std::max(peak, line[i]);
        }
        for (double& v : line) v /= peak;  // peak 1 at the center samples
    }
    w.values.resize(static_cast<std::size_t>(k) * k);
    for (int y = 0; y < k; y++)
        for (int x = 0; x < k; x++) w.values[static_cast<std::size_t>(y) * k + x] = line[y] * line[x];
    return w;
}

ShrinkResult ht_shrink(const GroupStack& g, TransformId id, double sigma, double lambda3d,
                       DcMaskMode dc_mode) {
    ShrinkResult r;
    r.stack = g;
    forward_3d(r.stack, id);
    std::vector<char> exempt(r.stack.coeffs.size(), 0);
    for (std::size_t pos : dc_mask(g.spec, g.n, id, dc_mode)) exempt[pos] = 1;
    const double thr = lambda3d * sigma;
    long retained = 0;
    for (std::size_t i = 0; i < r.stack.coeffs.size(); i++) {
        if (exempt[i]) {  // DC positions are never thresholded and always counted
            retained++;
            continue;
        }
        if (std::fabs(r.stack.coeffs[i]) > thr)
            retained++;
        else
            r.stack.coeffs[i] = 0.0;
    }
    r.retained = retained;
    r.weight = 1.0 / (std::max(sigma * sigma, kSigmaEps) * static_cast<double>(retained));
    inverse_3d(r.stack, id);
    return r;
}

ShrinkResult wiener_shrink(const GroupStack& g_noisy, const GroupStack& g_oracle, TransformId id,
                           double sigma) {
    if (g_noisy.n != g_oracle.n || g_noisy.spec.k != g_oracle.spec.k ||
        g_noisy.spec.kt != g_oracle.spec.kt)
        throw ConfigError("wiener_shrink: stacks not congruent");
    ShrinkResult r;
    r.stack = g_noisy;
    GroupStack oracle = g_oracle;
    forward_3d(r.stack, id);
    forward_3d(oracle, id);
    const double s2 = sigma * sigma;
    double alpha_sq = 0.0;
    for (std::size_t i = 0; i < r.stack.coeffs.size(); i++) {
        const double o2 = oracle.coeffs[i] * oracle.coeffs[i];
        const double den = o2 + s2;
        const double alpha = den > 0.0 ? o2 / den : 0.0;
        r.stack.coeffs[i] *= alpha;
        alpha_sq += alpha * alpha;
    }
    r.alpha_energy = alpha_sq;
    r.weight = 1.0 / (std::max(s2, kSigmaEps) * std::max(alpha_sq, kAlphaEps));
    inverse_3d(r.stack, id);
    return r;
}

AggBuffer::AggBuffer(int w, int h, int f) : width(w), height(h), frames(f) {
    num.assign(static_cast<std::size_t>(w) * h * f, 0.0);
    den.assign(static_cast<std::size_t>(w) * h * f, 0.0);
}

void aggregate(AggBuffer& buf, const ShrinkResult& result, const KaiserWindow& window) {
    const GroupStack& g = result.stack;
    const int k = g.spec.k, kt = g.spec.kt;
    if (window.k != k) throw ConfigError("aggregate: window size mismatch");
    const std::size_t frame = static_cast<std::size_t>(buf.width) * buf.height;
    for (int i = 0; i < g.n; i++) {
        const PatchCoord c = g.coords[i];
        if (c.x < 0 || c.y < 0 || c.t < 0 || c.x + k > buf.width || c.y + k > buf.height ||
            c.t + kt > buf.frames)
            throw ConfigError("aggregate: patch footprint outside the buffer");
        const double* src = g.slice(i);
        for (int dt = 0; dt < kt; dt++)
            for (int dy = 0; dy < k; dy++) {
                const std::size_t base =
                    frame * (c.t + dt) + static_cast<std::size_t>(c.y + dy) * buf.width + c.x;
                const double* kw = window.values.data() + static_cast<std::size_t>(dy) * k;
                const double* val = src + (static_cast<std::size_t>(dt) * k + dy) * k;
                for (int dx = 0; dx < k; dx++) {
                    const double w = result.weight * kw[dx];
                    buf.num[base + dx] += w * val[dx];
                    buf.den[base + dx] += w;
                }
            }
    }
}

Video normalize(const AggBuffer& buf, const Video& fallback) {
    if (fallback.width != buf.width || fallback.height != buf.height || fallback.frames != buf.frames)
        throw ConfigError("normalize: fallback dimensions mismatch");
    Video out(buf.width, buf.height, buf.frames);
    for (std::size_t i = 0; i < out.data.size(); i++)
        out.data[i] = buf.den[i] > 0.0 ? static_cast<float>(buf.num[i] / buf.den[i]) : fallback.data[i];
    return out;
}

}  // namespace vbm3d
