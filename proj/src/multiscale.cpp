#include "vbm3d/multiscale.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "vbm3d/errors.hpp"
#include "vbm3d/transforms.hpp"

namespace vbm3d {

namespace {

int half_up(int n) { return (n + 1) / 2; }

// Half-sample symmetric extension: ... 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
int mirror(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = M_PI * x;
    return std::sin(px) / px;
}

double lanczos3(double x) { return std::fabs(x) < 3.0 ? sinc(x) * sinc(x / 3.0) : 0.0; }

// Decimation taps k3(j/2)/2 for j = -5..5, normalized to unit sum.
const std::vector<double>& down_taps() {
    static const std::vector<double> taps = [] {
        std::vector<double> t(11);
        double sum = 0.0;
        for (int j = -5; j <= 5; j++) {
            t[j + 5] = lanczos3(j / 2.0) / 2.0;
            sum += t[j + 5];
        }
        for (double& v : t) v /= sum;
        return t;
    }();
    return taps;
}

// Interpolation taps k3(0.5 - o) for o = -2..3, normalized to unit sum;
// even output samples copy the input directly (k3 vanishes at integers).
const std::vector<double>& up_taps() {
    static const std::vector<double> taps = [] {
        std::vector<double> t(6);
        double sum = 0.0;
        for (int o = -2; o <= 3; o++) {
            t[o + 2] = lanczos3(0.5 - o);
            sum += t[o + 2];
        }
        for (double& v : t) v /= sum;
        return t;
    }();
    return taps;
}

void lanczos_down_1d(const double* in, int n, double* out) {
    const std::vector<double>& w = down_taps();
    const int m = half_up(n);
    for (int i = 0; i < m; i++) {
        double acc = 0.0;
        for (int j = -5; j <= 5; j++) acc += w[j + 5] * in[mirror(2 * i + j, n)];
        out[i] = acc;
    }
}

void lanczos_up_1d(const double* in, int n, double* out, int target) {
    const std::vector<double>& w = up_taps();
    for (int i = 0; 2 * i < target; i++) out[2 * i] = in[i];
    for (int i = 0; 2 * i + 1 < target; i++) {
        double acc = 0.0;
        for (int o = -2; o <= 3; o++) acc += w[o + 2] * in[mirror(i + o, n)];
        out[2 * i + 1] = acc;
    }
}

void gaussian_1d(const double* in, int n, double* out, const std::vector<double>& taps) {
    const int r = static_cast<int>(taps.size()) / 2;
    for (int i = 0; i < n; i++) {
        double acc = 0.0;
        for (int j = -r; j <= r; j++) acc += taps[j + r] * in[mirror(i + j, n)];
        out[i] = acc;
    }
}

// Applies a 1D operation to every row, then every column, with transposes so
// the op only ever sees contiguous data.
template <typename Op>
void separable_2d(std::vector<double>& img, int w, int h, int out_w, int out_h, Op op) {
    std::vector<double> tmp(static_cast<std::size_t>(out_w) * h);
    std::vector<double> row_in(w), row_out(out_w);
    for (int y = 0; y < h; y++) {
        std::copy(img.begin() + static_cast<std::size_t>(y) * w,
                  img.begin() + static_cast<std::size_t>(y) * w + w, row_in.begin());
        op(row_in.data(), w, row_out.data(), out_w);
        std::copy(row_out.begin(), row_out.end(), tmp.begin() + static_cast<std::size_t>(y) * out_w);
    }
    std::vector<double> col_in(h), col_out(out_h);
    img.assign(static_cast<std::size_t>(out_w) * out_h, 0.0);
    for (int x = 0; x < out_w; x++) {
        for (int y = 0; y < h; y++) col_in[y] = tmp[static_cast<std::size_t>(y) * out_w + x];
        op(col_in.data(), h, col_out.data(), out_h);
        for (int y = 0; y < out_h; y++) img[static_cast<std::size_t>(y) * out_w + x] = col_out[y];
    }
}

void frame_to_double(const Video& v, int t, std::vector<double>& buf) {
    const float* f = v.frame(t);
    buf.resize(v.frame_size());
    for (std::size_t i = 0; i < buf.size(); i++) buf[i] = f[i];
}

void double_to_frame(const std::vector<double>& buf, Video& v, int t) {
    float* f = v.frame(t);
    for (std::size_t i = 0; i < buf.size(); i++) f[i] = static_cast<float>(buf[i]);
}

Video dct_resample(const Video& v, int out_w, int out_h) {
    Video out(out_w, out_h, v.frames);
    // Exact-ratio amplitude renormalization keeps constants fixed for odd dims too.
    const double renorm = std::sqrt(static_cast<double>(out_w) * out_h /
                                    (static_cast<double>(v.width) * v.height));
    std::vector<double> buf, spec(static_cast<std::size_t>(v.width) * v.height);
    std::vector<double> spec_out(static_cast<std::size_t>(out_w) * out_h, 0.0);
    std::vector<double> pix(static_cast<std::size_t>(out_w) * out_h);
    for (int t = 0; t < v.frames; t++) {
        frame_to_double(v, t, buf);
        dct_2d(buf.data(), spec.data(), v.width, v.height, false);
        std::fill(spec_out.begin(), spec_out.end(), 0.0);
        const int cw = std::min(v.width, out_w), ch = std::min(v.height, out_h);
        for (int y = 0; y < ch; y++)
            for (int x = 0; x < cw; x++)
                spec_out[static_cast<std::size_t>(y) * out_w + x] =
                    spec[static_cast<std::size_t>(y) * v.width + x];
        dct_2d(spec_out.data(), pix.data(), out_w, out_h, true);
        for (double& p : pix) p *= renorm;
        double_to_frame(pix, out, t);
    }
    return out;
}

}  // namespace

void PyramidKind::validate() const {
    if (scales < 1) throw ConfigError("pyramid: scales must be >= 1");
    if (!(frec >= 0.0)) throw ConfigError("pyramid: frec must be >= 0");
    if (kind == PyramidBase::kDct && frec > 1.0)
        throw ConfigError("pyramid: dct frec must be in [0, 1]");
}

Video ms_downscale(const Video& v, PyramidBase kind) {
    if (v.width < 2 || v.height < 2) throw ConfigError("ms_downscale: frame too small to halve");
    const int out_w = half_up(v.width), out_h = half_up(v.height);
    if (kind == PyramidBase::kDct) return dct_resample(v, out_w, out_h);
    Video out(out_w, out_h, v.frames);
    std::vector<double> buf;
    for (int t = 0; t < v.frames; t++) {
        frame_to_double(v, t, buf);
        separable_2d(buf, v.width, v.height, out_w, out_h,
                     [](const double* in, int n, double* o, int) { lanczos_down_1d(in, n, o); });
        double_to_frame(buf, out, t);
    }
    return out;
}

Video ms_upscale(const Video& v, PyramidBase kind, int target_w, int target_h) {
    if (half_up(target_w) != v.width || half_up(target_h) != v.height)
        throw ConfigError("ms_upscale: target dims do not halve back to the input dims");
    if (kind == PyramidBase::kDct) return dct_resample(v, target_w, target_h);
    Video out(target_w, target_h, v.frames);
    std::vector<double> buf;
    for (int t = 0; t < v.frames; t++) {
        frame_to_double(v, t, buf);
        separable_2d(buf, v.width, v.height, target_w, target_h,
                     [](const double* in, int n, double* o, int m) { lanczos_up_1d(in, n, o, m); });
        double_to_frame(buf, out, t);
    }
    return out;
}

Video ms_lowpass(const Video& v, PyramidBase kind, double frec) {
    if (kind == PyramidBase::kLanczos) {
        if (frec == 0.0) return v;
        const int r = std::max(1, static_cast<int>(std::ceil(4.0 * frec)));
        std::vector<double> taps(static_cast<std::size_t>(2 * r + 1));
        double sum = 0.0;
        for (int j = -r; j <= r; j++) {
            taps[j + r] = std::exp(-0.5 * (j / frec) * (j / frec));
            sum += taps[j + r];
        }
        for (double& t : taps) t /= sum;
        Video out(v.width, v.height, v.frames);
        std::vector<double> buf;
        for (int t = 0; t < v.frames; t++) {
            frame_to_double(v, t, buf);
            separable_2d(buf, v.width, v.height, v.width, v.height,
                         [&](const double* in, int n, double* o, int) { gaussian_1d(in, n, o, taps); });
            double_to_frame(buf, out, t);
        }
        return out;
    }

    // DCT: keep coefficient (x, y) iff max(y/h, x/w) < frec.
    Video out(v.width, v.height, v.frames);
    std::vector<double> buf, spec(static_cast<std::size_t>(v.width) * v.height);
    for (int t = 0; t < v.frames; t++) {
        frame_to_double(v, t, buf);
        dct_2d(buf.data(), spec.data(), v.width, v.height, false);
        for (int y = 0; y < v.height; y++)
            for (int x = 0; x < v.width; x++) {
                const double fy = static_cast<double>(y) / v.height;
                const double fx = static_cast<double>(x) / v.width;
                if (std::max(fx, fy) >= frec) spec[static_cast<std::size_t>(y) * v.width + x] = 0.0;
            }
        dct_2d(spec.data(), buf.data(), v.width, v.height, true);
        double_to_frame(buf, out, t);
    }
    return out;
}

Video ms_recompose(const std::vector<Video>& levels, PyramidBase kind, double frec) {
    if (levels.empty()) throw ConfigError("ms_recompose: no levels");
    for (std::size_t s = 0; s + 1 < levels.size(); s++) {
        if (levels[s + 1].width != half_up(levels[s].width) ||
            levels[s + 1].height != half_up(levels[s].height) ||
            levels[s + 1].frames != levels[s].frames)
            throw ConfigError("ms_recompose: level dims are not a halving chain");
    }
    Video acc = levels.back();
    for (int s = static_cast<int>(levels.size()) - 2; s >= 0; s--) {
        const Video& fine = levels[s];
        const Video own = ms_upscale(ms_lowpass(ms_downscale(fine, kind), kind, frec), kind,
                                     fine.width, fine.height);
        const Video coarse = ms_upscale(ms_lowpass(acc, kind, frec), kind, fine.width, fine.height);
        Video next(fine.width, fine.height, fine.frames);
        for (std::size_t i = 0; i < next.data.size(); i++)
            next.data[i] = static_cast<float>(static_cast<double>(fine.data[i]) - own.data[i] +
                                              coarse.data[i]);
        acc = std::move(next);
    }
    return acc;
}

double ms_sigma_factor(PyramidBase kind, int fine_w, int fine_h) {
    if (kind == PyramidBase::kDct) {
        const double coarse = static_cast<double>(half_up(fine_w)) * half_up(fine_h);
        return std::sqrt(coarse / (static_cast<double>(fine_w) * fine_h));
    }
    const std::vector<double>& w = down_taps();
    double l2sq = 0.0;
    for (const double t : w) l2sq += t * t;
    return l2sq;  // sqrt(l2sq) per axis, two axes per level
}

FlowField ms_downscale_flow(const FlowField& f) {
    FlowField out;
    out.width = half_up(f.width);
    out.height = half_up(f.height);
    out.direction = f.direction;
    out.u.resize(static_cast<std::size_t>(out.width) * out.height);
    out.v.resize(out.u.size());
    for (int y = 0; y < out.height; y++)
        for (int x = 0; x < out.width; x++) {
            const std::size_t i = static_cast<std::size_t>(y) * out.width + x;
            out.u[i] = 0.5f * f.u_at(2 * x, 2 * y);
            out.v[i] = 0.5f * f.v_at(2 * x, 2 * y);
        }
    return out;
}

FlowSequence ms_downscale_flows(const FlowSequence& flows) {
    FlowSequence out;
    out.forward.reserve(flows.forward.size());
    out.backward.reserve(flows.backward.size());
    for (const FlowField& f : flows.forward) out.forward.push_back(ms_downscale_flow(f));
    for (const FlowField& f : flows.backward) out.backward.push_back(ms_downscale_flow(f));
    return out;
}

Video ms_denoise(const Video& v, double sigma, const ParamProfile& p, const PipelineMode& mode,
                 const PyramidKind& pyr) {
    pyr.validate();
    p.validate();
    if (pyr.scales == 1) return denoise(v, sigma, p, mode).final;

    // Feasibility sweep: every level must fit a patch of both steps, and every
    // level that still gets halved must have dims >= 2.
    const int kmax = std::max(p.step1.patch.k, p.step2.patch.k);
    int feasible = 1;
    {
        int w = v.width, h = v.height;
        while (feasible < pyr.scales && std::min(w, h) >= 2) {
            w = half_up(w);
            h = half_up(h);
            if (std::min(w, h) < kmax) break;
            feasible++;
        }
    }
    if (feasible < pyr.scales)
        throw ConfigError("ms_denoise: " + std::to_string(pyr.scales) + " scales infeasible for " +
                          std::to_string(v.width) + "x" + std::to_string(v.height) +
                          " frames with patch size " + std::to_string(kmax) + " (at most " +
                          std::to_string(feasible) + ")");

    std::vector<Video> noisy_levels;
    noisy_levels.reserve(pyr.scales);
    noisy_levels.push_back(v);
    std::vector<FlowSequence> level_flows;
    if (mode.guided && mode.flows) level_flows.push_back(*mode.flows);
    for (int s = 1; s < pyr.scales; s++) {
        noisy_levels.push_back(ms_downscale(noisy_levels[s - 1], pyr.kind));
        if (!level_flows.empty()) level_flows.push_back(ms_downscale_flows(level_flows[s - 1]));
    }

    std::vector<Video> denoised;
    denoised.reserve(pyr.scales);
    double level_sigma = sigma;
    for (int s = 0; s < pyr.scales; s++) {
        PipelineMode level_mode = mode;
        if (!level_flows.empty()) level_mode.flows = &level_flows[s];
        denoised.push_back(denoise(noisy_levels[s], level_sigma, p, level_mode).final);
        if (s + 1 < pyr.scales)
            level_sigma *= ms_sigma_factor(pyr.kind, noisy_levels[s].width, noisy_levels[s].height);
    }
    return ms_recompose(denoised, pyr.kind, pyr.frec);
}

}  // namespace vbm3d
