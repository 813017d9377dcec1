#include "vbm3d/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>

#include "vbm3d/errors.hpp"
#include "vbm3d/search.hpp"

namespace vbm3d {

namespace {

constexpr float kFloMagic = 202021.25f;

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// .flo files are little-endian; this code targets little-endian hosts.
template <typename T>
T read_le(std::FILE* f, const std::string& path) {
    T v;
    if (std::fread(&v, sizeof v, 1, f) != 1) throw FormatError(path + ": truncated .flo file");
    return v;
}

double clampd(double v, double lo, double hi) { return v < lo ? lo : (v > hi ? hi : v); }

}  // namespace

FlowField load_flo(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw IoError(path + ": cannot open");
    const float magic = read_le<float>(f.get(), path);
    if (magic != kFloMagic) throw FormatError(path + ": bad .flo magic");
    const std::int32_t w = read_le<std::int32_t>(f.get(), path);
    const std::int32_t h = read_le<std::int32_t>(f.get(), path);
    if (w < 1 || h < 1 || w > 1 << 20 || h > 1 << 20) throw FormatError(path + ": bad .flo dimensions");
    FlowField field;
    field.width = w;
    field.height = h;
    field.u.resize(static_cast<std::size_t>(w) * h);
    field.v.resize(field.u.size());
    std::vector<float> row(static_cast<std::size_t>(w) * 2);
    for (int y = 0; y < h; y++) {
        if (std::fread(row.data(), 4, row.size(), f.get()) != row.size())
            throw FormatError(path + ": truncated .flo raster");
        for (int x = 0; x < w; x++) {
            const float uu = row[2 * x], vv = row[2 * x + 1];
            if (!std::isfinite(uu) || !std::isfinite(vv))
                throw FormatError(path + ": non-finite flow value");
            field.u[static_cast<std::size_t>(y) * w + x] = uu;
            field.v[static_cast<std::size_t>(y) * w + x] = vv;
        }
    }
    return field;
}

void write_flo(const FlowField& f, const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError(path + ": cannot open for writing");
    const std::int32_t w = f.width, h = f.height;
    if (std::fwrite(&kFloMagic, 4, 1, fp.get()) != 1) throw IoError(path + ": short write");
    std::fwrite(&w, 4, 1, fp.get());
    std::fwrite(&h, 4, 1, fp.get());
    std::vector<float> row(static_cast<std::size_t>(w) * 2);
    for (int y = 0; y < h; y++) {
        for (int x = 0; x < w; x++) {
            row[2 * x] = f.u_at(x, y);
            row[2 * x + 1] = f.v_at(x, y);
        }
        if (std::fwrite(row.data(), 4, row.size(), fp.get()) != row.size())
            throw IoError(path + ": short write");
    }
}

FlowField upscale_flow(const FlowField& f, int factor, int target_w, int target_h) {
    if (factor < 1) throw ConfigError("upscale_flow: factor must be >= 1");
    // explicit targets must be the frame sizes this grid ceil-divides into
    if (target_w > 0 && (target_w + factor - 1) / factor != f.width)
        throw ConfigError("upscale_flow: target width does not match the flow grid");
    if (target_h > 0 && (target_h + factor - 1) / factor != f.height)
        throw ConfigError("upscale_flow: target height does not match the flow grid");
    FlowField out;
    out.width = target_w > 0 ? target_w : f.width * factor;
    out.height = target_h > 0 ? target_h : f.height * factor;
    out.direction = f.direction;
    out.u.resize(static_cast<std::size_t>(out.width) * out.height);
    out.v.resize(out.u.size());
    for (int y = 0; y < out.height; y++) {
        const double sy = clampd(static_cast<double>(y) / factor, 0.0, f.height - 1);
        const int y0 = static_cast<int>(sy);
        const int y1 = std::min(y0 + 1, f.height - 1);
        const double fy = sy - y0;
        for (int x = 0; x < out.width; x++) {
            const double sx = clampd(static_cast<double>(x) / factor, 0.0, f.width - 1);
            const int x0 = static_cast<int>(sx);
            const int x1 = std::min(x0 + 1, f.width - 1);
            const double fx = sx - x0;
            const std::size_t i = static_cast<std::size_t>(y) * out.width + x;
            const double u = (1 - fy) * ((1 - fx) * f.u_at(x0, y0) + fx * f.u_at(x1, y0)) +
                             fy * ((1 - fx) * f.u_at(x0, y1) + fx * f.u_at(x1, y1));
            const double v = (1 - fy) * ((1 - fx) * f.v_at(x0, y0) + fx * f.v_at(x1, y0)) +
                             fy * ((1 - fx) * f.v_at(x0, y1) + fx * f.v_at(x1, y1));
            out.u[i] = static_cast<float>(u * factor);
            out.v[i] = static_cast<float>(v * factor);
        }
    }
    return out;
}

std::vector<TrajPoint> trajectory(const FlowSequence& flows, PatchCoord start, int n_f, int patch_k) {
    if (flows.forward.size() != flows.backward.size())
        throw ConfigError("trajectory: forward/backward flow counts differ");
    const int frame_count = static_cast<int>(flows.forward.size()) + 1;
    if (start.t < 0 || start.t >= frame_count) throw ConfigError("trajectory: start frame out of range");
    std::vector<TrajPoint> pts;
    pts.push_back({start.t, static_cast<double>(start.x), static_cast<double>(start.y)});

    // Forward with forward flow, then backward with backward flow; the flow is
    // sampled at the rounded previous position, the position itself stays float
    // and is clamped to the valid patch domain.
    for (const int dir : {+1, -1}) {
        double px = start.x, py = start.y;
        for (int h = start.t + dir; h >= 0 && h < frame_count && std::abs(h - start.t) <= n_f; h += dir) {
            const FlowField& fl = dir > 0 ? flows.forward[h - 1] : flows.backward[h];
            const double max_x = static_cast<double>(fl.width - patch_k);
            const double max_y = static_cast<double>(fl.height - patch_k);
            const int sx = static_cast<int>(std::lround(clampd(px, 0.0, fl.width - 1.0)));
            const int sy = static_cast<int>(std::lround(clampd(py, 0.0, fl.height - 1.0)));
            px = clampd(px + fl.u_at(sx, sy), 0.0, max_x);
            py = clampd(py + fl.v_at(sx, sy), 0.0, max_y);
            pts.push_back({h, px, py});
        }
    }
    std::sort(pts.begin(), pts.end(), [](const TrajPoint& a, const TrajPoint& b) { return a.t < b.t; });
    return pts;
}

FlowField block_matching_flow(const Video& video, int src_t, int dst_t, int block, int radius) {
    if (src_t < 0 || src_t >= video.frames || dst_t < 0 || dst_t >= video.frames)
        throw ConfigError("block_matching_flow: frame index out of range");
    if (block < 1 || radius < 0) throw ConfigError("block_matching_flow: invalid parameters");
    const int w = video.width, h = video.height;
    FlowField out;
    out.width = w;
    out.height = h;
    out.direction = dst_t >= src_t ? FlowDirection::kForward : FlowDirection::kBackward;
    out.u.assign(static_cast<std::size_t>(w) * h, 0.f);
    out.v.assign(out.u.size(), 0.f);
    const float* a = video.frame(src_t);
    const float* b = video.frame(dst_t);

    for (int by = 0; by < h; by += block) {
        const int bh = std::min(block, h - by);
        for (int bx = 0; bx < w; bx += block) {
            const int bw = std::min(block, w - bx);
            double best_ssd = 0.0;
            int best_dx = 0, best_dy = 0;
            bool first = true;
            for (int dy = -radius; dy <= radius; dy++) {
                if (by + dy < 0 || by + dy + bh > h) continue;
                for (int dx = -radius; dx <= radius; dx++) {
                    if (bx + dx < 0 || bx + dx + bw > w) continue;
                    double ssd = 0.0;
                    for (int y = 0; y < bh; y++) {
                        const float* ra = a + static_cast<std::size_t>(by + y) * w + bx;
                        const float* rb = b + static_cast<std::size_t>(by + dy + y) * w + bx + dx;
                        for (int x = 0; x < bw; x++) {
                            const double diff = static_cast<double>(ra[x]) - rb[x];
                            ssd += diff * diff;
                        }
                    }
                    // ties: smaller |displacement|, then (dx, dy) lexicographic
                    const long mag = static_cast<long>(dx) * dx + static_cast<long>(dy) * dy;
                    const long best_mag =
                        static_cast<long>(best_dx) * best_dx + static_cast<long>(best_dy) * best_dy;
                    const bool better =
                        first || ssd < best_ssd ||
                        (ssd == best_ssd &&
                         (mag < best_mag ||
                          (mag == best_mag &&
                           (dx < best_dx || (dx == best_dx && dy < best_dy)))));
                    if (better) {
                        best_ssd = ssd;
                        best_dx = dx;
                        best_dy = dy;
                        first = false;
                    }
                }
            }
            for (int y = 0; y < bh; y++)
                for (int x = 0; x < bw; x++) {
                    out.u[static_cast<std::size_t>(by + y) * w + bx + x] = static_cast<float>(best_dx);
                    out.v[static_cast<std::size_t>(by + y) * w + bx + x] = static_cast<float>(best_dy);
                }
        }
    }
    return out;
}

MatchList guided_search(const Video& v, PatchCoord ref, const SearchParams& prm, PatchSpec spec,
                        const FlowSequence& flows) {
    const int t_max = v.frames - spec.kt;
    const bool needs_flows = v.frames > 1 && prm.n_f > 0;
    if (needs_flows && (static_cast<int>(flows.forward.size()) != v.frames - 1 ||
                        static_cast<int>(flows.backward.size()) != v.frames - 1))
        throw ConfigError("guided_search: flow sequence does not cover the video");

    MatchList all = local_search(v, ref, ref, prm.n_s, spec, prm.n_b, prm.d);
    if (needs_flows) {
        const std::vector<TrajPoint> traj = trajectory(flows, ref, prm.n_f, spec.k);
        for (const TrajPoint& pt : traj) {
            if (pt.t == ref.t || pt.t > t_max) continue;
            PatchCoord center{static_cast<int>(std::lround(pt.x)), static_cast<int>(std::lround(pt.y)),
                              pt.t};
            center.x = std::clamp(center.x, 0, v.width - spec.k);
            center.y = std::clamp(center.y, 0, v.height - spec.k);
            const MatchList frame_keeps = local_search(v, center, ref, prm.n_pr, spec, prm.n_b, prm.d);
            all.insert(all.end(), frame_keeps.begin(), frame_keeps.end());
        }
    }
    return finalize_matches(std::move(all), Match{ref, -prm.d}, prm);
}

}  // namespace vbm3d
