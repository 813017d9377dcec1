#pragma once

#include <string>
#include <vector>

#include "vbm3d/patch.hpp"
#include "vbm3d/video.hpp"

namespace vbm3d {

enum class FlowDirection { kForward, kBackward };

// Per-pixel displacement field between two frames, sub-pixel resolution.
struct FlowField {
    int width = 0;
    int height = 0;
    FlowDirection direction = FlowDirection::kForward;
    std::vector<float> u, v;  // row-major x/y displacement planes

    float u_at(int x, int y) const { return u[static_cast<std::size_t>(y) * width + x]; }
    float v_at(int x, int y) const { return v[static_cast<std::size_t>(y) * width + x]; }
};

// forward[t] maps frame t to t+1 (t = 0..frames-2);
// backward[t] maps frame t+1 to t (stored by source frame minus one).
struct FlowSequence {
    std::vector<FlowField> forward;
    std::vector<FlowField> backward;
};

// Middlebury .flo container: float magic 202021.25, int32 width/height, then
// row-major interleaved float32 (u,v), all little-endian.
FlowField load_flo(const std::string& path);
void write_flo(const FlowField& f, const std::string& path);

// Bilinear upsampling of both components with every vector multiplied by
// `factor`. Output is factor*width x factor*height unless explicit target
// dimensions are given (used when ceil-divided flow grids must match a frame).
FlowField upscale_flow(const FlowField& f, int factor, int target_w = 0, int target_h = 0);

// One integrated patch-center position per frame.
struct TrajPoint {
    int t = 0;
    double x = 0.0, y = 0.0;
};

// Integrates the flow from `start` over up to n_f frames in both directions:
// position(h) = position(h-1) + flow(round(position(h-1))). Positions stay
// floating point, are clamped to the valid patch domain (patch side patch_k)
// and the list is truncated at the sequence ends. Sorted by frame index.
std::vector<TrajPoint> trajectory(const FlowSequence& flows, PatchCoord start, int n_f, int patch_k);

// Exhaustive integer-displacement block matching from frame src_t to dst_t:
// per-block SSD minimization within +-radius, ties broken toward the smaller
// displacement magnitude then lexicographically by (dx, dy); every pixel takes
// the displacement of its containing block.
FlowField block_matching_flow(const Video& video, int src_t, int dst_t, int block, int radius);

// Like predictive_search, but every non-reference frame is searched in a
// single n_pr window centered on the integrated trajectory point.
MatchList guided_search(const Video& v, PatchCoord ref, const SearchParams& prm, PatchSpec spec,
                        const FlowSequence& flows);

}  // namespace vbm3d
