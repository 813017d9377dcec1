#pragma once

#include <vector>

#include "vbm3d/flow.hpp"
#include "vbm3d/profile.hpp"
#include "vbm3d/video.hpp"

namespace vbm3d {

// Variant switches orthogonal to the numeric profile. guided requires flows;
// st_patches turns the profile's patches into two-frame patches (reference
// patches on the last frame fall back to single-frame). threads only changes
// wall time, never the output.
struct PipelineMode {
    bool guided = false;
    bool st_patches = false;
    const FlowSequence* flows = nullptr;
    int threads = 1;
};

// Grid coordinates {0, st, 2*st, ...} over valid patch positions, with the
// final position extent-k forced so the border is always covered.
std::vector<int> grid_positions(int extent, int k, int st);

// Hard-threshold pass over the noisy video -> basic estimate.
Video step1(const Video& noisy, double sigma, const ParamProfile& p, const PipelineMode& mode);

// Wiener pass: matching and oracle spectra from the basic estimate, filtered
// coefficients from the noisy video -> final estimate.
Video step2(const Video& noisy, const Video& basic, double sigma, const ParamProfile& p,
            const PipelineMode& mode);

struct DenoiseResult {
    Video basic;
    Video final;
};

DenoiseResult denoise(const Video& noisy, double sigma, const ParamProfile& p,
                      const PipelineMode& mode);

}  // namespace vbm3d
