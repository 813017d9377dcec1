#pragma once

#include <vector>

#include "vbm3d/pipeline.hpp"
#include "vbm3d/video.hpp"

namespace vbm3d {

// Spatial pyramid flavor. Both use ratio 2 per level and leave the temporal
// axis untouched; level dimensions go n -> ceil(n/2).
enum class PyramidBase {
    kDct,      // crop / zero-pad of the orthonormal DCT spectrum
    kLanczos,  // k3 kernel resampling (sinc(x)*sinc(x/3), support [-3,3])
};

struct PyramidKind {
    PyramidBase kind = PyramidBase::kDct;
    int scales = 1;     // total level count (1 = single scale)
    double frec = 1.0;  // recomposition cutoff; DCT: fraction of spectrum kept,
                        // Lanczos: Gaussian width (0 = keep everything)

    void validate() const;
};

// Per-frame spatial halving. DCT: keep the low-frequency quadrant and
// renormalize so constants are preserved. Lanczos: filter k3(x/2)/2 and
// decimate, symmetric boundary extension.
Video ms_downscale(const Video& v, PyramidBase kind);

// Per-frame spatial doubling to the exact target dims (which must halve back
// to the input dims). DCT: zero-pad the spectrum; Lanczos: copy even samples,
// interpolate odd ones with k3.
Video ms_upscale(const Video& v, PyramidBase kind, int target_w, int target_h);

// DCT: zero every coefficient with normalized frequency index >= frec
// (frec=1 keeps all, frec=0 zeroes the frame). Lanczos: Gaussian blur of
// standard deviation frec (frec=0 is the identity).
Video ms_lowpass(const Video& v, PyramidBase kind, double frec);

// Coarse-to-fine merge: result_S = levels[S]; going finer,
// result_s = levels[s] - up(lowpass(down(levels[s]))) + up(lowpass(result_{s+1})).
// levels[0] is the finest; consecutive dims must be related by halving.
Video ms_recompose(const std::vector<Video>& levels, PyramidBase kind, double frec);

// Noise-std multiplier of one downscale of a fine_w x fine_h frame: the exact
// spectrum-crop amplitude factor for DCT, the squared kernel l2 norm (one
// factor per axis) for Lanczos.
double ms_sigma_factor(PyramidBase kind, int fine_w, int fine_h);

// Halves a flow field to ceil(dims/2): decimate at even pixels, vectors * 1/2.
FlowField ms_downscale_flow(const FlowField& f);
FlowSequence ms_downscale_flows(const FlowSequence& flows);

// Denoises a pyramid of the input level by level (noise std rescaled per
// ms_sigma_factor, flows downscaled alongside in guided mode) and recomposes.
// scales=1 is exactly the single-scale pipeline.
Video ms_denoise(const Video& v, double sigma, const ParamProfile& p, const PipelineMode& mode,
                 const PyramidKind& pyr);

}  // namespace vbm3d
