#pragma once

#include <vector>

#include "vbm3d/patch.hpp"
#include "vbm3d/video.hpp"

namespace vbm3d {

// Spatial 2D transform of the separable 3D pipeline; the transform across the
// stack (and across the kt=2 temporal pair) is always Haar.
enum class TransformId {
    kDct2d,    // orthonormal DCT-II, any k >= 1
    kBior15,   // periodized bi-orthogonal spline wavelet (bior1.5), k must be a power of 2
};

// A group of n patches flowing through transform -> shrink -> inverse.
// coeffs holds n slices of kt*k*k values, slice-major; within a slice the
// layout is [temporal][row][column]. coords[0] is the reference patch,
// remaining slices ordered by match distance.
struct GroupStack {
    PatchSpec spec;
    int n = 0;
    std::vector<PatchCoord> coords;
    std::vector<double> coeffs;

    std::size_t slice_size() const { return static_cast<std::size_t>(spec.pixels()); }
    double* slice(int i) { return coeffs.data() + slice_size() * i; }
    const double* slice(int i) const { return coeffs.data() + slice_size() * i; }
};

// Orders match coordinates for stacking: reference patch first, the rest in
// canonical match order.
std::vector<PatchCoord> group_coords(const MatchList& matches, PatchCoord ref);

// Copies the patches at the given coords out of the video (reference first).
GroupStack extract_group(const Video& v, const std::vector<PatchCoord>& coords, PatchSpec spec);

// Separable 3D transform: for kt=2 a length-2 Haar across the temporal pair,
// then the 2D spatial transform per slice, then a multi-level Haar across the
// n slices per coefficient position. n must be a power of 2.
void forward_3d(GroupStack& g, TransformId id);
void inverse_3d(GroupStack& g, TransformId id);

// Which convention dc_mask uses for the "DC component" exemption.
enum class DcMaskMode {
    kGroupDc,     // the single fully-3D-DC coefficient (default)
    kPerSliceDc,  // the spatial/temporal DC of each group slice (n positions)
};

// Flat coefficient positions (into GroupStack::coeffs) exempt from hard
// thresholding.
std::vector<std::size_t> dc_mask(PatchSpec spec, int n, TransformId id,
                                 DcMaskMode mode = DcMaskMode::kGroupDc);

// Plain orthonormal 2D DCT-II on an h x w row-major buffer; also used by the
// DCT image pyramid. Sizes are arbitrary; cosine tables are cached per size.
void dct_2d(const double* in, double* out, int w, int h, bool inverse);

}  // namespace vbm3d
