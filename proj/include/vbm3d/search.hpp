#pragma once

#include <utility>

#include "vbm3d/patch.hpp"
#include "vbm3d/video.hpp"

namespace vbm3d {

// Sum of squared differences over the kt*k*k pixels of both patches, minus d
// when p and q share the same spatial position (any frame). Not normalized by
// patch size. Throws ConfigError when a patch leaves the video domain.
double patch_distance(const Video& v, PatchCoord p, PatchCoord q, PatchSpec spec, double d);

// Evaluates every in-bounds patch whose top-left corner lies in the s x s
// window centered on `center` (clipped at frame borders, confined to center's
// frame) and returns the n_b best matches to `ref` in canonical order.
MatchList local_search(const Video& v, PatchCoord center, PatchCoord ref, int window, PatchSpec spec,
                       int n_b, double d);

// Temporal predictive search: the reference frame is scanned with an n_s
// window; each following/preceding frame is scanned in the union of n_pr
// windows re-centered on the previous frame's kept candidates. The union of
// per-frame keeps is filtered by tau and truncated to the largest power of two
// <= min(|L|, n_max). The reference patch is always part of the result.
MatchList predictive_search(const Video& v, PatchCoord ref, const SearchParams& prm, PatchSpec spec);

// Analytic mean and variance of the noisy squared patch distance
// (1/m) * sum ((p1 - p2) + noise_diff)^2 between two independently noisy
// copies of clean patches p1, p2: mean = |p1-p2|^2/m + 2 sigma^2,
// variance = (8 sigma^2 / m) (sigma^2 + |p1-p2|^2/m).
std::pair<double, double> distance_stats(const std::vector<double>& p1, const std::vector<double>& p2,
                                         double sigma);

// Shared finalization for the search variants: tau filter (reference exempt),
// power-of-2 truncation keeping the best candidates, reference always present,
// result in canonical order.
MatchList finalize_matches(MatchList candidates, Match ref, const SearchParams& prm);

}  // namespace vbm3d
