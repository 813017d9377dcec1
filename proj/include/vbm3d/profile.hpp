#pragma once

#include <string>

#include "vbm3d/patch.hpp"
#include "vbm3d/transforms.hpp"

namespace vbm3d {

// Tuning constants for one collaborative-filtering step. Distance bias and
// match threshold are stored per pixel: the effective bias is d_pp * k^2 and
// the effective threshold tau_pp * k^2 * kt, so 2D and spatio-temporal patch
// modes share one profile number.
struct StepParams {
    PatchSpec patch;
    int n_max = 16;
    int n_f = 4;
    int n_s = 7;
    int n_pr = 5;
    int n_b = 2;
    double d_pp = 3.0;
    double tau_pp = kTauDisabled;
    double lambda3d = 2.7;  // used by step 1 only
    int st = 4;             // reference grid step
    TransformId transform = TransformId::kDct2d;
    double beta = 2.0;      // Kaiser shape

    SearchParams search_params() const;
    void validate(const char* which) const;
};

struct ParamProfile {
    std::string name;
    StepParams step1;
    StepParams step2;

    void validate() const;
};

// The built-in "np" (normal profile) defaults: step 1 bior1.5 8x8, N=16;
// step 2 DCT 7x7, N=32; shared search geometry N_f=4, N_s=7, N_pr=5, N_b=2,
// d_pp=3, grid step 4, beta=2.
ParamProfile np_profile();

// Resolves a built-in profile name ("np") or loads a profile file.
ParamProfile load_profile(const std::string& name_or_path);

// Flat key/value text round trip.
ParamProfile parse_profile_text(const std::string& text, const std::string& origin);
std::string profile_to_text(const ParamProfile& p);
void save_profile(const ParamProfile& p, const std::string& path);

}  // namespace vbm3d
