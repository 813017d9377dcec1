#include "vbm3d/pipeline.hpp"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "vbm3d/errors.hpp"
#include "vbm3d/filtering.hpp"
#include "vbm3d/parallel.hpp"
#include "vbm3d/search.hpp"
#include "vbm3d/transforms.hpp"

namespace vbm3d {

std::vector<int> grid_positions(int extent, int k, int st) {
    if (extent < k) throw ConfigError("grid_positions: extent smaller than the patch");
    std::vector<int> out;
    const int last = extent - k;
    for (int p = 0; p < last; p += st) out.push_back(p);
    out.push_back(last);
    return out;
}

namespace {

struct RefTask {
    PatchCoord coord;
    PatchSpec spec;  // kt drops to 1 for last-frame references in ST mode
};

std::vector<RefTask> build_tasks(const Video& v, const StepParams& sp, bool st_patches) {
    const std::vector<int> xs = grid_positions(v.width, sp.patch.k, sp.st);
    const std::vector<int> ys = grid_positions(v.height, sp.patch.k, sp.st);
    const int base_kt = st_patches ? 2 : sp.patch.kt;
    std::vector<RefTask> tasks;
    tasks.reserve(xs.size() * ys.size() * static_cast<std::size_t>(v.frames));
    for (int t = 0; t < v.frames; t++) {
        PatchSpec spec = sp.patch;
        spec.kt = (base_kt == 2 && t + 1 < v.frames) ? 2 : 1;
        for (const int y : ys)
            for (const int x : xs) tasks.push_back({{x, y, t}, spec});
    }
    return tasks;
}

// One full pass: match on match_src, filter patches of filter_src (step 1) or
// Wiener-filter filter_src with oracle spectra from match_src (step 2, when
// wiener is set). Shrink results are computed in parallel in fixed-size
// batches and aggregated by a single thread in canonical task order, so the
// output never depends on the worker count.
Video run_step(const Video& filter_src, const Video& match_src, bool wiener, double sigma,
               const StepParams& sp, const PipelineMode& mode) {
    sp.validate(wiener ? "step2" : "step1");
    if (!(sigma >= 0.0)) throw ConfigError("pipeline: sigma must be >= 0");
    if (mode.threads < 1) throw ConfigError("pipeline: thread count must be >= 1");
    if (!filter_src.same_dims(match_src))
        throw ConfigError("pipeline: noisy and matching videos must be congruent");
    if (mode.guided && mode.flows == nullptr)
        throw ConfigError("pipeline: guided mode requires an optical flow sequence");

    // tau and the kt=2 temporal bound differ between full and last-frame
    // fallback references, so keep one SearchParams per patch depth.
    StepParams per_kt[2] = {sp, sp};
    per_kt[0].patch.kt = 1;
    per_kt[1].patch.kt = 2;
    const SearchParams prm_kt[2] = {per_kt[0].search_params(), per_kt[1].search_params()};

    const std::vector<RefTask> tasks = build_tasks(filter_src, sp, mode.st_patches);
    const KaiserWindow window = kaiser_window(sp.patch.k, sp.beta);
    AggBuffer buf(filter_src.width, filter_src.height, filter_src.frames);

    auto shrink_one = [&](const RefTask& task) -> ShrinkResult {
        const SearchParams& prm = prm_kt[task.spec.kt - 1];
        const MatchList matches = mode.guided
                                      ? guided_search(match_src, task.coord, prm, task.spec, *mode.flows)
                                      : predictive_search(match_src, task.coord, prm, task.spec);
        const std::vector<PatchCoord> coords = group_coords(matches, task.coord);
        const GroupStack noisy_group = extract_group(filter_src, coords, task.spec);
        if (!wiener) return ht_shrink(noisy_group, sp.transform, sigma, sp.lambda3d);
        const GroupStack oracle_group = extract_group(match_src, coords, task.spec);
        return wiener_shrink(noisy_group, oracle_group, sp.transform, sigma);
    };

    // Batch size is fixed so batching is an implementation detail; results are
    // deterministic per task and merged in order regardless.
    constexpr std::size_t kBatch = 256;
    std::vector<ShrinkResult> results(std::min(kBatch, tasks.size()));
    for (std::size_t base = 0; base < tasks.size(); base += kBatch) {
        const int count = static_cast<int>(std::min(kBatch, tasks.size() - base));
        parallel_for(count, mode.threads,
                     [&](int i) { results[i] = shrink_one(tasks[base + i]); });
        for (int i = 0; i < count; i++) aggregate(buf, results[i], window);
    }
    return normalize(buf, filter_src);
}

}  // namespace

Video step1(const Video& noisy, double sigma, const ParamProfile& p, const PipelineMode& mode) {
    return run_step(noisy, noisy, false, sigma, p.step1, mode);
}

Video step2(const Video& noisy, const Video& basic, double sigma, const ParamProfile& p,
            const PipelineMode& mode) {
    return run_step(noisy, basic, true, sigma, p.step2, mode);
}

DenoiseResult denoise(const Video& noisy, double sigma, const ParamProfile& p,
                      const PipelineMode& mode) {
    DenoiseResult r;
    r.basic = step1(noisy, sigma, p, mode);
    r.final = step2(noisy, r.basic, sigma, p, mode);
    return r;
}

}  // namespace vbm3d
