#include "vbm3d/search.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <unordered_set>

#include "vbm3d/errors.hpp"

namespace vbm3d {

namespace {

bool patch_in_bounds(const Video& v, PatchCoord p, PatchSpec spec) {
    return p.x >= 0 && p.y >= 0 && p.t >= 0 && p.x + spec.k <= v.width && p.y + spec.k <= v.height &&
           p.t + spec.kt <= v.frames;
}

// Largest power of two <= n (n >= 1).
int floor_pow2(int n) {
    int p = 1;
    while (2 * p <= n) p *= 2;
    return p;
}

}  // namespace

double patch_distance(const Video& v, PatchCoord p, PatchCoord q, PatchSpec spec, double d) {
    if (!patch_in_bounds(v, p, spec) || !patch_in_bounds(v, q, spec))
        throw ConfigError("patch_distance: patch outside video domain");
    double sum = 0.0;
    for (int dt = 0; dt < spec.kt; dt++) {
        for (int dy = 0; dy < spec.k; dy++) {
            const float* rp = v.frame(p.t + dt) + static_cast<std::size_t>(p.y + dy) * v.width + p.x;
            const float* rq = v.frame(q.t + dt) + static_cast<std::size_t>(q.y + dy) * v.width + q.x;
            for (int dx = 0; dx < spec.k; dx++) {
                const double diff = static_cast<double>(rp[dx]) - rq[dx];
                sum += diff * diff;
            }
        }
    }
    if (p.x == q.x && p.y == q.y) sum -= d;  // favor static trajectories
    return sum;
}

MatchList local_search(const Video& v, PatchCoord center, PatchCoord ref, int window, PatchSpec spec,
                       int n_b, double d) {
    const int lox = std::max(0, center.x - (window - 1) / 2);
    const int hix = std::min(v.width - spec.k, center.x + window / 2);
    const int loy = std::max(0, center.y - (window - 1) / 2);
    const int hiy = std::min(v.height - spec.k, center.y + window / 2);
    MatchList out;
    out.reserve(static_cast<std::size_t>(std::max(0, hix - lox + 1)) * std::max(0, hiy - loy + 1));
    for (int y = loy; y <= hiy; y++)
        for (int x = lox; x <= hix; x++) {
            const PatchCoord q{x, y, center.t};
            out.push_back({q, patch_distance(v, ref, q, spec, d)});
        }
    std::sort(out.begin(), out.end(), match_less);
    if (static_cast<int>(out.size()) > n_b) out.resize(n_b);
    return out;
}

MatchList finalize_matches(MatchList candidates, Match ref, const SearchParams& prm) {
    MatchList others;
    others.reserve(candidates.size());
    for (const Match& m : candidates) {
        if (m.coord == ref.coord) continue;
        if (m.dist <= prm.tau) others.push_back(m);
    }
    const int total = static_cast<int>(others.size()) + 1;  // reference always kept
    const int n = floor_pow2(std::min(total, prm.n_max));
    std::sort(others.begin(), others.end(), match_less);
    others.resize(n - 1);
    others.push_back(ref);
    std::sort(others.begin(), others.end(), match_less);
    return others;
}

MatchList predictive_search(const Video& v, PatchCoord ref, const SearchParams& prm, PatchSpec spec) {
    if (!patch_in_bounds(v, ref, spec)) throw ConfigError("predictive_search: reference outside video domain");
    const int t_max = v.frames - spec.kt;

    MatchList all = local_search(v, ref, ref, prm.n_s, spec, prm.n_b, prm.d);
    const MatchList ref_keeps = all;

    std::unordered_set<std::uint64_t> seen;
    for (const int dir : {+1, -1}) {
        MatchList prev = ref_keeps;
        for (int h = ref.t + dir; h >= 0 && h <= t_max && std::abs(h - ref.t) <= prm.n_f; h += dir) {
            // Union of n_pr windows centered on the previous frame's keeps,
            // deduplicated (windows overlap when keeps are close together).
            seen.clear();
            MatchList cur;
            for (const Match& m : prev) {
                const int lox = std::max(0, m.coord.x - (prm.n_pr - 1) / 2);
                const int hix = std::min(v.width - spec.k, m.coord.x + prm.n_pr / 2);
                const int loy = std::max(0, m.coord.y - (prm.n_pr - 1) / 2);
                const int hiy = std::min(v.height - spec.k, m.coord.y + prm.n_pr / 2);
                for (int y = loy; y <= hiy; y++)
                    for (int x = lox; x <= hix; x++) {
                        const std::uint64_t key =
                            static_cast<std::uint64_t>(y) * static_cast<std::uint64_t>(v.width) + x;
                        if (!seen.insert(key).second) continue;
                        const PatchCoord q{x, y, h};
                        cur.push_back({q, patch_distance(v, ref, q, spec, prm.d)});
                    }
            }
            std::sort(cur.begin(), cur.end(), match_less);
            if (static_cast<int>(cur.size()) > prm.n_b) cur.resize(prm.n_b);
            all.insert(all.end(), cur.begin(), cur.end());
            prev = std::move(cur);
            if (prev.empty()) break;
        }
    }
    return finalize_matches(std::move(all), Match{ref, -prm.d}, prm);
}

std::pair<double, double> distance_stats(const std::vector<double>& p1, const std::vector<double>& p2,
                                         double sigma) {
    if (p1.size() != p2.size() || p1.empty()) throw ConfigError("distance_stats: patch size mismatch");
    const double m = static_cast<double>(p1.size());
    double delta2 = 0.0;
    for (std::size_t i = 0; i < p1.size(); i++) {
        const double diff = p1[i] - p2[i];
        delta2 += diff * diff;
    }
    const double mean = delta2 / m + 2.0 * sigma * sigma;
    const double variance = (8.0 * sigma * sigma / m) * (sigma * sigma + delta2 / m);
    return {mean, variance};
}

}  // namespace vbm3d
