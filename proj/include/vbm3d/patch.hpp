#pragma once

#include <limits>
#include <vector>

namespace vbm3d {

// Patch extent: k x k pixels over kt consecutive frames (kt=1 plain, kt=2 spatio-temporal).
struct PatchSpec {
    int k = 8;
    int kt = 1;
    int pixels() const { return k * k * kt; }
};

// Top-left-front corner of a patch.
struct PatchCoord {
    int x = 0;
    int y = 0;
    int t = 0;
    bool operator==(const PatchCoord& o) const { return x == o.x && y == o.y && t == o.t; }
};

struct Match {
    PatchCoord coord;
    double dist = 0.0;
};

// Canonical candidate order: distance, then (t, y, x). Total and deterministic,
// so every sort/truncation below is reproducible regardless of traversal order.
inline bool match_less(const Match& a, const Match& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.coord.t != b.coord.t) return a.coord.t < b.coord.t;
    if (a.coord.y != b.coord.y) return a.coord.y < b.coord.y;
    return a.coord.x < b.coord.x;
}

using MatchList = std::vector<Match>;

constexpr double kTauDisabled = std::numeric_limits<double>::infinity();

struct SearchParams {
    int n_max = 16;   // cap on returned matches (power of 2)
    int n_f = 4;      // temporal radius in frames
    int n_s = 7;      // window side in the reference frame
    int n_pr = 5;     // window side in predicted frames
    int n_b = 2;      // candidates kept per frame
    double d = 0.0;   // distance bonus for colocated candidates (sample^2)
    double tau = kTauDisabled;  // max accepted distance (sample^2)
};

}  // namespace vbm3d
