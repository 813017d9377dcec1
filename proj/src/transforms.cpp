#include "vbm3d/transforms.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>

#include "vbm3d/errors.hpp"

namespace vbm3d {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

bool is_pow2(int n) { return n >= 1 && (n & (n - 1)) == 0; }

// ----------------------------------------------------------------- DCT-II
// Orthonormal cosine matrices cached per size; lookups are read-mostly.

class MatrixCache {
public:
    // Returns the cached matrix for n, building it with `make` on first use.
    template <typename MakeFn>
    const std::vector<double>& get(int n, MakeFn make) {
        {
            std::shared_lock lock(mu_);
            auto it = cache_.find(n);
            if (it != cache_.end()) return it->second;
        }
        std::unique_lock lock(mu_);
        auto it = cache_.find(n);
        if (it == cache_.end()) it = cache_.emplace(n, make(n)).first;
        return it->second;  // std::map node references are stable
    }

private:
    std::shared_mutex mu_;
    std::map<int, std::vector<double>> cache_;
};

std::vector<double> make_dct_matrix(int n) {
    std::vector<double> m(static_cast<std::size_t>(n) * n);
    const double s0 = std::sqrt(1.0 / n);
    const double s = std::sqrt(2.0 / n);
    for (int u = 0; u < n; u++)
        for (int i = 0; i < n; i++)
            m[static_cast<std::size_t>(u) * n + i] =
                (u == 0 ? s0 : s) * std::cos(std::numbers::pi * (2 * i + 1) * u / (2.0 * n));
    return m;
}

const std::vector<double>& dct_matrix(int n) {
    static MatrixCache cache;
    return cache.get(n, make_dct_matrix);
}

// Applies M (or its transpose) to each length-n axis vector. `in` strided.
void apply_matrix(const std::vector<double>& m, const double* in, double* out, int n, int stride,
                  bool transpose) {
    for (int u = 0; u < n; u++) {
        double acc = 0.0;
        if (transpose)
            for (int i = 0; i < n; i++) acc += m[static_cast<std::size_t>(i) * n + u] * in[i * stride];
        else
            for (int i = 0; i < n; i++) acc += m[static_cast<std::size_t>(u) * n + i] * in[i * stride];
        out[u] = acc;
    }
}

// ------------------------------------------------------------------ bior1.5
// Periodized analysis filter bank; synthesis is the exact inverse of the
// analysis operator, computed once per length and cached.

constexpr double kBiorNorm = 1.0 / (128.0 * std::numbers::sqrt2);
constexpr double kLpd[10] = {3 * kBiorNorm,  -3 * kBiorNorm, -22 * kBiorNorm, 22 * kBiorNorm,
                             128 * kBiorNorm, 128 * kBiorNorm, 22 * kBiorNorm, -22 * kBiorNorm,
                             -3 * kBiorNorm,  3 * kBiorNorm};
constexpr double kHpd[10] = {0, 0, 0, 0, -kInvSqrt2, kInvSqrt2, 0, 0, 0, 0};

// One analysis level: x (length n, contiguous) -> [approx | detail].
void bior_forward_1d(const double* x, double* out, int n) {
    const int half = n / 2;
    for (int j = 0; j < half; j++) {
        double a = 0.0, dd = 0.0;
        for (int q = 0; q < 10; q++) {
            const int id = (2 * j + q - 4 + 2 * n) % n;
            a += kLpd[q] * x[id];
            dd += kHpd[q] * x[id];
        }
        out[j] = a;
        out[half + j] = dd;
    }
}

// Gauss-Jordan inverse with partial pivoting (n <= 32, well-conditioned bank).
std::vector<double> invert_matrix(std::vector<double> a, int n) {
    std::vector<double> inv(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; i++) inv[static_cast<std::size_t>(i) * n + i] = 1.0;
    for (int col = 0; col < n; col++) {
        int pivot = col;
        for (int r = col + 1; r < n; r++)
            if (std::fabs(a[static_cast<std::size_t>(r) * n + col]) >
                std::fabs(a[static_cast<std::size_t>(pivot) * n + col]))
                pivot = r;
        if (a[static_cast<std::size_t>(pivot) * n + col] == 0.0)
            throw ConfigError("singular analysis matrix");
        if (pivot != col)
            for (int c = 0; c < n; c++) {
                std::swap(a[static_cast<std::size_t>(pivot) * n + c], a[static_cast<std::size_t>(col) * n + c]);
                std::swap(inv[static_cast<std::size_t>(pivot) * n + c],
                          inv[static_cast<std::size_t>(col) * n + c]);
            }
        const double piv = a[static_cast<std::size_t>(col) * n + col];
        for (int c = 0; c < n; c++) {
            a[static_cast<std::size_t>(col) * n + c] /= piv;
            inv[static_cast<std::size_t>(col) * n + c] /= piv;
        }
        for (int r = 0; r < n; r++) {
            if (r == col) continue;
            const double f = a[static_cast<std::size_t>(r) * n + col];
            if (f == 0.0) continue;
            for (int c = 0; c < n; c++) {
                a[static_cast<std::size_t>(r) * n + c] -= f * a[static_cast<std::size_t>(col) * n + c];
                inv[static_cast<std::size_t>(r) * n + c] -= f * inv[static_cast<std::size_t>(col) * n + c];
            }
        }
    }
    return inv;
}

std::vector<double> make_bior_synthesis(int n) {
    // Analysis matrix from the filter bank applied to unit vectors.
    std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<double> e(n, 0.0), col(n);
    for (int i = 0; i < n; i++) {
        e[i] = 1.0;
        bior_forward_1d(e.data(), col.data(), n);
        e[i] = 0.0;
        for (int r = 0; r < n; r++) a[static_cast<std::size_t>(r) * n + i] = col[r];
    }
    return invert_matrix(std::move(a), n);
}

const std::vector<double>& bior_synthesis(int n) {
    static MatrixCache cache;
    return cache.get(n, make_bior_synthesis);
}

void bior_inverse_1d(const double* x, double* out, int n) {
    const std::vector<double>& s = bior_synthesis(n);
    for (int i = 0; i < n; i++) {
        double acc = 0.0;
        for (int j = 0; j < n; j++) acc += s[static_cast<std::size_t>(i) * n + j] * x[j];
        out[i] = acc;
    }
}

// Multi-level 2D bior on the k x k row-major slice.
void bior_2d(double* slice, int k, bool inverse) {
    std::vector<double> buf(k), res(k);
    if (!inverse) {
        for (int cur = k; cur >= 2; cur /= 2) {
            for (int r = 0; r < cur; r++) {
                bior_forward_1d(slice + static_cast<std::size_t>(r) * k, res.data(), cur);
                std::copy(res.begin(), res.begin() + cur, slice + static_cast<std::size_t>(r) * k);
            }
            for (int c = 0; c < cur; c++) {
                for (int r = 0; r < cur; r++) buf[r] = slice[static_cast<std::size_t>(r) * k + c];
                bior_forward_1d(buf.data(), res.data(), cur);
                for (int r = 0; r < cur; r++) slice[static_cast<std::size_t>(r) * k + c] = res[r];
            }
        }
    } else {
        for (int cur = 2; cur <= k; cur *= 2) {
            for (int c = 0; c < cur; c++) {
                for (int r = 0; r < cur; r++) buf[r] = slice[static_cast<std::size_t>(r) * k + c];
                bior_inverse_1d(buf.data(), res.data(), cur);
                for (int r = 0; r < cur; r++) slice[static_cast<std::size_t>(r) * k + c] = res[r];
            }
            for (int r = 0; r < cur; r++) {
                bior_inverse_1d(slice + static_cast<std::size_t>(r) * k, res.data(), cur);
                std::copy(res.begin(), res.begin() + cur, slice + static_cast<std::size_t>(r) * k);
            }
        }
    }
}

// ------------------------------------------------------------------- Haar

// Full multi-level orthonormal Haar on a contiguous power-of-2 buffer.
void haar_1d(double* x, int n, bool inverse) {
    std::vector<double> tmp(n);
    if (!inverse) {
        for (int len = n; len >= 2; len /= 2) {
            const int half = len / 2;
            for (int j = 0; j < half; j++) {
                tmp[j] = (x[2 * j] + x[2 * j + 1]) * kInvSqrt2;
                tmp[half + j] = (x[2 * j] - x[2 * j + 1]) * kInvSqrt2;
            }
            std::copy(tmp.begin(), tmp.begin() + len, x);
        }
    } else {
        for (int len = 2; len <= n; len *= 2) {
            const int half = len / 2;
            for (int j = 0; j < half; j++) {
                tmp[2 * j] = (x[j] + x[half + j]) * kInvSqrt2;
                tmp[2 * j + 1] = (x[j] - x[half + j]) * kInvSqrt2;
            }
            std::copy(tmp.begin(), tmp.begin() + len, x);
        }
    }
}

void spatial_2d(double* plane, int k, TransformId id, bool inverse) {
    if (id == TransformId::kDct2d) {
        std::vector<double> tmp(static_cast<std::size_t>(k) * k);
        dct_2d(plane, tmp.data(), k, k, inverse);
        std::copy(tmp.begin(), tmp.end(), plane);
    } else {
        bior_2d(plane, k, inverse);
    }
}

void validate_group(const GroupStack& g, TransformId id) {
    if (!is_pow2(g.n)) throw ConfigError("group transform: patch count must be a power of 2");
    if (g.spec.kt != 1 && g.spec.kt != 2) throw ConfigError("group transform: kt must be 1 or 2");
    if (id == TransformId::kBior15 && !is_pow2(g.spec.k))
        throw ConfigError("bior1.5 requires a power-of-2 patch side");
    if (g.coeffs.size() != g.slice_size() * g.n) throw ConfigError("group transform: malformed stack");
}

}  // namespace

void dct_2d(const double* in, double* out, int w, int h, bool inverse) {
    const std::vector<double>& mw = dct_matrix(w);
    const std::vector<double>& mh = dct_matrix(h);
    // rows with the width matrix, then columns with the height matrix
    std::vector<double> tmp(static_cast<std::size_t>(w) * h);
    for (int r = 0; r < h; r++)
        apply_matrix(mw, in + static_cast<std::size_t>(r) * w, tmp.data() + static_cast<std::size_t>(r) * w,
                     w, 1, inverse);
    std::vector<double> col(h);
    for (int c = 0; c < w; c++) {
        apply_matrix(mh, tmp.data() + c, col.data(), h, w, inverse);
        for (int r = 0; r < h; r++) out[static_cast<std::size_t>(r) * w + c] = col[r];
    }
}

std::vector<PatchCoord> group_coords(const MatchList& matches, PatchCoord ref) {
    std::vector<PatchCoord> coords;
    coords.reserve(matches.size());
    coords.push_back(ref);
    for (const Match& m : matches)
        if (!(m.coord == ref)) coords.push_back(m.coord);
    return coords;
}

GroupStack extract_group(const Video& v, const std::vector<PatchCoord>& coords, PatchSpec spec) {
    GroupStack g;
    g.spec = spec;
    g.n = static_cast<int>(coords.size());
    g.coords = coords;
    g.coeffs.resize(g.slice_size() * g.n);
    for (int i = 0; i < g.n; i++) {
        const PatchCoord c = coords[i];
        double* dst = g.slice(i);
        for (int dt = 0; dt < spec.kt; dt++)
            for (int dy = 0; dy < spec.k; dy++) {
                const float* src = v.frame(c.t + dt) + static_cast<std::size_t>(c.y + dy) * v.width + c.x;
                for (int dx = 0; dx < spec.k; dx++) *dst++ = src[dx];
            }
    }
    return g;
}

void forward_3d(GroupStack& g, TransformId id) {
    validate_group(g, id);
    const int k = g.spec.k, kt = g.spec.kt;
    const std::size_t plane = static_cast<std::size_t>(k) * k;
    for (int i = 0; i < g.n; i++) {
        double* s = g.slice(i);
        if (kt == 2) {  // temporal pair first
            for (std::size_t p = 0; p < plane; p++) {
                const double a = s[p], b = s[plane + p];
                s[p] = (a + b) * kInvSqrt2;
                s[plane + p] = (a - b) * kInvSqrt2;
            }
        }
        for (int dt = 0; dt < kt; dt++) spatial_2d(s + plane * dt, k, id, false);
    }
    // multi-level Haar across slices, per coefficient position
    std::vector<double> buf(g.n);
    for (std::size_t p = 0; p < g.slice_size(); p++) {
        for (int i = 0; i < g.n; i++) buf[i] = g.coeffs[g.slice_size() * i + p];
        haar_1d(buf.data(), g.n, false);
        for (int i = 0; i < g.n; i++) g.coeffs[g.slice_size() * i + p] = buf[i];
    }
}

void inverse_3d(GroupStack& g, TransformId id) {
    validate_group(g, id);
    const int k = g.spec.k, kt = g.spec.kt;
    const std::size_t plane = static_cast<std::size_t>(k) * k;
    std::vector<double> buf(g.n);
    for (std::size_t p = 0; p < g.slice_size(); p++) {
        for (int i = 0; i < g.n; i++) buf[i] = g.coeffs[g.slice_size() * i + p];
        haar_1d(buf.data(), g.n, true);
        for (int i = 0; i < g.n; i++) g.coeffs[g.slice_size() * i + p] = buf[i];
    }
    for (int i = 0; i < g.n; i++) {
        double* s = g.slice(i);
        for (int dt = 0; dt < kt; dt++) spatial_2d(s + plane * dt, k, id, true);
        if (kt == 2) {
            for (std::size_t p = 0; p < plane; p++) {
                const double a = s[p], b = s[plane + p];
                s[p] = (a + b) * kInvSqrt2;
                s[plane + p] = (a - b) * kInvSqrt2;
            }
        }
    }
}

std::vector<std::size_t> dc_mask(PatchSpec spec, int n, TransformId id, DcMaskMode mode) {
    (void)id;  // both spatial transforms put their coarsest coefficient at (0,0)
    std::vector<std::size_t> mask;
    const std::size_t slice = static_cast<std::size_t>(spec.pixels());
    if (mode == DcMaskMode::kGroupDc) {
        // Slice 0 holds the coarsest Haar scaling coefficient, temporal plane 0
        // the temporal average, spatial (0,0) the spatial DC: flat position 0.
        mask.push_back(0);
    } else {
        for (int i = 0; i < n; i++) mask.push_back(slice * i);
    }
    return mask;
}

}  // namespace vbm3d
