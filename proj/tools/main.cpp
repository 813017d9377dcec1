#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "vbm3d/errors.hpp"
#include "vbm3d/flow.hpp"
#include "vbm3d/multiscale.hpp"
#include "vbm3d/pipeline.hpp"
#include "vbm3d/profile.hpp"
#include "vbm3d/video.hpp"
#include "vbm3d/video_io.hpp"

namespace {

using namespace vbm3d;

void usage(std::FILE* out) {
    std::fprintf(out,
                 "usage: vbm3d <command> [flags]\n"
                 "\n"
                 "commands:\n"
                 "  denoise  -i <pat> -f <first> -l <last> -sigma <s> -o <pat>\n"
                 "           [--basic <pat>] [--ref <pat>] [--profile <name|path>]\n"
                 "           [--st] [--of --fflow <pat> --bflow <pat> | --of --flow-bm]\n"
                 "           [--flow-scale <k>] [--ms dct|lanczos --scales <n> --frec <x>]\n"
                 "           [--threads <n>]\n"
                 "  noise    -i <pat> -f <first> -l <last> -sigma <s> -o <pat> [--seed <n>]\n"
                 "  psnr     -i <pat> --ref <pat> -f <first> -l <last> [--peak <p>]\n"
                 "  flow-bm  -i <pat> -f <first> -l <last> -o <fwd .flo pat>\n"
                 "           [--backward-o <bwd .flo pat>] [--block <n>] [--radius <n>]\n"
                 "  bench    --manifest <file> --sigmas <s1,s2,...> [--modes <m1,m2,...>]\n"
                 "           [--seed <n>] [--profile <name|path>] [--threads <n>]\n"
                 "\n"
                 "Sequence patterns hold one printf integer conversion (e.g. frame_%%03d.png).\n"
                 "Exit codes: 0 ok, 1 configuration error, 2 I/O error.\n");
}

// Flat flag parser; single- and double-dash spellings are equivalent.
class Args {
  public:
    Args(int argc, char* const* argv, std::set<std::string> valued, std::set<std::string> boolean)
        : valued_(std::move(valued)), boolean_(std::move(boolean)) {
        for (int i = 0; i < argc; i++) {
            const std::string tok = argv[i];
            if (tok.size() < 2 || tok[0] != '-')
                throw ConfigError("unexpected argument '" + tok + "'");
            const std::string name = tok.substr(tok[1] == '-' ? 2 : 1);
            if (boolean_.count(name)) {
                flags_.insert(name);
                continue;
            }
            if (!valued_.count(name)) throw ConfigError("unknown flag '" + tok + "'");
            if (i + 1 >= argc) throw ConfigError("missing value for '" + tok + "'");
            values_[name] = argv[++i];
        }
    }

    bool flag(const std::string& name) const { return flags_.count(name) > 0; }
    bool has(const std::string& name) const { return values_.count(name) > 0; }

    std::string str(const std::string& name) const {
        const auto it = values_.find(name);
        if (it == values_.end()) throw ConfigError("missing required flag -" + name);
        return it->second;
    }
    std::string str(const std::string& name, const std::string& def) const {
        const auto it = values_.find(name);
        return it == values_.end() ? def : it->second;
    }

    double dbl(const std::string& name) const { return to_double(name, str(name)); }
    double dbl(const std::string& name, double def) const {
        return has(name) ? dbl(name) : def;
    }

    int intval(const std::string& name) const {
        const double v = dbl(name);
        const int i = static_cast<int>(v);
        if (static_cast<double>(i) != v) throw ConfigError("-" + name + " must be an integer");
        return i;
    }
    int intval(const std::string& name, int def) const { return has(name) ? intval(name) : def; }

    std::uint64_t u64(const std::string& name, std::uint64_t def) const {
        if (!has(name)) return def;
        const std::string s = str(name);
        try {
            std::size_t used = 0;
            const unsigned long long v = std::stoull(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (...) {
            throw ConfigError("-" + name + ": bad unsigned integer '" + s + "'");
        }
    }

  private:
    static double to_double(const std::string& name, const std::string& s) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (...) {
            throw ConfigError("-" + name + ": bad number '" + s + "'");
        }
    }

    std::set<std::string> valued_, boolean_;
    std::map<std::string, std::string> values_;
    std::set<std::string> flags_;
};

std::pair<int, int> frame_range(const Args& a) {
    const int first = a.intval("f");
    const int last = a.intval("l");
    if (last < first) throw ConfigError("-l must be >= -f");
    return {first, last};
}

// Matches a loaded flow field to the video resolution. scale 0 infers the
// factor from the dimensions (ceil-divided grids for 1, 2, 4, 8).
FlowField fit_flow(FlowField f, const Video& v, int scale) {
    if (scale == 0) {
        for (int k = 1; k <= 8; k *= 2)
            if ((v.width + k - 1) / k == f.width && (v.height + k - 1) / k == f.height) {
                scale = k;
                break;
            }
        if (scale == 0)
            throw ConfigError("flow dimensions match no power-of-2 scale of the video; use --flow-scale");
    }
    if ((v.width + scale - 1) / scale != f.width || (v.height + scale - 1) / scale != f.height)
        throw ConfigError("flow dimensions inconsistent with --flow-scale");
    return scale == 1 ? f : upscale_flow(f, scale, v.width, v.height);
}

// Forward files are indexed by source frame (first..last-1), backward files by
// their later frame (first+1..last).
FlowSequence load_flows(const std::string& fpat, const std::string& bpat, int first, int last,
                        const Video& v, int scale) {
    FlowSequence flows;
    for (int t = first; t < last; t++) {
        FlowField f = load_flo(format_index(fpat, t));
        f.direction = FlowDirection::kForward;
        flows.forward.push_back(fit_flow(std::move(f), v, scale));
        FlowField b = load_flo(format_index(bpat, t + 1));
        b.direction = FlowDirection::kBackward;
        flows.backward.push_back(fit_flow(std::move(b), v, scale));
    }
    return flows;
}

// Built-in flow fallback: block matching (8x8 blocks, radius 8) at quarter
// resolution, bilinearly upscaled back to the frame size.
FlowSequence bm_flows(const Video& v) {
    Video q = v;
    int factor = 1;
    while (factor < 4 && q.width >= 2 && q.height >= 2) {
        q = ms_downscale(q, PyramidBase::kLanczos);
        factor *= 2;
    }
    FlowSequence flows;
    for (int t = 0; t + 1 < v.frames; t++) {
        FlowField f = block_matching_flow(q, t, t + 1, 8, 8);
        f.direction = FlowDirection::kForward;
        flows.forward.push_back(factor == 1 ? std::move(f)
                                            : upscale_flow(f, factor, v.width, v.height));
        FlowField b = block_matching_flow(q, t + 1, t, 8, 8);
        b.direction = FlowDirection::kBackward;
        flows.backward.push_back(factor == 1 ? std::move(b)
                                             : upscale_flow(b, factor, v.width, v.height));
    }
    return flows;
}

PyramidBase parse_pyramid(const std::string& s) {
    if (s == "dct") return PyramidBase::kDct;
    if (s == "lanczos") return PyramidBase::kLanczos;
    throw ConfigError("--ms: unknown pyramid '" + s + "' (use dct or lanczos)");
}

int cmd_denoise(const Args& a) {
    const auto [first, last] = frame_range(a);
    const double sigma = a.dbl("sigma");
    if (sigma < 0) throw ConfigError("-sigma must be >= 0");
    const ParamProfile profile = load_profile(a.str("profile", "np"));
    const int threads = a.intval("threads", 1);
    if (threads < 1) throw ConfigError("--threads must be >= 1");

    const bool want_of = a.flag("of");
    if (a.has("fflow") != a.has("bflow"))
        throw ConfigError("--fflow and --bflow must be given together");
    if (want_of && !a.has("fflow") && !a.flag("flow-bm"))
        throw ConfigError("--of needs --fflow/--bflow files or --flow-bm");
    if (!want_of && (a.has("fflow") || a.flag("flow-bm")))
        throw ConfigError("flow inputs are only used with --of");

    const Video v = load_sequence(a.str("i"), first, last);

    FlowSequence flows;
    if (want_of)
        flows = a.has("fflow")
                    ? load_flows(a.str("fflow"), a.str("bflow"), first, last, v,
                                 a.intval("flow-scale", 0))
                    : bm_flows(v);

    PipelineMode mode;
    mode.guided = want_of;
    mode.st_patches = a.flag("st");
    mode.flows = want_of ? &flows : nullptr;
    mode.threads = threads;

    Video result;
    Video basic;
    bool have_basic = false;
    if (a.has("ms")) {
        if (a.has("basic")) throw ConfigError("--basic is not available with --ms");
        PyramidKind pyr;
        pyr.kind = parse_pyramid(a.str("ms"));
        pyr.scales = a.intval("scales", 2);
        pyr.frec = a.dbl("frec", 1.0);
        result = ms_denoise(v, sigma, profile, mode, pyr);
    } else {
        if (a.has("scales") || a.has("frec"))
            throw ConfigError("--scales/--frec require --ms");
        DenoiseResult r = denoise(v, sigma, profile, mode);
        result = std::move(r.final);
        basic = std::move(r.basic);
        have_basic = true;
        if (a.has("basic")) save_sequence(basic, a.str("basic"), first);
    }
    save_sequence(result, a.str("o"), first);

    if (a.has("ref")) {
        const Video ref = load_sequence(a.str("ref"), first, last);
        if (have_basic) std::printf("psnr_basic %.4f\n", psnr(ref, basic));
        std::printf("psnr_final %.4f\n", psnr(ref, result));
    }
    return 0;
}

int cmd_noise(const Args& a) {
    const auto [first, last] = frame_range(a);
    const double sigma = a.dbl("sigma");
    if (sigma < 0) throw ConfigError("-sigma must be >= 0");
    const Video v = load_sequence(a.str("i"), first, last);
    const Video noisy = add_awgn(v, NoiseSpec{sigma, a.u64("seed", 0)});
    save_sequence(noisy, a.str("o"), first);
    return 0;
}

int cmd_psnr(const Args& a) {
    const auto [first, last] = frame_range(a);
    const Video x = load_sequence(a.str("i"), first, last);
    const Video ref = load_sequence(a.str("ref"), first, last);
    const double peak = a.dbl("peak", 255.0);
    std::printf("%.4f\n", psnr(ref, x, peak));
    return 0;
}

int cmd_flow_bm(const Args& a) {
    const auto [first, last] = frame_range(a);
    const int block = a.intval("block", 8);
    const int radius = a.intval("radius", 8);
    const Video v = load_sequence(a.str("i"), first, last);
    const std::string fwd = a.str("o");
    for (int t = first; t < last; t++) {
        FlowField f = block_matching_flow(v, t - first, t - first + 1, block, radius);
        f.direction = FlowDirection::kForward;
        write_flo(f, format_index(fwd, t));
    }
    if (a.has("backward-o")) {
        const std::string bwd = a.str("backward-o");
        for (int t = first; t < last; t++) {
            FlowField b = block_matching_flow(v, t - first + 1, t - first, block, radius);
            b.direction = FlowDirection::kBackward;
            write_flo(b, format_index(bwd, t + 1));
        }
    }
    return 0;
}

struct BenchMode {
    std::string label;
    bool st = false;
    bool of = false;
    bool ms = false;
    PyramidKind pyr;
};

BenchMode parse_mode(const std::string& token) {
    BenchMode m;
    m.label = token;
    if (token == "plain") return m;
    if (token == "st") {
        m.st = true;
        return m;
    }
    if (token == "of") {
        m.of = true;
        return m;
    }
    if (token == "st+of") {
        m.st = m.of = true;
        return m;
    }
    if (token == "ms") {
        m.ms = true;
        m.pyr = {PyramidBase::kLanczos, 3, 0.6};
        return m;
    }
    if (token == "st+of+ms") {
        m.st = m.of = m.ms = true;
        m.pyr = {PyramidBase::kLanczos, 2, 1.0};
        return m;
    }
    throw ConfigError("bench: unknown mode '" + token +
                      "' (plain, st, of, st+of, ms, st+of+ms)");
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

struct BenchSeq {
    std::string name;
    std::string pattern;
    int first = 0, last = 0;
    bool available = false;
    Video clean;
};

int cmd_bench(const Args& a) {
    const std::string manifest_path = a.str("manifest");
    std::vector<double> sigmas;
    for (const std::string& s : split_csv(a.str("sigmas"))) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size() || v < 0) throw std::invalid_argument(s);
            sigmas.push_back(v);
        } catch (...) {
            throw ConfigError("bench: bad sigma '" + s + "'");
        }
    }
    std::vector<BenchMode> modes;
    for (const std::string& t : split_csv(a.str("modes", "plain"))) modes.push_back(parse_mode(t));
    const std::uint64_t seed = a.u64("seed", 0);
    const ParamProfile profile = load_profile(a.str("profile", "np"));
    const int threads = a.intval("threads", 1);

    std::ifstream mf(manifest_path);
    if (!mf) throw IoError(manifest_path + ": cannot open manifest");
    std::vector<BenchSeq> seqs;
    std::string line;
    while (std::getline(mf, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        BenchSeq q;
        if (!(ls >> q.name)) continue;
        if (!(ls >> q.pattern >> q.first >> q.last) || q.last < q.first)
            throw ConfigError(manifest_path + ": malformed manifest line '" + line +
                              "' (want: name pattern first last)");
        // relative patterns resolve against the manifest, so a corpus moves as a unit
        const std::filesystem::path pat(q.pattern);
        if (pat.is_relative())
            q.pattern = (std::filesystem::path(manifest_path).parent_path() / pat).string();
        seqs.push_back(std::move(q));
    }
    if (seqs.empty()) throw ConfigError(manifest_path + ": manifest lists no sequences");

    for (BenchSeq& q : seqs) {
        try {
            q.clean = load_sequence(q.pattern, q.first, q.last);
            q.available = true;
        } catch (const IoError& e) {
            std::fprintf(stderr, "bench: warning: skipping %s (%s)\n", q.name.c_str(), e.what());
        }
    }

    std::printf("sigma,mode");
    for (const BenchSeq& q : seqs) std::printf(",%s", q.name.c_str());
    std::printf(",average\n");

    for (std::size_t si = 0; si < sigmas.size(); si++) {
        // One noisy synthesis per (sequence, sigma); every mode sees the same
        // noise so the rows are comparable.
        std::vector<std::vector<double>> table(modes.size(),
                                               std::vector<double>(seqs.size(), -1.0));
        for (std::size_t qi = 0; qi < seqs.size(); qi++) {
            if (!seqs[qi].available) continue;
            const NoiseSpec spec{sigmas[si], seed + 1000003u * qi + 7919u * si};
            const Video noisy = add_awgn(seqs[qi].clean, spec);
            FlowSequence flows;
            bool have_flows = false;
            for (std::size_t mi = 0; mi < modes.size(); mi++) {
                const BenchMode& m = modes[mi];
                if (m.of && !have_flows) {
                    flows = bm_flows(noisy);
                    have_flows = true;
                }
                PipelineMode mode;
                mode.guided = m.of;
                mode.st_patches = m.st;
                mode.flows = m.of ? &flows : nullptr;
                mode.threads = threads;
                const Video out = m.ms ? ms_denoise(noisy, sigmas[si], profile, mode, m.pyr)
                                       : denoise(noisy, sigmas[si], profile, mode).final;
                table[mi][qi] = psnr(seqs[qi].clean, out);
            }
        }
        for (std::size_t mi = 0; mi < modes.size(); mi++) {
            std::printf("%g,%s", sigmas[si], modes[mi].label.c_str());
            double sum = 0.0;
            int count = 0;
            for (std::size_t qi = 0; qi < seqs.size(); qi++) {
                if (table[mi][qi] < 0) {
                    std::printf(",NA");
                } else {
                    std::printf(",%.2f", table[mi][qi]);
                    sum += table[mi][qi];
                    count++;
                }
            }
            if (count > 0)
                std::printf(",%.2f\n", sum / count);
            else
                std::printf(",NA\n");
        }
    }
    return 0;
}

int dispatch(int argc, char** argv) {
    const std::string cmd = argv[1];
    const int n = argc - 2;
    char* const* rest = argv + 2;
    if (cmd == "denoise") {
        Args a(n, rest,
               {"i", "f", "l", "sigma", "o", "basic", "ref", "profile", "fflow", "bflow",
                "flow-scale", "ms", "scales", "frec", "threads"},
               {"st", "of", "flow-bm"});
        return cmd_denoise(a);
    }
    if (cmd == "noise") {
        Args a(n, rest, {"i", "f", "l", "sigma", "o", "seed"}, {});
        return cmd_noise(a);
    }
    if (cmd == "psnr") {
        Args a(n, rest, {"i", "ref", "f", "l", "peak"}, {});
        return cmd_psnr(a);
    }
    if (cmd == "flow-bm") {
        Args a(n, rest, {"i", "f", "l", "o", "backward-o", "block", "radius"}, {});
        return cmd_flow_bm(a);
    }
    if (cmd == "bench") {
        Args a(n, rest, {"manifest", "sigmas", "modes", "seed", "profile", "threads"}, {});
        return cmd_bench(a);
    }
    if (cmd == "-h" || cmd == "--help" || cmd == "help") {
        usage(stdout);
        return 0;
    }
    std::fprintf(stderr, "unknown command '%s'\n", cmd.c_str());
    usage(stderr);
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        usage(stderr);
        return 1;
    }
    try {
        return dispatch(argc, argv);
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
