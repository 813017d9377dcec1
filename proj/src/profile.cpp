#include "vbm3d/profile.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "vbm3d/errors.hpp"

namespace vbm3d {

SearchParams StepParams::search_params() const {
    SearchParams s;
    s.n_max = n_max;
    s.n_f = n_f;
    s.n_s = n_s;
    s.n_pr = n_pr;
    s.n_b = n_b;
    s.d = d_pp * patch.k * patch.k;  // the bias is spatial-only
    s.tau = tau_pp * patch.k * patch.k * patch.kt;
    return s;
}

void StepParams::validate(const char* which) const {
    const std::string w = which;
    if (patch.k < 1) throw ConfigError(w + ": patch side must be >= 1");
    if (patch.kt != 1 && patch.kt != 2) throw ConfigError(w + ": patch depth must be 1 or 2");
    if (transform == TransformId::kBior15 && (patch.k & (patch.k - 1)) != 0)
        throw ConfigError(w + ": bior1.5 requires a power-of-2 patch side (use dct)");
    if (n_max < 1) throw ConfigError(w + ": max matches must be >= 1");
    if (n_s < n_pr || n_pr < 1) throw ConfigError(w + ": windows must satisfy n_s >= n_pr >= 1");
    if (n_b < 1) throw ConfigError(w + ": per-frame keep count must be >= 1");
    if (n_f < 0) throw ConfigError(w + ": temporal radius must be >= 0");
    if (st < 1 || st > patch.k) throw ConfigError(w + ": grid step must be in [1, k]");
    if (lambda3d < 0) throw ConfigError(w + ": lambda3d must be >= 0");
    if (beta < 0) throw ConfigError(w + ": kaiser beta must be >= 0");
    if (d_pp < 0) throw ConfigError(w + ": distance bias must be >= 0");
    if (!(tau_pp >= 0)) throw ConfigError(w + ": match threshold must be >= 0 or inf");
}

void ParamProfile::validate() const {
    step1.validate("step1");
    step2.validate("step2");
}

ParamProfile np_profile() {
    ParamProfile p;
    p.name = "np";
    p.step1.patch = {8, 1};
    p.step1.n_max = 16;
    p.step1.n_f = 4;
    p.step1.n_s = 7;
    p.step1.n_pr = 5;
    p.step1.n_b = 2;
    p.step1.d_pp = 3.0;
    // Generous per-pixel thresholds: an identical-content pair has expected
    // per-pixel distance 2*sigma^2, so 7000 admits true matches up to
    // sigma ~ 45 with slack; step 2 matches on the basic estimate, whose
    // residual noise is far smaller.
    p.step1.tau_pp = 7000.0;
    p.step1.lambda3d = 2.7;
    p.step1.st = 4;
    p.step1.transform = TransformId::kBior15;
    p.step1.beta = 2.0;

    p.step2 = p.step1;
    p.step2.patch = {7, 1};
    p.step2.n_max = 32;
    p.step2.tau_pp = 800.0;
    p.step2.lambda3d = 0.0;  // unused in step 2
    p.step2.transform = TransformId::kDct2d;
    return p;
}

namespace {

std::string transform_name(TransformId id) {
    return id == TransformId::kDct2d ? "dct" : "bior15";
}

TransformId transform_from_name(const std::string& s, const std::string& origin) {
    if (s == "dct") return TransformId::kDct2d;
    if (s == "bior15") return TransformId::kBior15;
    throw ConfigError(origin + ": unknown transform '" + s + "' (use dct or bior15)");
}

double parse_number(const std::string& s, const std::string& origin, const std::string& key) {
    if (s == "inf") return kTauDisabled;
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (...) {
        throw ConfigError(origin + ": bad numeric value '" + s + "' for " + key);
    }
}

int parse_int(const std::string& s, const std::string& origin, const std::string& key) {
    const double v = parse_number(s, origin, key);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) throw ConfigError(origin + ": " + key + " must be an integer");
    return i;
}

void append_number(std::string& out, const char* key, double v) {
    char buf[64];
    if (v == kTauDisabled)
        std::snprintf(buf, sizeof buf, "%s inf\n", key);
    else if (v == std::floor(v) && std::fabs(v) < 1e15)
        std::snprintf(buf, sizeof buf, "%s %.0f\n", key, v);
    else
        std::snprintf(buf, sizeof buf, "%s %.17g\n", key, v);
    out += buf;
}

void step_to_text(std::string& out, const char* prefix, const StepParams& s) {
    const std::string p = prefix;
    append_number(out, (p + ".patch_size").c_str(), s.patch.k);
    append_number(out, (p + ".patch_frames").c_str(), s.patch.kt);
    append_number(out, (p + ".max_matches").c_str(), s.n_max);
    append_number(out, (p + ".temporal_radius").c_str(), s.n_f);
    append_number(out, (p + ".window_ref").c_str(), s.n_s);
    append_number(out, (p + ".window_pred").c_str(), s.n_pr);
    append_number(out, (p + ".keep_per_frame").c_str(), s.n_b);
    append_number(out, (p + ".distance_bias_pp").c_str(), s.d_pp);
    append_number(out, (p + ".match_threshold_pp").c_str(), s.tau_pp);
    append_number(out, (p + ".lambda3d").c_str(), s.lambda3d);
    append_number(out, (p + ".grid_step").c_str(), s.st);
    append_number(out, (p + ".kaiser_beta").c_str(), s.beta);
    out += p + ".transform " + transform_name(s.transform) + "\n";
}

void apply_key(StepParams& s, const std::string& field, const std::string& value,
               const std::string& origin, const std::string& key) {
    if (field == "patch_size")
        s.patch.k = parse_int(value, origin, key);
    else if (field == "patch_frames")
        s.patch.kt = parse_int(value, origin, key);
    else if (field == "max_matches")
        s.n_max = parse_int(value, origin, key);
    else if (field == "temporal_radius")
        s.n_f = parse_int(value, origin, key);
    else if (field == "window_ref")
        s.n_s = parse_int(value, origin, key);
    else if (field == "window_pred")
        s.n_pr = parse_int(value, origin, key);
    else if (field == "keep_per_frame")
        s.n_b = parse_int(value, origin, key);
    else if (field == "distance_bias_pp")
        s.d_pp = parse_number(value, origin, key);
    else if (field == "match_threshold_pp")
        s.tau_pp = parse_number(value, origin, key);
    else if (field == "lambda3d")
        s.lambda3d = parse_number(value, origin, key);
    else if (field == "grid_step")
        s.st = parse_int(value, origin, key);
    else if (field == "kaiser_beta")
        s.beta = parse_number(value, origin, key);
    else if (field == "transform")
        s.transform = transform_from_name(value, origin);
    else
        throw ConfigError(origin + ": unknown profile key '" + key + "'");
}

}  // namespace

std::string profile_to_text(const ParamProfile& p) {
    std::string out;
    out += "# collaborative video filtering parameter profile\n";
    out += "# *_pp values are per pixel: bias scales by k^2, threshold by k^2*kt\n";
    out += "name " + p.name + "\n";
    step_to_text(out, "step1", p.step1);
    step_to_text(out, "step2", p.step2);
    return out;
}

ParamProfile parse_profile_text(const std::string& text, const std::string& origin) {
    ParamProfile p = np_profile();  // unspecified keys keep the np defaults
    std::istringstream in(text);
    std::string line;
    bool saw_name = false;
    while (std::getline(in, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string key, value, extra;
        if (!(ls >> key)) continue;
        if (!(ls >> value) || (ls >> extra))
            throw ConfigError(origin + ": malformed line '" + line + "' (want 'key value')");
        if (key == "name") {
            p.name = value;
            saw_name = true;
            continue;
        }
        const std::size_t dot = key.find('.');
        if (dot == std::string::npos) throw ConfigError(origin + ": unknown profile key '" + key + "'");
        const std::string step = key.substr(0, dot);
        const std::string field = key.substr(dot + 1);
        if (step == "step1")
            apply_key(p.step1, field, value, origin, key);
        else if (step == "step2")
            apply_key(p.step2, field, value, origin, key);
        else
            throw ConfigError(origin + ": unknown profile key '" + key + "'");
    }
    if (!saw_name) throw ConfigError(origin + ": profile has no 'name' entry");
    p.validate();
    return p;
}

ParamProfile load_profile(const std::string& name_or_path) {
    if (name_or_path == "np") return np_profile();
    std::ifstream in(name_or_path, std::ios::binary);
    if (!in) throw IoError(name_or_path + ": cannot open profile");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_profile_text(ss.str(), name_or_path);
}

void save_profile(const ParamProfile& p, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << profile_to_text(p);
    if (!out) throw IoError(path + ": short write");
}

}  // namespace vbm3d
