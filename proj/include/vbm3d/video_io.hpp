#pragma once

#include <string>

#include "vbm3d/video.hpp"

namespace vbm3d {

// Expands a printf-style pattern holding exactly one integer conversion
// (%d, %i or %u with optional flags/width) with the given index.
// Throws ConfigError for malformed patterns.
std::string format_index(const std::string& pattern, int index);

// Loads frames pattern%first .. pattern%last (inclusive). Formats are detected
// by content: PNG, binary PGM (P5, 8/16-bit) and PFM float32 (grayscale "Pf").
// Integer samples are widened to float without rescaling.
Video load_sequence(const std::string& pattern, int first, int last);

// Writes one file per frame, indexed first, first+1, ... The container comes
// from the pattern extension: .png and .pgm store 8-bit (samples clamped to
// [0,255] and rounded), .pfm stores lossless float32.
void save_sequence(const Video& v, const std::string& pattern, int first = 0);

}  // namespace vbm3d
