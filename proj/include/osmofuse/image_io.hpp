#ifndef OSMOFUSE_IMAGE_IO_HPP
#define OSMOFUSE_IMAGE_IO_HPP

#include <string>

#include "osmofuse/field.hpp"

namespace osmofuse {

/// Reads an 8- or 16-bit PNG, PPM or PGM file into intensities on [0, 255]
/// (16-bit samples are rescaled linearly), clamped below at `offset`.
/// Grayscale stays single channel, color becomes RGB; a PNG alpha channel
/// is dropped. Throws IoError for unreadable or unsupported files.
Image load_image(const std::string& path, double offset);

/// Reads a single-channel file as a blend map: intensities are divided by
/// 255 and clamped to [0, 1]. Color maps are rejected.
AlphaMap load_alpha(const std::string& path);

/// Writes an 8-bit PNG (grayscale or RGB); values are clamped to [0, 255]
/// and rounded half-up.
void write_png(const std::string& path, const Image& img);

/// Gaussian blur of a blend map with reflective boundary handling; the
/// result is clamped back to [0, 1]. sigma = 0 returns the input unchanged.
AlphaMap blur_alpha(const AlphaMap& alpha, double sigma);

} // namespace osmofuse

#endif
