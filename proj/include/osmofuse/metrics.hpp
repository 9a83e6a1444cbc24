#ifndef OSMOFUSE_METRICS_HPP
#define OSMOFUSE_METRICS_HPP

#include <iosfwd>

#include "osmofuse/field.hpp"

namespace osmofuse {

/// Geometric chromaticity mean: pixelwise cube root of the RGB product.
/// Requires a strictly positive 3-channel image.
ScalarField gcm(const Image& z);

/// Pixelwise chromaticity error |u1/GCM(u1) - u2/GCM(u2)| per channel.
/// Zero wherever the two RGB triples are proportional, so the measure is
/// invariant to per-pixel multiplicative brightness changes.
Image chroma_error(const Image& u1, const Image& u2);

/// Root-mean-square of the chromaticity error over pixels, per channel plus
/// the channel average (in that order: R, G, B, avg).
struct ChromaErrorNorm {
    double channel[3] = {0.0, 0.0, 0.0};
    double average = 0.0;
};

ChromaErrorNorm chroma_error_norm(const Image& u1, const Image& u2);

/// Writes `metric,channel,value` rows; values carry 12 significant digits.
/// The metric label states the pixel normalisation (RMS over pixels).
void write_metrics_csv(std::ostream& os, const ChromaErrorNorm& norm);

} // namespace osmofuse

#endif
