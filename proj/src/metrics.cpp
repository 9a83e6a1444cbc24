#include "osmofuse/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace osmofuse {

namespace {

void require_rgb_positive(const Image& z, const char* what) {
    if (z.channels() != 3)
        throw std::invalid_argument(std::string(what) +
                                    ": chromaticity metrics need a 3-channel image, got " +
                                    std::to_string(z.channels()) + " channel(s)");
    require_positive(z, what);
}

} // namespace

ScalarField gcm(const Image& z) {
    require_rgb_positive(z, "gcm");
    ScalarField out(z.height(), z.width());
    const double* r = z.channel(0).data();
    const double* g = z.channel(1).data();
    const double* b = z.channel(2).data();
    double* o = out.data();
    for (std::size_t i = 0; i < out.size(); ++i) o[i] = std::cbrt(r[i] * g[i] * b[i]);
    return out;
}

Image chroma_error(const Image& u1, const Image& u2) {
    require_rgb_positive(u1, "chroma_error(u1)");
    require_rgb_positive(u2, "chroma_error(u2)");
    require_same_shape(u1, u2, "chroma_error");
    const ScalarField g1 = gcm(u1), g2 = gcm(u2);
    Image err(3, u1.height(), u1.width());
    for (int c = 0; c < 3; ++c) {
        const double* a = u1.channel(c).data();
        const double* b = u2.channel(c).data();
        double* e = err.channel(c).data();
        for (std::size_t i = 0; i < g1.size(); ++i)
            e[i] = std::abs(a[i] / g1.data()[i] - b[i] / g2.data()[i]);
    }
    return err;
}

ChromaErrorNorm chroma_error_norm(const Image& u1, const Image& u2) {
    const Image err = chroma_error(u1, u2);
    ChromaErrorNorm norm;
    const double n = static_cast<double>(err.channel(0).size());
    for (int c = 0; c < 3; ++c) {
        const double* e = err.channel(c).data();
        double s = 0.0;
        for (std::size_t i = 0; i < err.channel(c).size(); ++i) s += e[i] * e[i];
        norm.channel[c] = std::sqrt(s / n);
    }
    norm.average = (norm.channel[0] + norm.channel[1] + norm.channel[2]) / 3.0;
    return norm;
}

void write_metrics_csv(std::ostream& os, const ChromaErrorNorm& norm) {
    os << "metric,channel,value\n";
    char buf[32];
    static const char* names[3] = {"R", "G", "B"};
    for (int c = 0; c < 3; ++c) {
        std::snprintf(buf, sizeof buf, "%.12g", norm.channel[c]);
        os << "chroma_err_rms," << names[c] << ',' << buf << '\n';
    }
    std::snprintf(buf, sizeof buf, "%.12g", norm.average);
    os << "chroma_err_rms,avg," << buf << '\n';
}

} // namespace osmofuse
