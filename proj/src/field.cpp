#include "osmofuse/field.hpp"

#include <cmath>

#include "osmofuse/kernels.hpp"

namespace osmofuse {

void require_positive(const Image& img, const char* what) {
    for (int c = 0; c < img.channels(); ++c) {
        const ScalarField& p = img.channel(c);
        for (int r = 0; r < p.height(); ++r)
            for (int col = 0; col < p.width(); ++col)
                if (!(p.at(r, col) > 0.0))
                    throw std::invalid_argument(
                        std::string(what) + ": non-positive intensity " +
                        std::to_string(p.at(r, col)) + " at pixel (row " + std::to_string(r) +
                        ", col " + std::to_string(col) + ", channel " + std::to_string(c) +
                        ")");
    }
}

void require_alpha_range(const AlphaMap& alpha, const char* what) {
    for (int r = 0; r < alpha.height(); ++r)
        for (int c = 0; c < alpha.width(); ++c) {
            double a = alpha.at(r, c);
            if (!(a >= 0.0 && a <= 1.0))
                throw std::invalid_argument(std::string(what) +
                                            ": alpha value outside [0,1] at pixel (row " +
                                            std::to_string(r) + ", col " + std::to_string(c) +
                                            "): " + std::to_string(a));
        }
}

bool all_finite(const ScalarField& f) {
    const double* p = f.data();
    for (std::size_t i = 0; i < f.size(); ++i)
        if (!std::isfinite(p[i])) return false;
    return true;
}

bool all_finite(const Image& img) {
    for (int c = 0; c < img.channels(); ++c)
        if (!all_finite(img.channel(c))) return false;
    return true;
}

double min_value(const ScalarField& f) { return kernels::min_value(f.data(), f.size()); }
double max_value(const ScalarField& f) { return kernels::max_value(f.data(), f.size()); }

double mean_value(const ScalarField& f) {
    return kernels::sum(f.data(), f.size()) / static_cast<double>(f.size());
}

} // namespace osmofuse
