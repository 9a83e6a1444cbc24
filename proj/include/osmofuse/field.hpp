#ifndef OSMOFUSE_FIELD_HPP
#define OSMOFUSE_FIELD_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace osmofuse {

/// Error raised when a solver fails numerically (divergence, NaN, cap hit).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Error raised for unreadable or malformed input files.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Single-channel 2-D grid of doubles, row-major, unit grid spacing.
/// Grids are at least 2x2 so the forward/backward difference pair is
/// well defined.
class ScalarField {
public:
    ScalarField() = default;

    ScalarField(int height, int width, double fill = 0.0)
        : height_(height), width_(width),
          data_(static_cast<std::size_t>(check_dims(height, width)), fill) {}

    int height() const { return height_; }
    int width() const { return width_; }
    std::size_t size() const { return data_.size(); }

    double& at(int r, int c) { return data_[static_cast<std::size_t>(r) * width_ + c]; }
    double at(int r, int c) const { return data_[static_cast<std::size_t>(r) * width_ + c]; }

    double* row(int r) { return data_.data() + static_cast<std::size_t>(r) * width_; }
    const double* row(int r) const { return data_.data() + static_cast<std::size_t>(r) * width_; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool same_shape(const ScalarField& o) const {
        return height_ == o.height_ && width_ == o.width_;
    }

    friend bool operator==(const ScalarField& a, const ScalarField& b) {
        return a.height_ == b.height_ && a.width_ == b.width_ && a.data_ == b.data_;
    }

private:
    static long long check_dims(int height, int width) {
        if (height < 2 || width < 2)
            throw std::invalid_argument("ScalarField: dimensions must be at least 2x2, got " +
                                        std::to_string(height) + "x" + std::to_string(width));
        return static_cast<long long>(height) * width;
    }

    int height_ = 0, width_ = 0;
    std::vector<double> data_;
};

/// Pair of ScalarFields holding the x (column direction) and y (row
/// direction) components of a staggered vector field.
struct VectorField {
    ScalarField x, y;

    VectorField() = default;
    VectorField(int height, int width, double fill = 0.0)
        : x(height, width, fill), y(height, width, fill) {}

    int height() const { return x.height(); }
    int width() const { return x.width(); }

    bool same_shape(const VectorField& o) const {
        return x.same_shape(o.x) && y.same_shape(o.y);
    }
};

/// Blend-weight map with entries in [0,1]; same grid as the images it mixes.
using AlphaMap = ScalarField;

/// Multi-channel image (1 = grayscale, 3 = RGB); every channel shares one grid.
class Image {
public:
    Image() = default;

    Image(int channels, int height, int width, double fill = 0.0) {
        if (channels != 1 && channels != 3)
            throw std::invalid_argument("Image: channel count must be 1 or 3, got " +
                                        std::to_string(channels));
        ch_.reserve(static_cast<std::size_t>(channels));
        for (int c = 0; c < channels; ++c) ch_.emplace_back(height, width, fill);
    }

    explicit Image(ScalarField plane) { ch_.push_back(std::move(plane)); }

    int channels() const { return static_cast<int>(ch_.size()); }
    int height() const { return ch_.empty() ? 0 : ch_[0].height(); }
    int width() const { return ch_.empty() ? 0 : ch_[0].width(); }

    ScalarField& channel(int c) { return ch_[static_cast<std::size_t>(c)]; }
    const ScalarField& channel(int c) const { return ch_[static_cast<std::size_t>(c)]; }

    bool same_shape(const Image& o) const {
        return channels() == o.channels() && height() == o.height() && width() == o.width();
    }

    friend bool operator==(const Image& a, const Image& b) { return a.ch_ == b.ch_; }

private:
    std::vector<ScalarField> ch_;
};

inline void require_same_shape(const Image& a, const Image& b, const char* what) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(what) + ": image shapes differ");
}

inline void require_same_shape(const Image& a, const ScalarField& m, const char* what) {
    if (a.height() != m.height() || a.width() != m.width())
        throw std::invalid_argument(std::string(what) + ": map shape differs from image");
}

/// Throws unless every pixel of every channel is strictly positive; the
/// message names the first offending pixel.
void require_positive(const Image& img, const char* what);

/// Throws unless all alpha entries lie in [0,1].
void require_alpha_range(const AlphaMap& alpha, const char* what);

bool all_finite(const ScalarField& f);
bool all_finite(const Image& img);

double min_value(const ScalarField& f);
double max_value(const ScalarField& f);
double mean_value(const ScalarField& f);

} // namespace osmofuse

#endif
