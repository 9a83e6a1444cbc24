#include "osmofuse/grid_ops.hpp"

#include <cmath>
#include <random>

#include "osmofuse/kernels.hpp"

namespace osmofuse {

void gradient_into(const ScalarField& u, VectorField& out) {
    const int h = u.height(), w = u.width();
    if (!out.x.same_shape(u)) out = VectorField(h, w);
    // x: forward difference along the row, last column zero
    for (int r = 0; r < h; ++r) {
        const double* src = u.row(r);
        double* gx = out.x.row(r);
        kernels::sub(gx, src + 1, src, static_cast<std::size_t>(w - 1));
        gx[w - 1] = 0.0;
    }
    // y: forward difference across rows, last row zero
    for (int r = 0; r < h - 1; ++r)
        kernels::sub(out.y.row(r), u.row(r + 1), u.row(r), static_cast<std::size_t>(w));
    double* last = out.y.row(h - 1);
    for (int c = 0; c < w; ++c) last[c] = 0.0;
}

void divergence_into(const VectorField& p, ScalarField& out) {
    const int h = p.height(), w = p.width();
    if (!out.same_shape(p.x)) out = ScalarField(h, w);
    // x part: backward difference, negative adjoint of the forward gradient
    for (int r = 0; r < h; ++r) {
        const double* px = p.x.row(r);
        double* d = out.row(r);
        d[0] = px[0];
        kernels::sub(d + 1, px + 1, px, static_cast<std::size_t>(w - 2));
        d[w - 1] = -px[w - 2];
    }
    // y part accumulated on top
    kernels::acc(out.row(0), p.y.row(0), static_cast<std::size_t>(w));
    for (int r = 1; r < h - 1; ++r)
        kernels::acc_sub(out.row(r), p.y.row(r), p.y.row(r - 1), static_cast<std::size_t>(w));
    kernels::acc_neg(out.row(h - 1), p.y.row(h - 2), static_cast<std::size_t>(w));
}

void laplacian_into(const ScalarField& u, ScalarField& out, VectorField& scratch) {
    gradient_into(u, scratch);
    divergence_into(scratch, out);
}

VectorField gradient(const ScalarField& u) {
    VectorField out(u.height(), u.width());
    gradient_into(u, out);
    return out;
}

ScalarField divergence(const VectorField& p) {
    ScalarField out(p.height(), p.width());
    divergence_into(p, out);
    return out;
}

ScalarField laplacian(const ScalarField& u) {
    VectorField scratch(u.height(), u.width());
    ScalarField out(u.height(), u.width());
    laplacian_into(u, out, scratch);
    return out;
}

double operator_norm_sq_estimate(int height, int width) {
    if (height < 2 || width < 2)
        throw std::invalid_argument("operator_norm_sq_estimate: grid must be at least 2x2");

    // Power iteration on grad^T grad = -laplacian.
    ScalarField x(height, width);
    std::mt19937 rng(0x5eedu);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = dist(rng);

    VectorField scratch(height, width);
    ScalarField bx(height, width);
    const int cap = 100000;
    double lambda_prev = 0.0;
    int settled = 0;
    for (int it = 0; it < cap; ++it) {
        double norm = std::sqrt(kernels::sum_sq(x.data(), x.size()));
        if (norm == 0.0)
            throw NumericError("operator_norm_sq_estimate: iterate collapsed to zero");
        for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] /= norm;

        laplacian_into(x, bx, scratch);
        for (std::size_t i = 0; i < bx.size(); ++i) bx.data()[i] = -bx.data()[i];

        double lambda = kernels::dot(x.data(), bx.data(), x.size());
        if (std::abs(lambda - lambda_prev) <= 1e-13 * std::max(1.0, std::abs(lambda))) {
            if (++settled >= 8) return lambda;
        } else {
            settled = 0;
        }
        lambda_prev = lambda;
        x = bx;
    }
    throw NumericError("operator_norm_sq_estimate: power iteration did not settle within " +
                       std::to_string(cap) + " iterations");
}

} // namespace osmofuse
