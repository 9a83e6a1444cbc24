#include "kernels_detail.hpp"

namespace osmofuse::kernels::detail {
namespace scalar {

void sub(double* dst, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = e_sub(a[i], b[i]);
}

void acc(double* dst, const double* a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = dst[i] + a[i];
}

void acc_sub(double* dst, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = dst[i] + (a[i] - b[i]);
}

void acc_neg(double* dst, const double* a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = dst[i] - a[i];
}

void add_scaled(double* dst, const double* a, const double* b, double s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = e_add_scaled(a[i], b[i], s);
}

void lincomb2(double* dst, const double* a, const double* b, double ca, double cb,
              std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = e_lincomb2(a[i], b[i], ca, cb);
}

void lincomb3(double* dst, const double* a, const double* b, const double* c, double ca,
              double cb, double cc, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = e_lincomb3(a[i], b[i], c[i], ca, cb, cc);
}

void mul(double* dst, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = e_mul(a[i], b[i]);
}

void mul_acc(double* dst, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = dst[i] + a[i] * b[i];
}

void div(double* dst, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = e_div(a[i], b[i]);
}

void div_neg(double* dst, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = -(a[i] / b[i]);
}

void acc_scaled_diff(double* dst, const double* a, const double* b, double s,
                     std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = dst[i] + s * (a[i] - b[i]);
}

void half_norm_sq(double* dst, const double* gx, const double* gy, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = e_half_norm_sq(gx[i], gy[i]);
}

void prox_fidelity_pointwise(double* dst, const double* u, const double* f,
                             const double* alpha, double gamma, double inv_zeta,
                             std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        dst[i] = e_prox_fidelity(u[i], f[i], alpha[i], gamma, inv_zeta);
}

void huber_dual_project(double* yx, double* yy, double shrink, double eta, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) e_huber_dual(yx[i], yy[i], shrink, eta);
}

void clamp_min(double* dst, double lo, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = e_max(dst[i], lo);
}

void clamp(double* dst, double lo, double hi, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = e_min(e_max(dst[i], lo), hi);
}

} // namespace scalar

const KernelTable& scalar_table() {
    static const KernelTable t = {
        scalar::sub,          scalar::acc,
        scalar::acc_sub,      scalar::acc_neg,
        scalar::add_scaled,   scalar::lincomb2,
        scalar::lincomb3,     scalar::mul,
        scalar::mul_acc,      scalar::div,
        scalar::div_neg,      scalar::acc_scaled_diff,
        scalar::half_norm_sq, scalar::prox_fidelity_pointwise,
        scalar::huber_dual_project, scalar::clamp_min,
        scalar::clamp,
    };
    return t;
}

} // namespace osmofuse::kernels::detail
