#include "osmofuse/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "kernels_detail.hpp"

namespace osmofuse::kernels {

namespace {

using detail::KernelTable;

const KernelTable* g_table = nullptr;
Backend g_active = Backend::Scalar;

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

void ensure_init() {
    if (!g_table) select_backend(Backend::Auto);
}

} // namespace

bool avx2_available() { return detail::avx2_compiled_in() && cpu_has_avx2(); }

void select_backend(Backend b) {
    if (b == Backend::Auto) b = avx2_available() ? Backend::Avx2 : Backend::Scalar;
    switch (b) {
    case Backend::Scalar:
        g_table = &detail::scalar_table();
        break;
    case Backend::Avx2:
        if (!avx2_available())
            throw std::invalid_argument("kernels: AVX2 backend not available on this CPU");
        g_table = &detail::avx2_table();
        break;
    default:
        throw std::invalid_argument("kernels: unknown backend");
    }
    g_active = b;
}

Backend active_backend() {
    ensure_init();
    return g_active;
}

const char* backend_name(Backend b) {
    switch (b) {
    case Backend::Auto: return "auto";
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    }
    return "?";
}

#define OSMOFUSE_DISPATCH(fn, ...)                                                        \
    do {                                                                                  \
        ensure_init();                                                                    \
        g_table->fn(__VA_ARGS__);                                                         \
    } while (0)

void sub(double* dst, const double* a, const double* b, std::size_t n) {
    OSMOFUSE_DISPATCH(sub, dst, a, b, n);
}
void acc(double* dst, const double* a, std::size_t n) { OSMOFUSE_DISPATCH(acc, dst, a, n); }
void acc_sub(double* dst, const double* a, const double* b, std::size_t n) {
    OSMOFUSE_DISPATCH(acc_sub, dst, a, b, n);
}
void acc_neg(double* dst, const double* a, std::size_t n) {
    OSMOFUSE_DISPATCH(acc_neg, dst, a, n);
}
void add_scaled(double* dst, const double* a, const double* b, double s, std::size_t n) {
    OSMOFUSE_DISPATCH(add_scaled, dst, a, b, s, n);
}
void lincomb2(double* dst, const double* a, const double* b, double ca, double cb,
              std::size_t n) {
    OSMOFUSE_DISPATCH(lincomb2, dst, a, b, ca, cb, n);
}
void lincomb3(double* dst, const double* a, const double* b, const double* c, double ca,
              double cb, double cc, std::size_t n) {
    OSMOFUSE_DISPATCH(lincomb3, dst, a, b, c, ca, cb, cc, n);
}
void mul(double* dst, const double* a, const double* b, std::size_t n) {
    OSMOFUSE_DISPATCH(mul, dst, a, b, n);
}
void mul_acc(double* dst, const double* a, const double* b, std::size_t n) {
    OSMOFUSE_DISPATCH(mul_acc, dst, a, b, n);
}
void div(double* dst, const double* a, const double* b, std::size_t n) {
    OSMOFUSE_DISPATCH(div, dst, a, b, n);
}
void div_neg(double* dst, const double* a, const double* b, std::size_t n) {
    OSMOFUSE_DISPATCH(div_neg, dst, a, b, n);
}
void acc_scaled_diff(double* dst, const double* a, const double* b, double s,
                     std::size_t n) {
    OSMOFUSE_DISPATCH(acc_scaled_diff, dst, a, b, s, n);
}
void half_norm_sq(double* dst, const double* gx, const double* gy, std::size_t n) {
    OSMOFUSE_DISPATCH(half_norm_sq, dst, gx, gy, n);
}
void prox_fidelity_pointwise(double* dst, const double* u, const double* f,
                             const double* alpha, double gamma, double inv_zeta,
                             std::size_t n) {
    OSMOFUSE_DISPATCH(prox_fidelity_pointwise, dst, u, f, alpha, gamma, inv_zeta, n);
}
void huber_dual_project(double* yx, double* yy, double shrink, double eta, std::size_t n) {
    OSMOFUSE_DISPATCH(huber_dual_project, yx, yy, shrink, eta, n);
}
void clamp_min(double* dst, double lo, std::size_t n) {
    OSMOFUSE_DISPATCH(clamp_min, dst, lo, n);
}
void clamp(double* dst, double lo, double hi, std::size_t n) {
    OSMOFUSE_DISPATCH(clamp, dst, lo, hi, n);
}

#undef OSMOFUSE_DISPATCH

// Reductions: plain left-to-right sums, one result regardless of backend.

double sum(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
}

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sum_sq(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
    return s;
}

double sum_sq_diff(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double weighted_grad_sq(const double* w, const double* gx, const double* gy,
                        std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * (gx[i] * gx[i] + gy[i] * gy[i]);
    return s;
}

double weighted_sq_diff(const double* w, const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = a[i] - b[i];
        s += w[i] * d * d;
    }
    return s;
}

double huber_total(const double* gx, const double* gy, double eps, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double t = std::sqrt(gx[i] * gx[i] + gy[i] * gy[i]);
        s += (t <= eps) ? t * t / (2.0 * eps) : t - 0.5 * eps;
    }
    return s;
}

double min_value(const double* a, std::size_t n) {
    double m = a[0];
    for (std::size_t i = 1; i < n; ++i)
        if (a[i] < m) m = a[i];
    return m;
}

double max_value(const double* a, std::size_t n) {
    double m = a[0];
    for (std::size_t i = 1; i < n; ++i)
        if (a[i] > m) m = a[i];
    return m;
}

} // namespace osmofuse::kernels
