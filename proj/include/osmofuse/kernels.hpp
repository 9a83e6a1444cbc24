#ifndef OSMOFUSE_KERNELS_HPP
#define OSMOFUSE_KERNELS_HPP

#include <cstddef>

// Elementwise inner loops used by the grid operators, energy terms and
// proximal maps. Each kernel has a scalar reference implementation and an
// AVX2 variant; the active variant is selected at runtime. Both variants
// evaluate the same IEEE expression per element (no FMA contraction), so
// their outputs are bitwise identical — the equivalence suite asserts this.
//
// Reductions are NOT dispatched: they run scalar and sequential in index
// order so that every sum is reproducible bit-for-bit across runs and
// backends.

namespace osmofuse::kernels {

enum class Backend { Auto, Scalar, Avx2 };

/// True when the CPU supports the AVX2 variants.
bool avx2_available();

/// Selects the kernel variant; Auto picks AVX2 when available.
/// Throws std::invalid_argument if the requested backend is unsupported.
void select_backend(Backend b);

/// Backend currently in use (never Auto).
Backend active_backend();

const char* backend_name(Backend b);

// --- dispatched elementwise kernels ---------------------------------------

/// dst[i] = a[i] - b[i]
void sub(double* dst, const double* a, const double* b, std::size_t n);
/// dst[i] += a[i]
void acc(double* dst, const double* a, std::size_t n);
/// dst[i] += a[i] - b[i]
void acc_sub(double* dst, const double* a, const double* b, std::size_t n);
/// dst[i] -= a[i]
void acc_neg(double* dst, const double* a, std::size_t n);
/// dst[i] = a[i] + s * b[i]
void add_scaled(double* dst, const double* a, const double* b, double s, std::size_t n);
/// dst[i] = ca * a[i] + cb * b[i]
void lincomb2(double* dst, const double* a, const double* b, double ca, double cb,
              std::size_t n);
/// dst[i] = ca * a[i] + cb * b[i] + cc * c[i]
void lincomb3(double* dst, const double* a, const double* b, const double* c, double ca,
              double cb, double cc, std::size_t n);
/// dst[i] = a[i] * b[i]
void mul(double* dst, const double* a, const double* b, std::size_t n);
/// dst[i] += a[i] * b[i]
void mul_acc(double* dst, const double* a, const double* b, std::size_t n);
/// dst[i] = a[i] / b[i]
void div(double* dst, const double* a, const double* b, std::size_t n);
/// dst[i] = -(a[i] / b[i])
void div_neg(double* dst, const double* a, const double* b, std::size_t n);
/// dst[i] += s * (a[i] - b[i])
void acc_scaled_diff(double* dst, const double* a, const double* b, double s, std::size_t n);
/// dst[i] = 0.5 * (gx[i]^2 + gy[i]^2)
void half_norm_sq(double* dst, const double* gx, const double* gy, std::size_t n);
/// dst[i] = (gamma*alpha[i]*f[i] + inv_zeta*u[i]) / (gamma*alpha[i] + inv_zeta)
void prox_fidelity_pointwise(double* dst, const double* u, const double* f,
                             const double* alpha, double gamma, double inv_zeta,
                             std::size_t n);
/// In place: t = y * shrink, then project the 2-vector (tx,ty) onto the
/// closed ball of radius eta.
void huber_dual_project(double* yx, double* yy, double shrink, double eta, std::size_t n);
/// dst[i] = max(dst[i], lo)   (NaN maps to lo)
void clamp_min(double* dst, double lo, std::size_t n);
/// dst[i] = min(max(dst[i], lo), hi)
void clamp(double* dst, double lo, double hi, std::size_t n);

// --- sequential reductions (scalar only, fixed order) ----------------------

double sum(const double* a, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double sum_sq(const double* a, std::size_t n);
double sum_sq_diff(const double* a, const double* b, std::size_t n);
/// sum_i w[i] * (gx[i]^2 + gy[i]^2)
double weighted_grad_sq(const double* w, const double* gx, const double* gy, std::size_t n);
/// sum_i w[i] * (a[i] - b[i])^2
double weighted_sq_diff(const double* w, const double* a, const double* b, std::size_t n);
/// sum_i H_eps(sqrt(gx[i]^2 + gy[i]^2)) with the Huber profile
/// H_eps(t) = t^2/(2 eps) for t <= eps, t - eps/2 otherwise.
double huber_total(const double* gx, const double* gy, double eps, std::size_t n);
double min_value(const double* a, std::size_t n);
double max_value(const double* a, std::size_t n);

} // namespace osmofuse::kernels

#endif
