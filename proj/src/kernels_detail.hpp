#ifndef OSMOFUSE_KERNELS_DETAIL_HPP
#define OSMOFUSE_KERNELS_DETAIL_HPP

#include <cmath>
#include <cstddef>

// Internal: per-element scalar expressions shared by the scalar backend and
// the tail loops of the SIMD backends. Keeping them in one place guarantees
// both paths round identically.

namespace osmofuse::kernels::detail {

inline double e_sub(double a, double b) { return a - b; }
inline double e_add_scaled(double a, double b, double s) { return a + s * b; }
inline double e_lincomb2(double a, double b, double ca, double cb) { return ca * a + cb * b; }
inline double e_lincomb3(double a, double b, double c, double ca, double cb, double cc) {
    return ca * a + cb * b + cc * c;
}
inline double e_mul(double a, double b) { return a * b; }
inline double e_div(double a, double b) { return a / b; }
inline double e_half_norm_sq(double gx, double gy) { return 0.5 * (gx * gx + gy * gy); }
inline double e_prox_fidelity(double u, double f, double alpha, double gamma,
                              double inv_zeta) {
    double w = gamma * alpha;
    return (w * f + inv_zeta * u) / (w + inv_zeta);
}
inline void e_huber_dual(double& yx, double& yy, double shrink, double eta) {
    double tx = yx * shrink;
    double ty = yy * shrink;
    double norm = std::sqrt(tx * tx + ty * ty);
    double scale = (norm > eta) ? eta / norm : 1.0;
    yx = tx * scale;
    yy = ty * scale;
}
// max/min written as compare-select to match the vmaxpd/vminpd NaN rules.
inline double e_max(double a, double b) { return a > b ? a : b; }
inline double e_min(double a, double b) { return a < b ? a : b; }

struct KernelTable {
    void (*sub)(double*, const double*, const double*, std::size_t);
    void (*acc)(double*, const double*, std::size_t);
    void (*acc_sub)(double*, const double*, const double*, std::size_t);
    void (*acc_neg)(double*, const double*, std::size_t);
    void (*add_scaled)(double*, const double*, const double*, double, std::size_t);
    void (*lincomb2)(double*, const double*, const double*, double, double, std::size_t);
    void (*lincomb3)(double*, const double*, const double*, const double*, double, double,
                     double, std::size_t);
    void (*mul)(double*, const double*, const double*, std::size_t);
    void (*mul_acc)(double*, const double*, const double*, std::size_t);
    void (*div)(double*, const double*, const double*, std::size_t);
    void (*div_neg)(double*, const double*, const double*, std::size_t);
    void (*acc_scaled_diff)(double*, const double*, const double*, double, std::size_t);
    void (*half_norm_sq)(double*, const double*, const double*, std::size_t);
    void (*prox_fidelity_pointwise)(double*, const double*, const double*, const double*,
                                    double, double, std::size_t);
    void (*huber_dual_project)(double*, double*, double, double, std::size_t);
    void (*clamp_min)(double*, double, std::size_t);
    void (*clamp)(double*, double, double, std::size_t);
};

const KernelTable& scalar_table();
const KernelTable& avx2_table(); // valid only when compiled-in and CPU supports AVX2
bool avx2_compiled_in();

} // namespace osmofuse::kernels::detail

#endif
