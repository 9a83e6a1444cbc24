#include "kernels_detail.hpp"

// AVX2 variants, 4 doubles per lane. Only exactly-rounded operations are
// used (add/sub/mul/div/sqrt, compare+blend), never FMA, so each element
// matches the scalar expression bit-for-bit. Tails reuse the shared scalar
// expressions.

#if defined(__x86_64__) || defined(_M_X64)
#define OSMOFUSE_HAVE_AVX2_KERNELS 1
#include <immintrin.h>
#endif

namespace osmofuse::kernels::detail {

#ifdef OSMOFUSE_HAVE_AVX2_KERNELS
namespace avx2 {

constexpr std::size_t W = 4;

void sub(double* dst, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + W <= n; i += W)
        _mm256_storeu_pd(dst + i,
                         _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) dst[i] = e_sub(a[i], b[i]);
}

void acc(double* dst, const double* a, std::size_t n) {
    std::size_t i = 0;
    for (; i + W <= n; i += W)
        _mm256_storeu_pd(dst + i,
                         _mm256_add_pd(_mm256_loadu_pd(dst + i), _mm256_loadu_pd(a + i)));
    for (; i < n; ++i) dst[i] = dst[i] + a[i];
}

void acc_sub(double* dst, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(dst + i), diff));
    }
    for (; i < n; ++i) dst[i] = dst[i] + (a[i] - b[i]);
}

void acc_neg(double* dst, const double* a, std::size_t n) {
    std::size_t i = 0;
    for (; i + W <= n; i += W)
        _mm256_storeu_pd(dst + i,
                         _mm256_sub_pd(_mm256_loadu_pd(dst + i), _mm256_loadu_pd(a + i)));
    for (; i < n; ++i) dst[i] = dst[i] - a[i];
}

void add_scaled(double* dst, const double* a, const double* b, double s, std::size_t n) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        __m256d sb = _mm256_mul_pd(vs, _mm256_loadu_pd(b + i));
        _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(a + i), sb));
    }
    for (; i < n; ++i) dst[i] = e_add_scaled(a[i], b[i], s);
}

void lincomb2(double* dst, const double* a, const double* b, double ca, double cb,
              std::size_t n) {
    const __m256d vca = _mm256_set1_pd(ca), vcb = _mm256_set1_pd(cb);
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        __m256d ta = _mm256_mul_pd(vca, _mm256_loadu_pd(a + i));
        __m256d tb = _mm256_mul_pd(vcb, _mm256_loadu_pd(b + i));
        _mm256_storeu_pd(dst + i, _mm256_add_pd(ta, tb));
    }
    for (; i < n; ++i) dst[i] = e_lincomb2(a[i], b[i], ca, cb);
}

void lincomb3(double* dst, const double* a, const double* b, const double* c, double ca,
              double cb, double cc, std::size_t n) {
    const __m256d vca = _mm256_set1_pd(ca), vcb = _mm256_set1_pd(cb),
                  vcc = _mm256_set1_pd(cc);
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        __m256d ta = _mm256_mul_pd(vca, _mm256_loadu_pd(a + i));
        __m256d tb = _mm256_mul_pd(vcb, _mm256_loadu_pd(b + i));
        __m256d tc = _mm256_mul_pd(vcc, _mm256_loadu_pd(c + i));
        _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_add_pd(ta, tb), tc));
    }
    for (; i < n; ++i) dst[i] = e_lincomb3(a[i], b[i], c[i], ca, cb, cc);
}

void mul(double* dst, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + W <= n; i += W)
        _mm256_storeu_pd(dst + i,
                         _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) dst[i] = e_mul(a[i], b[i]);
}

void mul_acc(double* dst, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(dst + i), prod));
    }
    for (; i < n; ++i) dst[i] = dst[i] + a[i] * b[i];
}

void div(double* dst, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + W <= n; i += W)
        _mm256_storeu_pd(dst + i,
                         _mm256_div_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) dst[i] = e_div(a[i], b[i]);
}

void div_neg(double* dst, const double* a, const double* b, std::size_t n) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        __m256d q = _mm256_div_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        _mm256_storeu_pd(dst + i, _mm256_xor_pd(q, sign));
    }
    for (; i < n; ++i) dst[i] = -(a[i] / b[i]);
}

void acc_scaled_diff(double* dst, const double* a, const double* b, double s,
                     std::size_t n) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        __m256d t = _mm256_mul_pd(vs, diff);
        _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(dst + i), t));
    }
    for (; i < n; ++i) dst[i] = dst[i] + s * (a[i] - b[i]);
}

void half_norm_sq(double* dst, const double* gx, const double* gy, std::size_t n) {
    const __m256d half = _mm256_set1_pd(0.5);
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        __m256d x = _mm256_loadu_pd(gx + i);
        __m256d y = _mm256_loadu_pd(gy + i);
        __m256d s = _mm256_add_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(y, y));
        _mm256_storeu_pd(dst + i, _mm256_mul_pd(half, s));
    }
    for (; i < n; ++i) dst[i] = e_half_norm_sq(gx[i], gy[i]);
}

void prox_fidelity_pointwise(double* dst, const double* u, const double* f,
                             const double* alpha, double gamma, double inv_zeta,
                             std::size_t n) {
    const __m256d vg = _mm256_set1_pd(gamma), viz = _mm256_set1_pd(inv_zeta);
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        __m256d w = _mm256_mul_pd(vg, _mm256_loadu_pd(alpha + i));
        __m256d num = _mm256_add_pd(_mm256_mul_pd(w, _mm256_loadu_pd(f + i)),
                                    _mm256_mul_pd(viz, _mm256_loadu_pd(u + i)));
        __m256d den = _mm256_add_pd(w, viz);
        _mm256_storeu_pd(dst + i, _mm256_div_pd(num, den));
    }
    for (; i < n; ++i) dst[i] = e_prox_fidelity(u[i], f[i], alpha[i], gamma, inv_zeta);
}

void huber_dual_project(double* yx, double* yy, double shrink, double eta, std::size_t n) {
    const __m256d vshrink = _mm256_set1_pd(shrink);
    const __m256d veta = _mm256_set1_pd(eta);
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        __m256d tx = _mm256_mul_pd(_mm256_loadu_pd(yx + i), vshrink);
        __m256d ty = _mm256_mul_pd(_mm256_loadu_pd(yy + i), vshrink);
        __m256d norm =
            _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(tx, tx), _mm256_mul_pd(ty, ty)));
        __m256d over = _mm256_cmp_pd(norm, veta, _CMP_GT_OQ);
        __m256d scale = _mm256_blendv_pd(one, _mm256_div_pd(veta, norm), over);
        _mm256_storeu_pd(yx + i, _mm256_mul_pd(tx, scale));
        _mm256_storeu_pd(yy + i, _mm256_mul_pd(ty, scale));
    }
    for (; i < n; ++i) e_huber_dual(yx[i], yy[i], shrink, eta);
}

void clamp_min(double* dst, double lo, std::size_t n) {
    const __m256d vlo = _mm256_set1_pd(lo);
    std::size_t i = 0;
    for (; i + W <= n; i += W)
        _mm256_storeu_pd(dst + i, _mm256_max_pd(_mm256_loadu_pd(dst + i), vlo));
    for (; i < n; ++i) dst[i] = e_max(dst[i], lo);
}

void clamp(double* dst, double lo, double hi, std::size_t n) {
    const __m256d vlo = _mm256_set1_pd(lo), vhi = _mm256_set1_pd(hi);
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        __m256d t = _mm256_max_pd(_mm256_loadu_pd(dst + i), vlo);
        _mm256_storeu_pd(dst + i, _mm256_min_pd(t, vhi));
    }
    for (; i < n; ++i) dst[i] = e_min(e_max(dst[i], lo), hi);
}

} // namespace avx2

bool avx2_compiled_in() { return true; }

const KernelTable& avx2_table() {
    static const KernelTable t = {
        avx2::sub,          avx2::acc,
        avx2::acc_sub,      avx2::acc_neg,
        avx2::add_scaled,   avx2::lincomb2,
        avx2::lincomb3,     avx2::mul,
        avx2::mul_acc,      avx2::div,
        avx2::div_neg,      avx2::acc_scaled_diff,
        avx2::half_norm_sq, avx2::prox_fidelity_pointwise,
        avx2::huber_dual_project, avx2::clamp_min,
        avx2::clamp,
    };
    return t;
}

#else

bool avx2_compiled_in() { return false; }

const KernelTable& avx2_table() { return scalar_table(); }

#endif

} // namespace osmofuse::kernels::detail
