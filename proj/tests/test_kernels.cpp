#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "osmofuse/kernels.hpp"

// Every dispatched kernel must produce bitwise identical output on the
// scalar and AVX2 backends; the solver's reproducibility guarantee rests
// on this.

namespace k = osmofuse::kernels;

namespace {

struct BackendGuard {
    k::Backend saved;
    BackendGuard() : saved(k::active_backend()) {}
    ~BackendGuard() { k::select_backend(saved); }
};

std::vector<double> random_vec(std::size_t n, std::mt19937& rng, double lo = -10.0,
                               double hi = 10.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = dist(rng);
    return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

const std::size_t sizes[] = {1, 2, 3, 4, 5, 7, 8, 15, 16, 64, 257, 1000};

} // namespace

TEST_CASE("scalar and AVX2 backends agree bitwise on every kernel") {
    if (!k::avx2_available()) {
        MESSAGE("AVX2 not available; nothing to compare");
        return;
    }
    BackendGuard guard;

    std::mt19937 seed_rng(99);
    for (std::size_t n : sizes) {
        const unsigned seed = seed_rng();
        std::mt19937 rng(seed);
        const auto a = random_vec(n, rng);
        const auto b = random_vec(n, rng, 0.5, 10.0); // positive: used as divisor
        const auto c = random_vec(n, rng);
        const auto alpha = random_vec(n, rng, 0.0, 1.0);
        const double s = 1.7, ca = -0.3, cb = 2.1, cc = 0.55;

        auto run_all = [&](std::vector<std::vector<double>>& outs) {
            outs.clear();
            std::vector<double> d(n);
            k::sub(d.data(), a.data(), b.data(), n); outs.push_back(d);
            d = c; k::acc(d.data(), a.data(), n); outs.push_back(d);
            d = c; k::acc_sub(d.data(), a.data(), b.data(), n); outs.push_back(d);
            d = c; k::acc_neg(d.data(), a.data(), n); outs.push_back(d);
            k::add_scaled(d.data(), a.data(), b.data(), s, n); outs.push_back(d);
            k::lincomb2(d.data(), a.data(), b.data(), ca, cb, n); outs.push_back(d);
            k::lincomb3(d.data(), a.data(), b.data(), c.data(), ca, cb, cc, n); outs.push_back(d);
            k::mul(d.data(), a.data(), b.data(), n); outs.push_back(d);
            d = c; k::mul_acc(d.data(), a.data(), b.data(), n); outs.push_back(d);
            k::div(d.data(), a.data(), b.data(), n); outs.push_back(d);
            k::div_neg(d.data(), a.data(), b.data(), n); outs.push_back(d);
            d = c; k::acc_scaled_diff(d.data(), a.data(), b.data(), s, n); outs.push_back(d);
            k::half_norm_sq(d.data(), a.data(), b.data(), n); outs.push_back(d);
            k::prox_fidelity_pointwise(d.data(), a.data(), c.data(), alpha.data(), 0.8,
                                       3.3, n); outs.push_back(d);
            std::vector<double> yx = a, yy = c;
            k::huber_dual_project(yx.data(), yy.data(), 0.93, 0.4, n);
            outs.push_back(yx); outs.push_back(yy);
            d = a; k::clamp_min(d.data(), 0.25, n); outs.push_back(d);
            d = a; k::clamp(d.data(), -1.0, 1.0, n); outs.push_back(d);
        };

        std::vector<std::vector<double>> scalar_outs, avx_outs;
        k::select_backend(k::Backend::Scalar);
        run_all(scalar_outs);
        k::select_backend(k::Backend::Avx2);
        run_all(avx_outs);

        REQUIRE(scalar_outs.size() == avx_outs.size());
        for (std::size_t i = 0; i < scalar_outs.size(); ++i) {
            INFO("kernel index ", i, " at n=", n);
            CHECK(bitwise_equal(scalar_outs[i], avx_outs[i]));
        }
    }
}

TEST_CASE("kernel semantics spot checks") {
    std::mt19937 rng(5);
    const std::size_t n = 37;
    auto a = random_vec(n, rng);
    auto b = random_vec(n, rng, 1.0, 4.0);
    std::vector<double> d(n);

    k::lincomb3(d.data(), a.data(), b.data(), a.data(), 1.0, 2.0, -1.0, n);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(d[i] == doctest::Approx(2.0 * b[i]).epsilon(1e-14));

    k::prox_fidelity_pointwise(d.data(), a.data(), b.data(), b.data(), 0.0, 2.0, n);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(d[i] == doctest::Approx(a[i]).epsilon(1e-14)); // gamma = 0 leaves u

    std::vector<double> yx(n, 1000.0), yy(n, -1000.0);
    k::huber_dual_project(yx.data(), yy.data(), 1.0, 2.5, n);
    for (std::size_t i = 0; i < n; ++i) {
        double norm = std::sqrt(yx[i] * yx[i] + yy[i] * yy[i]);
        CHECK(norm == doctest::Approx(2.5).epsilon(1e-12)); // saturated at the ball radius
    }
}

TEST_CASE("reductions are order-fixed and match a naive loop") {
    std::mt19937 rng(17);
    const std::size_t n = 1001;
    auto a = random_vec(n, rng);
    auto b = random_vec(n, rng);
    double expect = 0.0;
    for (std::size_t i = 0; i < n; ++i) expect += a[i] * b[i];
    CHECK(k::dot(a.data(), b.data(), n) == expect);

    double h = 0.0;
    const double eps = 0.05;
    for (std::size_t i = 0; i < n; ++i) {
        double t = std::sqrt(a[i] * a[i] + b[i] * b[i]);
        h += (t <= eps) ? t * t / (2 * eps) : t - eps / 2;
    }
    CHECK(k::huber_total(a.data(), b.data(), eps, n) == h);
}
