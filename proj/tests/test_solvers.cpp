#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "osmofuse/image_io.hpp"
#include "osmofuse/kernels.hpp"
#include "osmofuse/model.hpp"
#include "osmofuse/solvers.hpp"

using namespace osmofuse;

namespace {

ScalarField random_field(int h, int w, std::mt19937& rng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    ScalarField f(h, w);
    for (std::size_t i = 0; i < f.size(); ++i) f.data()[i] = dist(rng);
    return f;
}

// ---------------------------------------------------------------------------
// Slow first-order oracle for the Huber-TV prox objective
//
//   F(p) = eta * sum H_eps(|grad p|) + 1/(2 zeta) ||p - v||^2
//
// using its own forward/backward differences so it shares no code with the
// primal-dual solver it cross-checks. H_eps is differentiable, so the
// (sub)gradient step with a 1/L step size converges linearly and a long run
// is a reliable reference.
// ---------------------------------------------------------------------------

double oracle_objective(const std::vector<double>& p, const std::vector<double>& v, int h,
                        int w, double eta, double eps, double zeta) {
    double val = 0.0;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double here = p[r * w + c];
            double gx = (c + 1 < w) ? p[r * w + c + 1] - here : 0.0;
            double gy = (r + 1 < h) ? p[(r + 1) * w + c] - here : 0.0;
            double t = std::sqrt(gx * gx + gy * gy);
            val += eta * ((t <= eps) ? t * t / (2 * eps) : t - eps / 2);
            double d = here - v[r * w + c];
            val += d * d / (2 * zeta);
        }
    return val;
}

std::vector<double> oracle_minimize(const std::vector<double>& v, int h, int w, double eta,
                                    double eps, double zeta, int iters) {
    std::vector<double> p = v;
    std::vector<double> gx(p.size()), gy(p.size()), grad(p.size());
    const double step = 1.0 / (8.0 * eta / eps + 1.0 / zeta);
    for (int t = 0; t < iters; ++t) {
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                double here = p[r * w + c];
                double dx = (c + 1 < w) ? p[r * w + c + 1] - here : 0.0;
                double dy = (r + 1 < h) ? p[(r + 1) * w + c] - here : 0.0;
                double norm = std::sqrt(dx * dx + dy * dy);
                double s = (norm <= eps) ? 1.0 / eps : 1.0 / norm; // Huber slope / t
                gx[r * w + c] = dx * s;
                gy[r * w + c] = dy * s;
            }
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                // negative divergence of (gx, gy), backward differences
                double dvg = 0.0;
                dvg -= (c + 1 < w) ? gx[r * w + c] : 0.0;
                dvg += (c > 0) ? gx[r * w + c - 1] : 0.0;
                dvg -= (r + 1 < h) ? gy[r * w + c] : 0.0;
                dvg += (r > 0) ? gy[(r - 1) * w + c] : 0.0;
                grad[r * w + c] = eta * dvg + (p[r * w + c] - v[r * w + c]) / zeta;
            }
        for (std::size_t i = 0; i < p.size(); ++i) p[i] -= step * grad[i];
    }
    return p;
}

} // namespace

TEST_CASE("huber conjugate prox: zero, interior and saturated pixels") {
    VectorField y(4, 4, 0.0);
    VectorField py = prox_huber_conjugate(y, 0.7, 2.0, 0.05);
    for (std::size_t i = 0; i < py.x.size(); ++i) {
        CHECK(py.x.data()[i] == 0.0);
        CHECK(py.y.data()[i] == 0.0);
    }

    const double sigma = 0.5, eta = 1.0, eps = 0.05;
    const double shrink = 1.0 / (1.0 + sigma * eps / eta);
    VectorField small(4, 4, 0.0);
    small.x.at(1, 1) = 0.3;
    small.y.at(1, 1) = -0.2;
    VectorField ps = prox_huber_conjugate(small, sigma, eta, eps);
    CHECK(ps.x.at(1, 1) == doctest::Approx(0.3 * shrink).epsilon(1e-15));
    CHECK(ps.y.at(1, 1) == doctest::Approx(-0.2 * shrink).epsilon(1e-15));

    VectorField big(4, 4, 0.0);
    big.x.at(2, 2) = 4e8;
    big.y.at(2, 2) = -3e8;
    VectorField pb = prox_huber_conjugate(big, sigma, eta, eps);
    double norm = std::hypot(pb.x.at(2, 2), pb.y.at(2, 2));
    CHECK(norm == doctest::Approx(eta).epsilon(1e-12));
    // direction preserved
    CHECK(pb.x.at(2, 2) > 0.0);
    CHECK(pb.y.at(2, 2) < 0.0);
    // never exceeds the ball anywhere
    for (std::size_t i = 0; i < pb.x.size(); ++i)
        CHECK(std::hypot(pb.x.data()[i], pb.y.data()[i]) <= eta * (1.0 + 1e-12));
}

TEST_CASE("quadratic tether prox: fixed point, tau limit, equal-step mean") {
    std::mt19937 rng(21);
    ScalarField v = random_field(5, 5, rng, 1.0, 10.0);

    ScalarField fp = prox_quadratic(v, v, 0.8, 0.3);
    for (std::size_t i = 0; i < fp.size(); ++i)
        CHECK(fp.data()[i] == doctest::Approx(v.data()[i]).epsilon(1e-14));

    ScalarField p = random_field(5, 5, rng, 1.0, 10.0);
    ScalarField lim = prox_quadratic(p, v, 1e300, 0.3);
    for (std::size_t i = 0; i < lim.size(); ++i)
        CHECK(lim.data()[i] == doctest::Approx(v.data()[i]).epsilon(1e-12));

    ScalarField mean = prox_quadratic(p, v, 0.4, 0.4);
    for (std::size_t i = 0; i < mean.size(); ++i)
        CHECK(mean.data()[i] == 0.5 * (v.data()[i] + p.data()[i]));
}

TEST_CASE("huber tv prox degenerate cases return the input unchanged") {
    std::mt19937 rng(22);
    Image v(1, 6, 6);
    v.channel(0) = random_field(6, 6, rng, 1.0, 200.0);
    PDConfig cfg;

    Image no_reg = prox_huber_tv(v, 0.0, 0.05, 0.5, cfg);
    CHECK(no_reg == v);

    Image flat(1, 6, 6, 13.0);
    std::vector<PDDiagnostics> diag;
    Image still = prox_huber_tv(flat, 2.0, 0.05, 0.5, cfg, &diag);
    CHECK(still == flat);
    CHECK(diag.size() == 1);
    CHECK(diag[0].converged);
}

TEST_CASE("huber tv prox matches the slow oracle and keeps the step product bounded") {
    std::mt19937 rng(23);
    const int h = 8, w = 8;
    struct Case { double eta, zeta; };
    const Case cases[] = {{1.0, 1.0}, {0.4, 0.25}, {2.5, 0.8}};
    const double eps = 0.05;

    for (const Case& cs : cases) {
        ScalarField vf = random_field(h, w, rng, 0.0, 5.0);
        Image v(1, h, w);
        v.channel(0) = vf;

        PDConfig cfg;
        cfg.tol = 1e-9; // drive the solver well below the comparison tolerance
        std::vector<PDDiagnostics> diag;
        Image result = prox_huber_tv(v, cs.eta, eps, cs.zeta, cfg, &diag);
        REQUIRE(diag.size() == 1);
        CHECK(diag[0].max_tau_sigma * 8.0 <= 1.0);

        std::vector<double> vv(vf.data(), vf.data() + vf.size());
        std::vector<double> oracle = oracle_minimize(vv, h, w, cs.eta, eps, cs.zeta, 60000);

        std::vector<double> got(result.channel(0).data(),
                                result.channel(0).data() + result.channel(0).size());
        double f_got = oracle_objective(got, vv, h, w, cs.eta, eps, cs.zeta);
        double f_oracle = oracle_objective(oracle, vv, h, w, cs.eta, eps, cs.zeta);
        CHECK(std::abs(f_got - f_oracle) <= 1e-3 * std::abs(f_oracle));

        // the prox never increases its own objective relative to the input
        double f_input = oracle_objective(vv, vv, h, w, cs.eta, eps, cs.zeta);
        CHECK(f_got <= f_input * (1.0 + 1e-12));
    }
}

TEST_CASE("fusion on a constant pair converges to the constant in a few iterations") {
    Image f(1, 8, 8, 90.0);
    Image b = f;
    AlphaMap alpha(8, 8, 0.0);
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 4; ++c) alpha.at(r, c) = 1.0;

    ModelWeights w;
    IPianoConfig ip;
    PDConfig pd;
    for (InitChoice init : {InitChoice::Foreground, InitChoice::Convex, InitChoice::Average}) {
        FusionResult res = ipiano_fuse(f, b, alpha, w, ip, pd, init);
        CHECK(res.trace.converged);
        CHECK(res.trace.rows.back().iter <= 5);
        CHECK(res.trace.rows.back().E <= 1e-12);
        for (std::size_t i = 0; i < res.u.channel(0).size(); ++i)
            CHECK(res.u.channel(0).data()[i] == doctest::Approx(90.0).epsilon(1e-9));
    }
}

TEST_CASE("with gamma = eta = 0 and large mu, v stays near the reference") {
    std::mt19937 rng(24);
    Image f(1, 8, 8), b(1, 8, 8);
    f.channel(0) = random_field(8, 8, rng, 50.0, 150.0);
    b.channel(0) = random_field(8, 8, rng, 50.0, 150.0);
    AlphaMap alpha(8, 8, 0.5);

    ModelWeights w;
    w.gamma = 0.0;
    w.eta = 0.0;
    w.mu = 1000.0;
    IPianoConfig ip;
    ip.max_outer = 100000; // the energy limit is zero here, so the relative
                           // exit fires only near the floating-point floor
    PDConfig pd;
    FusionResult res = ipiano_fuse(f, b, alpha, w, ip, pd, InitChoice::Foreground);
    CHECK(res.trace.converged);

    const Image ref = reference_image(f, b, alpha);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ref.channel(0).size(); ++i) {
        double d = res.v.channel(0).data()[i] - ref.channel(0).data()[i];
        num += d * d;
        den += ref.channel(0).data()[i] * ref.channel(0).data()[i];
    }
    CHECK(std::sqrt(num / den) < 0.05);

    // terminal relative energy change below tol, straight from the trace
    const auto& rows = res.trace.rows;
    REQUIRE(rows.size() >= 2);
    double e1 = rows.back().E, e0 = rows[rows.size() - 2].E;
    CHECK(std::abs(e1 - e0) / std::abs(e1) < 1e-6);
}

namespace {

// 32x32 synthetic fusion pair: flat foreground, textured background,
// half-plane alpha blurred with sigma = 2.
struct Fixture {
    Image f, b;
    AlphaMap alpha;
};

Fixture make_fixture() {
    const int n = 32;
    Fixture fx{Image(1, n, n, 120.0), Image(1, n, n), AlphaMap(n, n)};
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double tex = 130.0 + 80.0 * std::sin(0.55 * r) * std::cos(0.4 * c) +
                         30.0 * std::sin(1.3 * (r + c));
            fx.b.channel(0).at(r, c) = tex;
            fx.alpha.at(r, c) = c < n / 2 ? 1.0 : 0.0;
        }
    fx.alpha = blur_alpha(fx.alpha, 2.0);
    return fx;
}

} // namespace

TEST_CASE("fusion fixture: descent gaps, step bounds and energy decrease") {
    Fixture fx = make_fixture();
    ModelWeights w;
    IPianoConfig ip;
    PDConfig pd;
    FusionResult res = ipiano_fuse(fx.f, fx.b, fx.alpha, w, ip, pd, InitChoice::Foreground);

    const auto& rows = res.trace.rows;
    REQUIRE(rows.size() >= 3);
    CHECK(rows.front().iter == 0);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].gap_u < 0.0);
        CHECK(rows[i].gap_v < 0.0);
        CHECK(rows[i].zeta1 < 2.0 * (1.0 - ip.beta1) / rows[i].L1);
        CHECK(rows[i].zeta2 < 2.0 * (1.0 - ip.beta2) / rows[i].L2);
    }
    CHECK(rows.back().E <= rows.front().E);
    CHECK(res.trace.converged);
}

TEST_CASE("identical fusion runs produce identical traces") {
    Fixture fx = make_fixture();
    ModelWeights w;
    IPianoConfig ip;
    ip.max_outer = 40; // a prefix of the run is enough to compare
    ip.tol = 1e-30;
    PDConfig pd;
    FusionResult a = ipiano_fuse(fx.f, fx.b, fx.alpha, w, ip, pd, InitChoice::Convex);
    FusionResult b = ipiano_fuse(fx.f, fx.b, fx.alpha, w, ip, pd, InitChoice::Convex);

    REQUIRE(a.trace.rows.size() == b.trace.rows.size());
    for (std::size_t i = 0; i < a.trace.rows.size(); ++i) {
        CHECK(a.trace.rows[i].E == b.trace.rows[i].E);
        CHECK(a.trace.rows[i].gap_u == b.trace.rows[i].gap_u);
        CHECK(a.trace.rows[i].gap_v == b.trace.rows[i].gap_v);
        CHECK(a.trace.rows[i].inner_iters == b.trace.rows[i].inner_iters);
    }
    CHECK(a.u == b.u);
    CHECK(a.v == b.v);

    std::ostringstream csv_a, csv_b;
    a.trace.write_csv(csv_a);
    b.trace.write_csv(csv_b);
    CHECK(csv_a.str() == csv_b.str());
}

TEST_CASE("three-channel fusion runs channel-wise and still descends") {
    std::mt19937 rng(25);
    Image f(3, 8, 8), b(3, 8, 8);
    for (int c = 0; c < 3; ++c) {
        f.channel(c) = random_field(8, 8, rng, 40.0, 220.0);
        b.channel(c) = random_field(8, 8, rng, 40.0, 220.0);
    }
    AlphaMap alpha(8, 8, 0.0);
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 4; ++c) alpha.at(r, c) = 1.0;
    alpha = blur_alpha(alpha, 1.0);

    ModelWeights w;
    IPianoConfig ip;
    PDConfig pd;
    FusionResult res = ipiano_fuse(f, b, alpha, w, ip, pd, InitChoice::Average);
    CHECK(res.u.channels() == 3);
    CHECK(res.v.channels() == 3);
    CHECK(res.trace.rows.back().E <= res.trace.rows.front().E);
    CHECK(res.trace.converged);
    for (int c = 0; c < 3; ++c)
        CHECK(min_value(res.u.channel(c)) >= w.offset);
}

TEST_CASE("scalar and AVX2 backends yield the same fusion trace") {
    if (!kernels::avx2_available()) {
        MESSAGE("AVX2 not available; backend comparison skipped");
        return;
    }
    Fixture fx = make_fixture();
    ModelWeights w;
    IPianoConfig ip;
    ip.max_outer = 25;
    ip.tol = 1e-30;
    PDConfig pd;

    kernels::select_backend(kernels::Backend::Scalar);
    FusionResult scalar_run = ipiano_fuse(fx.f, fx.b, fx.alpha, w, ip, pd, InitChoice::Foreground);
    kernels::select_backend(kernels::Backend::Avx2);
    FusionResult avx_run = ipiano_fuse(fx.f, fx.b, fx.alpha, w, ip, pd, InitChoice::Foreground);
    kernels::select_backend(kernels::Backend::Auto);

    CHECK(scalar_run.u == avx_run.u);
    CHECK(scalar_run.v == avx_run.v);
    REQUIRE(scalar_run.trace.rows.size() == avx_run.trace.rows.size());
    for (std::size_t i = 0; i < scalar_run.trace.rows.size(); ++i) {
        CHECK(scalar_run.trace.rows[i].E == avx_run.trace.rows[i].E);
        CHECK(scalar_run.trace.rows[i].gap_u == avx_run.trace.rows[i].gap_u);
        CHECK(scalar_run.trace.rows[i].gap_v == avx_run.trace.rows[i].gap_v);
        CHECK(scalar_run.trace.rows[i].inner_iters == avx_run.trace.rows[i].inner_iters);
    }
}

TEST_CASE("trace CSV carries the documented header and row layout") {
    EnergyTrace tr;
    tr.rows.push_back({0, 1.0 / 3.0, 0.25, 0.5, 0.125, 0.198, 0.198, 1.0, 1.0, 0.0, 0.0, 0});
    tr.rows.push_back({1, 0.2, 0.1, 0.05, 0.05, 0.099, 0.198, 2.0, 1.0, -1e-5, -2e-7, 31});
    std::ostringstream os;
    tr.write_csv(os);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "iter,E,O,D,R,zeta1,zeta2,L1,L2,gap_u,gap_v,inner_iters");
    std::getline(in, line);
    CHECK(line == "0,0.333333333333,0.25,0.5,0.125,0.198,0.198,1,1,0,0,0");
    std::getline(in, line);
    CHECK(line == "1,0.2,0.1,0.05,0.05,0.099,0.198,2,1,-1e-05,-2e-07,31");
}

TEST_CASE("config validation rejects out-of-range parameters") {
    IPianoConfig ip;
    ip.beta1 = 0.5;
    CHECK_THROWS_AS(ip.validate(), std::invalid_argument);

    PDConfig pd;
    pd.tau0 = 1.0;
    pd.sigma0 = 1.0;
    CHECK_THROWS_AS(pd.validate(), std::invalid_argument);

    CHECK_THROWS_AS(parse_init_choice("nope"), std::invalid_argument);
}
