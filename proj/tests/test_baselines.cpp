#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "osmofuse/baselines.hpp"
#include "osmofuse/field.hpp"

using namespace osmofuse;

namespace {

ScalarField random_field(int h, int w, std::mt19937& rng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    ScalarField f(h, w);
    for (std::size_t i = 0; i < f.size(); ++i) f.data()[i] = dist(rng);
    return f;
}

double rel_diff(const ScalarField& a, const ScalarField& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a.data()[i] - b.data()[i];
        num += d * d;
        den += b.data()[i] * b.data()[i];
    }
    return std::sqrt(num / den);
}

} // namespace

TEST_CASE("osmosis operator annihilates multiples of the guide") {
    std::mt19937 rng(31);
    ScalarField v = random_field(8, 8, rng, 1.0, 200.0);
    ScalarField u(8, 8);
    for (std::size_t i = 0; i < u.size(); ++i) u.data()[i] = 2.7 * v.data()[i];
    ScalarField out = osmosis_apply(u, face_drift(v));
    for (std::size_t i = 0; i < out.size(); ++i)
        CHECK(std::abs(out.data()[i]) <= 1e-12 * 200.0);

    ScalarField uc(6, 6, 5.0), vc(6, 6, 9.0);
    ScalarField outc = osmosis_apply(uc, face_drift(vc));
    for (std::size_t i = 0; i < outc.size(); ++i) CHECK(outc.data()[i] == 0.0);
}

TEST_CASE("assembled osmosis operator has zero column sums") {
    std::mt19937 rng(32);
    ScalarField v = random_field(8, 8, rng, 1.0, 200.0);
    FaceDrift d = face_drift(v);
    // column j of the operator is its action on the j-th basis vector
    for (std::size_t j = 0; j < v.size(); ++j) {
        ScalarField e(8, 8, 0.0);
        e.data()[j] = 1.0;
        ScalarField col = osmosis_apply(e, d);
        double s = 0.0;
        for (std::size_t i = 0; i < col.size(); ++i) s += col.data()[i];
        CHECK(std::abs(s) <= 1e-13);
    }
}

TEST_CASE("pure diffusion limit: constant guide flattens to the mean") {
    std::mt19937 rng(33);
    Image u0(1, 12, 12);
    u0.channel(0) = random_field(12, 12, rng, 1.0, 3.0);
    Image v(1, 12, 12, 4.0);
    OsmosisConfig cfg; // implicit, tau = 1000, T = 10000
    Image out = linear_osmosis(u0, v, cfg);
    const double mean = mean_value(u0.channel(0));
    for (std::size_t i = 0; i < out.channel(0).size(); ++i)
        CHECK(out.channel(0).data()[i] == doctest::Approx(mean).epsilon(1e-3));
}

TEST_CASE("steady state is the mean-ratio rescaling of the guide") {
    std::mt19937 rng(34);
    Image u0(1, 16, 16), v(1, 16, 16);
    u0.channel(0) = random_field(16, 16, rng, 1.0, 2.0);
    v.channel(0) = random_field(16, 16, rng, 1.0, 2.0);

    OsmosisConfig cfg;
    cfg.final_time = 20000.0;
    OsmosisDiagnostics diag;
    Image out = linear_osmosis(u0, v, cfg, &diag);

    ScalarField target = v.channel(0);
    const double scale = mean_value(u0.channel(0)) / mean_value(v.channel(0));
    for (std::size_t i = 0; i < target.size(); ++i) target.data()[i] *= scale;
    CHECK(rel_diff(out.channel(0), target) < 1e-3);

    // mean conserved at every implicit step, and positivity never lost
    CHECK(diag.max_mean_drift <= cfg.solver_tol);
    CHECK(diag.min_intensity >= 0.0);
}

TEST_CASE("evolution output scales linearly with the start image") {
    std::mt19937 rng(35);
    Image u0(1, 10, 10), v(1, 10, 10);
    u0.channel(0) = random_field(10, 10, rng, 1.0, 2.0);
    v.channel(0) = random_field(10, 10, rng, 1.0, 2.0);
    OsmosisConfig cfg;
    cfg.final_time = 5000.0;

    Image a = linear_osmosis(u0, v, cfg);
    Image u0s = u0;
    for (std::size_t i = 0; i < u0s.channel(0).size(); ++i) u0s.channel(0).data()[i] *= 3.5;
    Image b = linear_osmosis(u0s, v, cfg);

    ScalarField scaled = a.channel(0);
    for (std::size_t i = 0; i < scaled.size(); ++i) scaled.data()[i] *= 3.5;
    CHECK(rel_diff(b.channel(0), scaled) < 1e-4);
}

TEST_CASE("explicit scheme enforces its stability bound and then works") {
    std::mt19937 rng(36);
    Image u0(1, 8, 8), v(1, 8, 8);
    u0.channel(0) = random_field(8, 8, rng, 1.0, 2.0);
    v.channel(0) = random_field(8, 8, rng, 1.0, 2.0);

    OsmosisConfig bad;
    bad.scheme = OsmosisScheme::Explicit;
    bad.time_step = 10.0;
    bad.final_time = 100.0;
    CHECK_THROWS_AS(linear_osmosis(u0, v, bad), std::invalid_argument);

    OsmosisConfig ok;
    ok.scheme = OsmosisScheme::Explicit;
    ok.time_step = 0.1;
    ok.final_time = 2000.0;
    Image out = linear_osmosis(u0, v, ok);
    ScalarField target = v.channel(0);
    const double scale = mean_value(u0.channel(0)) / mean_value(v.channel(0));
    for (std::size_t i = 0; i < target.size(); ++i) target.data()[i] *= scale;
    CHECK(rel_diff(out.channel(0), target) < 1e-3);
}

TEST_CASE("blended face drift interpolates between the two guides") {
    std::mt19937 rng(37);
    ScalarField f = random_field(6, 6, rng, 1.0, 200.0);
    ScalarField b = random_field(6, 6, rng, 1.0, 200.0);
    AlphaMap all_f(6, 6, 1.0), all_b(6, 6, 0.0);
    FaceDrift df = face_drift(f), db = face_drift(b);
    FaceDrift bf = blend_face_drift(f, b, all_f);
    FaceDrift bb = blend_face_drift(f, b, all_b);
    CHECK(bf.x == df.x);
    CHECK(bf.y == df.y);
    CHECK(bb.x == db.x);
    CHECK(bb.y == db.y);
}

TEST_CASE("mask validation") {
    ScalarField ok(4, 4, 0.0);
    ok.at(1, 1) = 1.0;
    CHECK(Mask(ok).count() == 1);

    ScalarField bad(4, 4, 0.0);
    bad.at(2, 2) = 0.5;
    CHECK_THROWS_AS((void)Mask{bad}, std::invalid_argument);
}

TEST_CASE("poisson editing trivial cases") {
    std::mt19937 rng(38);
    Image b(1, 10, 10);
    b.channel(0) = random_field(10, 10, rng, 1.0, 200.0);

    ScalarField none(10, 10, 0.0);
    Image same = poisson_edit(b, b, Mask(none));
    CHECK(same == b);

    ScalarField region(10, 10, 0.0);
    for (int r = 3; r < 7; ++r)
        for (int c = 2; c < 8; ++c) region.at(r, c) = 1.0;
    Image f_eq = poisson_edit(b, b, Mask(region));
    for (std::size_t i = 0; i < b.channel(0).size(); ++i)
        CHECK(f_eq.channel(0).data()[i] ==
              doctest::Approx(b.channel(0).data()[i]).epsilon(1e-10));
}

TEST_CASE("poisson editing absorbs additive shifts") {
    std::mt19937 rng(39);
    Image b(1, 12, 12);
    b.channel(0) = random_field(12, 12, rng, 10.0, 200.0);
    Image f = b;
    for (std::size_t i = 0; i < f.channel(0).size(); ++i) f.channel(0).data()[i] += 35.0;

    ScalarField region(12, 12, 0.0);
    for (int r = 2; r < 9; ++r)
        for (int c = 3; c < 10; ++c) region.at(r, c) = 1.0;

    Image out = poisson_edit(f, b, Mask(region));
    double worst = 0.0;
    for (std::size_t i = 0; i < out.channel(0).size(); ++i)
        worst = std::max(worst,
                         std::abs(out.channel(0).data()[i] - b.channel(0).data()[i]));
    CHECK(worst < 1e-6);
}

TEST_CASE("poisson editing rejects an all-covering mask") {
    Image b(1, 4, 4, 10.0);
    ScalarField all(4, 4, 1.0);
    CHECK_THROWS_AS(poisson_edit(b, b, Mask(all)), NumericError);
}
