#include "osmofuse/model.hpp"

#include <cmath>

#include "osmofuse/grid_ops.hpp"
#include "osmofuse/kernels.hpp"

namespace osmofuse {

namespace k = kernels;

void ModelWeights::validate() const {
    if (eta < 0.0) throw std::invalid_argument("ModelWeights: eta must be >= 0");
    if (!(mu > 0.0)) throw std::invalid_argument("ModelWeights: mu must be > 0");
    if (gamma < 0.0) throw std::invalid_argument("ModelWeights: gamma must be >= 0");
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("ModelWeights: eps must lie in (0,1)");
    if (!(offset > 0.0)) throw std::invalid_argument("ModelWeights: offset must be > 0");
}

Image reference_image(const Image& f, const Image& b, const AlphaMap& alpha) {
    require_same_shape(f, b, "reference_image");
    require_same_shape(f, alpha, "reference_image");
    require_positive(f, "reference_image(f)");
    require_positive(b, "reference_image(b)");
    require_alpha_range(alpha, "reference_image");

    Image ref(f.channels(), f.height(), f.width());
    for (int c = 0; c < f.channels(); ++c) {
        const double* pf = f.channel(c).data();
        const double* pb = b.channel(c).data();
        const double* pa = alpha.data();
        double* pr = ref.channel(c).data();
        const std::size_t n = alpha.size();
        for (std::size_t i = 0; i < n; ++i)
            pr[i] = std::pow(pf[i], pa[i]) * std::pow(pb[i], 1.0 - pa[i]);
    }
    return ref;
}

VectorField drift(const ScalarField& v) {
    ScalarField logv(v.height(), v.width());
    const double* pv = v.data();
    double* pl = logv.data();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(pv[i] > 0.0))
            throw std::invalid_argument("drift: non-positive intensity at flat index " +
                                        std::to_string(i));
        pl[i] = std::log(pv[i]);
    }
    return gradient(logv);
}

std::vector<VectorField> drift(const Image& v) {
    std::vector<VectorField> out;
    out.reserve(static_cast<std::size_t>(v.channels()));
    for (int c = 0; c < v.channels(); ++c) out.push_back(drift(v.channel(c)));
    return out;
}

namespace {

// Weighted flux v * grad(u/v) of one channel; the shared building block of
// O, its u-gradient and its v-gradient.
void weighted_ratio_flux(const ScalarField& u, const ScalarField& v, ScalarField& ratio,
                         VectorField& g, VectorField& flux) {
    k::div(ratio.data(), u.data(), v.data(), u.size());
    gradient_into(ratio, g);
    k::mul(flux.x.data(), v.data(), g.x.data(), v.size());
    k::mul(flux.y.data(), v.data(), g.y.data(), v.size());
}

} // namespace

double osmosis_energy(const Image& u, const Image& v, const Image& ref, double mu) {
    require_same_shape(u, v, "osmosis_energy");
    require_same_shape(v, ref, "osmosis_energy");
    const int h = u.height(), w = u.width();
    ScalarField ratio(h, w);
    VectorField g(h, w);
    double total = 0.0;
    for (int c = 0; c < u.channels(); ++c) {
        const ScalarField& uc = u.channel(c);
        const ScalarField& vc = v.channel(c);
        k::div(ratio.data(), uc.data(), vc.data(), uc.size());
        gradient_into(ratio, g);
        total += 0.5 * k::weighted_grad_sq(vc.data(), g.x.data(), g.y.data(), vc.size());
        total += 0.5 * mu *
                 k::sum_sq_diff(vc.data(), ref.channel(c).data(), vc.size());
    }
    return total;
}

Image osmosis_grad_u(const Image& u, const Image& v) {
    require_same_shape(u, v, "osmosis_grad_u");
    const int h = u.height(), w = u.width();
    Image out(u.channels(), h, w);
    ScalarField ratio(h, w), divflux(h, w);
    VectorField g(h, w), flux(h, w);
    for (int c = 0; c < u.channels(); ++c) {
        weighted_ratio_flux(u.channel(c), v.channel(c), ratio, g, flux);
        divergence_into(flux, divflux);
        k::div_neg(out.channel(c).data(), divflux.data(), v.channel(c).data(),
                   divflux.size());
    }
    return out;
}

Image osmosis_grad_v(const Image& u, const Image& v, const Image& ref, double mu) {
    require_same_shape(u, v, "osmosis_grad_v");
    require_same_shape(v, ref, "osmosis_grad_v");
    const int h = u.height(), w = u.width();
    Image out(u.channels(), h, w);
    ScalarField ratio(h, w), divflux(h, w), vsq(h, w), coeff(h, w);
    VectorField g(h, w), flux(h, w);
    for (int c = 0; c < u.channels(); ++c) {
        const ScalarField& uc = u.channel(c);
        const ScalarField& vc = v.channel(c);
        weighted_ratio_flux(uc, vc, ratio, g, flux);
        divergence_into(flux, divflux);
        double* dst = out.channel(c).data();
        k::half_norm_sq(dst, g.x.data(), g.y.data(), g.x.size());
        k::mul(vsq.data(), vc.data(), vc.data(), vc.size());
        k::div(coeff.data(), uc.data(), vsq.data(), vsq.size()); // u / v^2
        k::mul_acc(dst, coeff.data(), divflux.data(), divflux.size());
        k::acc_scaled_diff(dst, vc.data(), ref.channel(c).data(), mu, vc.size());
    }
    return out;
}

double fidelity_energy(const Image& u, const Image& f, const AlphaMap& alpha) {
    require_same_shape(u, f, "fidelity_energy");
    require_same_shape(u, alpha, "fidelity_energy");
    double total = 0.0;
    for (int c = 0; c < u.channels(); ++c)
        total += 0.5 * k::weighted_sq_diff(alpha.data(), u.channel(c).data(),
                                           f.channel(c).data(), alpha.size());
    return total;
}

Image prox_fidelity(const Image& u_diamond, const Image& f, const AlphaMap& alpha,
                    double gamma, double zeta) {
    require_same_shape(u_diamond, f, "prox_fidelity");
    require_same_shape(u_diamond, alpha, "prox_fidelity");
    if (gamma < 0.0) throw std::invalid_argument("prox_fidelity: gamma must be >= 0");
    if (!(zeta > 0.0)) throw std::invalid_argument("prox_fidelity: zeta must be > 0");
    Image out(u_diamond.channels(), u_diamond.height(), u_diamond.width());
    const double inv_zeta = 1.0 / zeta;
    for (int c = 0; c < u_diamond.channels(); ++c)
        k::prox_fidelity_pointwise(out.channel(c).data(), u_diamond.channel(c).data(),
                                   f.channel(c).data(), alpha.data(), gamma, inv_zeta,
                                   alpha.size());
    return out;
}

double huber_tv_energy(const Image& v, double eta, double eps) {
    if (eta == 0.0) return 0.0;
    VectorField g(v.height(), v.width());
    double total = 0.0;
    for (int c = 0; c < v.channels(); ++c) {
        gradient_into(v.channel(c), g);
        total += k::huber_total(g.x.data(), g.y.data(), eps, g.x.size());
    }
    return eta * total;
}

EnergyParts total_energy_with_ref(const Image& u, const Image& v, const Image& ref,
                                  const Image& f, const AlphaMap& alpha,
                                  const ModelWeights& w) {
    EnergyParts parts;
    parts.osmosis = osmosis_energy(u, v, ref, w.mu);
    parts.fidelity = fidelity_energy(u, f, alpha);
    parts.regularizer = huber_tv_energy(v, 1.0, w.eps);
    parts.total = parts.osmosis + w.gamma * parts.fidelity + w.eta * parts.regularizer;
    return parts;
}

EnergyParts total_energy(const Image& u, const Image& v, const Image& f, const Image& b,
                         const AlphaMap& alpha, const ModelWeights& w) {
    return total_energy_with_ref(u, v, reference_image(f, b, alpha), f, alpha, w);
}

} // namespace osmofuse
