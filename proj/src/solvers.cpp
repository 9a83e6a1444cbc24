#include "osmofuse/solvers.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "osmofuse/grid_ops.hpp"
#include "osmofuse/kernels.hpp"

namespace osmofuse {

namespace k = kernels;

InitChoice parse_init_choice(const std::string& name) {
    if (name == "f") return InitChoice::Foreground;
    if (name == "convex") return InitChoice::Convex;
    if (name == "average") return InitChoice::Average;
    throw std::invalid_argument("unknown init choice '" + name +
                                "' (expected f, convex or average)");
}

void IPianoConfig::validate() const {
    if (!(beta1 >= 0.0 && beta1 < 0.5) || !(beta2 >= 0.0 && beta2 < 0.5))
        throw std::invalid_argument(
            "IPianoConfig: betas must lie in [0, 0.5) for the step rule 0.99*(1-2*beta)/L");
    if (!(L1_0 > 0.0 && L2_0 > 0.0))
        throw std::invalid_argument("IPianoConfig: initial Lipschitz estimates must be > 0");
    if (!(lambda > 1.0)) throw std::invalid_argument("IPianoConfig: lambda must be > 1");
    if (!(tol > 0.0)) throw std::invalid_argument("IPianoConfig: tol must be > 0");
    if (max_outer < 1 || backtrack_cap < 1 || min_outer < 0)
        throw std::invalid_argument("IPianoConfig: iteration limits out of range");
}

void PDConfig::validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("PDConfig: tol must be > 0");
    if (max_iters < 1) throw std::invalid_argument("PDConfig: max_iters must be >= 1");
    if (!(tau0 > 0.0 && sigma0 > 0.0))
        throw std::invalid_argument("PDConfig: tau0 and sigma0 must be > 0");
    if (tau0 * sigma0 * 8.0 > 1.0)
        throw std::invalid_argument("PDConfig: tau0*sigma0*8 must be <= 1");
    if (gamma_hat < 0.0) throw std::invalid_argument("PDConfig: gamma_hat must be >= 0");
}

VectorField prox_huber_conjugate(const VectorField& y, double sigma, double eta,
                                 double eps) {
    if (!(sigma > 0.0) || !(eta > 0.0) || eps < 0.0)
        throw std::invalid_argument("prox_huber_conjugate: need sigma > 0, eta > 0, eps >= 0");
    VectorField out = y;
    const double shrink = 1.0 / (1.0 + sigma * eps / eta);
    k::huber_dual_project(out.x.data(), out.y.data(), shrink, eta, out.x.size());
    return out;
}

ScalarField prox_quadratic(const ScalarField& p, const ScalarField& v_diamond, double tau,
                           double zeta2) {
    if (!(tau > 0.0) || !(zeta2 > 0.0))
        throw std::invalid_argument("prox_quadratic: need tau > 0, zeta2 > 0");
    if (!p.same_shape(v_diamond))
        throw std::invalid_argument("prox_quadratic: shape mismatch");
    const double a = 1.0 / zeta2, b = 1.0 / tau;
    const double wa = a / (a + b), wb = b / (a + b);
    ScalarField out(p.height(), p.width());
    k::lincomb2(out.data(), v_diamond.data(), p.data(), wa, wb, out.size());
    return out;
}

namespace {

// Primal value eta*H_eps(grad p) + 1/(2 zeta)||p - v_diamond||^2.
double pd_primal(const ScalarField& p, const ScalarField& v_diamond, double eta, double eps,
                 double zeta2, VectorField& scratch) {
    gradient_into(p, scratch);
    double val = eta * k::huber_total(scratch.x.data(), scratch.y.data(), eps, p.size());
    val += 0.5 / zeta2 * k::sum_sq_diff(p.data(), v_diamond.data(), p.size());
    return val;
}

// Dual value -H*_eps(y) - <v_diamond, div y> - zeta/2 ||div y||^2 with
// H*_eps(y) = eps/(2 eta) ||y||^2 on the eta-ball (iterates stay feasible).
double pd_dual(const VectorField& y, const ScalarField& divy, const ScalarField& v_diamond,
               double eta, double eps, double zeta2) {
    double val = -0.5 * eps / eta *
                 (k::sum_sq(y.x.data(), y.x.size()) + k::sum_sq(y.y.data(), y.y.size()));
    val -= k::dot(v_diamond.data(), divy.data(), divy.size());
    val -= 0.5 * zeta2 * k::sum_sq(divy.data(), divy.size());
    return val;
}

ScalarField prox_huber_tv_channel(const ScalarField& v_diamond, double eta, double eps,
                                  double zeta2, const PDConfig& cfg, PDDiagnostics& diag) {
    const int h = v_diamond.height(), w = v_diamond.width();
    const std::size_t n = v_diamond.size();

    ScalarField p = v_diamond;
    ScalarField p_prev(h, w), p_bar = p, divy(h, w), candidate(h, w);
    VectorField y(h, w, 0.0), step(h, w), grad_scratch(h, w);

    const double gamma_hat = cfg.gamma_hat > 0.0 ? cfg.gamma_hat : 1.0 / zeta2;
    double tau = cfg.tau0, sigma = cfg.sigma0;
    const double inv_zeta = 1.0 / zeta2;

    double best_primal = pd_primal(p, v_diamond, eta, eps, zeta2, grad_scratch);
    ScalarField best = p;
    diag.max_tau_sigma = tau * sigma;

    for (int t = 0; t < cfg.max_iters; ++t) {
        // dual ascent on y
        gradient_into(p_bar, grad_scratch);
        k::add_scaled(step.x.data(), y.x.data(), grad_scratch.x.data(), sigma, n);
        k::add_scaled(step.y.data(), y.y.data(), grad_scratch.y.data(), sigma, n);
        const double shrink = 1.0 / (1.0 + sigma * eps / eta);
        k::huber_dual_project(step.x.data(), step.y.data(), shrink, eta, n);
        y = step;

        // primal descent on p
        divergence_into(y, divy);
        std::swap(p_prev, p);
        k::add_scaled(candidate.data(), p_prev.data(), divy.data(), tau, n);
        const double a = inv_zeta, b = 1.0 / tau;
        k::lincomb2(p.data(), v_diamond.data(), candidate.data(), a / (a + b), b / (a + b),
                    n);

        // accelerated step-size schedule and extrapolation
        const double omega = 1.0 / std::sqrt(1.0 + 2.0 * gamma_hat * tau);
        tau *= omega;
        sigma /= omega;
        if (tau * sigma > diag.max_tau_sigma) diag.max_tau_sigma = tau * sigma;
        k::lincomb2(p_bar.data(), p.data(), p_prev.data(), 1.0 + omega, -omega, n);

        const double primal = pd_primal(p, v_diamond, eta, eps, zeta2, grad_scratch);
        const double dual = pd_dual(y, divy, v_diamond, eta, eps, zeta2);
        if (primal < best_primal) {
            best_primal = primal;
            best = p;
        }
        const double gap = primal - dual;
        diag.iterations = t + 1;
        diag.relative_gap = gap / std::max(std::abs(primal), 1e-12);
        if (gap <= cfg.tol * std::max(std::abs(primal), 1e-12)) {
            diag.converged = true;
            return p;
        }
    }
    diag.converged = false;
    return best;
}

} // namespace

Image prox_huber_tv(const Image& v_diamond, double eta, double eps, double zeta2,
                    const PDConfig& cfg, std::vector<PDDiagnostics>* diag) {
    cfg.validate();
    if (eta < 0.0 || !(eps > 0.0) || !(zeta2 > 0.0))
        throw std::invalid_argument("prox_huber_tv: need eta >= 0, eps > 0, zeta2 > 0");
    if (!all_finite(v_diamond))
        throw NumericError("prox_huber_tv: non-finite input");
    if (diag) diag->clear();
    if (eta == 0.0) {
        if (diag) diag->assign(static_cast<std::size_t>(v_diamond.channels()), {});
        return v_diamond;
    }
    Image out(v_diamond.channels(), v_diamond.height(), v_diamond.width());
    for (int c = 0; c < v_diamond.channels(); ++c) {
        PDDiagnostics d;
        out.channel(c) = prox_huber_tv_channel(v_diamond.channel(c), eta, eps, zeta2, cfg, d);
        if (diag) diag->push_back(d);
    }
    return out;
}

void EnergyTrace::write_csv(std::ostream& os) const {
    os << "iter,E,O,D,R,zeta1,zeta2,L1,L2,gap_u,gap_v,inner_iters\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.12g", v);
        os << buf;
    };
    for (const TraceRow& r : rows) {
        os << r.iter << ',';
        put(r.E); os << ',';
        put(r.O); os << ',';
        put(r.D); os << ',';
        put(r.R); os << ',';
        put(r.zeta1); os << ',';
        put(r.zeta2); os << ',';
        put(r.L1); os << ',';
        put(r.L2); os << ',';
        put(r.gap_u); os << ',';
        put(r.gap_v); os << ',';
        os << r.inner_iters << '\n';
    }
}

namespace {

Image initial_u(const Image& f, const Image& b, const AlphaMap& alpha, InitChoice init) {
    switch (init) {
    case InitChoice::Foreground: return f;
    case InitChoice::Convex: {
        Image u(f.channels(), f.height(), f.width());
        for (int c = 0; c < f.channels(); ++c) {
            const double* pf = f.channel(c).data();
            const double* pb = b.channel(c).data();
            const double* pa = alpha.data();
            double* pu = u.channel(c).data();
            for (std::size_t i = 0; i < alpha.size(); ++i)
                pu[i] = pa[i] * pf[i] + (1.0 - pa[i]) * pb[i];
        }
        return u;
    }
    case InitChoice::Average: {
        Image u(f.channels(), f.height(), f.width());
        for (int c = 0; c < f.channels(); ++c)
            k::lincomb2(u.channel(c).data(), f.channel(c).data(), b.channel(c).data(), 0.5,
                        0.5, alpha.size());
        return u;
    }
    }
    throw std::invalid_argument("ipiano_fuse: unknown init choice");
}

double image_sq_diff(const Image& a, const Image& b) {
    double s = 0.0;
    for (int c = 0; c < a.channels(); ++c)
        s += k::sum_sq_diff(a.channel(c).data(), b.channel(c).data(), a.channel(c).size());
    return s;
}

double image_dot_diff(const Image& g, const Image& a, const Image& b) {
    // <g, a - b> without forming the difference
    double s = 0.0;
    for (int c = 0; c < a.channels(); ++c) {
        const double* pg = g.channel(c).data();
        const double* pa = a.channel(c).data();
        const double* pb = b.channel(c).data();
        for (std::size_t i = 0; i < a.channel(c).size(); ++i) s += pg[i] * (pa[i] - pb[i]);
    }
    return s;
}

void clamp_image_min(Image& img, double lo) {
    for (int c = 0; c < img.channels(); ++c)
        k::clamp_min(img.channel(c).data(), lo, img.channel(c).size());
}

} // namespace

FusionResult ipiano_fuse(const Image& f, const Image& b, const AlphaMap& alpha,
                         const ModelWeights& weights, const IPianoConfig& cfg,
                         const PDConfig& pd_cfg, InitChoice init) {
    weights.validate();
    cfg.validate();
    pd_cfg.validate();
    require_same_shape(f, b, "ipiano_fuse");
    require_same_shape(f, alpha, "ipiano_fuse");
    require_positive(f, "ipiano_fuse(f)");
    require_positive(b, "ipiano_fuse(b)");
    require_alpha_range(alpha, "ipiano_fuse");

    const Image ref = reference_image(f, b, alpha);

    FusionResult res;
    res.u = initial_u(f, b, alpha, init);
    res.v = ref;
    Image u_prev = res.u, v_prev = res.v;

    double L1 = cfg.L1_0, L2 = cfg.L2_0;
    auto step_of = [](double beta, double L) { return 0.99 * (1.0 - 2.0 * beta) / L; };

    EnergyTrace& trace = res.trace;
    EnergyParts e0 = total_energy_with_ref(res.u, res.v, ref, f, alpha, weights);
    trace.rows.push_back({0, e0.total, e0.osmosis, e0.fidelity, e0.regularizer,
                          step_of(cfg.beta1, L1), step_of(cfg.beta2, L2), L1, L2, 0.0, 0.0,
                          0});
    double energy_prev = e0.total;

    const std::size_t n = alpha.size();
    const int channels = f.channels();

    for (int iter = 1; iter <= cfg.max_outer; ++iter) {
        const Image gu = osmosis_grad_u(res.u, res.v);
        const Image gv = osmosis_grad_v(res.u, res.v, ref, weights.mu);
        const double o_curr = osmosis_energy(res.u, res.v, ref, weights.mu);
        if (!std::isfinite(o_curr) || !all_finite(gu) || !all_finite(gv))
            throw NumericError("ipiano_fuse: non-finite energy or gradient at outer iteration " +
                               std::to_string(iter));

        Image p1, p2;
        double zeta1 = 0.0, zeta2 = 0.0;
        double gap_u = 0.0, gap_v = 0.0;
        long inner_total = 0;
        bool accepted = false;
        bool u_stale = true, v_stale = true;
        double step_u_sq = 0.0, step_v_sq = 0.0;

        for (int attempt = 0; attempt < cfg.backtrack_cap && !accepted; ++attempt) {
            if (u_stale) {
                zeta1 = step_of(cfg.beta1, L1);
                Image u_diamond(channels, f.height(), f.width());
                for (int c = 0; c < channels; ++c)
                    k::lincomb3(u_diamond.channel(c).data(), res.u.channel(c).data(),
                                gu.channel(c).data(), u_prev.channel(c).data(),
                                1.0 + cfg.beta1, -zeta1, -cfg.beta1, n);
                p1 = prox_fidelity(u_diamond, f, alpha, weights.gamma, zeta1);
                step_u_sq = image_sq_diff(p1, res.u);
                u_stale = false;
            }
            if (v_stale) {
                zeta2 = step_of(cfg.beta2, L2);
                Image v_diamond(channels, f.height(), f.width());
                for (int c = 0; c < channels; ++c)
                    k::lincomb3(v_diamond.channel(c).data(), res.v.channel(c).data(),
                                gv.channel(c).data(), v_prev.channel(c).data(),
                                1.0 + cfg.beta2, -zeta2, -cfg.beta2, n);
                std::vector<PDDiagnostics> diags;
                p2 = prox_huber_tv(v_diamond, weights.eta, weights.eps, zeta2, pd_cfg,
                                   &diags);
                for (const PDDiagnostics& d : diags) {
                    inner_total += d.iterations;
                    if (!d.converged) ++trace.inner_cap_hits;
                }
                step_v_sq = image_sq_diff(p2, res.v);
                v_stale = false;
            }

            gap_u = osmosis_energy(p1, res.v, ref, weights.mu) - o_curr -
                    image_dot_diff(gu, p1, res.u) - 0.5 * L1 * step_u_sq;
            gap_v = osmosis_energy(res.u, p2, ref, weights.mu) - o_curr -
                    image_dot_diff(gv, p2, res.v) - 0.5 * L2 * step_v_sq;

            // A prox step that moved nothing has an exactly zero gap and is
            // accepted as a fixed point; growing L cannot change it.
            const bool ok_u = gap_u < 0.0 || step_u_sq == 0.0;
            const bool ok_v = gap_v < 0.0 || step_v_sq == 0.0;
            if (ok_u && ok_v) {
                accepted = true;
            } else {
                if (!ok_u) {
                    L1 *= cfg.lambda;
                    u_stale = true;
                }
                if (!ok_v) {
                    L2 *= cfg.lambda;
                    v_stale = true;
                }
            }
        }

        if (!accepted) {
            std::ostringstream msg;
            msg << "ipiano_fuse: backtracking exhausted " << cfg.backtrack_cap
                << " attempts at outer iteration " << iter << " (L1=" << L1 << ", L2=" << L2
                << ", gap_u=" << gap_u << ", gap_v=" << gap_v << ")";
            throw NumericError(msg.str());
        }

        u_prev = std::move(res.u);
        v_prev = std::move(res.v);
        res.u = std::move(p1);
        res.v = std::move(p2);
        clamp_image_min(res.u, weights.offset);
        clamp_image_min(res.v, weights.offset);

        EnergyParts e = total_energy_with_ref(res.u, res.v, ref, f, alpha, weights);
        if (!std::isfinite(e.total) || !all_finite(res.u) || !all_finite(res.v))
            throw NumericError("ipiano_fuse: non-finite iterate at outer iteration " +
                               std::to_string(iter));
        trace.rows.push_back({iter, e.total, e.osmosis, e.fidelity, e.regularizer, zeta1,
                              zeta2, L1, L2, gap_u, gap_v, inner_total});

        // relative energy change; an exactly unchanged energy counts as
        // converged even when the energy itself is zero
        const double diff = std::abs(e.total - energy_prev);
        double rel;
        if (diff == 0.0) rel = 0.0;
        else if (e.total == 0.0) rel = std::numeric_limits<double>::infinity();
        else rel = diff / std::abs(e.total);
        energy_prev = e.total;
        if (iter >= cfg.min_outer && rel < cfg.tol) {
            trace.converged = true;
            break;
        }
    }
    return res;
}

} // namespace osmofuse
