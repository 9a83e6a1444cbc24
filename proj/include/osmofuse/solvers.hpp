#ifndef OSMOFUSE_SOLVERS_HPP
#define OSMOFUSE_SOLVERS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "osmofuse/field.hpp"
#include "osmofuse/model.hpp"

namespace osmofuse {

/// Starting image for the fused channel u.
enum class InitChoice {
    Foreground,  ///< u0 = f
    Convex,      ///< u0 = alpha*f + (1-alpha)*b
    Average,     ///< u0 = (f+b)/2
};

InitChoice parse_init_choice(const std::string& name);

/// Outer block-coordinate solver configuration.
/// The inertia betas must stay below 0.5 because the step sizes are
/// recomputed as zeta = 0.99*(1-2*beta)/L after every Lipschitz update;
/// accepted steps always satisfy the looser bound zeta < 2*(1-beta)/L.
struct IPianoConfig {
    double beta1 = 0.4;        ///< inertia of the u block, in [0, 0.5)
    double beta2 = 0.4;        ///< inertia of the v block, in [0, 0.5)
    double L1_0 = 1.0;         ///< initial Lipschitz estimate for d_u O
    double L2_0 = 1.0;         ///< initial Lipschitz estimate for d_v O
    double lambda = 2.0;       ///< backtracking growth factor, > 1
    double tol = 1e-6;         ///< relative energy-change exit threshold
    int max_outer = 10000;     ///< outer iteration cap
    int backtrack_cap = 10000; ///< retries per outer iteration before aborting
    int min_outer = 2;         ///< iterations before the energy exit may fire

    void validate() const;
};

/// Nested accelerated primal-dual solver configuration.
/// tau0 * sigma0 * 8 must stay <= 1; the defaults sit a hair under the
/// bound so the rescaled schedule never crosses it in floating point.
struct PDConfig {
    double tol = 1e-4;        ///< relative primal-dual-gap exit threshold
    int max_iters = 10000;    ///< inner iteration cap
    double tau0 = 0.35355339; ///< initial primal step
    double sigma0 = 0.35355339; ///< initial dual step
    double gamma_hat = 0.0;   ///< acceleration modulus; 0 = use 1/zeta2

    void validate() const;
};

/// Outcome of one prox_huber_tv channel solve.
struct PDDiagnostics {
    int iterations = 0;
    double relative_gap = 0.0;
    bool converged = true;
    double max_tau_sigma = 0.0; ///< max over the schedule of tau_t * sigma_t
};

/// Proximal map of sigma * H_eps^* applied pixelwise to a dual field:
/// shrink by 1/(1 + sigma*eps/eta), then project each 2-vector onto the
/// ball of radius eta. The output norm never exceeds eta.
VectorField prox_huber_conjugate(const VectorField& y, double sigma, double eta,
                                 double eps);

/// Proximal map of the quadratic tether (1/(2*zeta2))||.-v_diamond||^2 with
/// step tau: the pixelwise convex combination
/// (1/zeta2 + 1/tau)^-1 (v_diamond/zeta2 + p/tau).
ScalarField prox_quadratic(const ScalarField& p, const ScalarField& v_diamond, double tau,
                           double zeta2);

/// Approximate minimiser of eta*H_eps(grad v) + 1/(2*zeta2)||v - v_diamond||^2
/// via the accelerated primal-dual iteration, per channel independently.
/// Stops on relative primal-dual gap < cfg.tol or cfg.max_iters (the best
/// iterate is returned with diag.converged = false in that case).
Image prox_huber_tv(const Image& v_diamond, double eta, double eps, double zeta2,
                    const PDConfig& cfg, std::vector<PDDiagnostics>* diag = nullptr);

/// One accepted outer iteration of the trace. Row 0 records the initial
/// state (gaps and inner iterations zero); accepted iterations follow.
struct TraceRow {
    int iter = 0;
    double E = 0.0, O = 0.0, D = 0.0, R = 0.0;
    double zeta1 = 0.0, zeta2 = 0.0;
    double L1 = 0.0, L2 = 0.0;
    double gap_u = 0.0, gap_v = 0.0;
    long inner_iters = 0;
};

/// Per-iteration energy record of a fusion run. The D and R columns hold
/// the unweighted terms, so E = O + gamma*D + eta*R row by row.
struct EnergyTrace {
    std::vector<TraceRow> rows;
    bool converged = false;     ///< energy exit reached before max_outer
    int inner_cap_hits = 0;     ///< prox_huber_tv calls that hit max_iters

    /// CSV with header iter,E,O,D,R,zeta1,zeta2,L1,L2,gap_u,gap_v,inner_iters
    /// and 12 significant digits per value.
    void write_csv(std::ostream& os) const;
};

struct FusionResult {
    Image u;
    Image v;
    EnergyTrace trace;
};

/// Block-coordinate inertial proximal solve of the joint fusion model.
/// v starts from the reference image f^alpha b^(1-alpha); u starts from
/// `init`. Each outer iteration takes the two explicit inertial steps,
/// applies prox_fidelity and prox_huber_tv, and accepts when both
/// descent-lemma gaps are negative (a step that moved nothing is accepted
/// as a fixed point); otherwise the failing Lipschitz estimates grow by
/// cfg.lambda and the iteration retries. Lipschitz estimates never shrink.
/// Accepted iterates are clamped at weights.offset.
/// Throws NumericError when backtracking exhausts its cap or a non-finite
/// value appears.
FusionResult ipiano_fuse(const Image& f, const Image& b, const AlphaMap& alpha,
                         const ModelWeights& weights, const IPianoConfig& cfg,
                         const PDConfig& pd_cfg, InitChoice init);

} // namespace osmofuse

#endif
