#ifndef OSMOFUSE_MODEL_HPP
#define OSMOFUSE_MODEL_HPP

#include "osmofuse/field.hpp"

// Energy terms of the joint fusion model
//
//   E(u,v) = O(u,v) + gamma * D(u) + eta * R(v)
//
// with the osmosis coupling term
//
//   O(u,v) = 1/2 sum_x v(x) |grad(u/v)(x)|^2 + mu/2 ||v - ref||^2,
//   ref    = f^alpha * b^(1-alpha)  pixelwise,
//
// the foreground fidelity D(u) = 1/2 sum_x alpha(x) (u(x) - f(x))^2 and the
// Huberised gradient-sparsity term R(v) = sum_x H_eps(|grad v(x)|).
//
// osmosis_grad_u / osmosis_grad_v return the exact gradients of the discrete
// O above (the discrete counterparts of the continuum expressions
// -(laplacian u - div(d u)) / v and its v-analogue), so the backtracking
// descent tests and the finite-difference oracles agree with the energy
// they differentiate.
//
// Everything is evaluated channel-wise with the shared alpha map; all
// functions are pure and thread-safe.

namespace osmofuse {

/// Weights of the joint model plus the positivity floor applied at
/// image ingestion and after every solver step.
struct ModelWeights {
    double eta = 0.1;    ///< gradient-sparsity weight, >= 0
    double mu = 100.0;   ///< v-fidelity weight, > 0
    double gamma = 1.0;  ///< u-fidelity weight, >= 0
    double eps = 0.05;   ///< Huber parameter, in (0,1)
    double offset = 1.0; ///< positivity floor, > 0

    void validate() const;
};

/// Pixelwise geometric interpolation f^alpha * b^(1-alpha), per channel.
/// Throws std::invalid_argument on shape mismatch or a non-positive pixel
/// (the message names the pixel).
Image reference_image(const Image& f, const Image& b, const AlphaMap& alpha);

/// Drift field grad(log v) of one channel.
VectorField drift(const ScalarField& v);
/// Drift fields of every channel.
std::vector<VectorField> drift(const Image& v);

/// Osmosis coupling energy O(u,v); always >= 0 for positive v.
double osmosis_energy(const Image& u, const Image& v, const Image& ref, double mu);

/// Exact gradient of the discrete O with respect to u.
Image osmosis_grad_u(const Image& u, const Image& v);

/// Exact gradient of the discrete O with respect to v (includes the
/// mu(v - ref) fidelity part).
Image osmosis_grad_v(const Image& u, const Image& v, const Image& ref, double mu);

/// Foreground fidelity D(u).
double fidelity_energy(const Image& u, const Image& f, const AlphaMap& alpha);

/// Closed-form proximal map of zeta*gamma*D at u_diamond:
/// (gamma*alpha + 1/zeta)^-1 (gamma*alpha*f + u_diamond/zeta) pixelwise.
Image prox_fidelity(const Image& u_diamond, const Image& f, const AlphaMap& alpha,
                    double gamma, double zeta);

/// Huberised gradient-sparsity energy eta * sum H_eps(|grad v|).
double huber_tv_energy(const Image& v, double eta, double eps);

/// Value of the total energy and its decomposition.
struct EnergyParts {
    double total = 0.0;
    double osmosis = 0.0;
    double fidelity = 0.0;
    double regularizer = 0.0;
};

EnergyParts total_energy(const Image& u, const Image& v, const Image& f, const Image& b,
                         const AlphaMap& alpha, const ModelWeights& w);

/// Same as total_energy but with the reference image already computed.
EnergyParts total_energy_with_ref(const Image& u, const Image& v, const Image& ref,
                                  const Image& f, const AlphaMap& alpha,
                                  const ModelWeights& w);

} // namespace osmofuse

#endif
