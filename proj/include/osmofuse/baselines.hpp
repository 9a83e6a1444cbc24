#ifndef OSMOFUSE_BASELINES_HPP
#define OSMOFUSE_BASELINES_HPP

#include "osmofuse/field.hpp"

// Linear osmosis evolution and Poisson seamless editing, used as comparison
// baselines.
//
// The osmosis operator div(grad u - d u) is discretised on staggered faces:
// the drift on the face between two pixels is 2*(v2 - v1)/(v2 + v1), the
// face value of u is the arithmetic average, and boundary faces carry zero
// flux. Column sums of the assembled operator vanish, so the pixel mean is
// conserved, and u = c*v is annihilated exactly, which makes the steady
// state a rescaling of v by mean(u0)/mean(v).

namespace osmofuse {

enum class OsmosisScheme { Explicit, Implicit };

struct OsmosisConfig {
    double time_step = 1000.0; ///< tau; the explicit scheme checks stability
    double final_time = 10000.0;
    OsmosisScheme scheme = OsmosisScheme::Implicit;
    double solver_tol = 1e-5; ///< Krylov relative tolerance per implicit step
    int solver_maxiter = 500;

    void validate() const;
};

/// Per-run conservation diagnostics of one linear_osmosis call.
struct OsmosisDiagnostics {
    int steps = 0;
    double max_mean_drift = 0.0; ///< max |mean(u_k) - mean(u_0)| over channels/steps
    double min_intensity = 0.0;  ///< min over channels/steps of min(u_k)
};

/// Binary {0,1} region marker for Poisson editing.
struct Mask {
    ScalarField region;

    explicit Mask(ScalarField m);
    int height() const { return region.height(); }
    int width() const { return region.width(); }
    bool inside(int r, int c) const { return region.at(r, c) != 0.0; }
    std::size_t count() const;
};

/// Drift values stored on the faces between neighbouring pixels: x(r,c) is
/// the face between (r,c) and (r,c+1) for c < width-1, y(r,c) between (r,c)
/// and (r+1,c) for r < height-1. The trailing column/row is unused.
using FaceDrift = VectorField;

/// Staggered face drift 2*(v2 - v1)/(v2 + v1) of one channel.
FaceDrift face_drift(const ScalarField& v);

/// Facewise convex combination a*df + (1-a)*db with a averaged onto faces;
/// the drift blend used by the osmosis fusion baseline.
FaceDrift blend_face_drift(const ScalarField& f, const ScalarField& b,
                           const AlphaMap& alpha);

/// Applies the discrete osmosis operator with the given face drift.
ScalarField osmosis_apply(const ScalarField& u, const FaceDrift& d);

/// Applies the operator with the drift derived from v, channel-wise.
Image osmosis_matrix_apply(const Image& u, const Image& v);

/// Evolves u0 under the osmosis operator with per-channel drift fields to
/// cfg.final_time. Throws NumericError if an implicit solve fails or the
/// explicit step size violates the stability bound.
Image osmosis_evolve(const Image& u0, const std::vector<FaceDrift>& drifts,
                     const OsmosisConfig& cfg, OsmosisDiagnostics* diag = nullptr);

/// osmosis_evolve with the drift taken from the guide image v.
Image linear_osmosis(const Image& u0, const Image& v, const OsmosisConfig& cfg,
                     OsmosisDiagnostics* diag = nullptr);

/// Poisson seamless editing: solves laplacian(u) = laplacian(f) on the mask
/// with u = b elsewhere, channel-wise, as one sparse symmetric system.
/// Throws NumericError when the mask covers the whole grid (no Dirichlet
/// data) or the factorisation fails.
Image poisson_edit(const Image& f, const Image& b, const Mask& mask);

} // namespace osmofuse

#endif
