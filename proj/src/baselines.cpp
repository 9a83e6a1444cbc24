#include "osmofuse/baselines.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "osmofuse/grid_ops.hpp"
#include "osmofuse/kernels.hpp"

namespace osmofuse {

void OsmosisConfig::validate() const {
    if (!(time_step > 0.0)) throw std::invalid_argument("OsmosisConfig: time_step must be > 0");
    if (!(final_time > 0.0))
        throw std::invalid_argument("OsmosisConfig: final_time must be > 0");
    if (!(solver_tol > 0.0))
        throw std::invalid_argument("OsmosisConfig: solver_tol must be > 0");
    if (solver_maxiter < 1)
        throw std::invalid_argument("OsmosisConfig: solver_maxiter must be >= 1");
}

Mask::Mask(ScalarField m) : region(std::move(m)) {
    for (int r = 0; r < region.height(); ++r)
        for (int c = 0; c < region.width(); ++c) {
            double v = region.at(r, c);
            if (v != 0.0 && v != 1.0)
                throw std::invalid_argument("Mask: entries must be 0 or 1, found " +
                                            std::to_string(v) + " at (row " +
                                            std::to_string(r) + ", col " + std::to_string(c) +
                                            ")");
        }
}

std::size_t Mask::count() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < region.size(); ++i) n += region.data()[i] != 0.0;
    return n;
}

FaceDrift face_drift(const ScalarField& v) {
    const int h = v.height(), w = v.width();
    FaceDrift d(h, w, 0.0);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w - 1; ++c)
            d.x.at(r, c) = 2.0 * (v.at(r, c + 1) - v.at(r, c)) / (v.at(r, c + 1) + v.at(r, c));
    for (int r = 0; r < h - 1; ++r)
        for (int c = 0; c < w; ++c)
            d.y.at(r, c) = 2.0 * (v.at(r + 1, c) - v.at(r, c)) / (v.at(r + 1, c) + v.at(r, c));
    return d;
}

FaceDrift blend_face_drift(const ScalarField& f, const ScalarField& b,
                           const AlphaMap& alpha) {
    if (!f.same_shape(b) || !f.same_shape(alpha))
        throw std::invalid_argument("blend_face_drift: shape mismatch");
    FaceDrift df = face_drift(f), db = face_drift(b);
    const int h = f.height(), w = f.width();
    FaceDrift d(h, w, 0.0);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w - 1; ++c) {
            double a = 0.5 * (alpha.at(r, c) + alpha.at(r, c + 1));
            d.x.at(r, c) = a * df.x.at(r, c) + (1.0 - a) * db.x.at(r, c);
        }
    for (int r = 0; r < h - 1; ++r)
        for (int c = 0; c < w; ++c) {
            double a = 0.5 * (alpha.at(r, c) + alpha.at(r + 1, c));
            d.y.at(r, c) = a * df.y.at(r, c) + (1.0 - a) * db.y.at(r, c);
        }
    return d;
}

ScalarField osmosis_apply(const ScalarField& u, const FaceDrift& d) {
    if (!u.same_shape(d.x))
        throw std::invalid_argument("osmosis_apply: shape mismatch");
    const int h = u.height(), w = u.width();
    ScalarField out(h, w, 0.0);
    // x faces
    for (int r = 0; r < h; ++r) {
        const double* ur = u.row(r);
        const double* dx = d.x.row(r);
        double* o = out.row(r);
        for (int c = 0; c < w - 1; ++c) {
            double flux = (ur[c + 1] - ur[c]) - dx[c] * 0.5 * (ur[c] + ur[c + 1]);
            o[c] += flux;
            o[c + 1] -= flux;
        }
    }
    // y faces
    for (int r = 0; r < h - 1; ++r) {
        const double* ur = u.row(r);
        const double* un = u.row(r + 1);
        const double* dy = d.y.row(r);
        double* o = out.row(r);
        double* on = out.row(r + 1);
        for (int c = 0; c < w; ++c) {
            double flux = (un[c] - ur[c]) - dy[c] * 0.5 * (ur[c] + un[c]);
            o[c] += flux;
            on[c] -= flux;
        }
    }
    return out;
}

Image osmosis_matrix_apply(const Image& u, const Image& v) {
    require_same_shape(u, v, "osmosis_matrix_apply");
    require_positive(v, "osmosis_matrix_apply(v)");
    Image out(u.channels(), u.height(), u.width());
    for (int c = 0; c < u.channels(); ++c)
        out.channel(c) = osmosis_apply(u.channel(c), face_drift(v.channel(c)));
    return out;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Assembles the osmosis operator A so that (A u)_i = osmosis_apply(u, d)_i.
SpMat assemble_osmosis(const FaceDrift& d) {
    const int h = d.x.height(), w = d.x.width();
    const int n = h * w;
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(5 * n));
    auto idx = [w](int r, int c) { return r * w + c; };
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w - 1; ++c) {
            double dv = d.x.at(r, c);
            int i = idx(r, c), j = idx(r, c + 1);
            // flux = (u_j - u_i) - dv*(u_i + u_j)/2, added to i, removed from j
            trip.emplace_back(i, j, 1.0 - 0.5 * dv);
            trip.emplace_back(i, i, -1.0 - 0.5 * dv);
            trip.emplace_back(j, j, -1.0 + 0.5 * dv);
            trip.emplace_back(j, i, 1.0 + 0.5 * dv);
        }
    for (int r = 0; r < h - 1; ++r)
        for (int c = 0; c < w; ++c) {
            double dv = d.y.at(r, c);
            int i = idx(r, c), j = idx(r + 1, c);
            trip.emplace_back(i, j, 1.0 - 0.5 * dv);
            trip.emplace_back(i, i, -1.0 - 0.5 * dv);
            trip.emplace_back(j, j, -1.0 + 0.5 * dv);
            trip.emplace_back(j, i, 1.0 + 0.5 * dv);
        }
    SpMat A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

double max_neg_diagonal(const SpMat& A) {
    double m = 0.0;
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it)
            if (it.row() == it.col() && -it.value() > m) m = -it.value();
    return m;
}

ScalarField evolve_channel(const ScalarField& u0, const FaceDrift& d,
                           const OsmosisConfig& cfg, OsmosisDiagnostics* diag) {
    const int h = u0.height(), w = u0.width();
    const int n = h * w;
    const SpMat A = assemble_osmosis(d);

    int steps = static_cast<int>(std::ceil(cfg.final_time / cfg.time_step - 1e-12));
    if (steps < 1) steps = 1;

    Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(u0.data(), n);
    const double mean0 = u.mean();

    Eigen::BiCGSTAB<SpMat> solver;
    SpMat M;
    if (cfg.scheme == OsmosisScheme::Implicit) {
        SpMat id(n, n);
        id.setIdentity();
        M = id - cfg.time_step * A;
        solver.setTolerance(cfg.solver_tol);
        solver.setMaxIterations(cfg.solver_maxiter);
        solver.compute(M);
        if (solver.info() != Eigen::Success)
            throw NumericError("linear_osmosis: solver setup failed");
    } else {
        double diag_bound = max_neg_diagonal(A);
        if (cfg.time_step * diag_bound > 1.0) {
            std::ostringstream msg;
            msg << "linear_osmosis: explicit step " << cfg.time_step
                << " violates the stability bound tau <= " << 1.0 / diag_bound;
            throw std::invalid_argument(msg.str());
        }
    }

    for (int s = 0; s < steps; ++s) {
        if (cfg.scheme == OsmosisScheme::Implicit) {
            Eigen::VectorXd next = solver.solveWithGuess(u, u);
            if (solver.info() != Eigen::Success)
                throw NumericError(
                    "linear_osmosis: BiCGSTAB did not reach tol " +
                    std::to_string(cfg.solver_tol) + " within " +
                    std::to_string(cfg.solver_maxiter) + " iterations (residual " +
                    std::to_string(solver.error()) + ") at step " + std::to_string(s));
            u = next;
        } else {
            u += cfg.time_step * (A * u);
        }
        if (diag) {
            double drift_now = std::abs(u.mean() - mean0);
            if (drift_now > diag->max_mean_drift) diag->max_mean_drift = drift_now;
            double mn = u.minCoeff();
            if (mn < diag->min_intensity) diag->min_intensity = mn;
        }
    }
    if (diag) diag->steps = steps;

    ScalarField out(h, w);
    Eigen::Map<Eigen::VectorXd>(out.data(), n) = u;
    return out;
}

} // namespace

Image osmosis_evolve(const Image& u0, const std::vector<FaceDrift>& drifts,
                     const OsmosisConfig& cfg, OsmosisDiagnostics* diag) {
    cfg.validate();
    if (static_cast<int>(drifts.size()) != u0.channels())
        throw std::invalid_argument("osmosis_evolve: one drift field per channel required");
    if (diag) {
        *diag = {};
        diag->min_intensity = min_value(u0.channel(0));
    }
    Image out(u0.channels(), u0.height(), u0.width());
    for (int c = 0; c < u0.channels(); ++c)
        out.channel(c) = evolve_channel(u0.channel(c), drifts[c], cfg, diag);
    return out;
}

Image linear_osmosis(const Image& u0, const Image& v, const OsmosisConfig& cfg,
                     OsmosisDiagnostics* diag) {
    require_same_shape(u0, v, "linear_osmosis");
    require_positive(u0, "linear_osmosis(u0)");
    require_positive(v, "linear_osmosis(v)");
    std::vector<FaceDrift> drifts;
    drifts.reserve(static_cast<std::size_t>(v.channels()));
    for (int c = 0; c < v.channels(); ++c) drifts.push_back(face_drift(v.channel(c)));
    return osmosis_evolve(u0, drifts, cfg, diag);
}

Image poisson_edit(const Image& f, const Image& b, const Mask& mask) {
    require_same_shape(f, b, "poisson_edit");
    if (f.height() != mask.height() || f.width() != mask.width())
        throw std::invalid_argument("poisson_edit: mask shape differs from images");

    const int h = f.height(), w = f.width();
    const std::size_t inside = mask.count();
    Image out = b;
    if (inside == 0) return out;
    if (inside == static_cast<std::size_t>(h) * static_cast<std::size_t>(w))
        throw NumericError("poisson_edit: mask covers the whole grid, no boundary data");

    // index unknowns
    std::vector<int> id(static_cast<std::size_t>(h) * w, -1);
    int m = 0;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (mask.inside(r, c)) id[static_cast<std::size_t>(r) * w + c] = m++;

    // -laplacian restricted to the mask, symmetric positive definite
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(5 * m));
    const int dr[4] = {-1, 1, 0, 0};
    const int dc[4] = {0, 0, -1, 1};
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            int i = id[static_cast<std::size_t>(r) * w + c];
            if (i < 0) continue;
            int degree = 0;
            for (int k = 0; k < 4; ++k) {
                int rr = r + dr[k], cc = c + dc[k];
                if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
                ++degree;
                int j = id[static_cast<std::size_t>(rr) * w + cc];
                if (j >= 0) trip.emplace_back(i, j, -1.0);
            }
            trip.emplace_back(i, i, static_cast<double>(degree));
        }
    SpMat Lneg(m, m);
    Lneg.setFromTriplets(trip.begin(), trip.end());

    Eigen::SimplicialLDLT<SpMat> solver;
    solver.compute(Lneg);
    if (solver.info() != Eigen::Success)
        throw NumericError("poisson_edit: factorisation failed (is the mask interior "
                           "connected to boundary data?)");

    for (int ch = 0; ch < f.channels(); ++ch) {
        const ScalarField lap_f = laplacian(f.channel(ch));
        const ScalarField& bc = b.channel(ch);
        Eigen::VectorXd rhs(m);
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                int i = id[static_cast<std::size_t>(r) * w + c];
                if (i < 0) continue;
                double val = -lap_f.at(r, c); // rows of -laplacian
                for (int k = 0; k < 4; ++k) {
                    int rr = r + dr[k], cc = c + dc[k];
                    if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
                    if (id[static_cast<std::size_t>(rr) * w + cc] < 0)
                        val += bc.at(rr, cc); // Dirichlet neighbour moves to the rhs
                }
                rhs[i] = val;
            }
        Eigen::VectorXd x = solver.solve(rhs);
        if (solver.info() != Eigen::Success)
            throw NumericError("poisson_edit: solve failed");
        ScalarField& oc = out.channel(ch);
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                int i = id[static_cast<std::size_t>(r) * w + c];
                if (i >= 0) oc.at(r, c) = x[i];
            }
    }
    return out;
}

} // namespace osmofuse
