// Batch front-end for the variational osmosis fusion library.
//
// Exit codes: 0 success, 1 usage or input error, 2 numeric failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "osmofuse/baselines.hpp"
#include "osmofuse/field.hpp"
#include "osmofuse/image_io.hpp"
#include "osmofuse/kernels.hpp"
#include "osmofuse/metrics.hpp"
#include "osmofuse/model.hpp"
#include "osmofuse/solvers.hpp"

namespace {

using namespace osmofuse;

struct CommonOpts {
    std::string foreground, background, alpha_path, out;
    double offset = 1.0;
    double alpha_blur = 0.0;
    std::string backend = "auto";
};

void add_io_flags(CLI::App* cmd, CommonOpts& o, bool needs_alpha) {
    cmd->add_option("--f", o.foreground, "foreground image (PNG/PPM/PGM)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--b", o.background, "background image (PNG/PPM/PGM)")
        ->required()
        ->check(CLI::ExistingFile);
    auto* a = cmd->add_option("--alpha", o.alpha_path, "blend map image, 0 = background, 1 = foreground")
                  ->check(CLI::ExistingFile);
    if (needs_alpha) a->required();
    cmd->add_option("-o,--out", o.out, "output image (8-bit PNG)")->required();
    cmd->add_option("--offset", o.offset, "positivity floor applied at ingestion")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--alpha-blur", o.alpha_blur,
                    "Gaussian sigma applied to the blend map (0 = none)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--backend", o.backend, "kernel backend: auto, scalar or avx2")
        ->capture_default_str()
        ->check(CLI::IsMember({"auto", "scalar", "avx2"}));
}

void apply_backend(const std::string& name) {
    if (name == "scalar") kernels::select_backend(kernels::Backend::Scalar);
    else if (name == "avx2") kernels::select_backend(kernels::Backend::Avx2);
    else kernels::select_backend(kernels::Backend::Auto);
}

AlphaMap load_prepared_alpha(const CommonOpts& o, int height, int width) {
    AlphaMap alpha = load_alpha(o.alpha_path);
    if (alpha.height() != height || alpha.width() != width)
        throw std::invalid_argument("alpha map shape " + std::to_string(alpha.height()) + "x" +
                                    std::to_string(alpha.width()) + " does not match images " +
                                    std::to_string(height) + "x" + std::to_string(width));
    return blur_alpha(alpha, o.alpha_blur);
}

int run_fuse(const CommonOpts& o, const ModelWeights& weights, const IPianoConfig& ip,
             const PDConfig& pd, const std::string& init_name, const std::string& trace_path,
             const std::string& save_v) {
    Image f = load_image(o.foreground, o.offset);
    Image b = load_image(o.background, o.offset);
    require_same_shape(f, b, "fuse");
    AlphaMap alpha = load_prepared_alpha(o, f.height(), f.width());

    FusionResult res = ipiano_fuse(f, b, alpha, weights, ip, pd, parse_init_choice(init_name));
    if (!res.trace.converged)
        std::cerr << "fuse: stopped at the outer iteration cap before reaching tol\n";
    if (res.trace.inner_cap_hits > 0)
        std::cerr << "fuse: " << res.trace.inner_cap_hits
                  << " inner primal-dual solve(s) hit the iteration cap\n";
    {
        char energy[32];
        std::snprintf(energy, sizeof energy, "%.12g", res.trace.rows.back().E);
        std::cout << "fuse: " << res.trace.rows.back().iter << " iterations, E = " << energy
                  << (res.trace.converged ? "" : " (cap reached)") << ", backend "
                  << kernels::backend_name(kernels::active_backend()) << '\n';
    }

    write_png(o.out, res.u);
    if (!save_v.empty()) write_png(save_v, res.v);
    if (!trace_path.empty()) {
        std::ofstream ts(trace_path);
        if (!ts) throw IoError("cannot open '" + trace_path + "' for writing");
        res.trace.write_csv(ts);
    }
    return 0;
}

int run_osmosis(const CommonOpts& o, const OsmosisConfig& cfg) {
    Image f = load_image(o.foreground, o.offset);
    Image b = load_image(o.background, o.offset);
    require_same_shape(f, b, "osmosis");

    Image result(f.channels(), f.height(), f.width());
    if (!o.alpha_path.empty()) {
        // fusion drift: facewise alpha-weighted average of the two drifts
        AlphaMap alpha = load_prepared_alpha(o, f.height(), f.width());
        std::vector<FaceDrift> drifts;
        drifts.reserve(static_cast<std::size_t>(f.channels()));
        for (int c = 0; c < f.channels(); ++c)
            drifts.push_back(blend_face_drift(f.channel(c), b.channel(c), alpha));
        result = osmosis_evolve(f, drifts, cfg);
    } else {
        // plain evolution of f toward the structure of b
        result = linear_osmosis(f, b, cfg);
    }
    write_png(o.out, result);
    return 0;
}

int run_poisson(const CommonOpts& o, const std::string& mask_path) {
    Image f = load_image(o.foreground, o.offset);
    Image b = load_image(o.background, o.offset);
    require_same_shape(f, b, "poisson");
    AlphaMap m = load_alpha(mask_path);
    // binarise: a mask pixel is inside when >= 0.5
    for (std::size_t i = 0; i < m.size(); ++i)
        m.data()[i] = m.data()[i] >= 0.5 ? 1.0 : 0.0;
    Image result = poisson_edit(f, b, Mask(m));
    write_png(o.out, result);
    return 0;
}

int run_metrics(const std::string& a_path, const std::string& b_path,
                const std::string& out_path, double offset) {
    Image a = load_image(a_path, offset);
    Image b = load_image(b_path, offset);
    ChromaErrorNorm norm = chroma_error_norm(a, b);
    if (out_path.empty()) {
        write_metrics_csv(std::cout, norm);
    } else {
        std::ofstream os(out_path);
        if (!os) throw IoError("cannot open '" + out_path + "' for writing");
        write_metrics_csv(os, norm);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"osmofuse: brightness-invariant image fusion via joint variational osmosis"};
    app.require_subcommand(1);

    CommonOpts fuse_o, osmo_o, poisson_o;
    ModelWeights weights;
    IPianoConfig ip;
    PDConfig pd;
    std::string init_name = "f", trace_path, save_v;

    CLI::App* fuse = app.add_subcommand("fuse", "joint osmosis fusion of two images");
    add_io_flags(fuse, fuse_o, true);
    fuse->add_option("--eta", weights.eta, "gradient-sparsity weight on v")
        ->capture_default_str()->check(CLI::NonNegativeNumber);
    fuse->add_option("--mu", weights.mu, "reference fidelity weight on v")
        ->capture_default_str()->check(CLI::PositiveNumber);
    fuse->add_option("--gamma", weights.gamma, "foreground fidelity weight on u")
        ->capture_default_str()->check(CLI::NonNegativeNumber);
    fuse->add_option("--eps", weights.eps, "Huber smoothing parameter")
        ->capture_default_str();
    fuse->add_option("--beta1", ip.beta1, "inertia of the u block")->capture_default_str();
    fuse->add_option("--beta2", ip.beta2, "inertia of the v block")->capture_default_str();
    fuse->add_option("--tol", ip.tol, "relative energy-change stopping threshold")
        ->capture_default_str();
    fuse->add_option("--maxiter", ip.max_outer, "outer iteration cap")->capture_default_str();
    fuse->add_option("--inner-tol", pd.tol, "relative primal-dual gap threshold")
        ->capture_default_str();
    fuse->add_option("--inner-maxiter", pd.max_iters, "inner iteration cap")
        ->capture_default_str();
    fuse->add_option("--init", init_name, "starting image for u: f, convex or average")
        ->capture_default_str()->check(CLI::IsMember({"f", "convex", "average"}));
    fuse->add_option("--trace", trace_path, "write the per-iteration energy trace CSV here");
    fuse->add_option("--save-v", save_v, "also write the structural image v (8-bit PNG)");

    OsmosisConfig ocfg;
    std::string scheme_name = "implicit";
    CLI::App* osmo = app.add_subcommand(
        "osmosis", "linear osmosis evolution of --f with the drift of --b "
                   "(or the alpha-blended drift when --alpha is given)");
    add_io_flags(osmo, osmo_o, false);
    osmo->add_option("--tau", ocfg.time_step, "time step")->capture_default_str()
        ->check(CLI::PositiveNumber);
    osmo->add_option("--T", ocfg.final_time, "final evolution time")->capture_default_str()
        ->check(CLI::PositiveNumber);
    osmo->add_option("--scheme", scheme_name, "time integration: implicit or explicit")
        ->capture_default_str()->check(CLI::IsMember({"implicit", "explicit"}));
    osmo->add_option("--solver-tol", ocfg.solver_tol, "linear solver tolerance")
        ->capture_default_str();
    osmo->add_option("--solver-maxiter", ocfg.solver_maxiter, "linear solver iteration cap")
        ->capture_default_str();

    std::string mask_path;
    CLI::App* poisson = app.add_subcommand("poisson",
                                           "Poisson seamless editing of --f into --b on a mask");
    add_io_flags(poisson, poisson_o, false);
    poisson->add_option("--mask", mask_path, "binary region image (>= 0.5 counts as inside)")
        ->required()->check(CLI::ExistingFile);

    std::string m_a, m_b, m_out;
    double m_offset = 1.0;
    std::string m_backend = "auto";
    CLI::App* metrics = app.add_subcommand("metrics",
                                           "chromaticity error report between two images");
    metrics->add_option("image1", m_a, "first image")->required()->check(CLI::ExistingFile);
    metrics->add_option("image2", m_b, "second image")->required()->check(CLI::ExistingFile);
    metrics->add_option("-o,--out", m_out, "metrics CSV path (default: stdout)");
    metrics->add_option("--offset", m_offset, "positivity floor applied at ingestion")
        ->capture_default_str()->check(CLI::PositiveNumber);
    metrics->add_option("--backend", m_backend, "kernel backend: auto, scalar or avx2")
        ->capture_default_str()->check(CLI::IsMember({"auto", "scalar", "avx2"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*fuse) {
            apply_backend(fuse_o.backend);
            weights.offset = fuse_o.offset;
            return run_fuse(fuse_o, weights, ip, pd, init_name, trace_path, save_v);
        }
        if (*osmo) {
            apply_backend(osmo_o.backend);
            ocfg.scheme = scheme_name == "explicit" ? OsmosisScheme::Explicit
                                                    : OsmosisScheme::Implicit;
            return run_osmosis(osmo_o, ocfg);
        }
        if (*poisson) {
            apply_backend(poisson_o.backend);
            return run_poisson(poisson_o, mask_path);
        }
        if (*metrics) {
            apply_backend(m_backend);
            return run_metrics(m_a, m_b, m_out, m_offset);
        }
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
