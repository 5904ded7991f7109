#include <cstdio>
#include <filesystem>
#include <string>

#include "CLI11.hpp"

#include "incstab/cgo.hpp"
#include "incstab/forward.hpp"
#include "incstab/io.hpp"
#include "incstab/rl.hpp"
#include "incstab/sweep.hpp"

using namespace incstab;
namespace fs = std::filesystem;

namespace {

struct GlobalOpts {
    std::string config_file;
    std::string out_dir;
    int64_t seed = -1;
    int threads = 0;
    int grid_n = 0;
};

ExperimentConfig load_config(const GlobalOpts& g) {
    ExperimentConfig cfg = g.config_file.empty()
                               ? default_config()
                               : parse_config(g.config_file);
    if (g.seed >= 0) cfg.seed = uint64_t(g.seed);
    if (g.threads > 0) cfg.threads = g.threads;
    if (g.grid_n > 0) cfg.domain.n = g.grid_n;
    if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
    cfg.validate();
    return cfg;
}

CalibrationManifest load_or_default_manifest(const fs::path& out) {
    fs::path file = out / "calibration.json";
    if (fs::exists(file)) return read_manifest(file);
    CalibrationManifest cal;
    std::printf("no calibration.json in %s, using unit constants\n",
                out.string().c_str());
    return cal;
}

int cmd_frames(const ExperimentConfig& cfg) {
    FrameReport rep = run_frames(cfg, cfg.out_dir);
    std::printf("frames: checked=%d failed=%d max_rel=%.3e%s\n", rep.checked,
                rep.failed, rep.max_rel,
                rep.schedule_degenerate ? " (schedule degenerate)" : "");
    for (size_t i = 0; i < rep.sigmas.size(); ++i)
        std::printf("  k=%s sigma=%s\n", fmt(cfg.k_values[i]).c_str(),
                    fmt(rep.sigmas[i]).c_str());
    return rep.failed == 0 ? 0 : 2;
}

int cmd_cgo_decay(const ExperimentConfig& cfg) {
    SampledPotential q = sample_potential(combined_descriptor(cfg),
                                          cfg.domain);
    Vec3 xi{2.0, 0.0, 0.0};
    std::vector<ZetaFrame> path;
    for (double sigma : {2.0, 3.6, 6.3, 11.2, 20.0}) {
        double tau =
            std::sqrt((sigma * sigma + 1.0) / dot(xi, xi) - 0.25);
        path.push_back(build_frame(xi, 1.0, tau));
    }
    SolverOptions opts;
    opts.s_order = cfg.s;
    DecayStudy st = decay_study(q, path, 0, opts);
    if (st.trivial) {
        std::printf("cgo-decay: potential is zero, nothing to fit\n");
        return 0;
    }
    std::printf("cgo-decay: slope=%s stderr=%s C_cal=%s\n",
                fmt(st.slope).c_str(), fmt(st.slope_stderr).c_str(),
                fmt(st.C_cal).c_str());
    return 0;
}

int cmd_forward_check(const ExperimentConfig& cfg) {
    ScalarField q = sample_potential(cfg.q1, cfg.domain).field;
    double k = cfg.k_values.front();
    DirichletSolver solver(q, k, cfg.cond_threshold);
    std::printf("forward-check: k=%s condition_estimate=%s\n",
                fmt(k).c_str(), fmt(solver.condition_estimate()).c_str());
    std::vector<BoundaryField> dict = dirichlet_dictionary(cfg.domain, 2);
    for (size_t i = 0; i < dict.size(); ++i) {
        ScalarField u = solver.solve(dict[i]);
        double res = pde_residual(u, q, k);
        std::printf("  dict[%zu]: pde_residual=%s\n", i, fmt(res).c_str());
    }
    return 0;
}

int cmd_rl_check(const ExperimentConfig& cfg) {
    ScalarField q = sample_potential(combined_descriptor(cfg),
                                     cfg.domain).field;
    double dist = std::max(
        cfg.noise_levels.empty() ? 1e-3 : cfg.noise_levels.front(), 1e-15);
    std::vector<double> eps_grid;
    double rho_max = 0.0;
    for (double k : cfg.k_values) {
        ParamSchedule sch = schedule(dist, k, cfg.domain.R, cfg.C_star,
                                     cfg.N, cfg.alpha, cfg.beta);
        if (!sch.feasible) continue;
        eps_grid.push_back(sch.epsilon);
        rho_max = std::max(rho_max, sch.rho);
    }
    if (eps_grid.empty()) {
        std::printf("rl-check: no feasible schedule at dist=%s\n",
                    fmt(dist).c_str());
        return 2;
    }
    DecayCheckReport rep =
        fourier_decay_check(q, eps_grid, zrho_lattice(cfg.domain, rho_max),
                            cfg.q0.holder_exponent());
    std::printf("rl-check: C_min=%s satisfied=%s%s\n", fmt(rep.C_min).c_str(),
                fmt(rep.satisfied_fraction).c_str(),
                rep.degenerate ? " (degenerate)" : "");
    return 0;
}

int cmd_calibrate(const ExperimentConfig& cfg) {
    CalibrationManifest cal = run_calibrate(cfg, cfg.out_dir);
    std::printf("calibrate: wrote %s\n",
                (fs::path(cfg.out_dir) / "calibration.json").string().c_str());
    std::printf("  C_cal=%s C_coupling=%s C_reflected=%s C_rl=%s\n",
                fmt(cal.C_cal).c_str(), fmt(cal.C_coupling).c_str(),
                fmt(cal.C_reflected).c_str(), fmt(cal.C_rl).c_str());
    std::printf("  C_int=%s C_rhs=%s C_trivial=%s\n", fmt(cal.C_int).c_str(),
                fmt(cal.C_rhs).c_str(), fmt(cal.C_trivial).c_str());
    return 0;
}

int run_sweep_cmd(ExperimentConfig cfg, bool single_cell) {
    if (single_cell) {
        cfg.k_values = {cfg.k_values.front()};
        cfg.noise_levels = {cfg.noise_levels.empty()
                                ? 1e-3
                                : cfg.noise_levels.front()};
    }
    CalibrationManifest cal = load_or_default_manifest(cfg.out_dir);
    SweepResult res = run_sweep(cfg, cal, cfg.out_dir);
    for (const SweepCell& c : res.cells)
        std::printf("cell k=%s noise=%s: %s dist=%s err_linf=%s rhs=%s\n",
                    fmt(c.k).c_str(), fmt(c.noise).c_str(), c.status.c_str(),
                    fmt(c.dist).c_str(), fmt(c.err_linf).c_str(),
                    fmt(c.rhs).c_str());
    std::printf("sweep: wrote %s\n", cfg.out_dir.c_str());
    return res.any_failed ? 2 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stability sweeps for partial-data potential recovery"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_file, "TOML run configuration");
    app.add_option("--out", g.out_dir, "output directory override");
    app.add_option("--seed", g.seed, "seed override");
    app.add_option("--threads", g.threads, "worker pool size override");
    app.add_option("--grid-n", g.grid_n, "cells per axis override");

    auto* frames = app.add_subcommand("frames", "frame invariant audit");
    auto* cgo = app.add_subcommand("cgo-decay", "remainder decay study");
    auto* fwd = app.add_subcommand("forward-check", "solver diagnostics");
    auto* rl = app.add_subcommand("rl-check", "Fourier decay certificate");
    auto* calib = app.add_subcommand("calibrate", "fit frozen constants");
    auto* recover = app.add_subcommand("recover", "single-cell recovery");
    auto* sweep = app.add_subcommand("sweep", "full (k, noise) sweep");

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig cfg = load_config(g);
        if (frames->parsed()) return cmd_frames(cfg);
        if (cgo->parsed()) return cmd_cgo_decay(cfg);
        if (fwd->parsed()) return cmd_forward_check(cfg);
        if (rl->parsed()) return cmd_rl_check(cfg);
        if (calib->parsed()) return cmd_calibrate(cfg);
        if (recover->parsed()) return run_sweep_cmd(cfg, true);
        if (sweep->parsed()) return run_sweep_cmd(cfg, false);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
