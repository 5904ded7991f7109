#pragma once

#include "incstab/fft.hpp"
#include "incstab/frames.hpp"
#include "incstab/grid.hpp"

namespace incstab {

/// CGO remainder w for one complex frequency zeta with zeta.zeta = k^2,
/// solved on the even-extended periodic box.
struct CGOSolution {
    CVec3 zeta;
    double k = 1.0;
    ScalarField w;            // doubled grid, Remainder kind
    double residual_norm = 0.0;
    double hs_norm = 0.0;     // discrete H^s norm of w
    int iterations = 0;
};

struct SolverOptions {
    double tol = 1e-10;
    int max_iter = 200;
    double M = 0.0;           // admissibility floor for |Im zeta|
    double s_order = 3.5;     // order for the reported H^s norm
};

/// Solve Delta w + 2 i zeta . grad w = -q (1 + w) by Picard iteration on
/// the half-shifted frequency lattice of the doubled periodic box.
CGOSolution solve_remainder(const ScalarField& q_ext, const CVec3& zeta,
                            double k, const SolverOptions& opts = {});

/// x3-mirror of a doubled-grid field (the remainder for the reflected
/// zeta* when the potential is even in x3).
ScalarField mirror_z(const ScalarField& f);

/// u_j = e^{i zeta_j . x}(1 + w_j) - e^{i zeta_j* . x}(1 + w_j*),
/// vanishing on the plane x3 = 0.
struct ReflectedPair {
    ZetaFrame frame;
    ScalarField u1, u2;        // original box
    ScalarField w1, w1s, w2, w2s;  // doubled-grid remainders
    double trace_max_rel = 0.0;    // max |u_j| on x3=0 over max |u_j| on box
};

ReflectedPair assemble_pair(const ZetaFrame& frame, const CGOSolution& w1,
                            const CGOSolution& w1s, const CGOSolution& w2,
                            const CGOSolution& w2s,
                            double trace_tol = 1e-10);

/// Relative L2 norm of the 7-point discretization of (Delta + k^2 + q) u
/// over interior nodes.
double pde_residual(const ScalarField& u, const ScalarField& q, double k);

struct DecayStudy {
    std::vector<double> im_norms;
    std::vector<double> w_norms;
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double C_cal = 0.0;      // max over the path of ||w|| |Im zeta| / ||q||
    bool trivial = false;    // all norms zero (q = 0)
};

/// Remainder-decay study along a path of frames with growing |Im zeta|.
DecayStudy decay_study(const SampledPotential& q,
                       const std::vector<ZetaFrame>& path, int which_zeta = 0,
                       const SolverOptions& opts = {});

/// Least-squares line fit of y against x; returns slope, intercept and the
/// standard error of the slope.
struct LineFit {
    double slope = 0.0, intercept = 0.0, slope_stderr = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

} // namespace incstab
