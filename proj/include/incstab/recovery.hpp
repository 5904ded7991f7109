#pragma once

#include "incstab/cgo.hpp"
#include "incstab/forward.hpp"
#include "incstab/frames.hpp"

namespace incstab {

/// Per-mode error budget of the Green-identity decomposition. All terms
/// are measured magnitudes except the *_bound entries, which evaluate the
/// theoretical bounds with calibrated constants.
struct ModeBudget {
    double principal = 0.0;       // |direct F q0(xi)| (even extension)
    double coupling = 0.0;        // |int q0 f|
    double coupling_bound = 0.0;  // C / sigma
    double reflected = 0.0;       // |F q0(xi', 2 tau |xi'|)| + mirror
    double reflected_bound = 0.0; // C (e^{-eps^2(1+4tau^2)|xi'|^2/4pi}+eps^a)
    double data_bound = 0.0;      // C k^4 e^{2 R sigma} dist
};

struct ModeEstimate {
    Vec3 xi{0, 0, 0};
    cplx fq0_hat{0.0};
    ModeBudget budget;
    bool admissible = false;
};

struct RecoveryParams {
    double epsilon = 0.0;     // mollification scale from the schedule
    double alpha = 0.9;       // Holder exponent of the potential class
    double M = 0.0;           // admissibility floor for |Im zeta|
    double dist = 0.0;        // measured Cauchy distance (data route)
    double C_coupling = 1.0;
    double C_reflected = 1.0;
    double C_data = 1.0;
    double span_tol = 0.1;    // max relative loss of a CGO trace projection
};

/// Trapezoid volume integral int_Omega q0 u1 u2 dx.
cplx green_identity_lhs(const ScalarField& q0, const ReflectedPair& pair);

/// Oracle route: evaluate every term of the decomposition by direct
/// quadrature; fq0_hat = lhs - coupling + reflected is algebraically the
/// principal term.
ModeEstimate decomposition(const ScalarField& q0, const ReflectedPair& pair,
                           const RecoveryParams& prm);

/// Dirichlet traces of the assembled pair solutions on the Gamma faces.
BoundaryField cgo_trace(const ReflectedPair& pair, int which);  // 1 or 2

/// Data route: the volume functional evaluated through the Alessandrini
/// pairing on (possibly noisy) Cauchy sets; no oracle subtraction, the
/// unsubtracted terms are carried as budget bounds.
ModeEstimate mode_from_data(const CauchyDataSet& A, const CauchyDataSet& B,
                            const ReflectedPair& pair,
                            const RecoveryParams& prm);

/// Hermitian-symmetrized inverse DFT of recovered modes, restricted to the
/// original box; real part of a band-limited field.
ScalarField invert_lowpass(const std::vector<ModeEstimate>& modes,
                           const DomainSpec& d, double herm_tol = 1e-6);

/// Squared H^{-1} bound: lattice sum of |modes|^2/(1+|xi|^2) over Z_rho
/// plus the high-frequency tail surrogate C_tail / rho^2.
double hminus1_estimate(const std::vector<ModeEstimate>& modes, double rho,
                        double c_tail, const DomainSpec& d);

/// L^infty lift of the H^{-1} norm: C_int * h^{eta/(1+s)}, eta=(s-3/2)/2.
double linf_estimate(double hminus1, double s, double C_int = 1.0);

/// Right-hand side of the headline stability bound; falls back to the
/// a-priori class bound when the schedule is infeasible.
double rhs_bound(double k, double dist, const ParamSchedule& sch, double s,
                 double C = 1.0, double C_trivial = 1.0);

/// Frequencies of the doubled-box DFT lattice inside Z_rho (|xi'| < rho,
/// |xi3| < rho), excluding xi = 0, in deterministic order.
std::vector<Vec3> zrho_lattice(const DomainSpec& d, double rho);

} // namespace incstab
