#pragma once

#include <array>
#include <complex>
#include <limits>

#include "incstab/grid.hpp"

namespace incstab {

using CVec3 = std::array<cplx, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

inline cplx cdot(const CVec3& a, const CVec3& b) {
    // complex bilinear dot product, no conjugation
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline Vec3 re(const CVec3& a) {
    return {a[0].real(), a[1].real(), a[2].real()};
}
inline Vec3 im(const CVec3& a) {
    return {a[0].imag(), a[1].imag(), a[2].imag()};
}
inline cplx cdot_x(const CVec3& a, const Vec3& x) {
    return a[0] * x[0] + a[1] * x[1] + a[2] * x[2];
}

/// One admissible quadruple (zeta1, zeta2, zeta1*, zeta2*) for a
/// frequency xi, wave number k and parameter tau, in original
/// coordinates, together with the rotation to tilde coordinates.
struct ZetaFrame {
    Vec3 xi{0, 0, 0};
    double k = 1.0;
    double tau = 0.0;
    CVec3 zeta1, zeta2, zeta1s, zeta2s;
    Mat3 rotation{};   // maps original to tilde: xi_tilde = rotation * xi

    double im_norm() const {
        // |Im zeta_j| is the same for all four vectors
        double s = dot(xi, xi) * (0.25 + tau * tau) - k * k;
        return std::sqrt(std::max(0.0, s));
    }
    double re_norm2() const { return dot(xi, xi) * (0.25 + tau * tau); }

    const CVec3& vec(int which) const {
        switch (which) {
            case 0: return zeta1;
            case 1: return zeta2;
            case 2: return zeta1s;
            default: return zeta2s;
        }
    }
};

/// Rotation fixing the x3 axis that maps xi to ((xi1^2+xi2^2)^{1/2}, 0, xi3).
/// For xi' = 0 the rotation is taken to be the identity.
struct Rotation {
    Mat3 Q{};
    Vec3 xi_tilde{0, 0, 0};
};

Rotation rotate_to_tilde(const Vec3& xi);

ZetaFrame build_frame(const Vec3& xi, double k, double tau);

/// |xi|^2 (1/4 + tau^2) > M^2 + k^2, strict.
bool admissible(const ZetaFrame& frame, double M);

/// The coupled parameter choices driven by the measured Cauchy distance:
/// E = |log dist|, eps^2 = 1/(k + E/5R), rho^3 = (k + E/5R)^beta, and the
/// per-frequency tau with 1/4 + tau^2 = (2k^2 + (E/5R)^2)/|xi|^2.
struct ParamSchedule {
    double dist = 0.0;
    double E = 0.0;
    double R = 0.0;
    double k = 1.0;
    double C_star = 2.0;
    double N = 0.0;
    double M = 0.0;          // C_star * N
    double alpha = 0.9;
    double beta = 0.45;
    double epsilon = 0.0;
    double rho = 0.0;
    double epsilon0 = std::numeric_limits<double>::infinity();
    bool feasible = false;           // (E/5R)^2 > M^2
    bool epsilon_exceeds_eps0 = false;

    double lift() const { return k + E / (5.0 * R); }   // k + E/5R
    double sigma() const {
        // scheduled |Im zeta| = [k^2 + (E/5R)^2]^{1/2}
        double e5 = E / (5.0 * R);
        return std::sqrt(k * k + e5 * e5);
    }
    double alpha_tilde() const {
        return std::min({alpha - beta, 2.0 - beta, 2.0 * beta / 3.0});
    }
    /// tau(xi) from the scheduled choice; throws if |xi| is too large for
    /// the square root to be real.
    double tau_for(const Vec3& xi) const;

    void require_feasible() const {
        if (!feasible)
            throw ScheduleInfeasible(
                "schedule infeasible: (E/5R)^2 <= M^2, dist too large");
    }
};

ParamSchedule schedule(double dist, double k, double R, double C_star,
                       double N, double alpha, double beta,
                       double epsilon0 = std::numeric_limits<double>::infinity());

/// Scheduled frame at frequency xi: build_frame with tau = tau_for(xi).
ZetaFrame scheduled_frame(const ParamSchedule& sch, const Vec3& xi);

} // namespace incstab
