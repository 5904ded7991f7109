#include "incstab/frames.hpp"

#include <cmath>
#include <limits>

namespace incstab {

Rotation rotate_to_tilde(const Vec3& xi) {
    double xp = std::hypot(xi[0], xi[1]);
    double nrm = std::sqrt(dot(xi, xi));
    if (nrm == 0.0) throw DegenerateFrequency("rotate_to_tilde: xi = 0");

    Rotation rot;
    if (xp == 0.0) {
        // xi' = 0: any rotation about x3 works, take the identity
        rot.Q = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
        rot.xi_tilde = xi;
        return rot;
    }
    double c = xi[0] / xp, s = xi[1] / xp;
    // rows are the tilde basis vectors expressed in original coordinates
    rot.Q = {{{c, s, 0}, {-s, c, 0}, {0, 0, 1}}};
    rot.xi_tilde = {xp, 0.0, xi[2]};
    return rot;
}

namespace {
CVec3 to_original(const Mat3& Q, const CVec3& v) {
    // Q is orthogonal; original = Q^T * tilde
    CVec3 out;
    for (int i = 0; i < 3; ++i)
        out[i] = Q[0][i] * v[0] + Q[1][i] * v[1] + Q[2][i] * v[2];
    return out;
}
} // namespace

ZetaFrame build_frame(const Vec3& xi, double k, double tau) {
    Rotation rot = rotate_to_tilde(xi);
    double xi2 = dot(xi, xi);
    double disc = xi2 * (0.25 + tau * tau) - k * k;
    if (disc < 0.0)
        throw ImaginaryRootViolation(
            "build_frame: |xi|^2 (1/4 + tau^2) < k^2");
    double b = std::sqrt(disc);
    double t1 = rot.xi_tilde[0], t3 = rot.xi_tilde[2];

    CVec3 z1t = {cplx(-t1 / 2 + tau * t3), cplx(0.0, -b),
                 cplx(-t3 / 2 - tau * t1)};
    CVec3 z2t = {cplx(-t1 / 2 - tau * t3), cplx(0.0, b),
                 cplx(-t3 / 2 + tau * t1)};
    // reflections on the plane xi3 = 0: third tilde component negated
    CVec3 z1st = {z1t[0], z1t[1], -z1t[2]};
    CVec3 z2st = {z2t[0], z2t[1], -z2t[2]};

    ZetaFrame f;
    f.xi = xi;
    f.k = k;
    f.tau = tau;
    f.rotation = rot.Q;
    f.zeta1 = to_original(rot.Q, z1t);
    f.zeta2 = to_original(rot.Q, z2t);
    f.zeta1s = to_original(rot.Q, z1st);
    f.zeta2s = to_original(rot.Q, z2st);
    return f;
}

bool admissible(const ZetaFrame& frame, double M) {
    return frame.re_norm2() > M * M + frame.k * frame.k;
}

double ParamSchedule::tau_for(const Vec3& xi) const {
    double xi2 = dot(xi, xi);
    if (xi2 == 0.0) throw DegenerateFrequency("tau_for: xi = 0");
    double e5 = E / (5.0 * R);
    double v = (2.0 * k * k + e5 * e5) / xi2 - 0.25;
    if (v < 0.0)
        throw ImaginaryRootViolation("tau_for: |xi| too large for schedule");
    return std::sqrt(v);
}

ParamSchedule schedule(double dist, double k, double R, double C_star,
                       double N, double alpha, double beta, double epsilon0) {
    if (!(dist > 0.0) || !(dist < 1.0))
        throw ScheduleInfeasible("schedule: dist must lie in (0,1)");
    if (k < 1.0) throw Error("schedule: k must be >= 1");
    if (!(beta < alpha) || beta <= 0.0 || alpha >= 1.0)
        throw BadExponents("schedule: need 0 < beta < alpha < 1");

    ParamSchedule s;
    s.dist = dist;
    s.E = std::abs(std::log(dist));
    s.R = R;
    s.k = k;
    s.C_star = C_star;
    s.N = N;
    s.M = C_star * N;
    s.alpha = alpha;
    s.beta = beta;
    double lift = k + s.E / (5.0 * R);
    s.epsilon = 1.0 / std::sqrt(lift);
    s.rho = std::pow(lift, beta / 3.0);
    s.epsilon0 = epsilon0;
    double e5 = s.E / (5.0 * R);
    s.feasible = e5 * e5 > s.M * s.M;
    s.epsilon_exceeds_eps0 = s.epsilon >= epsilon0;
    return s;
}

ZetaFrame scheduled_frame(const ParamSchedule& sch, const Vec3& xi) {
    return build_frame(xi, sch.k, sch.tau_for(xi));
}

} // namespace incstab
