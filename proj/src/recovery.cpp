#include "incstab/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "incstab/fft.hpp"

namespace incstab {

cplx green_identity_lhs(const ScalarField& q0, const ReflectedPair& pair) {
    const ScalarField& u1 = pair.u1;
    const ScalarField& u2 = pair.u2;
    const DomainSpec& d = u1.domain;
    if (q0.doubled) throw Error("green_identity_lhs: q0 on the original box");
    cplx acc(0.0);
    for (size_t i = 0; i < q0.values.size(); ++i)
        acc += q0.values[i] * u1.values[i] * u2.values[i];
    return acc * d.cell_volume();
}

ModeEstimate decomposition(const ScalarField& q0, const ReflectedPair& pair,
                           const RecoveryParams& prm) {
    const ZetaFrame& fr = pair.frame;
    if (!admissible(fr, prm.M))
        throw InadmissibleFrame("decomposition: frame below the M floor");
    const DomainSpec& d = q0.domain;
    if (q0.doubled) throw Error("decomposition: q0 on the original box");

    ScalarField w1 = restrict_to_box(pair.w1);
    ScalarField w1s = restrict_to_box(pair.w1s);
    ScalarField w2 = restrict_to_box(pair.w2);
    ScalarField w2s = restrict_to_box(pair.w2s);

    Vec3 xi = fr.xi;
    Vec3 xis{xi[0], xi[1], -xi[2]};
    CVec3 z12s, z1s2;
    for (int i = 0; i < 3; ++i) {
        z12s[i] = fr.zeta1[i] + fr.zeta2s[i];
        z1s2[i] = fr.zeta1s[i] + fr.zeta2[i];
    }

    cplx lhs(0.0), principal(0.0), coupling(0.0), reflected(0.0);
    int n = d.n;
    const cplx I(0.0, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
                Vec3 x = q0.point(i, j, l);
                cplx q = q0.at(i, j, l);
                cplx e1 = std::exp(-I * dot(xi, x));
                cplx e2 = std::exp(-I * dot(xis, x));
                cplx e3 = std::exp(I * cdot_x(z12s, x));
                cplx e4 = std::exp(I * cdot_x(z1s2, x));
                cplx a = w1.at(i, j, l), as = w1s.at(i, j, l);
                cplx b = w2.at(i, j, l), bs = w2s.at(i, j, l);
                lhs += q * pair.u1.at(i, j, l) * pair.u2.at(i, j, l);
                principal += q * (e1 + e2);
                coupling += q * (e1 * (a + b + a * b) +
                                 e2 * (as + bs + as * bs) -
                                 e3 * (a + bs + a * bs) -
                                 e4 * (as + b + as * b));
                reflected += q * (e3 + e4);
            }
    double cv = d.cell_volume();
    lhs *= cv;
    principal *= cv;
    coupling *= cv;
    reflected *= cv;

    ModeEstimate est;
    est.xi = xi;
    est.admissible = true;
    est.fq0_hat = lhs - coupling + reflected;

    double sigma = fr.im_norm();
    double xip = std::hypot(xi[0], xi[1]);
    est.budget.principal = std::abs(principal);
    est.budget.coupling = std::abs(coupling);
    est.budget.coupling_bound = prm.C_coupling / std::max(sigma, 1e-300);
    est.budget.reflected = std::abs(reflected);
    est.budget.reflected_bound =
        prm.C_reflected *
        (std::exp(-prm.epsilon * prm.epsilon *
                  (1.0 + 4.0 * fr.tau * fr.tau) * xip * xip / (4.0 * M_PI)) +
         std::pow(prm.epsilon, prm.alpha));
    est.budget.data_bound = prm.C_data * std::pow(fr.k, 4) *
                            std::exp(2.0 * d.R * sigma) * prm.dist;
    return est;
}

BoundaryField cgo_trace(const ReflectedPair& pair, int which) {
    if (which != 1 && which != 2) throw Error("cgo_trace: which must be 1/2");
    const ZetaFrame& fr = pair.frame;
    const CVec3& za = which == 1 ? fr.zeta1 : fr.zeta2;
    const CVec3& zb = which == 1 ? fr.zeta1s : fr.zeta2s;
    const ScalarField& wa = which == 1 ? pair.w1 : pair.w2;
    const ScalarField& wb = which == 1 ? pair.w1s : pair.w2s;
    const DomainSpec& d = wa.domain;
    int n = d.n, nz = 2 * n;
    BoundaryField f(d);
    const cplx I(0.0, 1.0);

    auto fill = [&](Face face, const std::vector<cplx>& pa,
                    const std::vector<cplx>& pb, bool z_face) {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                Vec3 x = f.point(face, a, b);
                size_t id = z_face ? static_cast<size_t>(a) * n + b
                                   : static_cast<size_t>(a) * nz + b;
                f.at(face, a, b) =
                    std::exp(I * cdot_x(za, x)) * (1.0 + pa[id]) -
                    std::exp(I * cdot_x(zb, x)) * (1.0 + pb[id]);
            }
    };
    fill(Face::XMin, eval_plane_x(wa, 0, -d.L), eval_plane_x(wb, 0, -d.L),
         false);
    fill(Face::XMax, eval_plane_x(wa, 0, d.L), eval_plane_x(wb, 0, d.L),
         false);
    fill(Face::YMin, eval_plane_x(wa, 1, -d.L), eval_plane_x(wb, 1, -d.L),
         false);
    fill(Face::YMax, eval_plane_x(wa, 1, d.L), eval_plane_x(wb, 1, d.L),
         false);
    fill(Face::ZMin, eval_plane_z(wa, -d.H), eval_plane_z(wb, -d.H), true);
    return f;
}

ModeEstimate mode_from_data(const CauchyDataSet& A, const CauchyDataSet& B,
                            const ReflectedPair& pair,
                            const RecoveryParams& prm) {
    const ZetaFrame& fr = pair.frame;
    if (!admissible(fr, prm.M))
        throw InadmissibleFrame("mode_from_data: frame below the M floor");
    const DomainSpec& d = A.domain;

    BoundaryField f1 = cgo_trace(pair, 1);
    BoundaryField f2 = cgo_trace(pair, 2);
    SpanProjection pA = project_dirichlet(A, f1);
    SpanProjection pB = project_dirichlet(B, f2);
    if (pA.rel_residual > prm.span_tol || pB.rel_residual > prm.span_tol)
        throw SpanDeficient("mode_from_data: CGO trace loses too much norm "
                            "in the dictionary span");

    BoundaryField f1p(d), g1(d), f2p(d), g2(d);
    for (size_t i = 0; i < A.pairs.size(); ++i) {
        BoundaryField tf = A.pairs[i].f, tg = A.pairs[i].g;
        tf *= pA.coeffs[i];
        tg *= pA.coeffs[i];
        f1p += tf;
        g1 += tg;
    }
    for (size_t i = 0; i < B.pairs.size(); ++i) {
        BoundaryField tf = B.pairs[i].f, tg = B.pairs[i].g;
        tf *= pB.coeffs[i];
        tg *= pB.coeffs[i];
        f2p += tf;
        g2 += tg;
    }

    cplx pairing(0.0);
    for (int face = 0; face < kNumFaces; ++face) {
        double ca = f1p.cell_area(Face(face));
        for (int a = 0; a < d.n; ++a)
            for (int b = 0; b < d.n; ++b)
                pairing += ca * (g1.at(Face(face), a, b) *
                                     f2p.at(Face(face), a, b) -
                                 f1p.at(Face(face), a, b) *
                                     g2.at(Face(face), a, b));
    }

    ModeEstimate est;
    est.xi = fr.xi;
    est.admissible = true;
    est.fq0_hat = pairing;
    double sigma = fr.im_norm();
    double xip = std::hypot(fr.xi[0], fr.xi[1]);
    est.budget.coupling_bound = prm.C_coupling / std::max(sigma, 1e-300);
    est.budget.reflected_bound =
        prm.C_reflected *
        (std::exp(-prm.epsilon * prm.epsilon *
                  (1.0 + 4.0 * fr.tau * fr.tau) * xip * xip / (4.0 * M_PI)) +
         std::pow(prm.epsilon, prm.alpha));
    est.budget.data_bound = prm.C_data * std::pow(fr.k, 4) *
                            std::exp(2.0 * d.R * sigma) * prm.dist;
    return est;
}

namespace {

std::array<int, 3> lattice_index(const DomainSpec& d, const Vec3& xi) {
    double m1 = xi[0] * d.L / M_PI;
    double m2 = xi[1] * d.L / M_PI;
    double m3 = xi[2] * d.H / M_PI;
    std::array<int, 3> m{int(std::lround(m1)), int(std::lround(m2)),
                         int(std::lround(m3))};
    if (std::abs(m1 - m[0]) > 1e-9 || std::abs(m2 - m[1]) > 1e-9 ||
        std::abs(m3 - m[2]) > 1e-9)
        throw Error("invert_lowpass: frequency off the DFT lattice");
    return m;
}

} // namespace

ScalarField invert_lowpass(const std::vector<ModeEstimate>& modes,
                           const DomainSpec& d, double herm_tol) {
    int n = d.n, nz = 2 * n;
    std::vector<cplx> coef(static_cast<size_t>(n) * n * nz, cplx(0.0));
    std::map<std::array<int, 3>, cplx> table;
    double scale = 0.0;
    for (const auto& m : modes) {
        table[lattice_index(d, m.xi)] = m.fq0_hat;
        scale = std::max(scale, std::abs(m.fq0_hat));
    }
    if (scale == 0.0)
        return ScalarField(d, FieldKind::Potential, false);

    auto wrap = [](int m, int N) { return ((m % N) + N) % N; };
    for (auto& [m, v] : table) {
        std::array<int, 3> neg{-m[0], -m[1], -m[2]};
        auto it = table.find(neg);
        cplx sym;
        if (it != table.end()) {
            if (std::abs(v - std::conj(it->second)) > herm_tol * scale)
                throw NonHermitian(
                    "invert_lowpass: conjugate symmetry violated");
            sym = 0.5 * (v + std::conj(it->second));
        } else {
            sym = v;  // partner absent: mirrored below
        }
        size_t id = (static_cast<size_t>(wrap(m[0], n)) * n +
                     wrap(m[1], n)) *
                        nz +
                    wrap(m[2], nz);
        coef[id] = sym;
        size_t idn = (static_cast<size_t>(wrap(-m[0], n)) * n +
                      wrap(-m[1], n)) *
                         nz +
                     wrap(-m[2], nz);
        coef[idn] = std::conj(sym);
    }
    ScalarField dbl = field_from_dft(d, true, coef, FieldKind::Potential);
    ScalarField out = restrict_to_box(dbl);
    for (auto& v : out.values) v = cplx(v.real(), 0.0);
    return out;
}

double hminus1_estimate(const std::vector<ModeEstimate>& modes, double rho,
                        double c_tail, const DomainSpec& d) {
    if (rho <= 0.0) throw Error("hminus1_estimate: rho must be positive");
    double V = 4.0 * d.L * d.L * 2.0 * d.H;  // doubled-box volume
    double acc = 0.0;
    for (const auto& m : modes) {
        double xip = std::hypot(m.xi[0], m.xi[1]);
        if (xip >= rho || std::abs(m.xi[2]) >= rho) continue;
        acc += std::norm(m.fq0_hat) / (1.0 + dot(m.xi, m.xi));
    }
    return acc / V + c_tail / (rho * rho);
}

double linf_estimate(double hminus1, double s, double C_int) {
    if (s <= 1.5) throw BadExponents("linf_estimate: need s > 3/2");
    double eta = (s - 1.5) / 2.0;
    return C_int * std::pow(hminus1, eta / (1.0 + s));
}

double rhs_bound(double k, double dist, const ParamSchedule& sch, double s,
                 double C, double C_trivial) {
    if (s <= 1.5) throw BadExponents("rhs_bound: need s > 3/2");
    if (!sch.feasible) return C_trivial;
    double eta = (s - 1.5) / 2.0;
    double lift = sch.lift();
    double inner = std::exp(6.0 * sch.R * k) * dist +
                   std::pow(lift, -sch.alpha_tilde());
    return C * std::pow(inner, eta / (2.0 * (1.0 + s)));
}

std::vector<Vec3> zrho_lattice(const DomainSpec& d, double rho) {
    std::vector<Vec3> out;
    int n = d.n, nz = 2 * n;
    for (int m1 = 0; m1 < n; ++m1)
        for (int m2 = 0; m2 < n; ++m2)
            for (int m3 = 0; m3 < nz; ++m3) {
                Vec3 xi = lattice_xi(d, true, m1, m2, m3);
                if (xi[0] == 0.0 && xi[1] == 0.0 && xi[2] == 0.0) continue;
                if (std::hypot(xi[0], xi[1]) < rho && std::abs(xi[2]) < rho)
                    out.push_back(xi);
            }
    return out;
}

} // namespace incstab
