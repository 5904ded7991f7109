#include "incstab/cgo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace incstab {

namespace {

// Half-cell lattice shift along the axis carrying most of Im zeta; dodges
// the zeros of the symbol |m|^2 + 2 zeta . m (which always include m = 0).
Vec3 lattice_shift(const DomainSpec& d, const CVec3& zeta) {
    Vec3 iz = im(zeta);
    int axis = 0;
    for (int a = 1; a < 3; ++a)
        if (std::abs(iz[a]) > std::abs(iz[axis])) axis = a;
    Vec3 s{0, 0, 0};
    double spacing = axis < 2 ? M_PI / d.L : M_PI / d.H;
    s[axis] = 0.5 * spacing;
    return s;
}

void apply_phase(ScalarField& f, const Vec3& s, double sign) {
    int n = f.domain.n, nz = f.nz();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < nz; ++k)
                f.at(i, j, k) *=
                    std::exp(cplx(0.0, sign * dot(s, f.point(i, j, k))));
}

} // namespace

CGOSolution solve_remainder(const ScalarField& q_ext, const CVec3& zeta,
                            double k, const SolverOptions& opts) {
    if (!q_ext.doubled)
        throw Error("solve_remainder: potential must be even-extended");
    const DomainSpec& d = q_ext.domain;
    cplx zz = cdot(zeta, zeta);
    if (std::abs(zz - k * k) > 1e-10 * std::max(1.0, k * k))
        throw Error("solve_remainder: zeta . zeta != k^2");
    double sigma = norm2(im(zeta));
    if (sigma <= opts.M)
        throw Error("solve_remainder: |Im zeta| <= M, inadmissible");

    int n = d.n, nz = 2 * n;
    size_t N = static_cast<size_t>(n) * n * nz;
    Vec3 shift = lattice_shift(d, zeta);

    // denominators |kappa+s|^2 + 2 zeta . (kappa+s) on the shifted lattice
    std::vector<cplx> denom(N);
    double min_mag = std::numeric_limits<double>::infinity();
    for (int m1 = 0; m1 < n; ++m1)
        for (int m2 = 0; m2 < n; ++m2)
            for (int m3 = 0; m3 < nz; ++m3) {
                Vec3 kap = lattice_xi(d, true, m1, m2, m3);
                for (int a = 0; a < 3; ++a) kap[a] += shift[a];
                cplx dd = dot(kap, kap) +
                          2.0 * (zeta[0] * kap[0] + zeta[1] * kap[1] +
                                 zeta[2] * kap[2]);
                denom[(static_cast<size_t>(m1) * n + m2) * nz + m3] = dd;
                min_mag = std::min(min_mag, std::abs(dd));
            }
    if (min_mag < 1e-12)
        throw SymbolSingularity("solve_remainder: shifted symbol vanishes");

    CGOSolution sol;
    sol.zeta = zeta;
    sol.k = k;
    sol.w = ScalarField(d, FieldKind::Remainder, true);
    sol.iterations = 0;

    double q_max = q_ext.max_abs();
    if (q_max == 0.0) {
        sol.residual_norm = 0.0;
        sol.hs_norm = 0.0;
        sol.iterations = 1;
        return sol;
    }

    ScalarField& w = sol.w;
    double prev_update = std::numeric_limits<double>::infinity();
    int grow_streak = 0;
    for (int it = 1; it <= opts.max_iter; ++it) {
        // rhs = q (1 + w), solved on the shifted lattice
        ScalarField r(d, FieldKind::Remainder, true);
        for (size_t i = 0; i < N; ++i)
            r.values[i] = q_ext.values[i] * (1.0 + w.values[i]);
        apply_phase(r, shift, -1.0);
        fft3(r.values, n, n, nz, -1);
        for (size_t i = 0; i < N; ++i) r.values[i] /= denom[i];
        fft3(r.values, n, n, nz, +1);
        for (auto& v : r.values) v /= double(N);
        apply_phase(r, shift, +1.0);

        double diff = 0.0, nrm = 0.0;
        for (size_t i = 0; i < N; ++i) {
            diff += std::norm(r.values[i] - w.values[i]);
            nrm += std::norm(r.values[i]);
        }
        double update = std::sqrt(diff) / std::max(std::sqrt(nrm), 1e-300);
        w.values.swap(r.values);
        sol.iterations = it;
        if (update <= opts.tol) break;
        grow_streak = update > prev_update ? grow_streak + 1 : 0;
        prev_update = update;
        if (grow_streak >= 8 || !std::isfinite(update))
            throw NoConvergence(
                "solve_remainder: Picard iteration diverges, |Im zeta| too "
                "small for this potential");
        if (it == opts.max_iter)
            throw NoConvergence("solve_remainder: max_iter exceeded");
    }

    // spectral residual of Delta w + 2 i zeta . grad w + q (1 + w)
    {
        ScalarField rhs(d, FieldKind::Remainder, true);
        for (size_t i = 0; i < N; ++i)
            rhs.values[i] = q_ext.values[i] * (1.0 + w.values[i]);
        ScalarField aw = w;
        apply_phase(aw, shift, -1.0);
        fft3(aw.values, n, n, nz, -1);
        for (size_t i = 0; i < N; ++i) aw.values[i] *= -denom[i];
        fft3(aw.values, n, n, nz, +1);
        for (auto& v : aw.values) v /= double(N);
        apply_phase(aw, shift, +1.0);
        double res = 0.0, scale = 0.0;
        for (size_t i = 0; i < N; ++i) {
            res += std::norm(aw.values[i] + rhs.values[i]);
            scale += std::norm(rhs.values[i]);
        }
        sol.residual_norm = std::sqrt(res) / std::max(std::sqrt(scale), 1e-300);
    }
    sol.hs_norm = sobolev_norm(w, opts.s_order);
    return sol;
}

ScalarField mirror_z(const ScalarField& f) {
    if (!f.doubled) throw Error("mirror_z: field must be doubled");
    ScalarField out(f.domain, f.kind, true);
    int n = f.domain.n, nz = 2 * n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < nz; ++k)
                out.at(i, j, k) = f.at(i, j, nz - 1 - k);
    return out;
}

ReflectedPair assemble_pair(const ZetaFrame& frame, const CGOSolution& w1,
                            const CGOSolution& w1s, const CGOSolution& w2,
                            const CGOSolution& w2s, double trace_tol) {
    const DomainSpec& d = w1.w.domain;
    double sigma = frame.im_norm();
    double reach = std::sqrt(2.0 * d.L * d.L + d.H * d.H);
    if (sigma * reach > 700.0)
        throw Error("assemble_pair: exponential factor overflows, frame "
                    "rejected");

    ReflectedPair pair;
    pair.frame = frame;
    pair.w1 = w1.w;
    pair.w1s = w1s.w;
    pair.w2 = w2.w;
    pair.w2s = w2s.w;

    auto build_u = [&](const CVec3& za, const ScalarField& wa,
                       const CVec3& zb, const ScalarField& wb) {
        ScalarField u(d, FieldKind::Solution, false);
        int n = d.n;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    Vec3 x = u.point(i, j, k);
                    cplx ea = std::exp(cplx(0.0, 1.0) * cdot_x(za, x));
                    cplx eb = std::exp(cplx(0.0, 1.0) * cdot_x(zb, x));
                    u.at(i, j, k) = ea * (1.0 + wa.at(i, j, k)) -
                                    eb * (1.0 + wb.at(i, j, k));
                }
        return u;
    };
    pair.u1 = build_u(frame.zeta1, w1.w, frame.zeta1s, w1s.w);
    pair.u2 = build_u(frame.zeta2, w2.w, frame.zeta2s, w2s.w);

    // trace on x3 = 0: the exponentials of zeta and zeta* coincide there,
    // so the trace reduces to e^{i zeta . (x',0)} (w - w*) on the plane
    auto trace_max = [&](const CVec3& za, const ScalarField& wa,
                         const ScalarField& wb) {
        std::vector<cplx> pa = eval_plane_z(wa, 0.0);
        std::vector<cplx> pb = eval_plane_z(wb, 0.0);
        double mx = 0.0;
        int n = d.n;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Vec3 x{d.x1(i), d.x2(j), 0.0};
                cplx e = std::exp(cplx(0.0, 1.0) * cdot_x(za, x));
                mx = std::max(mx, std::abs(e * (pa[static_cast<size_t>(i) *
                                                       n +
                                                   j] -
                                                pb[static_cast<size_t>(i) *
                                                       n +
                                                   j])));
            }
        return mx;
    };
    double t1 = trace_max(frame.zeta1, w1.w, w1s.w);
    double t2 = trace_max(frame.zeta2, w2.w, w2s.w);
    double scale = std::max(pair.u1.max_abs(), pair.u2.max_abs());
    pair.trace_max_rel = std::max(t1, t2) / std::max(scale, 1e-300);
    if (pair.trace_max_rel > trace_tol)
        throw TraceNotVanishing(
            "assemble_pair: u does not vanish on x3 = 0; remainders are not "
            "mirror-consistent");
    return pair;
}

double pde_residual(const ScalarField& u, const ScalarField& q, double k) {
    const DomainSpec& d = u.domain;
    if (u.doubled || q.doubled)
        throw Error("pde_residual: expects original-box fields");
    int n = d.n;
    double hx = d.hx(), hy = d.hy(), hz = d.hz();
    double res = 0.0, scale = 0.0;
    for (int i = 1; i < n - 1; ++i)
        for (int j = 1; j < n - 1; ++j)
            for (int l = 1; l < n - 1; ++l) {
                cplx lap =
                    (u.at(i + 1, j, l) - 2.0 * u.at(i, j, l) +
                     u.at(i - 1, j, l)) /
                        (hx * hx) +
                    (u.at(i, j + 1, l) - 2.0 * u.at(i, j, l) +
                     u.at(i, j - 1, l)) /
                        (hy * hy) +
                    (u.at(i, j, l + 1) - 2.0 * u.at(i, j, l) +
                     u.at(i, j, l - 1)) /
                        (hz * hz);
                cplx r = lap + (k * k + q.at(i, j, l)) * u.at(i, j, l);
                res += std::norm(r);
                scale += std::norm(u.at(i, j, l));
            }
    if (scale == 0.0) return 0.0;
    return std::sqrt(res / scale);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    size_t m = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < m; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LineFit f;
    double det = m * sxx - sx * sx;
    f.slope = (m * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / m;
    if (m > 2) {
        double ss = 0.0;
        for (size_t i = 0; i < m; ++i) {
            double e = y[i] - f.slope * x[i] - f.intercept;
            ss += e * e;
        }
        f.slope_stderr = std::sqrt(ss / (m - 2) / (sxx - sx * sx / m));
    }
    return f;
}

DecayStudy decay_study(const SampledPotential& q,
                       const std::vector<ZetaFrame>& path, int which_zeta,
                       const SolverOptions& opts) {
    if (path.size() < 5)
        throw Error("decay_study: need at least 5 frames");
    DecayStudy st;
    ScalarField q_ext = extend_even(q.field);
    for (const auto& fr : path) {
        CGOSolution sol =
            solve_remainder(q_ext, fr.vec(which_zeta), fr.k, opts);
        st.im_norms.push_back(fr.im_norm());
        st.w_norms.push_back(sol.hs_norm);
    }
    if (q.hs_norm == 0.0) {
        st.trivial = true;
        return st;
    }
    std::vector<double> lx, ly;
    for (size_t i = 0; i < st.im_norms.size(); ++i) {
        lx.push_back(std::log(st.im_norms[i]));
        ly.push_back(std::log(std::max(st.w_norms[i], 1e-300)));
        st.C_cal = std::max(st.C_cal,
                            st.w_norms[i] * st.im_norms[i] / q.hs_norm);
    }
    LineFit f = fit_line(lx, ly);
    st.slope = f.slope;
    st.intercept = f.intercept;
    st.slope_stderr = f.slope_stderr;
    return st;
}

} // namespace incstab
