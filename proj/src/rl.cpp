#include "incstab/rl.hpp"

#include <algorithm>
#include <cmath>

#include "incstab/cgo.hpp"

namespace incstab {

namespace {

// trilinear sample of the zero-extended field at an arbitrary point
cplx sample_zero_ext(const ScalarField& f, const Vec3& p) {
    const DomainSpec& d = f.domain;
    int nz = f.nz();
    double z_lo = f.doubled ? -d.H : -d.H;  // doubled extends to +H
    double fx = (p[0] + d.L) / d.hx() - 0.5;
    double fy = (p[1] + d.L) / d.hy() - 0.5;
    double fz = (p[2] - z_lo) / d.hz() - 0.5;
    int i0 = int(std::floor(fx)), j0 = int(std::floor(fy)),
        l0 = int(std::floor(fz));
    double tx = fx - i0, ty = fy - j0, tz = fz - l0;
    cplx acc(0.0);
    for (int di = 0; di < 2; ++di)
        for (int dj = 0; dj < 2; ++dj)
            for (int dl = 0; dl < 2; ++dl) {
                int i = i0 + di, j = j0 + dj, l = l0 + dl;
                if (i < 0 || i >= d.n || j < 0 || j >= d.n || l < 0 ||
                    l >= nz)
                    continue;
                double w = (di ? tx : 1.0 - tx) * (dj ? ty : 1.0 - ty) *
                           (dl ? tz : 1.0 - tz);
                acc += w * f.at(i, j, l);
            }
    return acc;
}

} // namespace

ModulusReport translation_modulus(const ScalarField& f,
                                  const std::vector<Vec3>& shifts,
                                  double delta_tilde) {
    const DomainSpec& d = f.domain;
    if (delta_tilde <= 0.0) delta_tilde = d.L / 4.0;
    ModulusReport rep;
    rep.delta_tilde = delta_tilde;

    int nz = f.nz();
    double z_lo = -d.H;
    for (const auto& y : shifts) {
        double ym = norm2(y);
        if (ym >= delta_tilde)
            throw Error("translation_modulus: shift beyond delta_tilde");
        if (ym == 0.0) {
            rep.shift_mags.push_back(0.0);
            rep.moduli.push_back(0.0);
            continue;
        }
        int pad = 2 + int(std::ceil(ym / std::min({d.hx(), d.hy(), d.hz()})));
        double acc = 0.0;
        for (int i = -pad; i < d.n + pad; ++i)
            for (int j = -pad; j < d.n + pad; ++j)
                for (int l = -pad; l < nz + pad; ++l) {
                    Vec3 x{-d.L + (i + 0.5) * d.hx(),
                           -d.L + (j + 0.5) * d.hy(),
                           z_lo + (l + 0.5) * d.hz()};
                    cplx base(0.0);
                    if (i >= 0 && i < d.n && j >= 0 && j < d.n && l >= 0 &&
                        l < nz)
                        base = f.at(i, j, l);
                    Vec3 xs{x[0] - y[0], x[1] - y[1], x[2] - y[2]};
                    acc += std::abs(sample_zero_ext(f, xs) - base);
                }
        rep.shift_mags.push_back(ym);
        rep.moduli.push_back(acc * d.cell_volume());
    }

    std::vector<double> lx, ly;
    for (size_t i = 0; i < rep.moduli.size(); ++i)
        if (rep.shift_mags[i] > 0.0 && rep.moduli[i] > 0.0) {
            lx.push_back(std::log(rep.shift_mags[i]));
            ly.push_back(std::log(rep.moduli[i]));
        }
    if (lx.size() >= 2) {
        LineFit fit = fit_line(lx, ly);
        rep.exponent = fit.slope;
        rep.C0 = std::exp(fit.intercept);
    }
    return rep;
}

cplx transform_at(const ScalarField& f, const Vec3& xi) {
    const DomainSpec& d = f.domain;
    int nz = f.nz();
    cplx acc(0.0);
    for (int i = 0; i < d.n; ++i)
        for (int j = 0; j < d.n; ++j)
            for (int l = 0; l < nz; ++l)
                acc += f.at(i, j, l) *
                       std::exp(cplx(0.0, -dot(xi, f.point(i, j, l))));
    return acc * d.cell_volume();
}

DecayCheckReport fourier_decay_check(const ScalarField& f,
                                     const std::vector<double>& eps_grid,
                                     const std::vector<Vec3>& xi_samples,
                                     double alpha) {
    if (eps_grid.empty() || xi_samples.empty())
        throw Error("fourier_decay_check: empty sample grid");
    for (double e : eps_grid)
        if (e <= 0.0) throw Error("fourier_decay_check: eps must be > 0");

    DecayCheckReport rep;
    if (f.max_abs() == 0.0) {
        rep.degenerate = true;
        rep.satisfied_fraction = 1.0;
        return rep;
    }

    std::vector<double> mags;
    mags.reserve(xi_samples.size());
    for (const auto& xi : xi_samples) {
        mags.push_back(std::abs(transform_at(f, xi)));
        rep.xi_mags.push_back(norm2(xi));
    }
    rep.eps_used = eps_grid;

    double c_min = 0.0;
    for (double eps : eps_grid)
        for (size_t i = 0; i < xi_samples.size(); ++i) {
            double xi2 = dot(xi_samples[i], xi_samples[i]);
            double unit = std::exp(-eps * eps * xi2 / (4.0 * M_PI)) +
                          std::pow(eps, alpha);
            c_min = std::max(c_min, mags[i] / unit);
        }
    rep.C_min = c_min;

    size_t ok = 0, total = eps_grid.size() * xi_samples.size();
    for (double eps : eps_grid)
        for (size_t i = 0; i < xi_samples.size(); ++i) {
            double xi2 = dot(xi_samples[i], xi_samples[i]);
            double unit = std::exp(-eps * eps * xi2 / (4.0 * M_PI)) +
                          std::pow(eps, alpha);
            if (mags[i] <= c_min * unit * (1.0 + 1e-12)) ++ok;
        }
    rep.satisfied_fraction = double(ok) / double(total);
    return rep;
}

} // namespace incstab
