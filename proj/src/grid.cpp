#include "incstab/grid.hpp"

#include <cmath>

#include "incstab/fft.hpp"

namespace incstab {

SampledPotential sample_potential(const PotentialDescriptor& desc,
                                  const DomainSpec& spec) {
    desc.validate();
    spec.validate();
    ScalarField q(spec, FieldKind::Potential, false);
    for (int i = 0; i < spec.n; ++i)
        for (int j = 0; j < spec.n; ++j)
            for (int k = 0; k < spec.n; ++k)
                q.at(i, j, k) = desc.eval(q.point(i, j, k));

    double hs = sobolev_norm(q, desc.sobolev_order);
    if (hs > desc.sobolev_bound)
        throw SobolevBoundViolated("sample_potential: ||q||_{H^s} = " +
                                   std::to_string(hs) + " exceeds N = " +
                                   std::to_string(desc.sobolev_bound));
    return {std::move(q), hs};
}

ScalarField extend_even(const ScalarField& q) {
    if (q.doubled) return q;
    ScalarField out(q.domain, q.kind, true);
    int n = q.domain.n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                cplx v = q.at(i, j, k);
                out.at(i, j, k) = v;
                out.at(i, j, 2 * n - 1 - k) = v;
            }
    return out;
}

ScalarField restrict_to_box(const ScalarField& f) {
    if (!f.doubled) return f;
    ScalarField out(f.domain, f.kind, false);
    int n = f.domain.n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) out.at(i, j, k) = f.at(i, j, k);
    return out;
}

double sobolev_norm(const ScalarField& f, double t) {
    const ScalarField& g = f.doubled ? f : extend_even(f);
    std::vector<cplx> coeffs = dft_coeffs(g);
    const DomainSpec& d = g.domain;
    int nz = g.nz();
    double vol = d.cell_volume() * coeffs.size();
    double acc = 0.0;
    for (int m1 = 0; m1 < d.n; ++m1)
        for (int m2 = 0; m2 < d.n; ++m2)
            for (int m3 = 0; m3 < nz; ++m3) {
                Vec3 xi = lattice_xi(d, true, m1, m2, m3);
                double w = std::pow(1.0 + dot(xi, xi), t);
                acc += w * std::norm(
                               coeffs[(static_cast<size_t>(m1) * d.n + m2) *
                                          nz +
                                      m3]);
            }
    return std::sqrt(acc / vol);
}

InterpolationReport interpolation_check(const ScalarField& f, double t0,
                                        double t, double t1, double p) {
    if (!(t0 < t1) || p <= 0.0 || p >= 1.0 ||
        std::abs(t - ((1.0 - p) * t0 + p * t1)) > 1e-12)
        throw BadExponents("interpolation_check: t != (1-p) t0 + p t1");
    InterpolationReport rep;
    rep.lhs = sobolev_norm(f, t);
    rep.rhs = std::pow(sobolev_norm(f, t0), 1.0 - p) *
              std::pow(sobolev_norm(f, t1), p);
    rep.holds = rep.lhs <= rep.rhs * (1.0 + 1e-10);
    return rep;
}

} // namespace incstab
