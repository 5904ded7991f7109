#include "incstab/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace incstab {

namespace {
// FFTW planning is not thread-safe; execution on distinct arrays is.
std::mutex plan_mutex;
} // namespace

void fft3(std::vector<cplx>& data, int n1, int n2, int n3, int sign) {
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        plan = fftw_plan_dft_3d(n1, n2, n3, ptr, ptr,
                                sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        fftw_destroy_plan(plan);
    }
}

void fft2(std::vector<cplx>& data, int n1, int n2, int sign) {
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        plan = fftw_plan_dft_2d(n1, n2, ptr, ptr,
                                sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        fftw_destroy_plan(plan);
    }
}

std::vector<cplx> dft_coeffs(const ScalarField& f) {
    const DomainSpec& d = f.domain;
    int nz = f.nz();
    std::vector<cplx> out = f.values;
    fft3(out, d.n, d.n, nz, -1);

    // phase for the cell-center origin, cellvol scale
    const double cv = d.cell_volume();
    const Vec3 x0{d.x1(0), d.x2(0), f.doubled ? d.x3d(0) : d.x3(0)};
    for (int m1 = 0; m1 < d.n; ++m1)
        for (int m2 = 0; m2 < d.n; ++m2)
            for (int m3 = 0; m3 < nz; ++m3) {
                Vec3 xi = lattice_xi(d, f.doubled, m1, m2, m3);
                cplx phase = std::exp(cplx(0.0, -dot(xi, x0)));
                out[(static_cast<size_t>(m1) * d.n + m2) * nz + m3] *=
                    cv * phase;
            }
    return out;
}

ScalarField field_from_dft(const DomainSpec& d, bool doubled,
                           const std::vector<cplx>& coeffs, FieldKind kind) {
    ScalarField f(d, kind, doubled);
    int nz = f.nz();
    const double cv = d.cell_volume();
    const Vec3 x0{d.x1(0), d.x2(0), doubled ? d.x3d(0) : d.x3(0)};
    std::vector<cplx> buf(coeffs.size());
    for (int m1 = 0; m1 < d.n; ++m1)
        for (int m2 = 0; m2 < d.n; ++m2)
            for (int m3 = 0; m3 < nz; ++m3) {
                size_t id = (static_cast<size_t>(m1) * d.n + m2) * nz + m3;
                Vec3 xi = lattice_xi(d, doubled, m1, m2, m3);
                cplx phase = std::exp(cplx(0.0, dot(xi, x0)));
                buf[id] = coeffs[id] * phase / cv;
            }
    fft3(buf, d.n, d.n, nz, +1);
    double N = static_cast<double>(buf.size());
    for (size_t i = 0; i < buf.size(); ++i) f.values[i] = buf[i] / N;
    return f;
}

std::vector<cplx> eval_plane_z(const ScalarField& f, double z) {
    const DomainSpec& d = f.domain;
    if (!f.doubled) throw Error("eval_plane_z: field must be doubled");
    int n = d.n, nz = f.nz();
    std::vector<cplx> spec = f.values;
    fft3(spec, n, n, nz, -1);

    // collapse x3: trig interpolation at height z
    std::vector<cplx> plane(static_cast<size_t>(n) * n, cplx(0.0));
    double z0 = d.x3d(0);
    for (int m1 = 0; m1 < n; ++m1)
        for (int m2 = 0; m2 < n; ++m2) {
            cplx acc(0.0);
            for (int m3 = 0; m3 < nz; ++m3) {
                double xi3 = M_PI / d.H * fold(m3, nz);
                // symmetric Nyquist treatment keeps interpolation exactly
                // commuting with the x3 mirror
                cplx basis = m3 == nz / 2
                                 ? cplx(std::cos(xi3 * (z - z0)), 0.0)
                                 : std::exp(cplx(0.0, xi3 * (z - z0)));
                acc += spec[(static_cast<size_t>(m1) * n + m2) * nz + m3] *
                       basis;
            }
            plane[static_cast<size_t>(m1) * n + m2] = acc / double(nz);
        }
    fft2(plane, n, n, +1);
    for (auto& v : plane) v /= double(n) * n;
    return plane;
}

std::vector<cplx> eval_plane_x(const ScalarField& f, int axis, double c) {
    const DomainSpec& d = f.domain;
    if (!f.doubled) throw Error("eval_plane_x: field must be doubled");
    if (axis != 0 && axis != 1) throw Error("eval_plane_x: axis must be 0/1");
    int n = d.n, nz = f.nz();
    std::vector<cplx> spec = f.values;
    fft3(spec, n, n, nz, -1);

    double x0 = axis == 0 ? d.x1(0) : d.x2(0);
    std::vector<cplx> plane(static_cast<size_t>(n) * nz, cplx(0.0));
    for (int ma = 0; ma < n; ++ma) {
        double xi = M_PI / d.L * fold(ma, n);
        cplx ph = std::exp(cplx(0.0, xi * (c - x0)));
        for (int mo = 0; mo < n; ++mo)
            for (int m3 = 0; m3 < nz; ++m3) {
                size_t src = axis == 0
                                 ? (static_cast<size_t>(ma) * n + mo) * nz + m3
                                 : (static_cast<size_t>(mo) * n + ma) * nz + m3;
                plane[static_cast<size_t>(mo) * nz + m3] += spec[src] * ph;
            }
    }
    for (auto& v : plane) v /= double(n);
    fft2(plane, n, nz, +1);
    for (auto& v : plane) v /= double(n) * nz;
    return plane;
}

} // namespace incstab
