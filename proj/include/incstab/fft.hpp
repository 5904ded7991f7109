#pragma once

#include <vector>

#include "incstab/grid.hpp"

namespace incstab {

/// Unnormalized c2c DFT, row-major dims (n1,n2,n3), x3 fastest.
/// sign = -1 forward, +1 backward. Backward is NOT divided by N.
void fft3(std::vector<cplx>& data, int n1, int n2, int n3, int sign);
void fft2(std::vector<cplx>& data, int n1, int n2, int sign);

/// Signed frequency index in [-N/2, N/2) for DFT bin m.
inline int fold(int m, int N) { return m < N / 2 ? m : m - N; }

/// Frequency vector xi_m on the (possibly doubled) box lattice.
/// Spacing is pi/L in x1,x2 and pi/H in x3 (doubled period 2H).
inline Vec3 lattice_xi(const DomainSpec& d, bool doubled, int m1, int m2,
                       int m3) {
    int nz = doubled ? 2 * d.n : d.n;
    double dz = doubled ? M_PI / d.H : 2.0 * M_PI / d.H;
    return {M_PI / d.L * fold(m1, d.n), M_PI / d.L * fold(m2, d.n),
            dz * fold(m3, nz)};
}

/// Continuum-normalized transform coefficients on the field's grid:
/// Ff(m) = cellvol * sum_j f(x_j) e^{-i xi_m . x_j}, a trapezoid
/// approximation of the transform over the periodic box.
std::vector<cplx> dft_coeffs(const ScalarField& f);

/// Inverse of dft_coeffs: f(x_j) = (1/V) sum_m Ff(m) e^{i xi_m . x_j}.
ScalarField field_from_dft(const DomainSpec& d, bool doubled,
                           const std::vector<cplx>& coeffs, FieldKind kind);

/// Trigonometric evaluation of a doubled-grid field on the plane x3 = z.
/// Returns an n x n grid over the (x1,x2) cell centers.
std::vector<cplx> eval_plane_z(const ScalarField& f, double z);

/// Trigonometric evaluation on the plane x_axis = c for axis 0 or 1.
/// Returns the remaining grid row-major, (x2, x3) for axis 0 and
/// (x1, x3) for axis 1, with the doubled x3 extent.
std::vector<cplx> eval_plane_x(const ScalarField& f, int axis, double c);

} // namespace incstab
