#pragma once

#include <vector>

#include "incstab/grid.hpp"

namespace incstab {

/// Translation L^1 modulus of the zero-extended field: samples of
/// (|y|, ||f(.-y) - f||_{L^1}) with the fitted power law C0 |y|^exponent.
struct ModulusReport {
    std::vector<double> shift_mags;
    std::vector<double> moduli;
    double C0 = 0.0;
    double exponent = 0.0;
    double delta_tilde = 0.0;
};

/// Off-grid shifts use trilinear interpolation; the field is extended by
/// zero outside its box. Shifts must stay below delta_tilde (default one
/// quarter of the half-width).
ModulusReport translation_modulus(const ScalarField& f,
                                  const std::vector<Vec3>& shifts,
                                  double delta_tilde = 0.0);

/// Gaussian-mollified Fourier decay certificate: the minimal C with
/// |Ff(xi)| <= C (e^{-eps^2 |xi|^2 / 4 pi} + eps^alpha) over the grid.
struct DecayCheckReport {
    double C_min = 0.0;
    double satisfied_fraction = 0.0;  // at C = C_min
    bool degenerate = false;          // f identically zero
    std::vector<double> eps_used;
    std::vector<double> xi_mags;
};

DecayCheckReport fourier_decay_check(const ScalarField& f,
                                     const std::vector<double>& eps_grid,
                                     const std::vector<Vec3>& xi_samples,
                                     double alpha);

/// Transform of the zero-extended field at an arbitrary frequency, by
/// direct quadrature (trapezoid over cell centers).
cplx transform_at(const ScalarField& f, const Vec3& xi);

} // namespace incstab
