#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "incstab/errors.hpp"

namespace incstab {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm2(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Computational box (-L,L)^2 x (-H,0) with flat top face at x3=0.
/// The top face is the inaccessible boundary part; the other five faces
/// form the accessible part. Grids are cell-centered with n cells per
/// axis on the original box; x3 is doubled to (-H,H) by even extension.
struct DomainSpec {
    double L = M_PI;    // half-width in x1, x2
    double H = M_PI;    // depth in x3
    double R = 5.5;     // enclosing ball radius, box must fit in B(0,R)
    int n = 32;         // cells per axis

    void validate() const {
        if (std::sqrt(2.0 * L * L + H * H) > R)
            throw Error("DomainSpec: box does not fit in B(0,R)");
        if (n < 8 || n % 2 != 0)
            throw Error("DomainSpec: n must be even and >= 8");
        if (L <= 0 || H <= 0) throw Error("DomainSpec: degenerate box");
    }

    double hx() const { return 2.0 * L / n; }
    double hy() const { return 2.0 * L / n; }
    double hz() const { return H / n; }
    double cell_volume() const { return hx() * hy() * hz(); }
    double volume() const { return 4.0 * L * L * H; }

    // cell-center coordinates on the original box
    double x1(int i) const { return -L + (i + 0.5) * hx(); }
    double x2(int i) const { return -L + (i + 0.5) * hy(); }
    double x3(int i) const { return -H + (i + 0.5) * hz(); }
    // on the doubled box, i in [0, 2n)
    double x3d(int i) const { return -H + (i + 0.5) * hz(); }
};

enum class FieldKind { Potential, Solution, Remainder };

/// Complex grid field, row-major over (x1, x2, x3), x3 fastest.
/// `doubled` marks fields living on the even-extended box x3 in (-H,H).
struct ScalarField {
    DomainSpec domain;
    FieldKind kind = FieldKind::Potential;
    bool doubled = false;
    std::vector<cplx> values;

    ScalarField() = default;
    ScalarField(const DomainSpec& d, FieldKind k, bool dbl = false)
        : domain(d), kind(k), doubled(dbl),
          values(static_cast<size_t>(d.n) * d.n * nz(), cplx(0.0)) {}

    int nz() const { return doubled ? 2 * domain.n : domain.n; }
    size_t size() const { return values.size(); }

    size_t idx(int i, int j, int k) const {
        return (static_cast<size_t>(i) * domain.n + j) * nz() + k;
    }
    cplx& at(int i, int j, int k) { return values[idx(i, j, k)]; }
    const cplx& at(int i, int j, int k) const { return values[idx(i, j, k)]; }

    Vec3 point(int i, int j, int k) const {
        return {domain.x1(i), domain.x2(j),
                doubled ? domain.x3d(k) : domain.x3(k)};
    }

    double l2_grid() const {
        double s = 0.0;
        for (const auto& v : values) s += std::norm(v);
        return std::sqrt(s * domain.cell_volume());
    }
    double max_abs() const {
        double m = 0.0;
        for (const auto& v : values) m = std::max(m, std::abs(v));
        return m;
    }
};

/// Closed-form potential recipe: finite sum of Gaussian and cosine-mode
/// bumps, with the Sobolev class (s, N) it claims membership in.
struct PotentialDescriptor {
    struct Gaussian {
        double amp = 0.0;
        Vec3 center{0, 0, 0};
        double width = 1.0;
    };
    struct CosMode {
        double amp = 0.0;
        Vec3 freq{0, 0, 0};   // cos(f1 x1 + p1) cos(f2 x2 + p2) cos(f3 x3)
        double phase1 = 0.0;
        double phase2 = 0.0;
    };

    std::vector<Gaussian> gaussians;
    std::vector<CosMode> modes;
    double sobolev_order = 3.5;   // s > 3/2
    double sobolev_bound = 0.12;  // N

    double holder_exponent() const {
        return std::min(0.9, sobolev_order - 1.5);
    }

    void validate() const {
        if (sobolev_order <= 1.5)
            throw Error("PotentialDescriptor: need s > 3/2");
        double a = holder_exponent();
        if (a <= 0.0 || a >= 1.0)
            throw Error("PotentialDescriptor: holder exponent out of (0,1)");
    }

    double eval(const Vec3& x) const {
        double v = 0.0;
        for (const auto& g : gaussians) {
            double r2 = 0.0;
            for (int d = 0; d < 3; ++d) {
                double t = (x[d] - g.center[d]) / g.width;
                r2 += t * t;
            }
            v += g.amp * std::exp(-r2);
        }
        for (const auto& m : modes) {
            v += m.amp * std::cos(m.freq[0] * x[0] + m.phase1) *
                 std::cos(m.freq[1] * x[1] + m.phase2) *
                 std::cos(m.freq[2] * x[2]);
        }
        return v;
    }
};

struct SampledPotential {
    ScalarField field;
    double hs_norm = 0.0;
};

/// Sample a descriptor at cell centers of the original box and verify
/// membership in Q_N for its (s, N) class.
SampledPotential sample_potential(const PotentialDescriptor& desc,
                                  const DomainSpec& spec);

/// Even extension across x3 = 0 onto the doubled box.
ScalarField extend_even(const ScalarField& q);

/// Restriction of a doubled field back to the original box (x3 < 0).
ScalarField restrict_to_box(const ScalarField& f);

/// Discrete H^t norm via the DFT of the (even-extended) field on the
/// doubled periodic box: (sum_m (1+|xi_m|^2)^t |Ff(m)|^2 / V)^{1/2}.
double sobolev_norm(const ScalarField& f, double t);

struct InterpolationReport {
    double lhs = 0.0;      // ||f||_{H^t}
    double rhs = 0.0;      // ||f||^{1-p}_{H^{t0}} ||f||^p_{H^{t1}}
    bool holds = false;
};

InterpolationReport interpolation_check(const ScalarField& f, double t0,
                                        double t, double t1, double p);

} // namespace incstab
