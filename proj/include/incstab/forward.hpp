#pragma once

#include <memory>
#include <vector>

#include "incstab/grid.hpp"

namespace incstab {

/// The five accessible boundary faces Gamma. The top face {x3 = 0} is the
/// inaccessible part Gamma0 and carries the homogeneous condition u = 0.
enum class Face : int { XMin = 0, XMax = 1, YMin = 2, YMax = 3, ZMin = 4 };
constexpr int kNumFaces = 5;

/// Complex field on the five Gamma faces, each sampled on the n x n grid of
/// cell-center cross sections. Face axes:
///   XMin/XMax: (a, b) = (x2 index, x3 index)
///   YMin/YMax: (a, b) = (x1 index, x3 index)
///   ZMin:      (a, b) = (x1 index, x2 index)
struct BoundaryField {
    DomainSpec domain;
    std::array<std::vector<cplx>, kNumFaces> faces;

    BoundaryField() = default;
    explicit BoundaryField(const DomainSpec& d) : domain(d) {
        for (auto& f : faces)
            f.assign(static_cast<size_t>(d.n) * d.n, cplx(0.0));
    }

    cplx& at(Face f, int a, int b) {
        return faces[int(f)][static_cast<size_t>(a) * domain.n + b];
    }
    const cplx& at(Face f, int a, int b) const {
        return faces[int(f)][static_cast<size_t>(a) * domain.n + b];
    }

    /// In-plane coordinates and the 3D point of a face sample.
    Vec3 point(Face f, int a, int b) const;
    /// Side lengths of a face along its (a, b) axes.
    std::array<double, 2> extents(Face f) const;
    /// Quadrature cell area of a face sample.
    double cell_area(Face f) const;

    double max_abs() const;
    BoundaryField& operator+=(const BoundaryField& o);
    BoundaryField& operator*=(cplx c);
};

struct BoundaryNorms {
    double h_half = 0.0;
    double h_minus_half = 0.0;
};

/// Fractional face norms via odd-extended 2D DFT weights (1+|mu|^2)^{+-1/2}
/// summed over the five Gamma faces.
BoundaryNorms boundary_norms(const BoundaryField& f, const BoundaryField& g);
double face_norm(const BoundaryField& f, double t);  // single order t

struct CauchyPair {
    BoundaryField f;   // Dirichlet trace on Gamma
    BoundaryField g;   // outward Neumann trace on Gamma
    double norm_h = 0.0;  // (||f||_{1/2}^2 + ||g||_{-1/2}^2)^{1/2}
};

struct CauchyDataSet {
    double k = 1.0;
    DomainSpec domain;
    std::vector<CauchyPair> pairs;
};

/// Factorized 7-point Helmholtz operator Delta + k^2 + q with Dirichlet
/// data on Gamma and u = 0 on Gamma0, reusable across dictionary solves.
class DirichletSolver {
  public:
    DirichletSolver(const ScalarField& q, double k,
                    double cond_threshold = 1e8);
    ~DirichletSolver();
    DirichletSolver(DirichletSolver&&) noexcept;
    DirichletSolver& operator=(DirichletSolver&&) noexcept;

    ScalarField solve(const BoundaryField& f) const;
    double condition_estimate() const { return cond_; }
    double k() const { return k_; }

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    double cond_ = 0.0;
    double k_ = 1.0;
};

/// One-shot solve; throws NearResonance when the factorization reports
/// conditioning above the threshold.
ScalarField solve_dirichlet(const ScalarField& q, double k,
                            const BoundaryField& f,
                            double cond_threshold = 1e8);

/// Outward normal derivative on the five Gamma faces, extrapolated from the
/// first four interior cell layers (exact through cubics). Requires n >= 4.
BoundaryField neumann_trace(const ScalarField& u, const BoundaryField& f);

BoundaryField dtn_apply(const ScalarField& q, double k,
                        const BoundaryField& f);

/// Boundary pairing int_Gamma (g1 f2 - f1 g2); equals the volume integral
/// int_Omega (q2 - q1) u1 u2 for exact solves.
cplx alessandrini_pairing(const ScalarField& q1, const ScalarField& q2,
                          double k, const BoundaryField& f1,
                          const BoundaryField& f2);

/// Dictionary of Dirichlet inputs: low-order interior face modes (vanishing
/// near face edges) on the Gamma faces.
std::vector<BoundaryField> dirichlet_dictionary(const DomainSpec& d,
                                                int count);

/// Cauchy data set for a potential: solve every dictionary input.
CauchyDataSet synthesize_cauchy(const ScalarField& q, double k,
                                const std::vector<BoundaryField>& dict,
                                double cond_threshold = 1e8);

/// Symmetrized max-min distance over the dictionary spans.
double cauchy_distance(const CauchyDataSet& A, const CauchyDataSet& B);

/// Least-squares combination of the set's Dirichlet inputs matching f in
/// the H^{1/2} face metric.
struct SpanProjection {
    std::vector<cplx> coeffs;     // one per pair in the set
    double rel_residual = 0.0;    // residual norm over ||f||
};
SpanProjection project_dirichlet(const CauchyDataSet& set,
                                 const BoundaryField& f);

/// Band-limited noise of relative combined norm `level` on every pair,
/// deterministic under `seed`.
CauchyDataSet perturb(const CauchyDataSet& set, double level, uint64_t seed);

/// Closed-form discrete Dirichlet eigenvalue of -Delta_h on the box for the
/// cell-centered 7-point scheme, mode indices (j1, j2, j3) >= 1.
double box_eigenvalue(const DomainSpec& d, int j1, int j2, int j3);

/// Dirichlet trace of a grid-exact plane-wave pair e^{i kappa x}-e^{i kappa* x}.
BoundaryField reflected_wave_trace(const DomainSpec& d, const Vec3& kappa);

} // namespace incstab
