#include "incstab/forward.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <random>

#include "incstab/fft.hpp"

namespace incstab {

Vec3 BoundaryField::point(Face f, int a, int b) const {
    const DomainSpec& d = domain;
    switch (f) {
        case Face::XMin: return {-d.L, d.x2(a), d.x3(b)};
        case Face::XMax: return {d.L, d.x2(a), d.x3(b)};
        case Face::YMin: return {d.x1(a), -d.L, d.x3(b)};
        case Face::YMax: return {d.x1(a), d.L, d.x3(b)};
        default:         return {d.x1(a), d.x2(b), -d.H};
    }
}

std::array<double, 2> BoundaryField::extents(Face f) const {
    if (f == Face::ZMin) return {2.0 * domain.L, 2.0 * domain.L};
    return {2.0 * domain.L, domain.H};
}

double BoundaryField::cell_area(Face f) const {
    auto e = extents(f);
    return (e[0] / domain.n) * (e[1] / domain.n);
}

double BoundaryField::max_abs() const {
    double m = 0.0;
    for (const auto& face : faces)
        for (const auto& v : face) m = std::max(m, std::abs(v));
    return m;
}

BoundaryField& BoundaryField::operator+=(const BoundaryField& o) {
    for (int f = 0; f < kNumFaces; ++f)
        for (size_t i = 0; i < faces[f].size(); ++i)
            faces[f][i] += o.faces[f][i];
    return *this;
}

BoundaryField& BoundaryField::operator*=(cplx c) {
    for (auto& face : faces)
        for (auto& v : face) v *= c;
    return *this;
}

namespace {

// Odd extension of one face to the doubled 2n x 2n periodic tile and its
// weighted DFT coefficients: entry(m) = cell_area * FFT(m), frequencies
// mu with spacing pi/len per axis.
struct FaceSpectrum {
    std::vector<cplx> coef;   // 2n x 2n, row-major
    std::vector<double> mu2;  // |mu|^2 per entry
    double area_doubled = 0.0;
};

FaceSpectrum face_spectrum(const BoundaryField& bf, Face f) {
    int n = bf.domain.n, N = 2 * n;
    auto ext = bf.extents(f);
    FaceSpectrum sp;
    sp.coef.assign(static_cast<size_t>(N) * N, cplx(0.0));
    sp.mu2.assign(static_cast<size_t>(N) * N, 0.0);
    sp.area_doubled = 4.0 * ext[0] * ext[1];

    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            int ia = a < n ? a : 2 * n - 1 - a;
            int ib = b < n ? b : 2 * n - 1 - b;
            double sgn = (a < n ? 1.0 : -1.0) * (b < n ? 1.0 : -1.0);
            sp.coef[static_cast<size_t>(a) * N + b] = sgn * bf.at(f, ia, ib);
        }
    fft2(sp.coef, N, N, -1);
    double ca = bf.cell_area(f);
    double s0 = M_PI / ext[0], s1 = M_PI / ext[1];
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            double m0 = fold(a, N) * s0, m1 = fold(b, N) * s1;
            size_t id = static_cast<size_t>(a) * N + b;
            sp.coef[id] *= ca;
            sp.mu2[id] = m0 * m0 + m1 * m1;
        }
    return sp;
}

} // namespace

double face_norm(const BoundaryField& f, double t) {
    double acc = 0.0;
    for (int face = 0; face < kNumFaces; ++face) {
        FaceSpectrum sp = face_spectrum(f, Face(face));
        double s = 0.0;
        for (size_t i = 0; i < sp.coef.size(); ++i)
            s += std::pow(1.0 + sp.mu2[i], t) * std::norm(sp.coef[i]);
        acc += s / sp.area_doubled;
    }
    return std::sqrt(acc);
}

BoundaryNorms boundary_norms(const BoundaryField& f, const BoundaryField& g) {
    return {face_norm(f, 0.5), face_norm(g, -0.5)};
}

struct DirichletSolver::Impl {
    DomainSpec d;
    Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
};

DirichletSolver::~DirichletSolver() = default;
DirichletSolver::DirichletSolver(DirichletSolver&&) noexcept = default;
DirichletSolver& DirichletSolver::operator=(DirichletSolver&&) noexcept =
    default;

DirichletSolver::DirichletSolver(const ScalarField& q, double k,
                                 double cond_threshold)
    : impl_(std::make_unique<Impl>()), k_(k) {
    if (q.doubled)
        throw Error("DirichletSolver: potential must live on the original "
                    "box");
    const DomainSpec& d = q.domain;
    impl_->d = d;
    int n = d.n;
    double ihx2 = 1.0 / (d.hx() * d.hx());
    double ihy2 = 1.0 / (d.hy() * d.hy());
    double ihz2 = 1.0 / (d.hz() * d.hz());

    int total = n * n * n;
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(static_cast<size_t>(total) * 7);
    auto gid = [&](int i, int j, int l) { return (i * n + j) * n + l; };
    double norm_inf = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
                int row = gid(i, j, l);
                cplx diag = -2.0 * (ihx2 + ihy2 + ihz2) + k * k +
                            q.at(i, j, l);
                double rowsum = 0.0;
                auto nb = [&](int ii, int jj, int ll, double ih2) {
                    if (ii < 0 || ii >= n || jj < 0 || jj >= n || ll < 0 ||
                        ll >= n) {
                        // ghost value 2f - u_cell; the -u_cell part lands on
                        // the diagonal, the data part on the rhs
                        diag -= ih2;
                        return;
                    }
                    trip.emplace_back(row, gid(ii, jj, ll), cplx(ih2));
                    rowsum += ih2;
                };
                nb(i - 1, j, l, ihx2);
                nb(i + 1, j, l, ihx2);
                nb(i, j - 1, l, ihy2);
                nb(i, j + 1, l, ihy2);
                nb(i, j, l - 1, ihz2);
                nb(i, j, l + 1, ihz2);
                trip.emplace_back(row, row, diag);
                norm_inf = std::max(norm_inf, rowsum + std::abs(diag));
            }

    Eigen::SparseMatrix<cplx> A(total, total);
    A.setFromTriplets(trip.begin(), trip.end());
    impl_->lu.compute(A);
    if (impl_->lu.info() != Eigen::Success)
        throw NearResonance("DirichletSolver: factorization failed, k^2 at "
                            "a discrete Dirichlet eigenvalue");

    // lower bound on ||A^{-1}|| from a few deterministic random solves
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double inv_norm = 0.0;
    for (int probe = 0; probe < 3; ++probe) {
        Eigen::VectorXcd b(total);
        for (int i = 0; i < total; ++i) b[i] = cplx(u(rng), u(rng));
        Eigen::VectorXcd x = impl_->lu.solve(b);
        inv_norm = std::max(inv_norm, x.norm() / b.norm());
    }
    cond_ = norm_inf * inv_norm;
    if (cond_ > cond_threshold)
        throw NearResonance("DirichletSolver: condition estimate above "
                            "threshold, k near a resonance");
}

ScalarField DirichletSolver::solve(const BoundaryField& f) const {
    const DomainSpec& d = impl_->d;
    int n = d.n;
    double ihx2 = 1.0 / (d.hx() * d.hx());
    double ihy2 = 1.0 / (d.hy() * d.hy());
    double ihz2 = 1.0 / (d.hz() * d.hz());
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n * n * n);
    auto gid = [&](int i, int j, int l) { return (i * n + j) * n + l; };
    for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) {
            b[gid(0, a, c)] -= 2.0 * ihx2 * f.at(Face::XMin, a, c);
            b[gid(n - 1, a, c)] -= 2.0 * ihx2 * f.at(Face::XMax, a, c);
            b[gid(a, 0, c)] -= 2.0 * ihy2 * f.at(Face::YMin, a, c);
            b[gid(a, n - 1, c)] -= 2.0 * ihy2 * f.at(Face::YMax, a, c);
            b[gid(a, c, 0)] -= 2.0 * ihz2 * f.at(Face::ZMin, a, c);
            // top face (l = n-1 neighbor) is Gamma0 with f = 0
        }
    Eigen::VectorXcd x = impl_->lu.solve(b);
    ScalarField u(d, FieldKind::Solution, false);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) u.at(i, j, l) = x[gid(i, j, l)];
    return u;
}

ScalarField solve_dirichlet(const ScalarField& q, double k,
                            const BoundaryField& f, double cond_threshold) {
    DirichletSolver s(q, k, cond_threshold);
    return s.solve(f);
}

BoundaryField neumann_trace(const ScalarField& u, const BoundaryField& f) {
    const DomainSpec& d = u.domain;
    if (u.doubled) throw Error("neumann_trace: expects an original-box field");
    int n = d.n;
    BoundaryField g(d);
    (void)f;
    // outward derivative extrapolated from the first four interior layers:
    // (71 c1 - 141 c2 + 93 c3 - 23 c4) / 24h, exact through cubics. Using
    // only solved interior values lets the smooth O(h^2) solver error cancel
    // instead of being amplified by 1/h against the exact face value.
    auto deriv = [](cplx c1, cplx c2, cplx c3, cplx c4, double h) {
        return (71.0 * c1 - 141.0 * c2 + 93.0 * c3 - 23.0 * c4) / (24.0 * h);
    };
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            g.at(Face::XMin, a, b) = deriv(u.at(0, a, b), u.at(1, a, b),
                                           u.at(2, a, b), u.at(3, a, b),
                                           d.hx());
            g.at(Face::XMax, a, b) =
                deriv(u.at(n - 1, a, b), u.at(n - 2, a, b),
                      u.at(n - 3, a, b), u.at(n - 4, a, b), d.hx());
            g.at(Face::YMin, a, b) = deriv(u.at(a, 0, b), u.at(a, 1, b),
                                           u.at(a, 2, b), u.at(a, 3, b),
                                           d.hy());
            g.at(Face::YMax, a, b) =
                deriv(u.at(a, n - 1, b), u.at(a, n - 2, b),
                      u.at(a, n - 3, b), u.at(a, n - 4, b), d.hy());
            g.at(Face::ZMin, a, b) = deriv(u.at(a, b, 0), u.at(a, b, 1),
                                           u.at(a, b, 2), u.at(a, b, 3),
                                           d.hz());
        }
    return g;
}

BoundaryField dtn_apply(const ScalarField& q, double k,
                        const BoundaryField& f) {
    return neumann_trace(solve_dirichlet(q, k, f), f);
}

cplx alessandrini_pairing(const ScalarField& q1, const ScalarField& q2,
                          double k, const BoundaryField& f1,
                          const BoundaryField& f2) {
    ScalarField u1 = solve_dirichlet(q1, k, f1);
    ScalarField u2 = solve_dirichlet(q2, k, f2);
    BoundaryField g1 = neumann_trace(u1, f1);
    BoundaryField g2 = neumann_trace(u2, f2);
    cplx acc(0.0);
    int n = q1.domain.n;
    for (int face = 0; face < kNumFaces; ++face) {
        double ca = f1.cell_area(Face(face));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                acc += ca * (g1.at(Face(face), a, b) *
                                 f2.at(Face(face), a, b) -
                             f1.at(Face(face), a, b) *
                                 g2.at(Face(face), a, b));
    }
    return acc;
}

std::vector<BoundaryField> dirichlet_dictionary(const DomainSpec& d,
                                                int count) {
    if (count <= 0) throw Error("dirichlet_dictionary: count must be > 0");
    std::vector<BoundaryField> dict;
    dict.reserve(count);
    // interior sine modes vanish at face edges, keeping the odd-extension
    // norms free of edge jumps
    auto mode = [&](Face f, int p, int qm) {
        BoundaryField bf(d);
        for (int a = 0; a < d.n; ++a)
            for (int b = 0; b < d.n; ++b) {
                double sa = (a + 0.5) / d.n, sb = (b + 0.5) / d.n;
                bf.at(f, a, b) =
                    std::sin(p * M_PI * sa) * std::sin(qm * M_PI * sb);
            }
        return bf;
    };
    static const int pq[][2] = {{1, 1}, {2, 1}, {1, 2}, {2, 2},
                                {3, 1}, {1, 3}, {3, 2}, {2, 3}};
    int made = 0;
    for (int level = 0; made < count; ++level)
        for (int face = 0; face < kNumFaces && made < count; ++face) {
            const int* m = pq[level % 8];
            dict.push_back(mode(Face(face), m[0], m[1]));
            ++made;
        }
    return dict;
}

CauchyDataSet synthesize_cauchy(const ScalarField& q, double k,
                                const std::vector<BoundaryField>& dict,
                                double cond_threshold) {
    DirichletSolver solver(q, k, cond_threshold);
    CauchyDataSet set;
    set.k = k;
    set.domain = q.domain;
    for (const auto& f : dict) {
        CauchyPair p;
        p.f = f;
        ScalarField u = solver.solve(f);
        p.g = neumann_trace(u, f);
        BoundaryNorms nm = boundary_norms(p.f, p.g);
        p.norm_h = std::hypot(nm.h_half, nm.h_minus_half);
        set.pairs.push_back(std::move(p));
    }
    return set;
}

namespace {

// weighted spectral coefficients whose Euclidean norm equals the combined
// H^{1/2} (+) H^{-1/2} pair norm
Eigen::VectorXcd flatten_pair(const CauchyPair& p) {
    std::vector<cplx> out;
    for (int part = 0; part < 2; ++part) {
        const BoundaryField& bf = part == 0 ? p.f : p.g;
        double pw = part == 0 ? 0.25 : -0.25;
        for (int face = 0; face < kNumFaces; ++face) {
            FaceSpectrum sp = face_spectrum(bf, Face(face));
            double scale = 1.0 / std::sqrt(sp.area_doubled);
            for (size_t i = 0; i < sp.coef.size(); ++i)
                out.push_back(sp.coef[i] * scale *
                              std::pow(1.0 + sp.mu2[i], pw));
        }
    }
    Eigen::VectorXcd v(static_cast<Eigen::Index>(out.size()));
    for (size_t i = 0; i < out.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = out[i];
    return v;
}

double one_sided(const std::vector<Eigen::VectorXcd>& from,
                 const std::vector<Eigen::VectorXcd>& onto) {
    Eigen::MatrixXcd M(from[0].size(),
                       static_cast<Eigen::Index>(onto.size()));
    for (size_t j = 0; j < onto.size(); ++j)
        M.col(static_cast<Eigen::Index>(j)) = onto[j];
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(M);
    double worst = 0.0;
    for (const auto& v : from) {
        double nv = v.norm();
        if (nv < 1e-300) continue;
        Eigen::VectorXcd c = qr.solve(v);
        double res = (M * c - v).norm();
        worst = std::max(worst, res / nv);
    }
    return worst;
}

} // namespace

double cauchy_distance(const CauchyDataSet& A, const CauchyDataSet& B) {
    if (A.pairs.empty() || B.pairs.empty())
        throw EmptySet("cauchy_distance: empty data set");
    std::vector<Eigen::VectorXcd> va, vb;
    for (const auto& p : A.pairs) va.push_back(flatten_pair(p));
    for (const auto& p : B.pairs) vb.push_back(flatten_pair(p));
    bool nza = false, nzb = false;
    for (const auto& v : va) nza = nza || v.norm() > 1e-300;
    for (const auto& v : vb) nzb = nzb || v.norm() > 1e-300;
    if (!nza || !nzb)
        throw EmptySet("cauchy_distance: all pairs are zero");
    return std::max(one_sided(va, vb), one_sided(vb, va));
}

namespace {

Eigen::VectorXcd flatten_dirichlet(const BoundaryField& f) {
    std::vector<cplx> out;
    for (int face = 0; face < kNumFaces; ++face) {
        FaceSpectrum sp = face_spectrum(f, Face(face));
        double scale = 1.0 / std::sqrt(sp.area_doubled);
        for (size_t i = 0; i < sp.coef.size(); ++i)
            out.push_back(sp.coef[i] * scale *
                          std::pow(1.0 + sp.mu2[i], 0.25));
    }
    Eigen::VectorXcd v(static_cast<Eigen::Index>(out.size()));
    for (size_t i = 0; i < out.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = out[i];
    return v;
}

} // namespace

SpanProjection project_dirichlet(const CauchyDataSet& set,
                                 const BoundaryField& f) {
    if (set.pairs.empty()) throw EmptySet("project_dirichlet: empty set");
    Eigen::VectorXcd target = flatten_dirichlet(f);
    Eigen::MatrixXcd M(target.size(),
                       static_cast<Eigen::Index>(set.pairs.size()));
    for (size_t j = 0; j < set.pairs.size(); ++j)
        M.col(static_cast<Eigen::Index>(j)) =
            flatten_dirichlet(set.pairs[j].f);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(M);
    Eigen::VectorXcd c = qr.solve(target);
    SpanProjection proj;
    proj.coeffs.resize(set.pairs.size());
    for (size_t j = 0; j < set.pairs.size(); ++j)
        proj.coeffs[j] = c[static_cast<Eigen::Index>(j)];
    double nt = target.norm();
    proj.rel_residual =
        nt > 1e-300 ? (M * c - target).norm() / nt : 0.0;
    return proj;
}

CauchyDataSet perturb(const CauchyDataSet& set, double level, uint64_t seed) {
    if (level < 0.0) throw Error("perturb: level must be >= 0");
    CauchyDataSet out = set;
    if (level == 0.0) return out;
    const DomainSpec& d = set.domain;
    for (size_t pi = 0; pi < out.pairs.size(); ++pi) {
        CauchyPair& p = out.pairs[pi];
        if (p.norm_h <= 0.0) continue;
        std::mt19937_64 rng(seed * 1000003ULL + pi);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        BoundaryField nf(d), ng(d);
        for (int face = 0; face < kNumFaces; ++face)
            for (int pm = 1; pm <= 3; ++pm)
                for (int qm = 1; qm <= 3; ++qm) {
                    cplx cf(u(rng), u(rng)), cg(u(rng), u(rng));
                    for (int a = 0; a < d.n; ++a)
                        for (int b = 0; b < d.n; ++b) {
                            double sa = (a + 0.5) / d.n, sb = (b + 0.5) / d.n;
                            double m = std::sin(pm * M_PI * sa) *
                                       std::sin(qm * M_PI * sb);
                            nf.at(Face(face), a, b) += cf * m;
                            ng.at(Face(face), a, b) += cg * m;
                        }
                }
        BoundaryNorms nn = boundary_norms(nf, ng);
        double nrm = std::hypot(nn.h_half, nn.h_minus_half);
        if (nrm <= 0.0) continue;
        cplx scale(level * p.norm_h / nrm);
        nf *= scale;
        ng *= scale;
        p.f += nf;
        p.g += ng;
        BoundaryNorms after = boundary_norms(p.f, p.g);
        p.norm_h = std::hypot(after.h_half, after.h_minus_half);
    }
    return out;
}

double box_eigenvalue(const DomainSpec& d, int j1, int j2, int j3) {
    auto lam = [](double h, double len, int j) {
        double s = std::sin(j * M_PI * h / (2.0 * len));
        return 4.0 / (h * h) * s * s;
    };
    return lam(d.hx(), 2.0 * d.L, j1) + lam(d.hy(), 2.0 * d.L, j2) +
           lam(d.hz(), d.H, j3);
}

BoundaryField reflected_wave_trace(const DomainSpec& d, const Vec3& kappa) {
    Vec3 ks{kappa[0], kappa[1], -kappa[2]};
    BoundaryField f(d);
    for (int face = 0; face < kNumFaces; ++face)
        for (int a = 0; a < d.n; ++a)
            for (int b = 0; b < d.n; ++b) {
                Vec3 x = f.point(Face(face), a, b);
                f.at(Face(face), a, b) =
                    std::exp(cplx(0.0, dot(kappa, x))) -
                    std::exp(cplx(0.0, dot(ks, x)));
            }
    return f;
}

} // namespace incstab
