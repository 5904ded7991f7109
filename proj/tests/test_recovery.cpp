#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "incstab/fft.hpp"
#include "incstab/recovery.hpp"

using namespace incstab;

namespace {

DomainSpec spec_n(int n) {
    DomainSpec d;
    d.L = M_PI;
    d.H = M_PI;
    d.R = 5.5;
    d.n = n;
    return d;
}

// band-limited even potential: a cos(x1) cos(x2) cos(x3)
SampledPotential trig_potential(const DomainSpec& d, double amp) {
    PotentialDescriptor desc;
    desc.sobolev_bound = 1e9;
    desc.modes.push_back({amp, {1.0, 1.0, 1.0}, 0.0, 0.0});
    return sample_potential(desc, d);
}

ZetaFrame frame_at(const Vec3& xi, double k, double sigma) {
    double tau =
        std::sqrt((sigma * sigma + k * k) / dot(xi, xi) - 0.25);
    return build_frame(xi, k, tau);
}

ReflectedPair solved_pair(const ScalarField& q1_ext,
                          const ScalarField& q2_ext, const ZetaFrame& fr) {
    CGOSolution w1 = solve_remainder(q1_ext, fr.zeta1, fr.k);
    CGOSolution w1s = solve_remainder(q1_ext, fr.zeta1s, fr.k);
    CGOSolution w2 = solve_remainder(q2_ext, fr.zeta2, fr.k);
    CGOSolution w2s = solve_remainder(q2_ext, fr.zeta2s, fr.k);
    return assemble_pair(fr, w1, w1s, w2, w2s, 1e-8);
}

cplx direct_dft_at(const ScalarField& q_ext, const Vec3& xi) {
    const DomainSpec& d = q_ext.domain;
    auto coeffs = dft_coeffs(q_ext);
    int m1 = ((int(std::lround(xi[0] * d.L / M_PI)) % d.n) + d.n) % d.n;
    int m2 = ((int(std::lround(xi[1] * d.L / M_PI)) % d.n) + d.n) % d.n;
    int nz = 2 * d.n;
    int m3 = ((int(std::lround(xi[2] * d.H / M_PI)) % nz) + nz) % nz;
    return coeffs[(static_cast<size_t>(m1) * d.n + m2) * nz + m3];
}

} // namespace

TEST_CASE("green identity lhs") {
    DomainSpec d = spec_n(16);
    ScalarField zero_ext(d, FieldKind::Potential, true);
    ZetaFrame fr = frame_at({1, 0, 1}, 1.0, 2.0);
    ReflectedPair pair = solved_pair(zero_ext, zero_ext, fr);
    ScalarField q0(d, FieldKind::Potential, false);
    CHECK(std::abs(green_identity_lhs(q0, pair)) == 0.0);
}

TEST_CASE("decomposition with zero remainders recovers the direct DFT") {
    DomainSpec d = spec_n(16);
    ScalarField zero_ext(d, FieldKind::Potential, true);
    SampledPotential q0 = trig_potential(d, 0.1);
    ScalarField q0_ext = extend_even(q0.field);

    for (Vec3 xi : {Vec3{1, 0, 1}, Vec3{1, 1, 0}}) {
        ZetaFrame fr = frame_at(xi, 1.0, 2.0);
        ReflectedPair pair = solved_pair(zero_ext, zero_ext, fr);
        RecoveryParams prm;
        ModeEstimate est = decomposition(q0.field, pair, prm);
        cplx oracle = direct_dft_at(q0_ext, xi);
        CHECK(std::abs(est.fq0_hat - oracle) <
              1e-9 * std::max(1.0, std::abs(oracle)));
        CHECK(est.budget.coupling < 1e-12);
    }
    // the (1,1,1) corner of the cosine product carries V_d/8 of the mass
    ZetaFrame fr = frame_at({1, 1, 1}, 1.0, 2.0);
    ReflectedPair pair = solved_pair(zero_ext, zero_ext, fr);
    ModeEstimate est = decomposition(q0.field, pair, RecoveryParams{});
    double vd = 4.0 * d.L * d.L * 2.0 * d.H;
    CHECK(std::abs(est.fq0_hat) ==
          doctest::Approx(0.1 * vd / 8.0).epsilon(1e-9));
}

TEST_CASE("decomposition closure is an algebraic identity") {
    DomainSpec d = spec_n(16);
    PotentialDescriptor d1;
    d1.sobolev_bound = 1e9;
    d1.gaussians.push_back({0.15, {0.3, -0.4, -1.8}, 0.8});
    ScalarField q1_ext = extend_even(sample_potential(d1, d).field);
    SampledPotential q0 = trig_potential(d, 0.08);
    PotentialDescriptor d2 = d1;
    d2.modes.push_back({0.08, {1.0, 1.0, 1.0}, 0.0, 0.0});
    ScalarField q2_ext = extend_even(sample_potential(d2, d).field);

    ZetaFrame fr = frame_at({1, 0, 1}, 1.0, 3.0);
    ReflectedPair pair = solved_pair(q1_ext, q2_ext, fr);
    RecoveryParams prm;
    ModeEstimate est = decomposition(q0.field, pair, prm);

    cplx lhs = green_identity_lhs(q0.field, pair);
    // fq0_hat = lhs - coupling + reflected collapses to the principal term
    cplx principal = direct_dft_at(extend_even(q0.field), fr.xi);
    CHECK(std::abs(est.fq0_hat - principal) <
          1e-10 * std::max(1.0, std::abs(lhs)));
    CHECK(est.budget.coupling > 0.0);
}

TEST_CASE("coupling term decays with sigma") {
    DomainSpec d = spec_n(16);
    PotentialDescriptor dq;
    dq.sobolev_bound = 1e9;
    dq.gaussians.push_back({0.3, {0.0, 0.0, -1.6}, 0.9});
    ScalarField q_ext = extend_even(sample_potential(dq, d).field);
    SampledPotential q0 = trig_potential(d, 0.1);

    double prev = std::numeric_limits<double>::infinity();
    for (double sigma : {3.0, 9.0, 27.0}) {
        ZetaFrame fr = frame_at({1, 0, 1}, 1.0, sigma);
        ReflectedPair pair = solved_pair(q_ext, q_ext, fr);
        ModeEstimate est = decomposition(q0.field, pair, RecoveryParams{});
        CHECK(est.budget.coupling < prev);
        prev = est.budget.coupling;
    }
}

TEST_CASE("cgo trace of the zero-potential pair is the plane-wave pair") {
    DomainSpec d = spec_n(16);
    ScalarField zero_ext(d, FieldKind::Potential, true);
    ZetaFrame fr = frame_at({1, 0, 1}, 1.0, 2.0);
    ReflectedPair pair = solved_pair(zero_ext, zero_ext, fr);
    BoundaryField f1 = cgo_trace(pair, 1);
    const cplx I(0.0, 1.0);
    double worst = 0.0;
    for (int face = 0; face < kNumFaces; ++face)
        for (int a = 0; a < d.n; ++a)
            for (int b = 0; b < d.n; ++b) {
                Vec3 x = f1.point(Face(face), a, b);
                cplx exact = std::exp(I * cdot_x(fr.zeta1, x)) -
                             std::exp(I * cdot_x(fr.zeta1s, x));
                worst = std::max(worst,
                                 std::abs(f1.at(Face(face), a, b) - exact));
            }
    CHECK(worst < 1e-10 * f1.max_abs());
}

TEST_CASE("mode from data") {
    DomainSpec d = spec_n(16);
    double k = 1.0;
    ScalarField q1(d, FieldKind::Potential, false);  // zero
    PotentialDescriptor horiz;
    horiz.sobolev_bound = 1e9;
    horiz.modes.push_back({0.05, {1.0, 1.0, 0.0}, 0.0, 0.0});
    SampledPotential q0 = sample_potential(horiz, d);
    ScalarField q2 = q0.field;  // q2 = q1 + q0
    ScalarField q1_ext = extend_even(q1);
    ScalarField q2_ext = extend_even(q2);

    // frequency carrying actual q0 mass, small sigma to keep the boundary
    // terms from dwarfing the volume functional
    ZetaFrame fr = frame_at({1, 1, 0}, k, 0.5);
    ReflectedPair pair = solved_pair(q1_ext, q2_ext, fr);

    auto dict = dirichlet_dictionary(d, 6);
    dict.push_back(cgo_trace(pair, 1));
    dict.push_back(cgo_trace(pair, 2));
    CauchyDataSet A = synthesize_cauchy(q1, k, dict);
    CauchyDataSet B = synthesize_cauchy(q2, k, dict);

    SUBCASE("cross-route agreement with the volume functional") {
        RecoveryParams prm;
        ModeEstimate est = mode_from_data(A, B, pair, prm);
        cplx lhs = green_identity_lhs(q0.field, pair);
        // n = 16 here; the O(h^2) solver error dominates this gap
        CHECK(std::abs(est.fq0_hat - lhs) < 0.20 * std::abs(lhs));
    }

    SUBCASE("identical potentials give a near-zero mode") {
        RecoveryParams prm;
        ModeEstimate est = mode_from_data(A, A, pair, prm);
        cplx lhs = green_identity_lhs(q0.field, pair);
        // residual is the discrete DtN asymmetry defect on the large CGO
        // traces, O(h^2) but with an n = 16 constant near 7% of the mode
        CHECK(std::abs(est.fq0_hat) < 0.10 * std::abs(lhs));
    }

    SUBCASE("missing trace in the dictionary is reported") {
        auto poor = dirichlet_dictionary(d, 6);
        CauchyDataSet Ap = synthesize_cauchy(q1, k, poor);
        CauchyDataSet Bp = synthesize_cauchy(q2, k, poor);
        RecoveryParams prm;
        CHECK_THROWS_AS(mode_from_data(Ap, Bp, pair, prm), SpanDeficient);
    }
}

TEST_CASE("lowpass inversion") {
    DomainSpec d = spec_n(16);
    SampledPotential q0 = trig_potential(d, 0.1);
    ScalarField q0_ext = extend_even(q0.field);

    SUBCASE("zero modes invert to the zero field") {
        std::vector<ModeEstimate> none;
        ScalarField z = invert_lowpass(none, d);
        CHECK(z.max_abs() == 0.0);
    }

    SUBCASE("exact modes reproduce a band-limited potential") {
        std::vector<ModeEstimate> modes;
        for (double s1 : {-1.0, 1.0})
            for (double s2 : {-1.0, 1.0})
                for (double s3 : {-1.0, 1.0}) {
                    ModeEstimate m;
                    m.xi = {s1, s2, s3};
                    m.fq0_hat = direct_dft_at(q0_ext, m.xi);
                    modes.push_back(m);
                }
        ScalarField rec = invert_lowpass(modes, d);
        double worst = 0.0;
        for (size_t i = 0; i < rec.values.size(); ++i)
            worst = std::max(worst,
                             std::abs(rec.values[i] - q0.field.values[i]));
        CHECK(worst < 1e-10);
    }

    SUBCASE("broken conjugate symmetry is rejected") {
        std::vector<ModeEstimate> modes(2);
        modes[0].xi = {1, 0, 0};
        modes[0].fq0_hat = cplx(1.0, 0.5);
        modes[1].xi = {-1, 0, 0};
        modes[1].fq0_hat = cplx(0.2, 0.5);  // not the conjugate
        CHECK_THROWS_AS(invert_lowpass(modes, d, 1e-6), NonHermitian);
    }
}

TEST_CASE("H^{-1} estimate") {
    DomainSpec d = spec_n(16);

    SUBCASE("zero modes leave only the tail") {
        std::vector<ModeEstimate> none;
        CHECK(hminus1_estimate(none, 2.0, 0.36, d) ==
              doctest::Approx(0.09).epsilon(1e-12));
        CHECK(hminus1_estimate(none, 4.0, 0.36, d) ==
              doctest::Approx(0.0225).epsilon(1e-12));
    }

    SUBCASE("exact modes match the direct truncated sum") {
        SampledPotential q0 = trig_potential(d, 0.1);
        ScalarField q0_ext = extend_even(q0.field);
        std::vector<ModeEstimate> modes;
        for (double s1 : {-1.0, 1.0})
            for (double s2 : {-1.0, 1.0})
                for (double s3 : {-1.0, 1.0}) {
                    ModeEstimate m;
                    m.xi = {s1, s2, s3};
                    m.fq0_hat = direct_dft_at(q0_ext, m.xi);
                    modes.push_back(m);
                }
        double est = hminus1_estimate(modes, 3.0, 0.0, d);
        double direct = std::pow(sobolev_norm(q0_ext, -1.0), 2);
        CHECK(est == doctest::Approx(direct).epsilon(1e-10));
    }
}

TEST_CASE("L^infty lift and the headline bound") {
    CHECK(linf_estimate(0.0, 3.5) == 0.0);
    double e1 = linf_estimate(1.0, 3.5, 2.0);
    double e2 = linf_estimate(2.0, 3.5, 2.0);
    CHECK(e2 / e1 == doctest::Approx(std::pow(2.0, 1.0 / 4.5)).epsilon(1e-12));

    ParamSchedule sch = schedule(1e-6, 2.0, 5.5, 2.0, 0.12, 0.9, 0.45);
    REQUIRE(sch.feasible);
    double s = 3.5, eta = 1.0;
    double manual = std::pow(std::exp(6.0 * sch.R * 2.0) * 1e-6 +
                                 std::pow(sch.lift(), -sch.alpha_tilde()),
                             eta / (2.0 * (1.0 + s)));
    CHECK(rhs_bound(2.0, 1e-6, sch, s) == doctest::Approx(manual));

    SUBCASE("alpha tilde arithmetic") {
        ParamSchedule s2 = schedule(1e-6, 2.0, 5.5, 2.0, 0.12, 0.4, 0.2);
        CHECK(s2.alpha_tilde() ==
              doctest::Approx(2.0 * 0.2 / 3.0).epsilon(1e-12));
    }

    SUBCASE("infeasible schedule falls back to the class bound") {
        ParamSchedule bad = schedule(0.9, 2.0, 5.5, 2.0, 5.0, 0.9, 0.45);
        CHECK_FALSE(bad.feasible);
        CHECK(rhs_bound(2.0, 0.9, bad, 3.5, 1.0, 7.5) == 7.5);
    }
}

TEST_CASE("Z_rho lattice enumeration") {
    DomainSpec d = spec_n(16);
    auto pts = zrho_lattice(d, 1.5);
    // |xi'| < 1.5 admits 9 horizontal points, |xi3| < 1.5 admits 3,
    // minus the origin
    CHECK(pts.size() == 26);
    for (const auto& xi : pts) {
        CHECK(std::hypot(xi[0], xi[1]) < 1.5);
        CHECK(std::abs(xi[2]) < 1.5);
    }
}
