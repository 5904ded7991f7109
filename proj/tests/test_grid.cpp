#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "incstab/fft.hpp"
#include "incstab/grid.hpp"

using namespace incstab;

namespace {

DomainSpec small_spec() {
    DomainSpec d;
    d.L = M_PI;
    d.H = M_PI;
    d.R = 5.5;
    d.n = 16;
    return d;
}

ScalarField random_field(const DomainSpec& d, bool doubled, unsigned seed) {
    ScalarField f(d, FieldKind::Solution, doubled);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : f.values) v = cplx(u(rng), u(rng));
    return f;
}

} // namespace

TEST_CASE("domain invariants") {
    DomainSpec d = small_spec();
    CHECK_NOTHROW(d.validate());
    d.R = 1.0;
    CHECK_THROWS_AS(d.validate(), Error);
    d = small_spec();
    d.n = 15;
    CHECK_THROWS_AS(d.validate(), Error);
    d.n = 4;
    CHECK_THROWS_AS(d.validate(), Error);
}

TEST_CASE("zero potential samples to zero with zero norm") {
    PotentialDescriptor desc;
    auto s = sample_potential(desc, small_spec());
    CHECK(s.hs_norm == 0.0);
    CHECK(s.field.max_abs() == 0.0);
}

TEST_CASE("gaussian bump scaled to half the Sobolev budget is accepted") {
    DomainSpec d = small_spec();
    PotentialDescriptor desc;
    desc.sobolev_bound = 1e9;  // measure first
    desc.gaussians.push_back({1.0, {0.3, -0.2, -M_PI / 2}, 0.8});
    double norm1 = sample_potential(desc, d).hs_norm;
    CHECK(norm1 > 0.0);

    PotentialDescriptor scaled = desc;
    scaled.sobolev_bound = 0.5;
    scaled.gaussians[0].amp = 0.25 / norm1;  // target norm N/2
    auto s = sample_potential(scaled, d);
    CHECK(s.hs_norm == doctest::Approx(0.25).epsilon(1e-9));

    scaled.gaussians[0].amp *= 1e6;
    CHECK_THROWS_AS(sample_potential(scaled, d), SobolevBoundViolated);
}

TEST_CASE("even extension") {
    DomainSpec d = small_spec();

    SUBCASE("constant extends to constant") {
        ScalarField q(d, FieldKind::Potential, false);
        for (auto& v : q.values) v = 3.25;
        ScalarField e = extend_even(q);
        for (const auto& v : e.values) CHECK(v == cplx(3.25));
    }

    SUBCASE("mirror-plane samples are equal pairwise") {
        ScalarField q(d, FieldKind::Potential, false);
        for (int i = 0; i < d.n; ++i)
            for (int j = 0; j < d.n; ++j)
                for (int k = 0; k < d.n; ++k) {
                    double z = d.x3(k);
                    q.at(i, j, k) = z * z * std::exp(-z * z);
                }
        ScalarField e = extend_even(q);
        double worst = 0.0;
        for (int i = 0; i < d.n; ++i)
            for (int j = 0; j < d.n; ++j)
                for (int k = 0; k < 2 * d.n; ++k)
                    worst = std::max(
                        worst, std::abs(e.at(i, j, k) -
                                        e.at(i, j, 2 * d.n - 1 - k)));
        CHECK(worst == 0.0);
    }

    SUBCASE("restriction reproduces input; idempotence") {
        ScalarField q = random_field(d, false, 7);
        q.kind = FieldKind::Potential;
        ScalarField e = extend_even(q);
        ScalarField r = restrict_to_box(e);
        for (size_t i = 0; i < q.values.size(); ++i)
            CHECK(r.values[i] == q.values[i]);
        ScalarField e2 = extend_even(r);
        for (size_t i = 0; i < e.values.size(); ++i)
            CHECK(e2.values[i] == e.values[i]);
    }
}

TEST_CASE("sobolev norm basics") {
    DomainSpec d = small_spec();

    SUBCASE("zero field") {
        ScalarField f(d, FieldKind::Solution, true);
        CHECK(sobolev_norm(f, 1.3) == 0.0);
    }

    SUBCASE("pure mode has closed-form weighted norm") {
        ScalarField f(d, FieldKind::Solution, true);
        Vec3 xi = lattice_xi(d, true, 2, 1, 3);
        cplx a(0.7, -0.4);
        for (int i = 0; i < d.n; ++i)
            for (int j = 0; j < d.n; ++j)
                for (int k = 0; k < 2 * d.n; ++k)
                    f.at(i, j, k) =
                        a * std::exp(cplx(0.0, dot(xi, f.point(i, j, k))));
        double V = 4.0 * d.L * d.L * 2.0 * d.H;
        for (double t : {-1.0, 0.0, 2.0}) {
            double expected =
                std::abs(a) * std::pow(1.0 + dot(xi, xi), t / 2) * std::sqrt(V);
            CHECK(sobolev_norm(f, t) ==
                  doctest::Approx(expected).epsilon(1e-10));
        }
    }

    SUBCASE("t = 0 is Parseval for random fields") {
        for (unsigned seed = 0; seed < 100; ++seed) {
            ScalarField f = random_field(d, true, seed);
            CHECK(sobolev_norm(f, 0.0) ==
                  doctest::Approx(f.l2_grid()).epsilon(1e-12));
        }
    }

    SUBCASE("monotone in the order") {
        ScalarField f = random_field(d, true, 11);
        double prev = sobolev_norm(f, -2.0);
        for (double t = -1.5; t <= 4.51; t += 0.5) {
            double cur = sobolev_norm(f, t);
            CHECK(cur >= prev * (1.0 - 1e-12));
            prev = cur;
        }
    }
}

TEST_CASE("interpolation inequality") {
    DomainSpec d = small_spec();
    double s = 3.5, eta = (s - 1.5) / 2.0;
    double t0 = -1.0, t1 = s, t = 1.5 + eta;
    double p = (1.0 + s - eta) / (1.0 + s);

    SUBCASE("exponent bookkeeping is validated") {
        ScalarField f = random_field(d, true, 1);
        CHECK_THROWS_AS(interpolation_check(f, t0, t + 0.1, t1, p),
                        BadExponents);
    }

    SUBCASE("pure mode gives equality") {
        ScalarField f(d, FieldKind::Solution, true);
        Vec3 xi = lattice_xi(d, true, 1, 2, 1);
        for (int i = 0; i < d.n; ++i)
            for (int j = 0; j < d.n; ++j)
                for (int k = 0; k < 2 * d.n; ++k)
                    f.at(i, j, k) =
                        std::exp(cplx(0.0, dot(xi, f.point(i, j, k))));
        auto rep = interpolation_check(f, t0, t, t1, p);
        CHECK(rep.holds);
        CHECK(rep.lhs == doctest::Approx(rep.rhs).epsilon(1e-12));
    }

    SUBCASE("random fields satisfy the inequality") {
        for (unsigned seed = 0; seed < 100; ++seed) {
            ScalarField f = random_field(d, true, 100 + seed);
            auto rep = interpolation_check(f, t0, t, t1, p);
            CHECK(rep.holds);
        }
    }

    SUBCASE("zero field") {
        ScalarField f(d, FieldKind::Solution, true);
        auto rep = interpolation_check(f, t0, t, t1, p);
        CHECK(rep.holds);
        CHECK(rep.lhs == 0.0);
    }
}

TEST_CASE("dft round trip") {
    DomainSpec d = small_spec();
    ScalarField f = random_field(d, true, 42);
    auto coeffs = dft_coeffs(f);
    ScalarField g = field_from_dft(d, true, coeffs, FieldKind::Solution);
    double worst = 0.0;
    for (size_t i = 0; i < f.values.size(); ++i)
        worst = std::max(worst, std::abs(f.values[i] - g.values[i]));
    CHECK(worst < 1e-12);
}
