#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "incstab/config.hpp"
#include "incstab/forward.hpp"
#include "incstab/io.hpp"

using namespace incstab;
namespace fs = std::filesystem;

namespace {

DomainSpec spec_n(int n) {
    DomainSpec d;
    d.L = M_PI;
    d.H = M_PI;
    d.R = 5.5;
    d.n = n;
    return d;
}

fs::path temp_dir() {
    fs::path p = fs::temp_directory_path() / "incstab_io_test";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& file) {
    std::ifstream in(file);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("field round trip is bit exact") {
    DomainSpec d = spec_n(8);
    ScalarField f(d, FieldKind::Solution, true);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : f.values) v = cplx(u(rng), u(rng));

    fs::path dir = temp_dir();
    write_field(f, dir, "u");
    ScalarField g = read_field(dir, "u");

    CHECK(g.domain.n == d.n);
    CHECK(g.domain.L == d.L);
    CHECK(g.kind == FieldKind::Solution);
    CHECK(g.doubled);
    REQUIRE(g.values.size() == f.values.size());
    for (size_t i = 0; i < f.values.size(); ++i)
        CHECK(g.values[i] == f.values[i]);
}

TEST_CASE("slice csv has one row per cell and exact coordinates") {
    DomainSpec d = spec_n(8);
    ScalarField f(d, FieldKind::Potential, false);
    for (int k = 0; k < d.n; ++k) f.at(2, 3, k) = cplx(k, -k);

    fs::path dir = temp_dir();
    write_slice_csv(f, 2, 2, 3, dir / "slice.csv");
    std::ifstream in(dir / "slice.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "coord,re,im");
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (rows == 1) {
            std::istringstream ss(line);
            std::string coord, re, im;
            std::getline(ss, coord, ',');
            std::getline(ss, re, ',');
            std::getline(ss, im, ',');
            CHECK(std::stod(coord) == doctest::Approx(d.x3(1)).epsilon(1e-15));
            CHECK(std::stod(re) == 1.0);
            CHECK(std::stod(im) == -1.0);
        }
        ++rows;
    }
    CHECK(rows == d.n);
    CHECK_THROWS_AS(write_slice_csv(f, 3, 0, 0, dir / "bad.csv"), Error);
}

TEST_CASE("cauchy writer emits manifest, payloads and norm table") {
    DomainSpec d = spec_n(8);
    ScalarField q(d, FieldKind::Potential, false);
    CauchyDataSet set = synthesize_cauchy(q, 1.0, dirichlet_dictionary(d, 3));

    fs::path dir = temp_dir();
    write_cauchy(set, dir, "probe");
    CHECK(fs::exists(dir / "probe.json"));
    CHECK(fs::exists(dir / "probe_norms.csv"));
    for (size_t p = 0; p < set.pairs.size(); ++p)
        CHECK(fs::exists(dir / ("probe_pair" + std::to_string(p) + ".bin")));

    std::ifstream csv(dir / "probe_norms.csv");
    std::string line;
    std::getline(csv, line);
    CHECK(line == "pair,h_half_f,h_minus_half_g,norm_h");
    int rows = 0;
    while (std::getline(csv, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 3);
}

TEST_CASE("budgets csv is deterministic") {
    std::vector<ModeEstimate> modes(2);
    modes[0].xi = {1.0, 0.0, 1.0};
    modes[0].fq0_hat = cplx(0.25, -0.125);
    modes[0].budget.principal = 0.3;
    modes[0].admissible = true;
    modes[1].xi = {0.0, 1.0, 1.0};
    modes[1].fq0_hat = cplx(1.0 / 3.0, 0.0);
    modes[1].budget.coupling_bound = 1e-3;

    fs::path dir = temp_dir();
    write_budgets_csv(modes, dir / "a.csv");
    write_budgets_csv(modes, dir / "b.csv");
    std::string a = slurp(dir / "a.csv");
    CHECK(a == slurp(dir / "b.csv"));
    CHECK(a.find("xi1,xi2,xi3,re_fq0,im_fq0,principal,coupling,"
                  "coupling_bound,reflected,reflected_bound,data_bound,"
                  "admissible") == 0);
    CHECK(a.find("0.33333333333333331") != std::string::npos);
}

TEST_CASE("fmt survives a parse round trip") {
    for (double v : {1.0 / 3.0, 0.1, -2.5e-17, 6.022e23}) {
        CHECK(std::stod(fmt(v)) == v);
    }
    CHECK(fmt(cplx(1.5, -0.5)) == "1.5-0.5i");
    CHECK(fmt(cplx(1.5, 0.5)) == "1.5+0.5i");
}

TEST_CASE("config parser") {
    SUBCASE("defaults validate") {
        ExperimentConfig cfg = default_config();
        CHECK_NOTHROW(cfg.validate());
        CHECK(cfg.k_values.size() == 4);
        CHECK_FALSE(cfg.q0.modes.empty());
    }

    SUBCASE("full file overrides every section") {
        std::string text = R"(
# run setup
[domain]
L = 3.0
H = 2.5
R = 5.5
n = 16

[experiment]
k = [1.0, 2.0]   # wavenumbers
noise = [1e-2, 1e-3]
dictionary = 12
seed = 99
threads = 2

[schedule]
C_star = 3.0
N = 0.2
alpha = 0.8
beta = 0.3
s = 2.5

[tolerances]
cond_threshold = 1e7
span_tol = 0.05
herm_tol = 1.5

[output]
dir = "results"

[potential.q1]
gaussians = [0.1, 0.0, 0.0, -1.0, 0.7]
sobolev_order = 2.5
sobolev_bound = 0.2

[potential.q0]
modes = [0.05, 1.0, 1.0, 0.0, 0.0, 0.0]
sobolev_order = 2.5
sobolev_bound = 0.2
)";
        ExperimentConfig cfg = parse_config_text(text);
        CHECK(cfg.domain.L == 3.0);
        CHECK(cfg.domain.n == 16);
        CHECK(cfg.k_values == std::vector<double>{1.0, 2.0});
        CHECK(cfg.noise_levels[1] == 1e-3);
        CHECK(cfg.dictionary == 12);
        CHECK(cfg.seed == 99);
        CHECK(cfg.C_star == 3.0);
        CHECK(cfg.s == 2.5);
        CHECK(cfg.cond_threshold == 1e7);
        CHECK(cfg.out_dir == "results");
        REQUIRE(cfg.q1.gaussians.size() == 1);
        CHECK(cfg.q1.gaussians[0].center[2] == -1.0);
        CHECK(cfg.q1.modes.empty());
        REQUIRE(cfg.q0.modes.size() == 1);
        CHECK(cfg.q0.modes[0].amp == 0.05);
        CHECK(cfg.q0.gaussians.empty());
    }

    SUBCASE("scalar k is promoted to a one-element list") {
        ExperimentConfig cfg = parse_config_text("[experiment]\nk = 4.0\n");
        CHECK(cfg.k_values == std::vector<double>{4.0});
    }

    SUBCASE("unknown keys and sections are rejected") {
        CHECK_THROWS_AS(parse_config_text("[domain]\nwidth = 2.0\n"),
                        ConfigError);
        CHECK_THROWS_AS(parse_config_text("[mystery]\nx = 1\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("k = 1.0\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("[potential.q1]\nbumps = [1]\n"),
                        ConfigError);
    }

    SUBCASE("malformed values are rejected") {
        CHECK_THROWS_AS(parse_config_text("[domain]\nL = abc\n"),
                        ConfigError);
        CHECK_THROWS_AS(parse_config_text("[domain]\nn = 16.5\n"),
                        ConfigError);
        CHECK_THROWS_AS(parse_config_text("[experiment]\nk = [1.0\n"),
                        ConfigError);
        CHECK_THROWS_AS(
            parse_config_text("[potential.q1]\ngaussians = [1, 2]\n"),
            ConfigError);
    }

    SUBCASE("semantic constraints are enforced after parsing") {
        CHECK_THROWS_AS(parse_config_text("[schedule]\nbeta = 0.95\n"),
                        ConfigError);
        CHECK_THROWS_AS(parse_config_text("[experiment]\nk = [-1.0]\n"),
                        ConfigError);
    }

    SUBCASE("file and text parsers agree") {
        fs::path dir = temp_dir();
        std::string text = "[domain]\nn = 16\n";
        {
            std::ofstream out(dir / "run.toml");
            out << text;
        }
        CHECK(parse_config(dir / "run.toml").domain.n ==
              parse_config_text(text).domain.n);
        CHECK_THROWS_AS(parse_config(dir / "absent.toml"), ConfigError);
    }
}
