#include "incstab/io.hpp"

#include <cstdio>
#include <fstream>

#include "json.hpp"

namespace incstab {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt(cplx v) {
    return fmt(v.real()) + (v.imag() < 0 ? "" : "+") + fmt(v.imag()) + "i";
}

namespace {

void write_bin(const std::vector<cplx>& values, const fs::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + file.string());
    // doubles are written natively; the header pins little-endian, which
    // is what every supported target uses
    for (const auto& v : values) {
        double re = v.real(), im = v.imag();
        out.write(reinterpret_cast<const char*>(&re), sizeof(double));
        out.write(reinterpret_cast<const char*>(&im), sizeof(double));
    }
}

std::vector<cplx> read_bin(const fs::path& file, size_t count) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot open for reading: " + file.string());
    std::vector<cplx> values(count);
    for (auto& v : values) {
        double re = 0, im = 0;
        in.read(reinterpret_cast<char*>(&re), sizeof(double));
        in.read(reinterpret_cast<char*>(&im), sizeof(double));
        v = cplx(re, im);
    }
    if (!in) throw Error("short read: " + file.string());
    return values;
}

} // namespace

void write_field(const ScalarField& f, const fs::path& dir,
                 const std::string& name) {
    fs::create_directories(dir);
    json hdr;
    hdr["n"] = f.domain.n;
    hdr["L"] = f.domain.L;
    hdr["H"] = f.domain.H;
    hdr["R"] = f.domain.R;
    hdr["kind"] = f.kind == FieldKind::Potential   ? "potential"
                  : f.kind == FieldKind::Solution ? "solution"
                                                  : "remainder";
    hdr["doubled"] = f.doubled;
    hdr["dtype"] = "c128";
    hdr["order"] = "row-major x1,x2,x3";
    std::ofstream jh(dir / (name + ".json"));
    jh << hdr.dump(2) << "\n";
    write_bin(f.values, dir / (name + ".bin"));
}

ScalarField read_field(const fs::path& dir, const std::string& name) {
    std::ifstream jh(dir / (name + ".json"));
    if (!jh) throw Error("missing header: " + (dir / name).string());
    json hdr = json::parse(jh);
    DomainSpec d;
    d.n = hdr.at("n").get<int>();
    d.L = hdr.at("L").get<double>();
    d.H = hdr.at("H").get<double>();
    d.R = hdr.at("R").get<double>();
    std::string kind = hdr.at("kind").get<std::string>();
    FieldKind fk = kind == "potential"  ? FieldKind::Potential
                   : kind == "solution" ? FieldKind::Solution
                                        : FieldKind::Remainder;
    ScalarField f(d, fk, hdr.at("doubled").get<bool>());
    f.values = read_bin(dir / (name + ".bin"), f.values.size());
    return f;
}

void write_slice_csv(const ScalarField& f, int axis, int fixed_a,
                     int fixed_b, const fs::path& file) {
    if (axis < 0 || axis > 2) throw Error("write_slice_csv: bad axis");
    std::ofstream out(file);
    if (!out) throw Error("cannot open for writing: " + file.string());
    out << "coord,re,im\n";
    int len = axis == 2 ? f.nz() : f.domain.n;
    for (int t = 0; t < len; ++t) {
        int i = axis == 0 ? t : fixed_a;
        int j = axis == 1 ? t : (axis == 0 ? fixed_a : fixed_b);
        int l = axis == 2 ? t : fixed_b;
        Vec3 x = f.point(i, j, l);
        cplx v = f.at(i, j, l);
        out << fmt(x[axis]) << "," << fmt(v.real()) << "," << fmt(v.imag())
            << "\n";
    }
}

void write_cauchy(const CauchyDataSet& set, const fs::path& dir,
                  const std::string& name) {
    fs::create_directories(dir);
    json man;
    man["k"] = set.k;
    man["n"] = set.domain.n;
    man["L"] = set.domain.L;
    man["H"] = set.domain.H;
    man["R"] = set.domain.R;
    man["pairs"] = json::array();
    std::ofstream csv(dir / (name + "_norms.csv"));
    csv << "pair,h_half_f,h_minus_half_g,norm_h\n";
    for (size_t p = 0; p < set.pairs.size(); ++p) {
        const CauchyPair& pr = set.pairs[p];
        std::string base = name + "_pair" + std::to_string(p);
        std::vector<cplx> flat;
        for (int face = 0; face < kNumFaces; ++face)
            flat.insert(flat.end(), pr.f.faces[face].begin(),
                        pr.f.faces[face].end());
        for (int face = 0; face < kNumFaces; ++face)
            flat.insert(flat.end(), pr.g.faces[face].begin(),
                        pr.g.faces[face].end());
        write_bin(flat, dir / (base + ".bin"));
        BoundaryNorms nm = boundary_norms(pr.f, pr.g);
        json jp;
        jp["file"] = base + ".bin";
        jp["norm_h"] = pr.norm_h;
        man["pairs"].push_back(jp);
        csv << p << "," << fmt(nm.h_half) << "," << fmt(nm.h_minus_half)
            << "," << fmt(pr.norm_h) << "\n";
    }
    std::ofstream jh(dir / (name + ".json"));
    jh << man.dump(2) << "\n";
}

void write_budgets_csv(const std::vector<ModeEstimate>& modes,
                       const fs::path& file) {
    std::ofstream out(file);
    if (!out) throw Error("cannot open for writing: " + file.string());
    out << "xi1,xi2,xi3,re_fq0,im_fq0,principal,coupling,coupling_bound,"
           "reflected,reflected_bound,data_bound,admissible\n";
    for (const auto& m : modes) {
        out << fmt(m.xi[0]) << "," << fmt(m.xi[1]) << "," << fmt(m.xi[2])
            << "," << fmt(m.fq0_hat.real()) << "," << fmt(m.fq0_hat.imag())
            << "," << fmt(m.budget.principal) << ","
            << fmt(m.budget.coupling) << ","
            << fmt(m.budget.coupling_bound) << ","
            << fmt(m.budget.reflected) << ","
            << fmt(m.budget.reflected_bound) << ","
            << fmt(m.budget.data_bound) << "," << (m.admissible ? 1 : 0)
            << "\n";
    }
}

} // namespace incstab
