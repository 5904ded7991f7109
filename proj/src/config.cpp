#include "incstab/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace incstab {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_str = !in_str;
        if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

double parse_number(const std::string& tok, int lineno) {
    size_t pos = 0;
    double v;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(lineno) +
                          ": not a number: '" + tok + "'");
    }
    if (pos != tok.size())
        throw ConfigError("line " + std::to_string(lineno) +
                          ": trailing characters in number: '" + tok + "'");
    return v;
}

std::vector<double> parse_array(const std::string& tok, int lineno) {
    std::vector<double> out;
    std::string inner = trim(tok.substr(1, tok.size() - 2));
    if (inner.empty()) return out;
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_number(trim(item), lineno));
    return out;
}

int as_int(double v, const std::string& key, int lineno) {
    int i = static_cast<int>(v);
    if (double(i) != v)
        throw ConfigError("line " + std::to_string(lineno) + ": " + key +
                          " must be an integer");
    return i;
}

void apply_potential(PotentialDescriptor& p, const std::string& key,
                     const std::vector<double>& arr, double scalar,
                     bool is_array, int lineno) {
    auto need_array = [&](size_t stride) {
        if (!is_array || arr.size() % stride != 0)
            throw ConfigError("line " + std::to_string(lineno) + ": " + key +
                              " expects a flat array with stride " +
                              std::to_string(stride));
    };
    if (key == "gaussians") {
        // flat quintuples: amp, cx, cy, cz, width
        need_array(5);
        for (size_t i = 0; i < arr.size(); i += 5)
            p.gaussians.push_back(
                {arr[i], {arr[i + 1], arr[i + 2], arr[i + 3]}, arr[i + 4]});
    } else if (key == "modes") {
        // flat sextuples: amp, f1, f2, f3, phase1, phase2
        need_array(6);
        for (size_t i = 0; i < arr.size(); i += 6) {
            PotentialDescriptor::CosMode m;
            m.amp = arr[i];
            m.freq = {arr[i + 1], arr[i + 2], arr[i + 3]};
            m.phase1 = arr[i + 4];
            m.phase2 = arr[i + 5];
            p.modes.push_back(m);
        }
    } else if (key == "sobolev_order") {
        p.sobolev_order = scalar;
    } else if (key == "sobolev_bound") {
        p.sobolev_bound = scalar;
    } else {
        throw ConfigError("line " + std::to_string(lineno) +
                          ": unknown potential key '" + key + "'");
    }
}

} // namespace

void ExperimentConfig::validate() const {
    domain.validate();
    q1.validate();
    q0.validate();
    if (k_values.empty()) throw ConfigError("config: k list is empty");
    for (double k : k_values)
        if (k < 1.0) throw ConfigError("config: wave numbers must be >= 1");
    for (double nl : noise_levels)
        if (nl < 0) throw ConfigError("config: negative noise level");
    if (dictionary < 1) throw ConfigError("config: dictionary size < 1");
    if (threads < 1) throw ConfigError("config: threads < 1");
    if (C_star <= 0 || N <= 0) throw ConfigError("config: C_star, N > 0");
    if (!(alpha > 0 && alpha < 1 && beta > 0 && beta < alpha))
        throw ConfigError("config: need 0 < beta < alpha < 1");
    if (s <= 1.5) throw ConfigError("config: need s > 3/2");
}

ExperimentConfig default_config() {
    ExperimentConfig cfg;
    // amplitudes sized so q1, q0 and q1 + q0 all sit inside Q_N at
    // (s, N) = (3.5, 0.05) on the default box
    cfg.q1.gaussians.push_back({2e-4, {0.5, -0.3, -1.8}, 0.8});
    cfg.q1.sobolev_order = cfg.s;
    cfg.q1.sobolev_bound = cfg.N;
    PotentialDescriptor::CosMode m;
    m.amp = 3e-4;
    m.freq = {1.0, 0.0, 1.0};
    cfg.q0.modes.push_back(m);
    m.amp = 2e-4;
    m.freq = {0.0, 1.0, 1.0};
    cfg.q0.modes.push_back(m);
    cfg.q0.sobolev_order = cfg.s;
    cfg.q0.sobolev_bound = cfg.N;
    return cfg;
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg = default_config();
    bool q1_touched = false, q0_touched = false;

    std::istringstream in(text);
    std::string raw;
    std::string section;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "domain" && section != "experiment" &&
                section != "schedule" && section != "tolerances" &&
                section != "output" && section != "potential.q1" &&
                section != "potential.q0")
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": unknown section [" + section + "]");
            if (section == "potential.q1" && !q1_touched) {
                cfg.q1 = PotentialDescriptor{};
                q1_touched = true;
            }
            if (section == "potential.q0" && !q0_touched) {
                cfg.q0 = PotentialDescriptor{};
                q0_touched = true;
            }
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("line " + std::to_string(lineno) +
                              ": empty key or value");

        bool is_array = val.front() == '[';
        if (is_array && val.back() != ']')
            throw ConfigError("line " + std::to_string(lineno) +
                              ": unterminated array");
        std::vector<double> arr;
        double scalar = 0.0;
        std::string str;
        bool is_string = val.front() == '"';
        if (is_array) {
            arr = parse_array(val, lineno);
        } else if (is_string) {
            if (val.size() < 2 || val.back() != '"')
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": unterminated string");
            str = val.substr(1, val.size() - 2);
        } else if (val == "true" || val == "false") {
            scalar = val == "true" ? 1.0 : 0.0;
        } else {
            scalar = parse_number(val, lineno);
        }

        auto reject = [&]() {
            throw ConfigError("line " + std::to_string(lineno) +
                              ": unknown key '" + key + "' in [" + section +
                              "]");
        };

        if (section == "domain") {
            if (key == "L") cfg.domain.L = scalar;
            else if (key == "H") cfg.domain.H = scalar;
            else if (key == "R") cfg.domain.R = scalar;
            else if (key == "n") cfg.domain.n = as_int(scalar, key, lineno);
            else reject();
        } else if (section == "experiment") {
            if (key == "k") cfg.k_values = is_array ? arr
                                : std::vector<double>{scalar};
            else if (key == "noise") cfg.noise_levels = is_array ? arr
                                : std::vector<double>{scalar};
            else if (key == "dictionary")
                cfg.dictionary = as_int(scalar, key, lineno);
            else if (key == "seed")
                cfg.seed = static_cast<uint64_t>(scalar);
            else if (key == "threads")
                cfg.threads = as_int(scalar, key, lineno);
            else reject();
        } else if (section == "schedule") {
            if (key == "C_star") cfg.C_star = scalar;
            else if (key == "N") cfg.N = scalar;
            else if (key == "alpha") cfg.alpha = scalar;
            else if (key == "beta") cfg.beta = scalar;
            else if (key == "s") cfg.s = scalar;
            else reject();
        } else if (section == "tolerances") {
            if (key == "cond_threshold") cfg.cond_threshold = scalar;
            else if (key == "span_tol") cfg.span_tol = scalar;
            else if (key == "herm_tol") cfg.herm_tol = scalar;
            else reject();
        } else if (section == "output") {
            if (key == "dir") {
                if (!is_string)
                    throw ConfigError("line " + std::to_string(lineno) +
                                      ": dir must be a string");
                cfg.out_dir = str;
            } else reject();
        } else if (section == "potential.q1") {
            apply_potential(cfg.q1, key, arr, scalar, is_array, lineno);
        } else if (section == "potential.q0") {
            apply_potential(cfg.q0, key, arr, scalar, is_array, lineno);
        } else {
            throw ConfigError("line " + std::to_string(lineno) +
                              ": key '" + key + "' outside any section");
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config: " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

} // namespace incstab
