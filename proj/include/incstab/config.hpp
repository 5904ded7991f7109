#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "incstab/grid.hpp"

namespace incstab {

/// Run configuration, readable from a TOML subset (sections, scalar and
/// flat-array values, # comments). Unknown keys are errors.
struct ExperimentConfig {
    DomainSpec domain;

    std::vector<double> k_values{1.0, 2.0, 4.0, 8.0};
    std::vector<double> noise_levels{1e-3};
    int dictionary = 24;
    uint64_t seed = 7;
    int threads = 1;

    double C_star = 2.0;
    double N = 0.05;
    double alpha = 0.9;
    double beta = 0.45;
    double s = 3.5;

    double cond_threshold = 1e8;
    double span_tol = 0.1;
    double herm_tol = 2.0;

    PotentialDescriptor q1;
    PotentialDescriptor q0;   // difference potential, q2 = q1 + q0

    std::string out_dir = "out";

    void validate() const;
};

/// Defaults used when no --config is given: the desk-scale box with a
/// small Gaussian q1 and a band-limited trigonometric q0.
ExperimentConfig default_config();

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::filesystem::path& file);

} // namespace incstab
