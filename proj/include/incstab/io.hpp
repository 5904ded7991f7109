#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "incstab/forward.hpp"
#include "incstab/grid.hpp"
#include "incstab/recovery.hpp"

namespace incstab {

/// Field dump: <name>.json header + <name>.bin little-endian payload
/// (c128, row-major x1,x2,x3).
void write_field(const ScalarField& f, const std::filesystem::path& dir,
                 const std::string& name);
ScalarField read_field(const std::filesystem::path& dir,
                       const std::string& name);

/// 1D slice along an axis through cell (i, j) (the two fixed indices in
/// grid order), as CSV with coordinate and re/im columns.
void write_slice_csv(const ScalarField& f, int axis, int fixed_a,
                     int fixed_b, const std::filesystem::path& file);

/// Cauchy data set: JSON manifest + per-pair binary boundary fields + CSV
/// norm summary.
void write_cauchy(const CauchyDataSet& set, const std::filesystem::path& dir,
                  const std::string& name);

/// Per-mode budget table.
void write_budgets_csv(const std::vector<ModeEstimate>& modes,
                       const std::filesystem::path& file);

/// printf-stable float formatting shared by every writer ("%.17g").
std::string fmt(double v);
std::string fmt(cplx v);

} // namespace incstab
