#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "colsel/linalg.hpp"

namespace colsel {

/// Plain CSV: one matrix row per line, comma-separated decimals. Blank
/// lines are skipped. Throws Parse on ragged rows or bad numbers.
DenseMatrix parse_csv_matrix(std::string_view text);

/// `%%MatrixMarket matrix array real general`, entries column-major.
/// Throws Parse on anything else (coordinate storage, complex, ...).
DenseMatrix parse_matrix_market(std::string_view text);

/// Dispatches on the `%%MatrixMarket` banner. Throws Io if unreadable.
DenseMatrix read_matrix(const std::filesystem::path& path);

/// Both writers print every entry with 17 significant digits so a
/// written matrix reads back bit-identical.
void write_csv_matrix(std::ostream& out, const DenseMatrix& m);
void write_matrix_market(std::ostream& out, const DenseMatrix& m);

/// "%.16e": 17 significant digits, C locale.
std::string format_double(double v);

}  // namespace colsel
