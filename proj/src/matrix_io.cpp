#include "colsel/matrix_io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "colsel/error.hpp"

namespace colsel {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view token, std::size_t line) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) {
    throw Error(ErrorCode::Parse,
                "line " + std::to_string(line) + ": cannot parse number '" + std::string(token) + "'");
  }
  return value;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto end = text.find('\n');
    const std::string_view line = text.substr(0, end);
    fn(line, ++line_no);
    if (end == std::string_view::npos) break;
    text.remove_prefix(end + 1);
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

DenseMatrix parse_csv_matrix(std::string_view text) {
  std::vector<std::vector<double>> rows;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    line = trim(line);
    if (line.empty()) return;
    std::vector<double> row;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      row.push_back(parse_number(line.substr(start, comma - start), line_no));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(rows.front().size()) + " values, got " +
                                        std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  });
  if (rows.empty()) throw Error(ErrorCode::Parse, "CSV input contains no rows");

  const std::size_t n = rows.size();
  const std::size_t p = rows.front().size();
  std::vector<double> entries(n * p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) entries[j * n + i] = rows[i][j];
  try {
    return DenseMatrix(n, p, std::move(entries));
  } catch (const Error& e) {
    throw Error(ErrorCode::Parse, std::string("CSV input: ") + e.what());
  }
}

DenseMatrix parse_matrix_market(std::string_view text) {
  bool banner_seen = false;
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool have_size = false;
  std::vector<double> entries;

  for_each_line(text, [&](std::string_view raw, std::size_t line_no) {
    const std::string_view line = trim(raw);
    if (!banner_seen) {
      std::istringstream banner{std::string(line)};
      std::string tag, object, format, field, symmetry;
      banner >> tag >> object >> format >> field >> symmetry;
      auto lower = [](std::string s) {
        for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return s;
      };
      if (tag != "%%MatrixMarket" || lower(object) != "matrix" || lower(format) != "array" ||
          lower(field) != "real" || lower(symmetry) != "general") {
        throw Error(ErrorCode::Parse,
                    "only '%%MatrixMarket matrix array real general' is supported");
      }
      banner_seen = true;
      return;
    }
    if (line.empty() || line.front() == '%') return;
    if (!have_size) {
      std::istringstream size_line{std::string(line)};
      long long m = 0, n = 0;
      if (!(size_line >> m >> n) || m <= 0 || n <= 0) {
        throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": bad size line");
      }
      rows = static_cast<std::size_t>(m);
      cols = static_cast<std::size_t>(n);
      have_size = true;
      entries.reserve(rows * cols);
      return;
    }
    std::size_t start = 0;
    while (start < line.size()) {
      const auto ws = line.find_first_of(" \t", start);
      const std::string_view tok = line.substr(start, ws - start);
      if (!tok.empty()) entries.push_back(parse_number(tok, line_no));
      if (ws == std::string_view::npos) break;
      start = ws + 1;
    }
  });

  if (!banner_seen) throw Error(ErrorCode::Parse, "empty MatrixMarket input");
  if (!have_size) throw Error(ErrorCode::Parse, "MatrixMarket input has no size line");
  if (entries.size() != rows * cols) {
    throw Error(ErrorCode::Parse, "MatrixMarket input: expected " + std::to_string(rows * cols) +
                                      " entries, got " + std::to_string(entries.size()));
  }
  try {
    return DenseMatrix(rows, cols, std::move(entries));
  } catch (const Error& e) {
    throw Error(ErrorCode::Parse, std::string("MatrixMarket input: ") + e.what());
  }
}

DenseMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  if (trim(text).starts_with("%%MatrixMarket")) return parse_matrix_market(text);
  return parse_csv_matrix(text);
}

void write_csv_matrix(std::ostream& out, const DenseMatrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_matrix_market(std::ostream& out, const DenseMatrix& m) {
  out << "%%MatrixMarket matrix array real general\n";
  out << m.rows() << ' ' << m.cols() << '\n';
  for (double v : m.data()) out << format_double(v) << '\n';
}

}  // namespace colsel
