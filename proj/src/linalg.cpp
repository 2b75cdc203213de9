#include "colsel/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "colsel/error.hpp"

namespace colsel {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroColumn: return "ZeroColumn";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::PoleEvaluation: return "PoleEvaluation";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::DegenerateRoot: return "DegenerateRoot";
    case ErrorCode::BudgetTooSmall: return "BudgetTooSmall";
    case ErrorCode::IndexOrder: return "IndexOrder";
    case ErrorCode::Exhausted: return "Exhausted";
    case ErrorCode::ColumnNormViolation: return "ColumnNormViolation";
    case ErrorCode::BadArguments: return "BadArguments";
    case ErrorCode::BadSpec: return "BadSpec";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Mismatch: return "Mismatch";
  }
  return "Unknown";
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols) {
  if (rows == 0 || cols == 0) {
    throw Error(ErrorCode::BadArguments, "matrix dimensions must be positive");
  }
  data_.assign(rows * cols, 0.0);
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows == 0 || cols == 0) {
    throw Error(ErrorCode::BadArguments, "matrix dimensions must be positive");
  }
  if (data_.size() != rows * cols) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(rows * cols) + " entries, got " +
                    std::to_string(data_.size()));
  }
  if (!all_finite()) {
    throw Error(ErrorCode::NonFinite, "matrix contains NaN or Inf");
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool DenseMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) {
  // Scaled accumulation so tiny or huge entries do not under/overflow.
  double scale = 0.0;
  double ssq = 1.0;
  for (double v : a) {
    if (v == 0.0) continue;
    const double av = std::abs(v);
    if (scale < av) {
      ssq = 1.0 + ssq * (scale / av) * (scale / av);
      scale = av;
    } else {
      ssq += (av / scale) * (av / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

DenseMatrix normalize_columns(const DenseMatrix& m) {
  DenseMatrix out = m;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    const double nrm = norm2(m.col(j));
    if (!(nrm > 1e-14)) {
      throw Error(ErrorCode::ZeroColumn, "column " + std::to_string(j) + " has zero norm", j);
    }
    auto c = out.col(j);
    for (double& v : c) v /= nrm;
  }
  return out;
}

DenseMatrix gram(const DenseMatrix& y) {
  const std::size_t r = y.cols();
  DenseMatrix g(r, r);
  for (std::size_t j = 0; j < r; ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      const double v = dot(y.col(i), y.col(j));
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

DenseMatrix outer_gram(const DenseMatrix& y) {
  const std::size_t n = y.rows();
  DenseMatrix g(n, n);
  for (std::size_t k = 0; k < y.cols(); ++k) {
    auto c = y.col(k);
    for (std::size_t j = 0; j < n; ++j) {
      const double cj = c[j];
      if (cj == 0.0) continue;
      for (std::size_t i = 0; i <= j; ++i) g(i, j) += c[i] * cj;
    }
  }
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < j; ++i) g(j, i) = g(i, j);
  return g;
}

std::vector<double> transpose_times(const DenseMatrix& y, std::span<const double> x) {
  if (x.size() != y.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "transpose_times: length mismatch");
  }
  std::vector<double> out(y.cols());
  for (std::size_t j = 0; j < y.cols(); ++j) out[j] = dot(y.col(j), x);
  return out;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "multiply: inner dimensions differ");
  }
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double bkj = b(k, j);
      if (bkj == 0.0) continue;
      for (std::size_t i = 0; i < a.rows(); ++i) c(i, j) += a(i, k) * bkj;
    }
  }
  return c;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) t(j, i) = a(i, j);
  return t;
}

DenseMatrix select_columns(const DenseMatrix& x, std::span<const std::size_t> indices) {
  if (indices.empty()) {
    throw Error(ErrorCode::BadArguments, "select_columns: empty index list");
  }
  DenseMatrix out(x.rows(), indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (indices[j] >= x.cols()) {
      throw Error(ErrorCode::BadArguments,
                  "select_columns: index " + std::to_string(indices[j]) + " out of range",
                  indices[j]);
    }
    std::ranges::copy(x.col(indices[j]), out.col(j).begin());
  }
  return out;
}

double trace(const DenseMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) s += a(i, i);
  return s;
}

double frobenius_norm(const DenseMatrix& a) { return norm2(a.data()); }

double max_asymmetry(const DenseMatrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < j; ++i) worst = std::max(worst, std::abs(a(i, j) - a(j, i)));
  return worst;
}

double orthonormality_error(const DenseMatrix& q) {
  double worst = 0.0;
  for (std::size_t j = 0; j < q.cols(); ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      const double target = i == j ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(dot(q.col(i), q.col(j)) - target));
    }
  }
  return worst;
}

namespace {

double off_diagonal_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < j; ++i) s += a(i, j) * a(i, j);
  return std::sqrt(2.0 * s);
}

// Applies the rotation that zeroes a(p, q) to rows/cols p, q of `a` and to
// columns p, q of `v`.
void jacobi_rotate(DenseMatrix& a, DenseMatrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  const double app = a(p, p);
  const double aqq = a(q, q);
  const double theta = (aqq - app) / (2.0 * apq);
  const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const std::size_t n = a.rows();

  for (std::size_t k = 0; k < n; ++k) {
    if (k == p || k == q) continue;
    const double akp = a(k, p);
    const double akq = a(k, q);
    const double nkp = c * akp - s * akq;
    const double nkq = s * akp + c * akq;
    a(k, p) = nkp;
    a(p, k) = nkp;
    a(k, q) = nkq;
    a(q, k) = nkq;
  }
  a(p, p) = app - t * apq;
  a(q, q) = aqq + t * apq;
  a(p, q) = 0.0;
  a(q, p) = 0.0;

  for (std::size_t k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

SymEig sym_eig(const DenseMatrix& input, const EigOptions& options) {
  if (input.rows() != input.cols()) {
    throw Error(ErrorCode::NotSymmetric, "sym_eig: matrix is not square");
  }
  const std::size_t n = input.rows();
  if (n > options.max_dim) {
    throw Error(ErrorCode::DimensionTooLarge,
                "sym_eig: dimension " + std::to_string(n) + " exceeds cap " +
                    std::to_string(options.max_dim));
  }
  if (!input.all_finite()) {
    throw Error(ErrorCode::NonFinite, "sym_eig: matrix contains NaN or Inf");
  }
  double max_abs = 0.0;
  for (double v : input.data()) max_abs = std::max(max_abs, std::abs(v));
  if (max_asymmetry(input) > options.symmetry_tol * std::max(1.0, max_abs)) {
    throw Error(ErrorCode::NotSymmetric, "sym_eig: asymmetry exceeds tolerance");
  }

  DenseMatrix a(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) a(i, j) = 0.5 * (input(i, j) + input(j, i));
  DenseMatrix v = DenseMatrix::identity(n);

  const double target = options.off_diagonal_tol * frobenius_norm(a);
  int sweep = 0;
  while (off_diagonal_norm(a) > target) {
    if (sweep == options.max_sweeps) {
      throw Error(ErrorCode::NoConvergence,
                  "sym_eig: no convergence after " + std::to_string(sweep) + " sweeps");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Entries negligible against both diagonal entries are dropped
        // instead of rotated.
        const double g = 100.0 * std::abs(apq);
        if (sweep > 3 && std::abs(a(p, p)) + g == std::abs(a(p, p)) &&
            std::abs(a(q, q)) + g == std::abs(a(q, q))) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        jacobi_rotate(a, v, p, q);
      }
    }
    ++sweep;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

  SymEig out{std::vector<double>(n), DenseMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    std::ranges::copy(v.col(order[k]), out.vectors.col(k).begin());
  }
  return out;
}

double operator_norm_sq(const DenseMatrix& x, const EigOptions& options) {
  const DenseMatrix g = x.cols() <= x.rows() ? gram(x) : outer_gram(x);
  return sym_eig(g, options).values.front();
}

}  // namespace colsel
