#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace colsel {

/**
 * Dense real matrix stored column-major.
 *
 * Both dimensions are at least one. Columns are contiguous, so `col(j)`
 * hands out a span without copying; most of the library works column by
 * column because the selection problem is about columns.
 */
class DenseMatrix {
 public:
  /// Zero-filled rows x cols matrix. Throws BadArguments on a zero dimension.
  DenseMatrix(std::size_t rows, std::size_t cols);

  /// Takes ownership of column-major `entries`. Throws DimensionMismatch if
  /// the size is wrong and NonFinite on NaN/Inf.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  std::span<double> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const {
    return {data_.data() + j * rows_, rows_};
  }

  std::span<const double> data() const noexcept { return data_; }

  bool all_finite() const noexcept;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

/// Eigenpairs of a symmetric matrix, values sorted descending and
/// `vectors.col(k)` paired with `values[k]`.
struct SymEig {
  std::vector<double> values;
  DenseMatrix vectors;
};

struct EigOptions {
  std::size_t max_dim = 4096;
  int max_sweeps = 64;
  double symmetry_tol = 1e-12;
  double off_diagonal_tol = 1e-13;  // relative to the Frobenius norm
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

/// Copy of `m` with each column scaled to unit euclidean norm.
/// Throws ZeroColumn (with the column index) when a norm is <= 1e-14.
DenseMatrix normalize_columns(const DenseMatrix& m);

/// Y^t Y, symmetric by construction.
DenseMatrix gram(const DenseMatrix& y);

/// Y Y^t.
DenseMatrix outer_gram(const DenseMatrix& y);

/// Y^t x.
std::vector<double> transpose_times(const DenseMatrix& y, std::span<const double> x);

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& a);

/// Columns of `x` at `indices`, in that order.
DenseMatrix select_columns(const DenseMatrix& x, std::span<const std::size_t> indices);

double trace(const DenseMatrix& a);
double frobenius_norm(const DenseMatrix& a);

/// Largest |a_ij - a_ji|.
double max_asymmetry(const DenseMatrix& a);

/// Largest |(Q^t Q - I)_ij|.
double orthonormality_error(const DenseMatrix& q);

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// The input is symmetrized as (A + A^t)/2 first. Throws NotSymmetric when
/// the asymmetry exceeds `symmetry_tol` (scaled by max(1, max|a_ij|)),
/// DimensionTooLarge beyond `max_dim`, and NoConvergence when the
/// off-diagonal Frobenius mass is still above `off_diagonal_tol * ||A||_F`
/// after `max_sweeps` sweeps. Ties keep the order Jacobi left them in.
SymEig sym_eig(const DenseMatrix& a, const EigOptions& options = {});

/// ||X||^2 = lambda_max(X^t X), computed on the smaller of X^t X and X X^t.
double operator_norm_sq(const DenseMatrix& x, const EigOptions& options = {});

}  // namespace colsel
