#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "colsel/linalg.hpp"

namespace colsel {

/// c_k = v_k^t Y^t y: coordinates of the appended column's Gram row in the
/// current eigenbasis, index-aligned with the descending eigenvalues.
struct Couplings {
  std::vector<double> values;
};

/// Couplings of column `y` against the selection `selected` whose Gram
/// matrix is diagonalized by `spectral`.
Couplings compute_couplings(const SymEig& spectral, const DenseMatrix& selected,
                            std::span<const double> y);

/// | sum c_k^2 - ||Y^t y||^2 |, the Parseval defect of a coupling vector.
double parseval_defect(const Couplings& couplings, const DenseMatrix& selected,
                       std::span<const double> y);

/**
 * Eigen-decomposition of the bordered Gram matrix
 *
 *     [ Lambda  c ]
 *     [ c^t     1 ]
 *
 * where Lambda = diag(old eigenvalues). Row/column ordering: the r old
 * eigen-directions first, the appended column last, matching a selection
 * that appends columns on the right.
 */
struct ArrowheadSpectrum {
  std::vector<double> roots;  // descending, r + 1 entries
  std::optional<DenseMatrix> vectors_in_eigenbasis;
};

struct SecularOptions {
  double deflation_tol = 1e-12;  // scaled by max(1, lambda_1)
  double cluster_tol = 1e-12;
  double bisection_width = 1e-8;
  int max_newton = 100;
  int max_expansions = 200;
  bool want_vectors = false;
};

/// q(lambda) = 1 - lambda + sum_k c_k^2 / (lambda - lambda_k).
/// Throws PoleEvaluation when lambda sits on a pole with nonzero coupling.
double secular_eval(double lambda, std::span<const double> eigenvalues,
                    const Couplings& couplings);

/// All r + 1 eigenvalues of the bordered matrix, by bracketed root finding
/// on q between consecutive poles after deflation. Uncoupled poles are
/// copied through unchanged. Throws BracketFailure if an outer bracket
/// cannot be found, DimensionMismatch on misaligned input.
ArrowheadSpectrum append_column_spectrum(std::span<const double> eigenvalues,
                                         const Couplings& couplings,
                                         const SecularOptions& options = {});

/// Eigenvectors of the bordered matrix for the given `roots` (as returned by
/// append_column_spectrum), columns aligned with `roots`. Uses the Lowner
/// reconstruction of the couplings so the columns come out orthonormal.
/// Throws DegenerateRoot if a root coincides with an active pole.
DenseMatrix arrowhead_eigenvectors(std::span<const double> eigenvalues, const Couplings& couplings,
                                   std::span<const double> roots,
                                   const SecularOptions& options = {});

/// The bordered matrix itself, for dense cross-checks.
DenseMatrix bordered_matrix(std::span<const double> eigenvalues, const Couplings& couplings);

/// diag(V, 1) * U: eigenvectors of [Y y]^t [Y y] from the old eigenvectors V
/// and the arrowhead eigenvectors U.
DenseMatrix lift_to_column_basis(const DenseMatrix& old_vectors, const DenseMatrix& arrowhead_vectors);

/// Cauchy interlacing between the spectrum of Y^tY (r values) and of the
/// bordered matrix (r + 1 values), both descending:
/// new[k+1] <= old[k] and new[k] >= old[k] for every k < r.
bool check_interlacing(std::span<const double> old_values, std::span<const double> new_values,
                       double tol = 1e-10);

}  // namespace colsel
