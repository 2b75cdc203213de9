#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "colsel/linalg.hpp"

namespace colsel {

/// Scalars driving the selection loop.
struct BudgetParams {
  double epsilon = 0.0;
  std::size_t p = 0;
  double opnorm_sq = 0.0;  // ||X||^2
  std::size_t R = 0;       // number of columns to select
  double delta = 0.0;      // envelope scale
};

/**
 * Selection budget for an n x p matrix with unit columns.
 *
 * R is the largest integer >= 1 with R ln R <= eps^2 p / (4 (1 + eps) ||X||^2)
 * and R <= floor(p / 2); delta = sqrt((1 + eps) ||X||^2 ln R / p), which
 * makes 2 delta sqrt(R) <= eps.
 *
 * Throws BadArguments for eps outside (0,1) or opnorm_sq < 1, and
 * BudgetTooSmall when p < 2.
 */
BudgetParams compute_budget(double epsilon, std::size_t p, double opnorm_sq);

struct EnvelopeBounds {
  double lower = 1.0;
  double upper = 1.0;
};

/// Bounds on the k-th largest eigenvalue (1-based) after r selections:
/// 1 - delta (r + k - 1) / sqrt(r) and 1 + delta (2r - k) / sqrt(r).
/// Throws IndexOrder unless 1 <= k <= r.
EnvelopeBounds envelope_bounds(std::size_t k, std::size_t r, double delta);

/// H_r = 1 + 1/2 + ... + 1/r.
double harmonic_number(std::size_t r);

/// Which route refreshes the spectrum of Y_r^t Y_r after each append.
enum class SpectralPath {
  dense,    // Jacobi on the Gram matrix every step; secular roots as a cross-check
  secular,  // secular roots + arrowhead vectors, dense refresh on a schedule
};

struct SelectorConfig {
  bool auto_normalize = false;
  SpectralPath path = SpectralPath::dense;
  double cert_tol = 1e-8;
  double envelope_tol = 1e-8;
  double unit_norm_tol = 1e-8;
  std::size_t refresh_interval = 16;  // secular path only
  double drift_tol = 1e-8;            // secular path only
  EigOptions eig{};
};

/// Chosen columns T, remaining candidates V_r, and the spectrum of Y_r^t Y_r.
class SelectionState {
 public:
  explicit SelectionState(std::size_t p);

  std::size_t step() const noexcept { return selected_.size(); }
  std::size_t p() const noexcept { return p_; }
  const std::vector<std::size_t>& selected() const noexcept { return selected_; }
  /// Ascending.
  const std::vector<std::size_t>& remaining() const noexcept { return remaining_; }

  /// Spectrum of the current Gram matrix. Throws BadArguments at step 0.
  const SymEig& spectral() const;

  /// Y_r, the selected columns of `x` in selection order. Step must be > 0.
  DenseMatrix selected_matrix(const DenseMatrix& x) const;

  /// Moves `index` from remaining to selected and installs the spectrum of
  /// the enlarged Gram matrix. Throws BadArguments if `index` is not a
  /// remaining candidate or the spectrum has the wrong size.
  void append(std::size_t index, SymEig spectral);

 private:
  std::size_t p_;
  std::vector<std::size_t> selected_;
  std::vector<std::size_t> remaining_;
  std::vector<SymEig> spectral_;  // empty or a single element
};

/// sum_k (v_k^t Y^t x)^2 / k with k 1-based over the descending spectrum.
double score_column(std::span<const double> x, const SymEig& spectral, const DenseMatrix& y);

struct Candidate {
  std::size_t index = 0;
  double score = 0.0;
  double mean_score = 0.0;  // average over every remaining candidate
  std::size_t candidates = 0;
};

/// The remaining column with the smallest score, smallest index on ties.
/// Throws Exhausted when no candidate is left.
Candidate select_next(const SelectionState& state, const DenseMatrix& x);

struct StepScore {
  std::size_t step = 0;  // r, the selection size before this pick
  std::size_t chosen = 0;
  double chosen_score = 0.0;
  double mean_score = 0.0;
  std::size_t candidates = 0;
};

struct EnvelopeCheck {
  std::size_t k = 0;  // 1-based
  std::size_t r = 0;
  double lambda = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool pass = false;
};

struct InterlacingCheck {
  std::size_t step = 0;  // r + 1, the size after the append
  bool pass = false;
  // Largest |secular root - reported eigenvalue|; zero when the secular
  // route produced the reported spectrum itself.
  double secular_deviation = 0.0;
};

struct SelectionReport {
  BudgetParams params;
  std::size_t n = 0;
  double cert_tol = 1e-8;
  bool auto_normalized = false;
  std::vector<std::size_t> selected;
  std::vector<std::vector<double>> trajectory;  // trajectory[r-1] = spectrum after r picks
  std::vector<StepScore> scores;
  std::vector<EnvelopeCheck> envelope_checks;
  std::vector<InterlacingCheck> interlacing_checks;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  bool certified = false;
};

/// Greedy selection of R columns with per-step certification.
///
/// Throws ColumnNormViolation when a column is not unit-norm within
/// `unit_norm_tol` (unless auto_normalize), BadArguments for epsilon outside
/// (0,1), BudgetTooSmall for p < 2, plus whatever linalg/secular raise.
SelectionReport run_selection(const DenseMatrix& x, double epsilon, const SelectorConfig& config = {});

struct EnvelopeViolation {
  std::size_t k = 0;
  std::size_t r = 0;
  double lambda = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Every (k, r) whose trajectory eigenvalue leaves its envelope by more than `tol`.
std::vector<EnvelopeViolation> verify_envelopes(const SelectionReport& report, double tol = 1e-8);

struct AverageBoundViolation {
  std::size_t r = 0;  // selection size before the offending pick
  double score = 0.0;
  double bound = 0.0;
};

/// Recomputes each pick's score from `x` with a fresh dense eigensolve and
/// checks score(y_{r+1}) <= lambda_1 ||X||^2 H_r / (p - r) + tol.
std::vector<AverageBoundViolation> verify_average_bound(const SelectionReport& report,
                                                        const DenseMatrix& x, double tol = 1e-10);

}  // namespace colsel
