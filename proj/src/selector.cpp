#include "colsel/selector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "colsel/error.hpp"
#include "colsel/secular.hpp"

namespace colsel {

BudgetParams compute_budget(double epsilon, std::size_t p, double opnorm_sq) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorCode::BadArguments, "epsilon must be in (0,1)");
  }
  if (p < 2) {
    throw Error(ErrorCode::BudgetTooSmall, "at least two columns are needed (R <= floor(p/2))");
  }
  // Unit columns force ||X||^2 >= 1; allow rounding from the eigensolver.
  if (!(opnorm_sq >= 1.0 - 1e-9) || !std::isfinite(opnorm_sq)) {
    throw Error(ErrorCode::BadArguments, "operator norm squared must be >= 1");
  }

  const double rhs = epsilon * epsilon * static_cast<double>(p) / (4.0 * (1.0 + epsilon) * opnorm_sq);
  const std::size_t cap = p / 2;
  std::size_t budget = 1;
  while (budget + 1 <= cap) {
    const double next = static_cast<double>(budget + 1);
    if (next * std::log(next) > rhs) break;
    ++budget;
  }

  BudgetParams params;
  params.epsilon = epsilon;
  params.p = p;
  params.opnorm_sq = opnorm_sq;
  params.R = budget;
  params.delta = std::sqrt((1.0 + epsilon) * opnorm_sq * std::log(static_cast<double>(budget)) /
                           static_cast<double>(p));
  return params;
}

EnvelopeBounds envelope_bounds(std::size_t k, std::size_t r, double delta) {
  if (k < 1 || k > r) {
    throw Error(ErrorCode::IndexOrder,
                "envelope_bounds: need 1 <= k <= r, got k=" + std::to_string(k) +
                    " r=" + std::to_string(r));
  }
  const double rd = static_cast<double>(r);
  const double kd = static_cast<double>(k);
  const double root = std::sqrt(rd);
  return {1.0 - delta * (rd + kd - 1.0) / root, 1.0 + delta * (2.0 * rd - kd) / root};
}

double harmonic_number(std::size_t r) {
  double h = 0.0;
  for (std::size_t k = r; k >= 1; --k) h += 1.0 / static_cast<double>(k);
  return h;
}

SelectionState::SelectionState(std::size_t p) : p_(p) {
  remaining_.resize(p);
  for (std::size_t j = 0; j < p; ++j) remaining_[j] = j;
}

const SymEig& SelectionState::spectral() const {
  if (spectral_.empty()) {
    throw Error(ErrorCode::BadArguments, "no spectrum before the first selection");
  }
  return spectral_.front();
}

DenseMatrix SelectionState::selected_matrix(const DenseMatrix& x) const {
  return select_columns(x, selected_);
}

void SelectionState::append(std::size_t index, SymEig spectral) {
  auto it = std::lower_bound(remaining_.begin(), remaining_.end(), index);
  if (it == remaining_.end() || *it != index) {
    throw Error(ErrorCode::BadArguments,
                "column " + std::to_string(index) + " is not a remaining candidate", index);
  }
  if (spectral.values.size() != selected_.size() + 1) {
    throw Error(ErrorCode::BadArguments, "spectrum size does not match the new selection size");
  }
  remaining_.erase(it);
  selected_.push_back(index);
  spectral_.clear();
  spectral_.push_back(std::move(spectral));
}

namespace {

// Precomputes w_k = Y v_k so a candidate's score costs r dot products.
class ScoreKernel {
 public:
  ScoreKernel(const SymEig& spectral, const DenseMatrix& y)
      : directions_(multiply(y, spectral.vectors)) {
    if (spectral.values.size() != y.cols()) {
      throw Error(ErrorCode::DimensionMismatch, "score: spectrum does not match selection");
    }
  }

  double operator()(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < directions_.cols(); ++k) {
      const double c = dot(directions_.col(k), x);
      s += c * c / static_cast<double>(k + 1);
    }
    return s;
  }

 private:
  DenseMatrix directions_;
};

}  // namespace

double score_column(std::span<const double> x, const SymEig& spectral, const DenseMatrix& y) {
  if (x.size() != y.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "score_column: column length differs from Y");
  }
  return ScoreKernel(spectral, y)(x);
}

Candidate select_next(const SelectionState& state, const DenseMatrix& x) {
  const auto& remaining = state.remaining();
  if (remaining.empty()) throw Error(ErrorCode::Exhausted, "no remaining candidates");

  Candidate best;
  best.candidates = remaining.size();
  if (state.step() == 0) {
    best.index = remaining.front();
    return best;
  }

  const DenseMatrix y = state.selected_matrix(x);
  const ScoreKernel kernel(state.spectral(), y);
  double total = 0.0;
  bool first = true;
  for (std::size_t j : remaining) {
    const double s = kernel(x.col(j));
    total += s;
    if (first || s < best.score) {
      best.index = j;
      best.score = s;
      first = false;
    }
  }
  best.mean_score = total / static_cast<double>(remaining.size());
  return best;
}

namespace {

DenseMatrix checked_input(const DenseMatrix& x, const SelectorConfig& config) {
  if (config.auto_normalize) return normalize_columns(x);
  for (std::size_t j = 0; j < x.cols(); ++j) {
    const double nrm = norm2(x.col(j));
    if (!(std::abs(nrm - 1.0) <= config.unit_norm_tol)) {
      throw Error(ErrorCode::ColumnNormViolation,
                  "column " + std::to_string(j) + " has norm " + std::to_string(nrm) +
                      " (expected 1; pass auto-normalize to rescale)",
                  j);
    }
  }
  return x;
}

double max_abs_difference(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace

SelectionReport run_selection(const DenseMatrix& input, double epsilon, const SelectorConfig& config) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorCode::BadArguments, "epsilon must be in (0,1)");
  }
  const DenseMatrix x = checked_input(input, config);

  SelectionReport report;
  report.n = x.rows();
  report.cert_tol = config.cert_tol;
  report.auto_normalized = config.auto_normalize;
  report.params = compute_budget(epsilon, x.cols(), operator_norm_sq(x, config.eig));
  const BudgetParams& params = report.params;

  SelectionState state(x.cols());
  std::size_t since_refresh = 0;
  for (std::size_t r = 0; r < params.R; ++r) {
    const Candidate pick = select_next(state, x);
    report.scores.push_back({r, pick.index, pick.score, pick.mean_score, pick.candidates});

    auto column = x.col(pick.index);
    std::vector<std::size_t> next_indices = state.selected();
    next_indices.push_back(pick.index);
    const DenseMatrix y_next = select_columns(x, next_indices);

    SymEig next{{}, DenseMatrix(1, 1)};
    if (r == 0) {
      next = sym_eig(gram(y_next), config.eig);
    } else {
      const SymEig& current = state.spectral();
      const Couplings couplings = compute_couplings(current, state.selected_matrix(x), column);
      SecularOptions secular_options;
      secular_options.want_vectors = config.path == SpectralPath::secular;
      ArrowheadSpectrum arrow = append_column_spectrum(current.values, couplings, secular_options);

      InterlacingCheck check;
      check.step = r + 1;
      bool dense = config.path == SpectralPath::dense;
      if (!dense) {
        DenseMatrix lifted = lift_to_column_basis(current.vectors, *arrow.vectors_in_eigenbasis);
        ++since_refresh;
        if (since_refresh >= config.refresh_interval ||
            orthonormality_error(lifted) > config.drift_tol) {
          dense = true;
        } else {
          next = SymEig{arrow.roots, std::move(lifted)};
        }
      }
      if (dense) {
        next = sym_eig(gram(y_next), config.eig);
        check.secular_deviation = max_abs_difference(arrow.roots, next.values);
        since_refresh = 0;
      }
      check.pass = check_interlacing(current.values, next.values);
      report.interlacing_checks.push_back(check);
    }

    state.append(pick.index, next);
    const std::vector<double>& values = state.spectral().values;
    const std::size_t size = r + 1;
    for (std::size_t k = 1; k <= size; ++k) {
      const EnvelopeBounds b = envelope_bounds(k, size, params.delta);
      const double lambda = values[k - 1];
      const bool pass = lambda >= b.lower - config.envelope_tol && lambda <= b.upper + config.envelope_tol;
      report.envelope_checks.push_back({k, size, lambda, b.lower, b.upper, pass});
    }
    report.trajectory.push_back(values);
  }

  report.selected = state.selected();
  const SymEig final_spectrum = sym_eig(gram(select_columns(x, report.selected)), config.eig);
  report.lambda_max = final_spectrum.values.front();
  report.lambda_min = final_spectrum.values.back();

  const bool envelopes_ok = std::ranges::all_of(report.envelope_checks,
                                                [](const EnvelopeCheck& c) { return c.pass; });
  report.certified = envelopes_ok && report.lambda_min >= 1.0 - epsilon - config.cert_tol &&
                     report.lambda_max <= 1.0 + epsilon + config.cert_tol;
  return report;
}

std::vector<EnvelopeViolation> verify_envelopes(const SelectionReport& report, double tol) {
  std::vector<EnvelopeViolation> out;
  for (std::size_t idx = 0; idx < report.trajectory.size(); ++idx) {
    const std::size_t r = idx + 1;
    const auto& values = report.trajectory[idx];
    for (std::size_t k = 1; k <= values.size(); ++k) {
      const EnvelopeBounds b = envelope_bounds(k, r, report.params.delta);
      const double lambda = values[k - 1];
      if (lambda < b.lower - tol || lambda > b.upper + tol) {
        out.push_back({k, r, lambda, b.lower, b.upper});
      }
    }
  }
  return out;
}

std::vector<AverageBoundViolation> verify_average_bound(const SelectionReport& report,
                                                        const DenseMatrix& x, double tol) {
  std::vector<AverageBoundViolation> out;
  const std::size_t p = x.cols();
  for (std::size_t idx : report.selected) {
    if (idx >= p) {
      throw Error(ErrorCode::Mismatch, "selected index " + std::to_string(idx) + " out of range", idx);
    }
  }
  if (report.selected.size() < 2) return out;
  const double opnorm_sq = operator_norm_sq(x);
  for (std::size_t r = 1; r < report.selected.size(); ++r) {
    const std::span<const std::size_t> prefix(report.selected.data(), r);
    const DenseMatrix y = select_columns(x, prefix);
    const SymEig spectral = sym_eig(gram(y));
    const double score = score_column(x.col(report.selected[r]), spectral, y);
    const double bound = spectral.values.front() * opnorm_sq * harmonic_number(r) /
                         static_cast<double>(p - r);
    if (score > bound + tol) out.push_back({r, score, bound});
  }
  return out;
}

}  // namespace colsel
