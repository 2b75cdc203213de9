#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "colsel/linalg.hpp"

namespace colsel {

enum class BaselineMethod { uniform_random, first_R };

std::string_view to_string(BaselineMethod method);

struct BaselineResult {
  BaselineMethod method = BaselineMethod::first_R;
  std::vector<std::size_t> selected;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  // lambda_max / lambda_min, +inf when lambda_min <= 0.
  double condition_number = 0.0;
};

/// Extremes and condition number of the Gram matrix of `x` restricted to `selected`.
BaselineResult evaluate_subset(const DenseMatrix& x, std::vector<std::size_t> selected,
                               BaselineMethod method);

/// `trials` independent draws of R distinct columns, uniformly. Trial t uses
/// its own generator seeded from (seed, t), so results do not depend on
/// the order in which trials are evaluated. Throws BadArguments unless
/// 1 <= R <= p and trials >= 1.
std::vector<BaselineResult> random_subset_select(const DenseMatrix& x, std::size_t R,
                                                 std::uint64_t seed, std::size_t trials);

/// Columns 0..R-1.
BaselineResult first_r_select(const DenseMatrix& x, std::size_t R);

struct ConditionSummary {
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

ConditionSummary summarize_condition(const std::vector<BaselineResult>& results);

}  // namespace colsel
