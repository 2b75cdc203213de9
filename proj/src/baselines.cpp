#include "colsel/baselines.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "colsel/error.hpp"
#include "colsel/generators.hpp"

namespace colsel {

std::string_view to_string(BaselineMethod method) {
  switch (method) {
    case BaselineMethod::uniform_random: return "uniform_random";
    case BaselineMethod::first_R: return "first_R";
  }
  return "unknown";
}

BaselineResult evaluate_subset(const DenseMatrix& x, std::vector<std::size_t> selected,
                               BaselineMethod method) {
  const SymEig eig = sym_eig(gram(select_columns(x, selected)));
  BaselineResult out;
  out.method = method;
  out.selected = std::move(selected);
  out.lambda_max = eig.values.front();
  out.lambda_min = eig.values.back();
  out.condition_number = out.lambda_min > 0.0 ? out.lambda_max / out.lambda_min
                                              : std::numeric_limits<double>::infinity();
  return out;
}

std::vector<BaselineResult> random_subset_select(const DenseMatrix& x, std::size_t R,
                                                 std::uint64_t seed, std::size_t trials) {
  const std::size_t p = x.cols();
  if (R < 1 || R > p) {
    throw Error(ErrorCode::BadArguments, "random baseline: need 1 <= R <= p");
  }
  if (trials < 1) throw Error(ErrorCode::BadArguments, "random baseline: need trials >= 1");

  std::vector<BaselineResult> results;
  results.reserve(trials);
  std::vector<std::size_t> pool(p);
  for (std::size_t t = 0; t < trials; ++t) {
    std::uint64_t mix = seed ^ (0x632be59bd9b4e019ULL * (t + 1));
    Xoshiro256 rng(splitmix64(mix));
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    // Partial Fisher-Yates: the first R slots are a uniform R-subset.
    for (std::size_t i = 0; i < R; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(p - i));
      std::swap(pool[i], pool[j]);
    }
    results.push_back(evaluate_subset(
        x, std::vector<std::size_t>(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(R)),
        BaselineMethod::uniform_random));
  }
  return results;
}

BaselineResult first_r_select(const DenseMatrix& x, std::size_t R) {
  if (R < 1 || R > x.cols()) {
    throw Error(ErrorCode::BadArguments, "first_R baseline: need 1 <= R <= p");
  }
  std::vector<std::size_t> selected(R);
  std::iota(selected.begin(), selected.end(), std::size_t{0});
  return evaluate_subset(x, std::move(selected), BaselineMethod::first_R);
}

ConditionSummary summarize_condition(const std::vector<BaselineResult>& results) {
  if (results.empty()) throw Error(ErrorCode::BadArguments, "summarize_condition: no results");
  std::vector<double> c;
  c.reserve(results.size());
  for (const auto& r : results) c.push_back(r.condition_number);
  std::sort(c.begin(), c.end());
  const std::size_t mid = c.size() / 2;
  const double median = c.size() % 2 == 1 ? c[mid] : 0.5 * (c[mid - 1] + c[mid]);
  return {c.front(), median, c.back()};
}

}  // namespace colsel
