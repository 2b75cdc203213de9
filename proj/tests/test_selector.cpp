#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "colsel/error.hpp"
#include "colsel/generators.hpp"
#include "colsel/secular.hpp"
#include "colsel/selector.hpp"
#include "oracles.hpp"

using namespace colsel;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::BadArguments;
}

DenseMatrix family(Family f, std::size_t n, std::size_t p, std::uint64_t seed, double theta = 0.0,
                   std::size_t distinct = 1) {
  GeneratorSpec spec;
  spec.family = f;
  spec.n = n;
  spec.p = p;
  spec.seed = seed;
  spec.theta = theta;
  spec.distinct = distinct;
  return generate(spec);
}

double rhs_of(double eps, double p, double opnorm) { return eps * eps * p / (4.0 * (1.0 + eps) * opnorm); }

}  // namespace

TEST_CASE("compute_budget") {
  SUBCASE("worked example eps=0.5, p=1000, ||X||^2=10") {
    const BudgetParams b = compute_budget(0.5, 1000, 10.0);
    // 3 ln 3 = 3.2958 <= 4.1667 < 4 ln 4 = 5.5452
    CHECK(rhs_of(0.5, 1000, 10) == doctest::Approx(4.1666666666666667));
    CHECK(b.R == 3);
    CHECK(b.delta == doctest::Approx(std::sqrt(1.5 * 10.0 * std::log(3.0) / 1000.0)).epsilon(1e-15));
    // Frozen from an independent scalar evaluation (Python math.sqrt/log).
    CHECK(std::abs(b.delta - 0.12837127533066595) <= 1e-6);
  }
  SUBCASE("below 2 ln 2 the budget is one column and delta vanishes") {
    const BudgetParams b = compute_budget(0.3, 10, 5.0);
    CHECK(rhs_of(0.3, 10, 5.0) < 2.0 * std::log(2.0));
    CHECK(b.R == 1);
    CHECK(b.delta == 0.0);
  }
  SUBCASE("p/2 cap") {
    // ||X||^2 = 1 with p = 4: RHS = 0.9^2*4/(4*1.9) = 0.426, still R = 1 <= 2.
    CHECK(compute_budget(0.9, 4, 1.0).R == 1);
    CHECK(compute_budget(0.99, 2, 1.0).R == 1);
  }
  SUBCASE("errors") {
    CHECK(code_of([] { compute_budget(0.5, 1, 1.0); }) == ErrorCode::BudgetTooSmall);
    CHECK(code_of([] { compute_budget(0.0, 10, 1.0); }) == ErrorCode::BadArguments);
    CHECK(code_of([] { compute_budget(1.0, 10, 1.0); }) == ErrorCode::BadArguments);
    CHECK(code_of([] { compute_budget(0.5, 10, 0.5); }) == ErrorCode::BadArguments);
  }
  SUBCASE("invariants and maximality over a grid") {
    for (double eps : {0.05, 0.2, 0.5, 0.75, 0.95}) {
      for (std::size_t p : {2u, 3u, 10u, 57u, 200u, 1000u, 20000u}) {
        for (double opnorm : {1.0, 1.5, 4.0, 9.0, 50.0}) {
          const BudgetParams b = compute_budget(eps, p, opnorm);
          const double rhs = rhs_of(eps, double(p), opnorm);
          const double R = double(b.R);
          CHECK(b.R >= 1);
          CHECK(b.R <= p / 2);
          CHECK(R * std::log(R) <= rhs + 1e-12);
          CHECK(2.0 * b.delta * std::sqrt(R) <= eps + 1e-12);
          CHECK(b.delta == doctest::Approx(std::sqrt((1 + eps) * opnorm * std::log(R) / double(p))));
          if (b.R + 1 <= p / 2) CHECK((R + 1) * std::log(R + 1) > rhs);
        }
      }
    }
  }
  SUBCASE("monotone in eps, p and ||X||^2") {
    std::size_t previous = 0;
    for (double eps = 0.01; eps < 1.0; eps += 0.01) {
      const std::size_t R = compute_budget(eps, 5000, 3.0).R;
      CHECK(R >= previous);
      previous = R;
    }
    previous = 0;
    for (std::size_t p = 2; p < 3000; p += 37) {
      const std::size_t R = compute_budget(0.6, p, 2.0).R;
      CHECK(R >= previous);
      previous = R;
    }
    previous = SIZE_MAX;
    for (double opnorm = 1.0; opnorm < 100.0; opnorm *= 1.3) {
      const std::size_t R = compute_budget(0.6, 4000, opnorm).R;
      CHECK(R <= previous);
      previous = R;
    }
  }
}

TEST_CASE("envelope_bounds") {
  SUBCASE("k = r = 1") {
    const EnvelopeBounds b = envelope_bounds(1, 1, 0.3);
    CHECK(b.lower == doctest::Approx(0.7));
    CHECK(b.upper == doctest::Approx(1.3));
  }
  SUBCASE("delta = 0 collapses to 1") {
    for (std::size_t r = 1; r < 20; ++r)
      for (std::size_t k = 1; k <= r; ++k) {
        const EnvelopeBounds b = envelope_bounds(k, r, 0.0);
        CHECK(b.lower == 1.0);
        CHECK(b.upper == 1.0);
      }
  }
  SUBCASE("k = 1, r = 4, delta = 0.1") {
    const EnvelopeBounds b = envelope_bounds(1, 4, 0.1);
    CHECK(b.lower == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(b.upper == doctest::Approx(1.35).epsilon(1e-15));
  }
  SUBCASE("index order") {
    CHECK(code_of([] { envelope_bounds(3, 2, 0.1); }) == ErrorCode::IndexOrder);
    CHECK(code_of([] { envelope_bounds(0, 2, 0.1); }) == ErrorCode::IndexOrder);
  }
  SUBCASE("bounds nest from (k, r) to (k + 1, r + 1)") {
    for (std::size_t r = 1; r <= 300; ++r)
      for (std::size_t k = 1; k <= r; ++k) {
        const EnvelopeBounds a = envelope_bounds(k, r, 0.17);
        const EnvelopeBounds b = envelope_bounds(k + 1, r + 1, 0.17);
        CHECK(a.lower >= b.lower - 1e-14);
        CHECK(a.upper <= b.upper + 1e-14);
      }
  }
}

TEST_CASE("harmonic_number") {
  CHECK(harmonic_number(0) == 0.0);
  CHECK(harmonic_number(1) == 1.0);
  CHECK(harmonic_number(4) == doctest::Approx(25.0 / 12.0));
  for (std::size_t r = 1; r < 1000; r += 17) CHECK(harmonic_number(r) <= 1.0 + std::log(double(r)) + 1e-15);
}

TEST_CASE("score_column") {
  SUBCASE("orthogonal candidate scores zero") {
    const DenseMatrix x = DenseMatrix::identity(5);
    const std::vector<std::size_t> chosen{0, 2};
    const DenseMatrix y = select_columns(x, chosen);
    const SymEig s = sym_eig(gram(y));
    CHECK(score_column(x.col(3), s, y) == 0.0);
  }
  SUBCASE("r = 1 is the squared inner product") {
    const DenseMatrix x = oracle::random_unit_columns(7, 5, 2);
    const std::vector<std::size_t> chosen{1};
    const DenseMatrix y = select_columns(x, chosen);
    const SymEig s = sym_eig(gram(y));
    for (std::size_t j = 0; j < 5; ++j) {
      const double c = dot(x.col(1), x.col(j));
      CHECK(score_column(x.col(j), s, y) == doctest::Approx(c * c).epsilon(1e-14));
    }
  }
  SUBCASE("r = 4, seed 21, against the direct formula") {
    const DenseMatrix x = oracle::random_unit_columns(10, 9, 21);
    const std::vector<std::size_t> chosen{0, 1, 2, 3};
    const DenseMatrix y = select_columns(x, chosen);
    const SymEig s = sym_eig(gram(y));
    for (std::size_t j = 4; j < 9; ++j) {
      // v_k^t (Y^t x), weight 1/k
      const std::vector<double> b = transpose_times(y, x.col(j));
      double expected = 0.0;
      for (std::size_t k = 0; k < 4; ++k) {
        double c = 0.0;
        for (std::size_t i = 0; i < 4; ++i) c += s.vectors(i, k) * b[i];
        expected += c * c / double(k + 1);
      }
      CHECK(std::abs(score_column(x.col(j), s, y) - expected) <= 1e-12);
      CHECK(score_column(x.col(j), s, y) >= 0.0);
    }
  }
}

TEST_CASE("SelectionState and select_next") {
  SUBCASE("first pick is the smallest index") {
    const DenseMatrix x = oracle::random_unit_columns(4, 6, 1);
    SelectionState state(6);
    const Candidate c = select_next(state, x);
    CHECK(c.index == 0);
    CHECK(c.score == 0.0);
    CHECK(c.candidates == 6);
    CHECK_THROWS_AS(state.spectral(), Error);
  }
  SUBCASE("identity input is taken in order") {
    const DenseMatrix x = DenseMatrix::identity(6);
    SelectionState state(6);
    for (std::size_t step = 0; step < 6; ++step) {
      const Candidate c = select_next(state, x);
      CHECK(c.index == step);
      CHECK(c.score == 0.0);
      std::vector<std::size_t> idx = state.selected();
      idx.push_back(c.index);
      state.append(c.index, sym_eig(gram(select_columns(x, idx))));
      // selected and remaining partition {0..p-1}
      CHECK(state.selected().size() + state.remaining().size() == 6);
      for (std::size_t s : state.selected())
        CHECK_FALSE(std::binary_search(state.remaining().begin(), state.remaining().end(), s));
    }
    CHECK(code_of([&] { select_next(state, x); }) == ErrorCode::Exhausted);
  }
  SUBCASE("append rejects taken indices and wrong spectra") {
    const DenseMatrix x = DenseMatrix::identity(3);
    SelectionState state(3);
    state.append(1, sym_eig(gram(select_columns(x, std::vector<std::size_t>{1}))));
    CHECK(code_of([&] { state.append(1, sym_eig(DenseMatrix::identity(2))); }) == ErrorCode::BadArguments);
    CHECK(code_of([&] { state.append(0, sym_eig(DenseMatrix::identity(3))); }) == ErrorCode::BadArguments);
  }
  SUBCASE("a duplicate of a chosen column is passed over") {
    // Every column appears twice; the copy of a chosen column scores >= 1/r.
    const DenseMatrix x = family(Family::duplicated_columns, 30, 40, 8, 0.0, 20);
    SelectionState state(40);
    for (std::size_t step = 0; step < 10; ++step) {
      const Candidate c = select_next(state, x);
      CHECK(c.score <= c.mean_score + 1e-15);
      for (std::size_t s : state.selected()) CHECK(c.index % 20 != s % 20);
      std::vector<std::size_t> idx = state.selected();
      idx.push_back(c.index);
      state.append(c.index, sym_eig(gram(select_columns(x, idx))));
    }
  }
  SUBCASE("argmin breaks ties by index") {
    // Columns 2 and 3 are the same vector, both orthogonal to column 0.
    DenseMatrix x(3, 4);
    x(0, 0) = 1.0;
    x(0, 1) = 1.0;
    x(1, 2) = 1.0;
    x(1, 3) = 1.0;
    SelectionState state(4);
    state.append(0, sym_eig(DenseMatrix::identity(1)));
    CHECK(select_next(state, x).index == 2);
  }
}

TEST_CASE("run_selection") {
  SUBCASE("identity 64x64, eps = 0.5") {
    const SelectionReport rep = run_selection(DenseMatrix::identity(64), 0.5);
    CHECK(rep.params.opnorm_sq == doctest::Approx(1.0));
    CHECK(rep.selected.size() == rep.params.R);
    for (const auto& spectrum : rep.trajectory)
      for (double v : spectrum) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(rep.certified);
    CHECK(verify_envelopes(rep).empty());
    CHECK(verify_average_bound(rep, DenseMatrix::identity(64)).empty());
  }
  SUBCASE("identity 1000x1000 (R = 15)") {
    const SelectionReport rep = run_selection(DenseMatrix::identity(1000), 0.5);
    CHECK(rep.params.R == 15);
    for (std::size_t r = 0; r < rep.params.R; ++r) CHECK(rep.selected[r] == r);
    CHECK(rep.certified);
  }
  SUBCASE("random 50x200, seed 42, eps = 0.75") {
    const DenseMatrix x = oracle::random_unit_columns(50, 200, 42);
    const SelectionReport rep = run_selection(x, 0.75);
    CHECK(rep.certified);
    CHECK(rep.selected.size() == rep.params.R);
    CHECK(verify_envelopes(rep).empty());
    CHECK(verify_average_bound(rep, x).empty());
    for (const auto& c : rep.interlacing_checks) {
      CHECK(c.pass);
      CHECK(c.secular_deviation <= 1e-10);
    }
    const auto ref = oracle::bisection_eigenvalues(gram(select_columns(x, rep.selected)));
    CHECK(std::abs(rep.lambda_max - ref.front()) <= 1e-10);
    CHECK(std::abs(rep.lambda_min - ref.back()) <= 1e-10);
  }
  SUBCASE("larger budget: random 200x500, seed 5, eps = 0.75") {
    const DenseMatrix x = oracle::random_unit_columns(200, 500, 5);
    const SelectionReport rep = run_selection(x, 0.75);
    CHECK(rep.params.R >= 4);
    CHECK(rep.certified);
    CHECK(verify_envelopes(rep).empty());
    CHECK(verify_average_bound(rep, x).empty());
    for (std::size_t r = 1; r <= rep.trajectory.size(); ++r) {
      double sum = 0.0;
      for (double v : rep.trajectory[r - 1]) sum += v;
      CHECK(std::abs(sum - double(r)) <= 1e-10 * double(r));
    }
    for (const auto& s : rep.scores) CHECK(s.chosen_score <= s.mean_score);
  }
  SUBCASE("rank one: p copies of one column") {
    const DenseMatrix x = family(Family::duplicated_columns, 10, 30, 3);
    const SelectionReport rep = run_selection(x, 0.5);
    CHECK(rep.params.opnorm_sq == doctest::Approx(30.0).epsilon(1e-12));
    CHECK(rep.params.R == 1);
    REQUIRE(rep.trajectory.size() == 1);
    CHECK(rep.trajectory[0].size() == 1);
    CHECK(rep.trajectory[0][0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(rep.certified);
  }
  SUBCASE("near-parallel pair with theta = 0 is never both selected") {
    const DenseMatrix x = family(Family::near_parallel_pair, 50, 200, 4, 0.0);
    const SelectionReport rep = run_selection(x, 0.75);
    REQUIRE(rep.params.R >= 2);
    const bool both = std::count(rep.selected.begin(), rep.selected.end(), 0u) &&
                      std::count(rep.selected.begin(), rep.selected.end(), 1u);
    CHECK_FALSE(both);
    CHECK(rep.certified);
  }
  SUBCASE("unit-norm precondition") {
    DenseMatrix x = oracle::random_unit_columns(6, 10, 2);
    for (double& v : x.col(3)) v *= 2.0;
    try {
      run_selection(x, 0.5);
      FAIL("expected ColumnNormViolation");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ColumnNormViolation);
      CHECK(e.index() == std::optional<std::size_t>(3));
    }
    SelectorConfig config;
    config.auto_normalize = true;
    const SelectionReport rep = run_selection(x, 0.5, config);
    CHECK(rep.auto_normalized);
    CHECK(rep.certified);
  }
  SUBCASE("argument errors") {
    const DenseMatrix x = DenseMatrix::identity(4);
    CHECK(code_of([&] { run_selection(x, 1.5); }) == ErrorCode::BadArguments);
    CHECK(code_of([&] { run_selection(DenseMatrix::identity(1), 0.5); }) == ErrorCode::BudgetTooSmall);
  }
  SUBCASE("secular fast path matches the dense path") {
    for (std::uint64_t seed : {5u, 6u}) {
      const DenseMatrix x = oracle::random_unit_columns(200, 500, seed);
      SelectorConfig fast;
      fast.path = SpectralPath::secular;
      fast.refresh_interval = 4;
      const SelectionReport a = run_selection(x, 0.75);
      const SelectionReport b = run_selection(x, 0.75, fast);
      CHECK(a.selected == b.selected);
      REQUIRE(a.trajectory.size() == b.trajectory.size());
      for (std::size_t r = 0; r < a.trajectory.size(); ++r)
        for (std::size_t k = 0; k <= r; ++k)
          CHECK(std::abs(a.trajectory[r][k] - b.trajectory[r][k]) <= 1e-10);
      CHECK(b.certified);
    }
  }
  SUBCASE("secular fast path on orthonormal input (all poles clustered at 1)") {
    SelectorConfig fast;
    fast.path = SpectralPath::secular;
    const SelectionReport rep = run_selection(DenseMatrix::identity(1000), 0.5, fast);
    CHECK(rep.params.R == 15);
    CHECK(rep.certified);
    for (const auto& spectrum : rep.trajectory)
      for (double v : spectrum) CHECK(v == 1.0);
  }
  SUBCASE("deterministic") {
    const DenseMatrix x = oracle::random_unit_columns(50, 200, 42);
    const SelectionReport a = run_selection(x, 0.75);
    const SelectionReport b = run_selection(x, 0.75);
    CHECK(a.selected == b.selected);
    CHECK(a.trajectory == b.trajectory);
    CHECK(a.lambda_min == b.lambda_min);
  }
}

TEST_CASE("verify_envelopes flags a corrupted trajectory") {
  const SelectionReport clean = run_selection(oracle::random_unit_columns(200, 500, 5), 0.75);
  REQUIRE(clean.trajectory.size() >= 2);
  SelectionReport bad = clean;
  bad.trajectory[1][0] = 2.0;
  const auto violations = verify_envelopes(bad);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].k == 1);
  CHECK(violations[0].r == 2);
  CHECK(violations[0].lambda == 2.0);
}

TEST_CASE("average-score bound on a forced duplicate pick") {
  // p = 2, both columns identical; pretend the second pick happened.
  const DenseMatrix x = family(Family::duplicated_columns, 5, 2, 9);
  SelectionReport rep;
  rep.selected = {0, 1};
  const double opnorm = operator_norm_sq(x);
  const double lhs = score_column(x.col(1), sym_eig(gram(select_columns(x, std::vector<std::size_t>{0}))),
                                  select_columns(x, std::vector<std::size_t>{0}));
  const double rhs = 1.0 * opnorm * harmonic_number(1) / (2.0 - 1.0);
  CHECK(lhs == doctest::Approx(1.0));
  CHECK(opnorm == doctest::Approx(2.0));
  CHECK(rhs == doctest::Approx(2.0));
  // ||X||^2 = 2 >= p - 1 = 1, so the bound holds even for this worst pick.
  CHECK(verify_average_bound(rep, x).empty());

  SelectionReport out_of_range;
  out_of_range.selected = {0, 5};
  CHECK(code_of([&] { verify_average_bound(out_of_range, x); }) == ErrorCode::Mismatch);
}
