#include "colsel/secular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "colsel/error.hpp"

namespace colsel {

Couplings compute_couplings(const SymEig& spectral, const DenseMatrix& selected,
                            std::span<const double> y) {
  if (spectral.values.size() != selected.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "compute_couplings: spectrum does not match selection");
  }
  const std::vector<double> projections = transpose_times(selected, y);
  Couplings c;
  c.values.resize(spectral.values.size());
  for (std::size_t k = 0; k < c.values.size(); ++k) {
    c.values[k] = dot(spectral.vectors.col(k), projections);
  }
  return c;
}

double parseval_defect(const Couplings& couplings, const DenseMatrix& selected,
                       std::span<const double> y) {
  const std::vector<double> projections = transpose_times(selected, y);
  const double lhs = dot(couplings.values, couplings.values);
  const double rhs = dot(projections, projections);
  return std::abs(lhs - rhs);
}

double secular_eval(double lambda, std::span<const double> eigenvalues, const Couplings& couplings) {
  if (eigenvalues.size() != couplings.values.size()) {
    throw Error(ErrorCode::DimensionMismatch, "secular_eval: eigenvalues and couplings differ in length");
  }
  double q = 1.0 - lambda;
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
    const double c = couplings.values[k];
    if (c == 0.0) continue;
    const double gap = lambda - eigenvalues[k];
    if (std::abs(gap) <= 1e-300) {
      throw Error(ErrorCode::PoleEvaluation, "secular_eval: lambda coincides with pole " + std::to_string(k), k);
    }
    q += c * c / gap;
  }
  return q;
}

namespace {

using SparseVector = std::vector<std::pair<std::size_t, double>>;

struct ActivePole {
  double value;
  double coupling;  // > 0
  SparseVector direction;
};

struct PassThrough {
  double value;
  SparseVector direction;
};

// Which old eigen-directions take part in the secular equation and which
// keep their eigenvalue unchanged.
struct DeflationPlan {
  std::vector<ActivePole> active;  // strictly descending values
  std::vector<PassThrough> passthrough;
};

void check_input(std::span<const double> eigenvalues, const Couplings& couplings) {
  if (eigenvalues.size() != couplings.values.size()) {
    throw Error(ErrorCode::DimensionMismatch, "eigenvalues and couplings differ in length");
  }
  for (std::size_t k = 0; k + 1 < eigenvalues.size(); ++k) {
    if (eigenvalues[k] < eigenvalues[k + 1]) {
      throw Error(ErrorCode::BadArguments, "eigenvalues must be sorted descending");
    }
  }
}

DeflationPlan make_plan(std::span<const double> eigenvalues, const Couplings& couplings,
                        const SecularOptions& options) {
  const std::size_t r = eigenvalues.size();
  DeflationPlan plan;
  if (r == 0) return plan;

  const double small = options.deflation_tol * std::max(1.0, eigenvalues.front());
  std::vector<double> c(couplings.values);
  for (double& v : c) {
    if (std::abs(v) < small) v = 0.0;
  }

  std::size_t first = 0;
  while (first < r) {
    std::size_t last = first + 1;
    while (last < r && eigenvalues[first] - eigenvalues[last] <= options.cluster_tol) ++last;
    const std::size_t size = last - first;

    double total_sq = 0.0;
    for (std::size_t k = first; k < last; ++k) total_sq += c[k] * c[k];
    const double total = std::sqrt(total_sq);

    if (total == 0.0 || total < small) {
      for (std::size_t k = first; k < last; ++k) {
        plan.passthrough.push_back({eigenvalues[k], {{k, 1.0}}});
      }
    } else if (size == 1) {
      plan.active.push_back({eigenvalues[first], total, {{first, c[first] / total}}});
    } else {
      // Rotate inside the cluster so one direction carries all the coupling:
      // a Householder reflector whose first column is w = c / ||c||.
      std::vector<double> w(size);
      for (std::size_t t = 0; t < size; ++t) w[t] = c[first + t] / total;
      const double sign = w[0] > 0.0 ? 1.0 : -1.0;
      std::vector<double> v(size);
      for (std::size_t t = 0; t < size; ++t) v[t] = sign * w[t];
      v[0] += 1.0;
      const double vtv = dot(v, v);
      auto column = [&](std::size_t t) {
        // (I - 2 v v^t / v^t v) e_t, with the first column sign-fixed to w.
        SparseVector out;
        for (std::size_t s = 0; s < size; ++s) {
          double h = (s == t ? 1.0 : 0.0) - 2.0 * v[s] * v[t] / vtv;
          if (t == 0) h = -sign * h;
          if (h != 0.0) out.emplace_back(first + s, h);
        }
        return out;
      };
      plan.active.push_back({eigenvalues[first], total, column(0)});
      for (std::size_t t = 1; t < size; ++t) {
        plan.passthrough.push_back({eigenvalues[first + t], column(t)});
      }
    }
    first = last;
  }
  return plan;
}

// Root of the deflated secular equation stored as origin pole + offset, so
// the distance to the origin pole is available without cancellation.
struct ShiftedRoot {
  std::optional<std::size_t> origin;
  double offset;

  double value(std::span<const ActivePole> poles) const {
    return origin ? poles[*origin].value + offset : offset;
  }
};

struct SecularSolver {
  std::span<const ActivePole> poles;
  const SecularOptions& options;

  // q at origin + tau, with the pole distances formed as (d_o - d_i) + tau.
  std::pair<double, double> eval(std::size_t origin, double tau) const {
    const double o = poles[origin].value;
    double q = 1.0 - o - tau;
    double dq = -1.0;
    for (std::size_t i = 0; i < poles.size(); ++i) {
      const double gap = i == origin ? tau : (o - poles[i].value) + tau;
      const double z = poles[i].coupling;
      const double term = z / gap;
      q += z * term;
      dq -= term * term;
    }
    return {q, dq};
  }

  // Root in the open interval (lo, hi) of the shifted variable, where q is
  // known positive just above lo and negative just below hi.
  double solve(std::size_t origin, double lo, double hi) const {
    while (hi - lo > options.bisection_width) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) return mid;
      const double q = eval(origin, mid).first;
      if (q == 0.0) return mid;
      (q > 0.0 ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < options.max_newton; ++it) {
      const auto [q, dq] = eval(origin, x);
      if (q == 0.0) return x;
      (q > 0.0 ? lo : hi) = x;
      double next = x - q / dq;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      const double step = std::abs(next - x);
      x = next;
      const double scale = std::max(std::abs(x), std::numeric_limits<double>::min());
      if (step <= 4.0 * std::numeric_limits<double>::epsilon() * scale) break;
      if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * scale) break;
    }
    return x;
  }

  std::vector<ShiftedRoot> all_roots() const {
    const std::size_t m = poles.size();
    std::vector<ShiftedRoot> roots;
    roots.reserve(m + 1);
    if (m == 0) {
      roots.push_back({std::nullopt, 1.0});
      return roots;
    }
    double mass = 0.0;
    for (const auto& pole : poles) mass += pole.coupling * pole.coupling;

    // Above the largest pole.
    {
      double hi = std::max(1.0 - poles[0].value, 0.0) + mass;
      int grow = 0;
      while (!(hi > 0.0) || eval(0, hi).first > 0.0) {
        if (++grow > options.max_expansions) {
          throw Error(ErrorCode::BracketFailure, "secular: cannot bracket the largest root");
        }
        hi = hi > 0.0 ? 2.0 * hi : std::numeric_limits<double>::min();
      }
      roots.push_back({0, solve(0, 0.0, hi)});
    }

    // Between consecutive poles.
    for (std::size_t k = 1; k < m; ++k) {
      const double upper = poles[k - 1].value;
      const double lower = poles[k].value;
      const double half = 0.5 * (upper - lower);
      if (eval(k, half).first >= 0.0) {
        roots.push_back({k - 1, solve(k - 1, -half, 0.0)});
      } else {
        roots.push_back({k, solve(k, 0.0, half)});
      }
    }

    // Below the smallest pole.
    {
      const std::size_t last = m - 1;
      double lo = -(std::max(poles[last].value - 1.0, 0.0) + mass);
      int grow = 0;
      while (!(lo < 0.0) || eval(last, lo).first < 0.0) {
        if (++grow > options.max_expansions) {
          throw Error(ErrorCode::BracketFailure, "secular: cannot bracket the smallest root");
        }
        lo = lo < 0.0 ? 2.0 * lo : -std::numeric_limits<double>::min();
      }
      roots.push_back({last, solve(last, lo, 0.0)});
    }
    return roots;
  }
};

struct Eigenpair {
  double value;
  SparseVector sparse;          // used by pass-through pairs
  std::vector<double> dense;    // used by active pairs, length r + 1
};

// Closed-form eigenvectors for the active roots. `gap(k, i)` must return
// root_k - pole_i.
template <typename GapFn>
std::vector<std::vector<double>> active_vectors(const DeflationPlan& plan, std::size_t r,
                                                std::span<const double> root_values, GapFn gap) {
  const std::size_t m = plan.active.size();
  std::vector<std::vector<double>> out;
  if (m == 0) {
    std::vector<double> e(r + 1, 0.0);
    e[r] = 1.0;
    out.push_back(std::move(e));
    return out;
  }

  // Lowner: couplings consistent with the computed roots to working
  // precision, which keeps the eigenvectors mutually orthogonal.
  std::vector<double> z(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double di = plan.active[i].value;
    double prod = std::abs(gap(i, i) * gap(i + 1, i));
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      const std::size_t k = j < i ? j : j + 1;
      prod *= gap(k, i) / (plan.active[j].value - di);
    }
    z[i] = std::sqrt(std::abs(prod));
  }

  for (std::size_t k = 0; k <= m; ++k) {
    std::vector<double> u(m);
    double nrm_sq = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double g = gap(k, i);
      if (g == 0.0) {
        throw Error(ErrorCode::DegenerateRoot,
                    "arrowhead eigenvector: root " + std::to_string(root_values[k]) +
                        " coincides with an active pole");
      }
      u[i] = z[i] / g;
      nrm_sq += u[i] * u[i];
    }
    const double inv = 1.0 / std::sqrt(nrm_sq);
    std::vector<double> v(r + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (const auto& [coord, weight] : plan.active[i].direction) v[coord] += u[i] * inv * weight;
    }
    v[r] = inv;
    out.push_back(std::move(v));
  }
  return out;
}

ArrowheadSpectrum assemble(const DeflationPlan& plan, std::size_t r,
                           std::span<const double> active_roots,
                           std::optional<std::vector<std::vector<double>>> vectors) {
  std::vector<Eigenpair> pairs;
  pairs.reserve(r + 1);
  for (std::size_t k = 0; k < active_roots.size(); ++k) {
    pairs.push_back({active_roots[k], {}, vectors ? std::move((*vectors)[k]) : std::vector<double>{}});
  }
  for (const auto& pt : plan.passthrough) pairs.push_back({pt.value, pt.direction, {}});
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Eigenpair& a, const Eigenpair& b) { return a.value > b.value; });

  ArrowheadSpectrum out;
  out.roots.reserve(r + 1);
  for (const auto& p : pairs) out.roots.push_back(p.value);
  if (vectors) {
    DenseMatrix u(r + 1, r + 1);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      auto col = u.col(k);
      if (!pairs[k].dense.empty()) {
        std::ranges::copy(pairs[k].dense, col.begin());
      } else {
        for (const auto& [coord, weight] : pairs[k].sparse) col[coord] = weight;
      }
    }
    out.vectors_in_eigenbasis = std::move(u);
  }
  return out;
}

}  // namespace

ArrowheadSpectrum append_column_spectrum(std::span<const double> eigenvalues,
                                         const Couplings& couplings,
                                         const SecularOptions& options) {
  check_input(eigenvalues, couplings);
  const std::size_t r = eigenvalues.size();
  const DeflationPlan plan = make_plan(eigenvalues, couplings, options);
  const SecularSolver solver{plan.active, options};
  const std::vector<ShiftedRoot> shifted = solver.all_roots();

  std::vector<double> values(shifted.size());
  for (std::size_t k = 0; k < shifted.size(); ++k) values[k] = shifted[k].value(plan.active);

  std::optional<std::vector<std::vector<double>>> vectors;
  if (options.want_vectors) {
    auto gap = [&](std::size_t k, std::size_t i) {
      const ShiftedRoot& root = shifted[k];
      if (root.origin == i) return root.offset;
      return (plan.active[*root.origin].value - plan.active[i].value) + root.offset;
    };
    vectors = active_vectors(plan, r, values, gap);
  }
  return assemble(plan, r, values, std::move(vectors));
}

DenseMatrix arrowhead_eigenvectors(std::span<const double> eigenvalues, const Couplings& couplings,
                                   std::span<const double> roots, const SecularOptions& options) {
  check_input(eigenvalues, couplings);
  const std::size_t r = eigenvalues.size();
  if (roots.size() != r + 1) {
    throw Error(ErrorCode::DimensionMismatch, "arrowhead_eigenvectors: expected r + 1 roots");
  }
  const DeflationPlan plan = make_plan(eigenvalues, couplings, options);

  // Pass-through eigenvalues appear verbatim among the roots; what remains
  // are the roots of the deflated secular equation.
  std::vector<double> remaining(roots.begin(), roots.end());
  for (const auto& pt : plan.passthrough) {
    auto it = std::find(remaining.begin(), remaining.end(), pt.value);
    if (it == remaining.end()) {
      throw Error(ErrorCode::BadArguments,
                  "arrowhead_eigenvectors: roots do not contain deflated eigenvalue " +
                      std::to_string(pt.value));
    }
    remaining.erase(it);
  }
  std::sort(remaining.begin(), remaining.end(), std::greater<>());

  auto gap = [&](std::size_t k, std::size_t i) { return remaining[k] - plan.active[i].value; };
  auto vectors = active_vectors(plan, r, remaining, gap);
  ArrowheadSpectrum assembled = assemble(plan, r, remaining, std::move(vectors));
  return std::move(*assembled.vectors_in_eigenbasis);
}

DenseMatrix bordered_matrix(std::span<const double> eigenvalues, const Couplings& couplings) {
  check_input(eigenvalues, couplings);
  const std::size_t r = eigenvalues.size();
  DenseMatrix b(r + 1, r + 1);
  for (std::size_t k = 0; k < r; ++k) {
    b(k, k) = eigenvalues[k];
    b(k, r) = couplings.values[k];
    b(r, k) = couplings.values[k];
  }
  b(r, r) = 1.0;
  return b;
}

DenseMatrix lift_to_column_basis(const DenseMatrix& old_vectors, const DenseMatrix& arrowhead_vectors) {
  const std::size_t r = old_vectors.rows();
  if (old_vectors.cols() != r || arrowhead_vectors.rows() != r + 1 ||
      arrowhead_vectors.cols() != r + 1) {
    throw Error(ErrorCode::DimensionMismatch, "lift_to_column_basis: incompatible shapes");
  }
  DenseMatrix out(r + 1, r + 1);
  for (std::size_t j = 0; j <= r; ++j) {
    auto u = arrowhead_vectors.col(j);
    auto dst = out.col(j);
    for (std::size_t k = 0; k < r; ++k) {
      const double w = u[k];
      if (w == 0.0) continue;
      auto v = old_vectors.col(k);
      for (std::size_t i = 0; i < r; ++i) dst[i] += v[i] * w;
    }
    dst[r] = u[r];
  }
  return out;
}

bool check_interlacing(std::span<const double> old_values, std::span<const double> new_values,
                       double tol) {
  if (new_values.size() != old_values.size() + 1) return false;
  for (std::size_t k = 0; k < old_values.size(); ++k) {
    if (new_values[k + 1] > old_values[k] + tol) return false;
    if (new_values[k] < old_values[k] - tol) return false;
  }
  return true;
}

}  // namespace colsel
