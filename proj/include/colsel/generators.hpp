#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "colsel/linalg.hpp"

namespace colsel {

/// xoshiro256** 1.0 (Blackman & Vigna), seeded through splitmix64.
/// Output is identical on every platform for a given seed.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed);

  std::uint64_t next();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Uniform on (0, 1], never zero.
  double uniform_open_zero();

  /// Uniform integer in [0, bound) by rejection, no modulo bias.
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal via Box-Muller. Each call draws two uniforms and
  /// returns the cosine branch; the sine branch is cached and returned next.
  double normal();

 private:
  std::array<std::uint64_t, 4> s_{};
  std::optional<double> cached_normal_;
};

std::uint64_t splitmix64(std::uint64_t& state);

enum class Family {
  identity,
  random_sphere,
  union_orthobases,
  duplicated_columns,
  near_parallel_pair,
  spiked,
};

std::string_view to_string(Family family);
/// Throws BadSpec on an unknown name.
Family parse_family(std::string_view name);

struct GeneratorSpec {
  Family family = Family::random_sphere;
  std::size_t n = 1;
  std::size_t p = 1;
  std::uint64_t seed = 0;
  // near_parallel_pair: angle between columns 0 and 1, radians.
  double theta = 0.0;
  // spiked: weight of the shared direction added before normalization.
  double spike = 1.0;
  // duplicated_columns: number of distinct columns, cycled across p.
  // 1 gives the rank-one "p copies of one column" design.
  std::size_t distinct = 1;
};

/**
 * Builds the matrix described by `spec`. Every family returns unit-norm
 * columns and is a pure function of the spec.
 *
 * - identity: columns e_0..e_{p-1}; needs p <= n.
 * - random_sphere: Gaussian entries, columns normalized.
 * - union_orthobases: p/n orthonormal bases of R^n side by side, the first
 *   one canonical; needs p divisible by n.
 * - duplicated_columns: `distinct` random unit columns repeated cyclically.
 * - near_parallel_pair: columns 0 and 1 at angle theta, the rest random;
 *   needs p >= 2 and n >= 2.
 * - spiked: normalize(g_j + spike * u) for a shared random unit u.
 *
 * Throws BadSpec when a family constraint is violated.
 */
DenseMatrix generate(const GeneratorSpec& spec);

}  // namespace colsel
