#include "colsel/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "colsel/error.hpp"

namespace colsel {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Xoshiro256::Xoshiro256(std::uint64_t seed) {
  for (auto& word : s_) word = splitmix64(seed);
}

namespace {
constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

std::uint64_t Xoshiro256::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Xoshiro256::uniform_open_zero() {
  return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
}

std::uint64_t Xoshiro256::below(std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorCode::BadArguments, "below: bound must be positive");
  const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % bound;
  std::uint64_t x = next();
  while (x >= limit) x = next();
  return x % bound;
}

double Xoshiro256::normal() {
  if (cached_normal_) {
    const double z = *cached_normal_;
    cached_normal_.reset();
    return z;
  }
  const double u1 = uniform_open_zero();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_normal_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

std::string_view to_string(Family family) {
  switch (family) {
    case Family::identity: return "identity";
    case Family::random_sphere: return "random_sphere";
    case Family::union_orthobases: return "union_orthobases";
    case Family::duplicated_columns: return "duplicated_columns";
    case Family::near_parallel_pair: return "near_parallel_pair";
    case Family::spiked: return "spiked";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::identity, Family::random_sphere, Family::union_orthobases,
                   Family::duplicated_columns, Family::near_parallel_pair, Family::spiked}) {
    if (to_string(f) == name) return f;
  }
  throw Error(ErrorCode::BadSpec, "unknown generator family '" + std::string(name) + "'");
}

namespace {

void fill_unit_gaussian(Xoshiro256& rng, std::span<double> column) {
  for (;;) {
    for (double& v : column) v = rng.normal();
    const double nrm = norm2(column);
    if (nrm > 1e-10) {
      for (double& v : column) v /= nrm;
      return;
    }
  }
}

void make_unit(std::span<double> column) {
  const double nrm = norm2(column);
  for (double& v : column) v /= nrm;
}

// Two passes of modified Gram-Schmidt against the previous columns, then
// normalization. Redraws if the Gaussian draw was numerically dependent.
void orthonormal_basis(Xoshiro256& rng, DenseMatrix& out, std::size_t first, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    auto c = out.col(first + j);
    for (;;) {
      fill_unit_gaussian(rng, c);
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 0; i < j; ++i) {
          auto q = out.col(first + i);
          const double proj = dot(q, c);
          for (std::size_t k = 0; k < n; ++k) c[k] -= proj * q[k];
        }
      }
      if (norm2(c) > 1e-6) break;
    }
    make_unit(c);
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::BadSpec, message);
}

}  // namespace

DenseMatrix generate(const GeneratorSpec& spec) {
  require(spec.n >= 1 && spec.p >= 1, "n and p must be positive");
  const std::size_t n = spec.n;
  const std::size_t p = spec.p;
  Xoshiro256 rng(spec.seed);
  DenseMatrix x(n, p);

  switch (spec.family) {
    case Family::identity:
      require(p <= n, "identity requires p <= n");
      for (std::size_t j = 0; j < p; ++j) x(j, j) = 1.0;
      break;

    case Family::random_sphere:
      for (std::size_t j = 0; j < p; ++j) fill_unit_gaussian(rng, x.col(j));
      break;

    case Family::union_orthobases:
      require(p % n == 0, "union_orthobases requires p divisible by n");
      for (std::size_t j = 0; j < n; ++j) x(j, j) = 1.0;
      for (std::size_t b = 1; b < p / n; ++b) orthonormal_basis(rng, x, b * n, n);
      break;

    case Family::duplicated_columns: {
      require(spec.distinct >= 1 && spec.distinct <= p,
              "duplicated_columns requires 1 <= distinct <= p");
      for (std::size_t j = 0; j < spec.distinct; ++j) fill_unit_gaussian(rng, x.col(j));
      for (std::size_t j = spec.distinct; j < p; ++j) {
        std::ranges::copy(x.col(j % spec.distinct), x.col(j).begin());
      }
      break;
    }

    case Family::near_parallel_pair: {
      require(p >= 2, "near_parallel_pair requires p >= 2");
      require(n >= 2, "near_parallel_pair requires n >= 2");
      require(std::isfinite(spec.theta), "theta must be finite");
      auto u = x.col(0);
      fill_unit_gaussian(rng, u);
      std::vector<double> w(n);
      for (;;) {
        fill_unit_gaussian(rng, w);
        const double proj = dot(u, w);
        for (std::size_t k = 0; k < n; ++k) w[k] -= proj * u[k];
        if (norm2(w) > 1e-6) break;
      }
      make_unit(w);
      auto second = x.col(1);
      const double c = std::cos(spec.theta);
      const double s = std::sin(spec.theta);
      if (s == 0.0) {
        // Bit-identical copy (up to sign) so theta = 0 really is a duplicate.
        for (std::size_t k = 0; k < n; ++k) second[k] = c * u[k];
      } else {
        for (std::size_t k = 0; k < n; ++k) second[k] = c * u[k] + s * w[k];
        make_unit(second);
      }
      for (std::size_t j = 2; j < p; ++j) fill_unit_gaussian(rng, x.col(j));
      break;
    }

    case Family::spiked: {
      require(std::isfinite(spec.spike) && spec.spike >= 0.0, "spike must be finite and >= 0");
      std::vector<double> u(n);
      fill_unit_gaussian(rng, u);
      for (std::size_t j = 0; j < p; ++j) {
        auto c = x.col(j);
        for (;;) {
          for (std::size_t k = 0; k < n; ++k) c[k] = rng.normal() / std::sqrt(double(n)) + spec.spike * u[k];
          if (norm2(c) > 1e-10) break;
        }
        make_unit(c);
      }
      break;
    }
  }
  return x;
}

}  // namespace colsel
