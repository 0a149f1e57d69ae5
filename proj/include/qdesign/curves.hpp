#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qdesign/field.hpp"
#include "qdesign/quadratic_family.hpp"

namespace qdesign {

// x^(p^l+1) + x - alpha (y^(p^l+1) + y) - beta = 0, alpha != 0.
struct CurveSpec {
  FamilySpec family;
  FieldElement alpha;
  FieldElement beta;
};

std::uint64_t genus_plucker(std::uint64_t degree);

// Applies to the double loop only.
inline constexpr std::uint64_t kCurveEnumerationBudget = 100'000'000;  // q^2

// GF(q)-rational affine points, via a frequency table of g(x) = x^(p^l+1) + x.
std::uint64_t affine_count(const FieldCtx& ctx, const CurveSpec& curve);
// Double loop over GF(q)^2.
std::uint64_t affine_count_naive(const FieldCtx& ctx, const CurveSpec& curve);
// Points at infinity: #{x : x^(p^l+1) = alpha}.
std::uint64_t points_at_infinity(const FieldCtx& ctx, const CurveSpec& curve);
std::uint64_t projective_count(const FieldCtx& ctx, const CurveSpec& curve);

enum class BoundKind {
  none,
  hasse_weil,     // beta != 0: nonsingular curve, affine interval with delta
  beta_zero,      // beta = 0, alpha not in {0,1}: q+1-delta <= N <= q+1
  uniform,        // any (alpha, beta) != (1, 0)
  set_invariant,  // alpha B_l + beta == B_l: N >= 2q - |B_l|
};

std::string to_string(BoundKind k);

struct CurveBound {
  BoundKind kind = BoundKind::none;
  std::optional<std::int64_t> low;
  std::optional<std::int64_t> high;
  bool holds = true;
};

struct CurveReport {
  std::uint64_t n = 0;       // affine
  std::uint64_t n_proj = 0;  // projective
  std::uint64_t delta = 0;
  std::uint64_t genus = 0;
  // Integer Hasse-Weil half-width: g*floor(2 sqrt q) for non-square q,
  // 2g sqrt(q) for square q.
  std::uint64_t width = 0;
  std::vector<CurveBound> bounds;  // every applicable bound
  // hasse_weil for beta != 0, beta_zero for beta = 0; kind none for (1, 0).
  CurveBound primary;
  // beta = 0, alpha not in {0,1}: the projective closure has exactly q+1 points.
  std::optional<bool> projective_is_q_plus_1;
  bool within_bounds = true;
};

CurveReport certify_bounds(const FieldCtx& ctx, const CurveSpec& curve);

std::uint64_t isqrt(std::uint64_t n);

}  // namespace qdesign
