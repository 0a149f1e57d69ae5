#include "qdesign/curves.hpp"

#include <algorithm>

#include "qdesign/errors.hpp"

namespace qdesign {

std::uint64_t genus_plucker(std::uint64_t degree) {
  if (degree < 1) throw std::invalid_argument("curve degree must be at least 1");
  return (degree - 1) * (degree - 2) / 2;
}

std::uint64_t isqrt(std::uint64_t n) {
  std::uint64_t r = 0;
  for (std::uint64_t bit = std::uint64_t{1} << 31; bit; bit >>= 1)
    if ((r + bit) * (r + bit) <= n) r += bit;
  return r;
}

std::string to_string(BoundKind k) {
  switch (k) {
    case BoundKind::none: return "none";
    case BoundKind::hasse_weil: return "hasse_weil";
    case BoundKind::beta_zero: return "beta_zero";
    case BoundKind::uniform: return "uniform";
    case BoundKind::set_invariant: return "set_invariant";
  }
  return "none";
}

namespace {

void check_curve(const FieldCtx& ctx, const CurveSpec& curve) {
  if (ctx.characteristic() != curve.family.p || ctx.degree() != curve.family.m)
    throw std::invalid_argument("curve family does not match the field");
  ctx.element(curve.alpha.index);
  ctx.element(curve.beta.index);
  if (curve.alpha.index == 0) throw std::invalid_argument("alpha must be nonzero");
}

std::vector<std::uint32_t> g_values(const FieldCtx& ctx, const FamilySpec& spec) {
  const auto f = family_map(ctx, spec);
  std::vector<std::uint32_t> g(ctx.order());
  for (std::uint32_t x = 0; x < ctx.order(); ++x) g[x] = ctx.add_raw(f[x], x);
  return g;
}

}  // namespace

std::uint64_t affine_count(const FieldCtx& ctx, const CurveSpec& curve) {
  check_curve(ctx, curve);
  const auto g = g_values(ctx, curve.family);
  std::vector<std::uint32_t> freq(ctx.order(), 0);
  for (auto s : g) ++freq[s];
  // N = sum_y #{x : g(x) = alpha g(y) + beta}
  std::uint64_t n = 0;
  for (auto s : g) n += freq[ctx.add_raw(ctx.mul_raw(curve.alpha.index, s), curve.beta.index)];
  return n;
}

std::uint64_t affine_count_naive(const FieldCtx& ctx, const CurveSpec& curve) {
  check_curve(ctx, curve);
  const std::uint64_t q = ctx.order();
  if (q * q > kCurveEnumerationBudget) throw BudgetError("naive curve enumeration exceeds the q^2 budget");
  const std::uint64_t e = curve.family.exponent();
  std::uint64_t n = 0;
  for (std::uint32_t x = 0; x < ctx.order(); ++x)
    for (std::uint32_t y = 0; y < ctx.order(); ++y) {
      const FieldElement lhs = ctx.add(ctx.pow({x}, e), {x});
      const FieldElement rhs = ctx.add(ctx.mul(curve.alpha, ctx.add(ctx.pow({y}, e), {y})), curve.beta);
      if (ctx.sub(lhs, rhs) == ctx.zero()) ++n;
    }
  return n;
}

std::uint64_t points_at_infinity(const FieldCtx& ctx, const CurveSpec& curve) {
  check_curve(ctx, curve);
  const std::uint64_t e = curve.family.exponent();
  std::uint64_t s = 0;
  for (std::uint32_t x = 0; x < ctx.order(); ++x)
    if (ctx.pow({x}, e) == curve.alpha) ++s;
  return s;
}

std::uint64_t projective_count(const FieldCtx& ctx, const CurveSpec& curve) {
  return affine_count(ctx, curve) + points_at_infinity(ctx, curve);
}

CurveReport certify_bounds(const FieldCtx& ctx, const CurveSpec& curve) {
  CurveReport r;
  r.n = affine_count(ctx, curve);
  r.n_proj = r.n + points_at_infinity(ctx, curve);
  const auto& fam = curve.family;
  const std::int64_t q = ctx.order();
  const std::int64_t pl = static_cast<std::int64_t>(ipow(fam.p, fam.l));
  r.delta = gcd_delta(ctx, fam.l);
  r.genus = genus_plucker(fam.exponent());
  const std::uint64_t root = isqrt(static_cast<std::uint64_t>(q));
  r.width = root * root == static_cast<std::uint64_t>(q) ? 2 * r.genus * root
                                                          : r.genus * isqrt(4 * static_cast<std::uint64_t>(q));
  const std::int64_t w = static_cast<std::int64_t>(r.width);
  const std::int64_t n = static_cast<std::int64_t>(r.n);
  const std::int64_t delta = static_cast<std::int64_t>(r.delta);

  const bool alpha_one = curve.alpha == ctx.one();
  const bool beta_zero = curve.beta == ctx.zero();
  auto add = [&](BoundKind kind, std::optional<std::int64_t> lo, std::optional<std::int64_t> hi) {
    CurveBound b{kind, lo, hi, true};
    b.holds = (!lo || n >= *lo) && (!hi || n <= *hi);
    r.bounds.push_back(b);
    r.within_bounds = r.within_bounds && b.holds;
  };

  if (!beta_zero) add(BoundKind::hasse_weil, (q + 1 - delta) - w, (q + 1) + w);
  if (beta_zero && !alpha_one) {
    add(BoundKind::beta_zero, q + 1 - delta, q + 1);
    r.projective_is_q_plus_1 = r.n_proj == static_cast<std::uint64_t>(q + 1);
    r.within_bounds = r.within_bounds && *r.projective_is_q_plus_1;
  }
  if (!(alpha_one && beta_zero)) {
    add(BoundKind::uniform, (q - pl) - w, (q + 1) + w);
    // Lower bound when alpha B_l + beta == B_l.
    const Block base = image_set(ctx, fam);
    bool invariant = true;
    for (Point x : base.members())
      if (!base.contains(ctx.add_raw(ctx.mul_raw(curve.alpha.index, x), curve.beta.index))) {
        invariant = false;
        break;
      }
    if (invariant) add(BoundKind::set_invariant, 2 * q - static_cast<std::int64_t>(base.size()), std::nullopt);
  }

  if (!r.bounds.empty()) {
    r.primary = r.bounds.front();
  } else {
    r.primary = CurveBound{BoundKind::none, std::nullopt, std::nullopt, true};
  }
  return r;
}

}  // namespace qdesign
