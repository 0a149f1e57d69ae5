#include "qdesign/quadratic_family.hpp"

#include <numeric>

#include "qdesign/errors.hpp"

namespace qdesign {

FamilySpec FamilySpec::make(std::uint32_t p, std::uint32_t m, std::uint32_t l) {
  if (!is_prime(p)) throw std::invalid_argument("p = " + std::to_string(p) + " is not prime");
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  if (l < 1 || l >= m) throw std::invalid_argument("l must satisfy 1 <= l < m");
  std::uint64_t q = 1;
  for (std::uint32_t i = 0; i < m; ++i) {
    q *= p;
    if (q > kMaxFieldOrder) throw std::invalid_argument("q = p^m exceeds 2^20");
  }
  return FamilySpec{p, m, l};
}

bool FamilySpec::coprime() const { return std::gcd(l, m) == 1; }

std::string to_string(const FamilySpec& s) {
  return "(p=" + std::to_string(s.p) + ", m=" + std::to_string(s.m) + ", l=" + std::to_string(s.l) + ")";
}

FieldCtx make_field(const FamilySpec& spec, FieldOptions options) {
  return FieldCtx(spec.p, spec.m, std::nullopt, options);
}

PointMap family_map(const FieldCtx& ctx, const FamilySpec& spec) {
  const std::uint64_t e = spec.exponent();
  PointMap f(ctx.order());
  for (std::uint32_t x = 0; x < ctx.order(); ++x) f[x] = ctx.pow({x}, e).index;
  return f;
}

Block image_set(const FieldCtx& ctx, const FamilySpec& spec) {
  return block_of(ctx, family_map(ctx, spec), ctx.one(), ctx.zero());
}

namespace {

void require_coprime(const FamilySpec& spec) {
  if (!spec.coprime())
    throw std::domain_error("closed form requires gcd(l, m) = 1, got " + to_string(spec));
}

}  // namespace

std::uint64_t bluher_predicted(const FamilySpec& spec) {
  require_coprime(spec);
  const std::uint64_t p = spec.p;
  const std::uint64_t top = ipow(p, spec.m + 1);
  const std::uint64_t den = 2 * (p + 1);
  // For m odd the parity of p^l is the parity of p.
  std::uint64_t num;
  if (spec.m % 2 == 0)
    num = top - p;
  else if (p % 2 == 1)
    num = top - 1;
  else
    num = top + p;
  if (num % den != 0) throw std::logic_error("rootless count is not an integer for " + to_string(spec));
  return num / den;
}

std::uint64_t predicted_k(const FamilySpec& spec) {
  const std::uint64_t q = spec.q();
  const std::uint64_t k = q - bluher_predicted(spec);
  const std::uint64_t p = spec.p;
  if (p == 2) {
    const std::uint64_t alt = spec.m % 2 == 0 ? (2 * q + 1) / 3 : (2 * q - 1) / 3;
    if (alt != k) throw std::logic_error("k disagrees with (2q + (-1)^m)/3 for " + to_string(spec));
  } else if (spec.m % 2 == 1) {
    const std::uint64_t alt = q - (p * q - 1) / (2 * (p + 1));
    if ((p * q - 1) % (2 * (p + 1)) != 0 || alt != k)
      throw std::logic_error("k disagrees with q - (pq-1)/(2(p+1)) for " + to_string(spec));
  }
  return k;
}

BluherReport bluher_bruteforce(const FieldCtx& ctx, const FamilySpec& spec) {
  const std::uint32_t q = ctx.order();
  const auto f = family_map(ctx, spec);
  std::vector<char> attained(q, 0);
  for (std::uint32_t x = 0; x < q; ++x) attained[ctx.add_raw(f[x], x)] = 1;
  BluherReport r;
  // c is rootless iff -c is not a value of x^(p^l+1) + x.
  for (std::uint32_t c = 1; c < q; ++c)
    if (!attained[ctx.neg_raw(c)]) ++r.brute_forced;
  if (spec.coprime()) {
    r.predicted = bluher_predicted(spec);
    r.agrees = *r.predicted == r.brute_forced;
  }
  return r;
}

std::uint64_t bluher_count_naive(const FieldCtx& ctx, const FamilySpec& spec) {
  const std::uint32_t q = ctx.order();
  const std::uint64_t e = spec.exponent();
  std::uint64_t count = 0;
  for (std::uint32_t c = 1; c < q; ++c) {
    bool root = false;
    for (std::uint32_t x = 0; x < q && !root; ++x) {
      const FieldElement v = ctx.add(ctx.add(ctx.pow({x}, e), {x}), {c});
      root = v == ctx.zero();
    }
    if (!root) ++count;
  }
  return count;
}

std::string to_string(RangeFlag f) {
  switch (f) {
    case RangeFlag::theorem1: return "theorem1";
    case RangeFlag::theorem2: return "theorem2";
    case RangeFlag::conjecture1: return "conjecture1";
    case RangeFlag::conjecture2: return "conjecture2";
    case RangeFlag::negative_control: return "negative_control";
    case RangeFlag::unclassified: return "unclassified";
  }
  return "unclassified";
}

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::finding: return "finding";
  }
  return "finding";
}

CasePrediction classify_case(const FamilySpec& spec) {
  CasePrediction c;
  const std::uint64_t q = spec.q();
  const std::uint64_t l = spec.l, m = spec.m, p = spec.p;
  c.v = q;
  if (spec.coprime()) c.k = predicted_k(spec);

  const bool p_two = p == 2 && m >= 3 && spec.coprime();
  const bool p_three_mod_four = p % 4 == 3 && m >= 3 && m % 2 == 1 && spec.coprime();
  // l < m/4 - 1  <=>  4l + 4 < m;  l < (m-2)/4  <=>  4l + 2 < m.
  if (p_two) {
    c.range = 4 * l + 4 < m ? RangeFlag::theorem1 : RangeFlag::conjecture1;
    c.trivial_stabilizer_expected = 4 * l + 4 < m;
    c.lambda = *c.k * (*c.k - 1);
    c.b = q * (q - 1);
  } else if (p_three_mod_four) {
    c.range = 4 * l + 2 < m ? RangeFlag::theorem2 : RangeFlag::conjecture2;
    c.trivial_stabilizer_expected = 4 * l + 2 < m;
    c.lambda = *c.k * (*c.k - 1) / 2;
    c.b = q * (q - 1) / 2;
  } else if (q % 2 == 1 && q % 4 == 1) {
    c.range = RangeFlag::negative_control;
  }
  return c;
}

CaseReport check_case(const FamilySpec& spec, const VerifyMode& mode, const CheckOptions& options) {
  const FieldCtx ctx = make_field(spec);
  return check_case(spec, image_set(ctx, spec).size(), mode, options);
}

CaseReport check_case(const FamilySpec& spec, std::uint64_t k, const VerifyMode& mode,
                      const CheckOptions& options) {
  CaseReport r;
  r.spec = spec;
  r.prediction = classify_case(spec);

  const FieldCtx ctx = make_field(spec);
  r.image_size = image_set(ctx, spec).size();
  const auto f = family_map(ctx, spec);
  const IncidenceStructure s = build_structure(ctx, f, k, options.build);
  r.increments = exact_increments(s, 2);
  VerifyMode effective = mode;
  if (std::holds_alternative<ExactMode>(mode) && r.increments > options.increment_budget && !options.force) {
    if (!options.fallback)
      throw BudgetError("exact verification needs " + std::to_string(r.increments) +
                        " increments, above the budget of " + std::to_string(options.increment_budget));
    effective = *options.fallback;
  }
  r.design = verify_t_design(s, 2, effective, options.threads);
  r.multiplicities = s.multiplicity_histogram();
  r.zero_slope_pairs = s.zero_slope_pairs;

  const auto& pred = r.prediction;
  const auto& d = r.design;
  const bool on_base = k == r.image_size;
  const bool matches = d.is_design && pred.k && d.k == pred.k && d.lambda == pred.lambda && d.b == pred.b;
  const std::string expected =
      pred.k && pred.lambda ? "2-(" + std::to_string(pred.v) + "," + std::to_string(*pred.k) + "," +
                                  std::to_string(*pred.lambda) + ") with b=" + std::to_string(*pred.b)
                            : "";

  switch (pred.range) {
    case RangeFlag::theorem1:
    case RangeFlag::theorem2:
      if (!on_base) {
        r.status = CheckStatus::finding;
        r.note = "block size differs from |B_l|; no prediction applies";
      } else {
        r.status = matches ? CheckStatus::pass : CheckStatus::fail;
        r.note = (matches ? "confirmed " : "MISMATCH: predicted ") + expected;
      }
      break;
    case RangeFlag::conjecture1:
    case RangeFlag::conjecture2:
      r.status = CheckStatus::finding;
      r.note = "expected per " + to_string(pred.range) + ": " + expected + "; " + (on_base && matches ? "confirmed" : "not confirmed");
      break;
    case RangeFlag::negative_control:
      r.status = d.is_design ? CheckStatus::fail : CheckStatus::pass;
      r.note = d.is_design ? "negative control unexpectedly forms a 2-design" : "not a 2-design, as expected";
      break;
    case RangeFlag::unclassified:
      r.status = CheckStatus::finding;
      r.note = "outside every classified range";
      break;
  }
  if (std::holds_alternative<SampledMode>(effective) && d.is_design) r.note += " (sampled: not falsified)";
  if (r.zero_slope_pairs > 0)
    r.note += "; " + std::to_string(r.zero_slope_pairs) + " pairs with b = 0 passed the size filter";
  return r;
}

}  // namespace qdesign
