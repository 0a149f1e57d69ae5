#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qdesign/designs.hpp"
#include "qdesign/field.hpp"

namespace qdesign {

// f(x) = x^(p^l + 1) over GF(p^m), 1 <= l < m.
struct FamilySpec {
  std::uint32_t p = 0;
  std::uint32_t m = 0;
  std::uint32_t l = 0;

  // Validates p prime, m >= 1, 1 <= l < m and q <= 2^20.
  static FamilySpec make(std::uint32_t p, std::uint32_t m, std::uint32_t l);

  std::uint64_t q() const { return ipow(p, m); }
  // gcd(l, m) == 1; the closed forms below require it.
  bool coprime() const;
  std::uint64_t exponent() const { return ipow(p, l) + 1; }

  friend bool operator==(const FamilySpec&, const FamilySpec&) = default;
};

std::string to_string(const FamilySpec& s);

FieldCtx make_field(const FamilySpec& spec, FieldOptions options = {});

// x -> x^(p^l + 1)
PointMap family_map(const FieldCtx& ctx, const FamilySpec& spec);

// { x^(p^l+1) + x : x in GF(q) }
Block image_set(const FieldCtx& ctx, const FamilySpec& spec);

// Closed-form |image_set|, three cases on the parity of m and p. Throws
// std::domain_error unless gcd(l, m) == 1. Cross-checks itself against
// (2q + (-1)^m)/3 for p = 2 and q - (pq-1)/(2(p+1)) for odd p, odd m.
std::uint64_t predicted_k(const FamilySpec& spec);

// Closed-form number of c != 0 for which x^(p^l+1) + x + c has no root.
// Throws std::domain_error unless gcd(l, m) == 1.
std::uint64_t bluher_predicted(const FamilySpec& spec);

struct BluherReport {
  std::optional<std::uint64_t> predicted;  // absent when gcd(l, m) != 1
  std::uint64_t brute_forced = 0;
  bool agrees = false;                     // predicted == brute_forced
};

// Counts rootless c by marking the image of x -> x^(p^l+1) + x once.
BluherReport bluher_bruteforce(const FieldCtx& ctx, const FamilySpec& spec);

// Per-c root search, O(q^2).
std::uint64_t bluher_count_naive(const FieldCtx& ctx, const FamilySpec& spec);

enum class RangeFlag { theorem1, theorem2, conjecture1, conjecture2, negative_control, unclassified };

std::string to_string(RangeFlag f);

struct CasePrediction {
  std::uint64_t v = 0;
  std::optional<std::uint64_t> k;       // whenever gcd(l, m) == 1
  std::optional<std::uint64_t> lambda;  // theorem and conjecture ranges only
  std::optional<std::uint64_t> b;       // theorem and conjecture ranges only
  RangeFlag range = RangeFlag::unclassified;
  // Parameter ranges where the point-count argument forces a trivial
  // stabilizer of the base block (4l+4 < m for p = 2, 4l+2 < m for
  // p = 3 mod 4 with m odd; gcd(l, m) = 1 in both).
  bool trivial_stabilizer_expected = false;
};

CasePrediction classify_case(const FamilySpec& spec);

enum class CheckStatus { pass, fail, finding };

std::string to_string(CheckStatus s);

struct CheckOptions {
  unsigned threads = 1;
  bool force = false;  // allow exact mode above kExactIncrementBudget
  // Used instead of exact mode when the increment budget would be exceeded.
  std::optional<SampledMode> fallback;
  std::uint64_t increment_budget = kExactIncrementBudget;
  BuildOptions build;
};

struct CaseReport {
  FamilySpec spec;
  CasePrediction prediction;
  std::uint64_t image_size = 0;
  DesignReport design;
  std::uint64_t increments = 0;
  std::map<std::uint64_t, std::uint64_t> multiplicities;
  std::uint64_t zero_slope_pairs = 0;
  CheckStatus status = CheckStatus::finding;
  std::string note;
};

// Builds the design on blocks of size |B_l|, verifies it and compares with
// the classification. Theorem-range mismatches and designs in the negative
// control range are failures; conjecture-range outcomes are findings.
CaseReport check_case(const FamilySpec& spec, const VerifyMode& mode, const CheckOptions& options = {});

// As check_case but with an explicit block size.
CaseReport check_case(const FamilySpec& spec, std::uint64_t k, const VerifyMode& mode,
                      const CheckOptions& options = {});

}  // namespace qdesign
