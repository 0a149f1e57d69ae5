#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace qdesign {

// An element of GF(p^m). The base-p digits (d0, ..., d_{m-1}) of `index`
// are the coefficients of d0 + d1 x + ... + d_{m-1} x^{m-1} modulo the
// field modulus. Index 0 is zero and index 1 is one.
struct FieldElement {
  std::uint32_t index = 0;

  friend constexpr auto operator<=>(FieldElement, FieldElement) = default;
};

struct FieldOptions {
  // log/antilog (and, for small odd q, addition) tables. Results are
  // identical either way; only speed differs.
  bool use_tables = true;
};

// Largest field the toolkit will construct.
inline constexpr std::uint64_t kMaxFieldOrder = std::uint64_t{1} << 20;

class FieldCtx {
 public:
  // Builds GF(p^m). Without an explicit modulus the lexicographically
  // smallest monic irreducible of degree m is used, comparing (a0..a_{m-1})
  // as a base-p integer with a0 least significant.
  FieldCtx(std::uint32_t p, std::uint32_t m,
           std::optional<std::vector<std::uint32_t>> modulus = std::nullopt,
           FieldOptions options = {});

  std::uint32_t characteristic() const { return p_; }
  std::uint32_t degree() const { return m_; }
  std::uint32_t order() const { return q_; }
  // Coefficients a0..a_m, a_m == 1.
  const std::vector<std::uint32_t>& modulus() const { return modulus_; }
  bool has_tables() const { return !log_.empty(); }

  FieldElement element(std::uint64_t index) const;
  FieldElement zero() const { return {0}; }
  FieldElement one() const { return {1}; }

  FieldElement add(FieldElement a, FieldElement b) const { return {add_raw(a.index, b.index)}; }
  FieldElement sub(FieldElement a, FieldElement b) const { return add(a, neg(b)); }
  FieldElement neg(FieldElement a) const { return {neg_raw(a.index)}; }
  FieldElement mul(FieldElement a, FieldElement b) const { return {mul_raw(a.index, b.index)}; }
  // Throws std::domain_error on zero.
  FieldElement inv(FieldElement a) const;
  FieldElement div(FieldElement a, FieldElement b) const { return mul(a, inv(b)); }
  FieldElement pow(FieldElement a, std::uint64_t e) const;

  // a^(p^l).
  FieldElement frobenius(FieldElement a, std::uint64_t l) const;

  // Euler's criterion. Only defined for odd q and nonzero a.
  bool is_qr(FieldElement a) const;

  // A generator of the multiplicative group (smallest index with order q-1).
  FieldElement primitive_element() const { return {generator_}; }

  std::vector<std::uint32_t> digits(FieldElement a) const;
  FieldElement from_digits(std::span<const std::uint32_t> digits) const;

  // Raw index operations for inner loops; operands must already be valid.
  std::uint32_t add_raw(std::uint32_t a, std::uint32_t b) const {
    if (p_ == 2) return a ^ b;
    if (!add_table_.empty()) return add_table_[std::size_t{a} * q_ + b];
    if (!zech_.empty()) return add_zech(a, b);
    return add_digits(a, b);
  }
  std::uint32_t neg_raw(std::uint32_t a) const {
    if (p_ == 2) return a;
    return neg_table_[a];
  }
  std::uint32_t mul_raw(std::uint32_t a, std::uint32_t b) const {
    if (a == 0 || b == 0) return 0;
    if (!log_.empty()) return antilog_[log_[a] + log_[b]];
    return mul_reference(a, b);
  }

  // Schoolbook multiply-and-reduce; never touches the tables.
  std::uint32_t mul_reference(std::uint32_t a, std::uint32_t b) const;

 private:
  std::uint32_t add_digits(std::uint32_t a, std::uint32_t b) const;
  // a + b = a (1 + b/a), with zech_[i] = log(1 + g^i).
  std::uint32_t add_zech(std::uint32_t a, std::uint32_t b) const {
    if (a == 0) return b;
    if (b == 0) return a;
    const std::uint32_t n = q_ - 1;
    const std::uint32_t d = log_[b] >= log_[a] ? log_[b] - log_[a] : log_[b] + n - log_[a];
    const std::uint32_t z = zech_[d];
    return z == kNoLog ? 0 : antilog_[log_[a] + z];
  }
  void build_tables();

  static constexpr std::uint32_t kNoLog = UINT32_MAX;

  std::uint32_t p_;
  std::uint32_t m_;
  std::uint32_t q_;
  std::vector<std::uint32_t> modulus_;
  std::vector<std::uint32_t> neg_table_;
  std::vector<std::uint16_t> add_table_;
  std::vector<std::uint32_t> zech_;  // odd p when the q^2 add table is too large
  std::vector<std::uint32_t> log_;
  std::vector<std::uint32_t> antilog_;  // 2(q-1) entries
  std::uint32_t generator_ = 1;
};

bool is_prime(std::uint64_t n);

std::uint64_t ipow(std::uint64_t base, std::uint32_t exp);

// Trial division by every monic polynomial of degree 1..floor(m/2).
bool is_irreducible(std::span<const std::uint32_t> monic, std::uint32_t p);

std::vector<std::uint32_t> smallest_irreducible(std::uint32_t p, std::uint32_t m);

// gcd(p^l + 1, q - 1).
std::uint64_t gcd_delta(const FieldCtx& ctx, std::uint32_t l);

}  // namespace qdesign
