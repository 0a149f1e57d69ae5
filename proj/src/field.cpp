#include "qdesign/field.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace qdesign {

namespace {

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

// Remainder of `num` modulo the monic `den`, coefficients mod p.
std::vector<std::uint32_t> poly_mod(std::vector<std::uint32_t> num,
                                    std::span<const std::uint32_t> den,
                                    std::uint32_t p) {
  const std::size_t d = den.size() - 1;
  for (std::size_t i = num.size(); i-- > d;) {
    const std::uint32_t c = num[i];
    if (c == 0) continue;
    for (std::size_t k = 0; k <= d; ++k) {
      const std::uint32_t sub = static_cast<std::uint32_t>((std::uint64_t{c} * den[k]) % p);
      num[i - d + k] = (num[i - d + k] + p - sub) % p;
    }
  }
  num.resize(std::min(num.size(), d));
  return num;
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::uint64_t ipow(std::uint64_t base, std::uint32_t exp) {
  std::uint64_t r = 1;
  while (exp--) r *= base;
  return r;
}

bool is_irreducible(std::span<const std::uint32_t> monic, std::uint32_t p) {
  const std::size_t m = monic.size() - 1;
  if (m == 0) return false;
  const std::vector<std::uint32_t> poly(monic.begin(), monic.end());
  std::vector<std::uint32_t> divisor;
  for (std::size_t d = 1; d <= m / 2; ++d) {
    const std::uint64_t count = ipow(p, static_cast<std::uint32_t>(d));
    divisor.assign(d + 1, 0);
    divisor[d] = 1;
    for (std::uint64_t n = 0; n < count; ++n) {
      std::uint64_t x = n;
      for (std::size_t i = 0; i < d; ++i, x /= p) divisor[i] = static_cast<std::uint32_t>(x % p);
      const auto rem = poly_mod(poly, divisor, p);
      if (std::all_of(rem.begin(), rem.end(), [](std::uint32_t c) { return c == 0; })) return false;
    }
  }
  return true;
}

std::vector<std::uint32_t> smallest_irreducible(std::uint32_t p, std::uint32_t m) {
  const std::uint64_t count = ipow(p, m);
  std::vector<std::uint32_t> poly(m + 1, 0);
  poly[m] = 1;
  for (std::uint64_t n = 0; n < count; ++n) {
    std::uint64_t x = n;
    for (std::uint32_t i = 0; i < m; ++i, x /= p) poly[i] = static_cast<std::uint32_t>(x % p);
    if (is_irreducible(poly, p)) return poly;
  }
  throw std::logic_error("no irreducible polynomial found");
}

FieldCtx::FieldCtx(std::uint32_t p, std::uint32_t m,
                   std::optional<std::vector<std::uint32_t>> modulus,
                   FieldOptions options)
    : p_(p), m_(m) {
  if (!is_prime(p)) throw std::invalid_argument("characteristic " + std::to_string(p) + " is not prime");
  if (m < 1) throw std::invalid_argument("extension degree must be at least 1");
  std::uint64_t q = 1;
  for (std::uint32_t i = 0; i < m; ++i) {
    q *= p;
    if (q > kMaxFieldOrder)
      throw std::invalid_argument("field order exceeds 2^20");
  }
  q_ = static_cast<std::uint32_t>(q);

  if (modulus) {
    if (modulus->size() != m + 1 || modulus->back() != 1)
      throw std::invalid_argument("modulus must be monic of degree m");
    for (auto c : *modulus)
      if (c >= p) throw std::invalid_argument("modulus coefficient out of range");
    if (!is_irreducible(*modulus, p)) throw std::invalid_argument("modulus is reducible");
    modulus_ = std::move(*modulus);
  } else {
    modulus_ = smallest_irreducible(p, m);
  }

  if (p_ != 2) {
    neg_table_.resize(q_);
    for (std::uint32_t a = 0; a < q_; ++a) {
      std::uint32_t r = 0, place = 1, x = a;
      for (std::uint32_t i = 0; i < m_; ++i, x /= p_, place *= p_) r += ((p_ - x % p_) % p_) * place;
      neg_table_[a] = r;
    }
  }

  // Generator: smallest element whose order is exactly q-1.
  if (q_ > 2) {
    const auto factors = prime_factors(q_ - 1);
    for (std::uint32_t g = 2; g < q_; ++g) {
      bool ok = true;
      for (auto f : factors) {
        std::uint64_t e = (q_ - 1) / f, r = 1, base = g;
        while (e) {
          if (e & 1) r = mul_reference(static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(base));
          base = mul_reference(static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base));
          e >>= 1;
        }
        if (r == 1) { ok = false; break; }
      }
      if (ok) { generator_ = g; break; }
    }
  }

  if (options.use_tables && q_ <= (1u << 16)) build_tables();
}

void FieldCtx::build_tables() {
  log_.assign(q_, 0);
  antilog_.assign(2 * std::size_t{q_ - 1}, 0);
  std::uint32_t x = 1;
  for (std::uint32_t i = 0; i < q_ - 1; ++i) {
    antilog_[i] = antilog_[i + q_ - 1] = x;
    log_[x] = i;
    x = mul_reference(x, generator_);
  }
  if (p_ != 2 && std::uint64_t{q_} * q_ <= (std::uint64_t{1} << 23)) {
    add_table_.resize(std::size_t{q_} * q_);
    for (std::uint32_t a = 0; a < q_; ++a)
      for (std::uint32_t b = 0; b < q_; ++b)
        add_table_[std::size_t{a} * q_ + b] = static_cast<std::uint16_t>(add_digits(a, b));
  } else if (p_ != 2) {
    zech_.resize(q_ - 1);
    for (std::uint32_t i = 0; i < q_ - 1; ++i) {
      const std::uint32_t s = add_digits(1, antilog_[i]);
      zech_[i] = s == 0 ? kNoLog : log_[s];
    }
  }
}

std::uint32_t FieldCtx::add_digits(std::uint32_t a, std::uint32_t b) const {
  std::uint32_t r = 0, place = 1;
  for (std::uint32_t i = 0; i < m_; ++i, place *= p_) {
    std::uint32_t s = a % p_ + b % p_;
    if (s >= p_) s -= p_;
    r += s * place;
    a /= p_;
    b /= p_;
  }
  return r;
}

std::uint32_t FieldCtx::mul_reference(std::uint32_t a, std::uint32_t b) const {
  if (a == 0 || b == 0) return 0;
  std::vector<std::uint32_t> da(m_), db(m_), prod(2 * m_ - 1, 0);
  for (std::uint32_t i = 0; i < m_; ++i, a /= p_, b /= p_) {
    da[i] = a % p_;
    db[i] = b % p_;
  }
  for (std::uint32_t i = 0; i < m_; ++i) {
    if (da[i] == 0) continue;
    for (std::uint32_t j = 0; j < m_; ++j)
      prod[i + j] = static_cast<std::uint32_t>((prod[i + j] + std::uint64_t{da[i]} * db[j]) % p_);
  }
  const auto rem = poly_mod(std::move(prod), modulus_, p_);
  std::uint32_t r = 0, place = 1;
  for (std::uint32_t i = 0; i < rem.size(); ++i, place *= p_) r += rem[i] * place;
  return r;
}

FieldElement FieldCtx::element(std::uint64_t index) const {
  if (index >= q_)
    throw std::out_of_range("element index " + std::to_string(index) + " outside GF(" + std::to_string(q_) + ")");
  return {static_cast<std::uint32_t>(index)};
}

FieldElement FieldCtx::inv(FieldElement a) const {
  if (a.index == 0) throw std::domain_error("inverse of zero");
  if (!log_.empty()) return {antilog_[(q_ - 1 - log_[a.index]) % (q_ - 1)]};
  return pow(a, q_ - 2);
}

FieldElement FieldCtx::pow(FieldElement a, std::uint64_t e) const {
  if (a.index == 0) return e == 0 ? one() : zero();
  e %= (q_ - 1);
  if (!log_.empty()) return {antilog_[(std::uint64_t{log_[a.index]} * e) % (q_ - 1)]};
  std::uint32_t r = 1, base = a.index;
  while (e) {
    if (e & 1) r = mul_reference(r, base);
    base = mul_reference(base, base);
    e >>= 1;
  }
  return {r};
}

FieldElement FieldCtx::frobenius(FieldElement a, std::uint64_t l) const {
  return pow(a, ipow(p_, static_cast<std::uint32_t>(l % m_)));
}

bool FieldCtx::is_qr(FieldElement a) const {
  if (p_ == 2) throw std::domain_error("quadratic residues are only classified for odd q");
  if (a.index == 0) throw std::domain_error("zero is neither a residue nor a non-residue");
  return pow(a, (q_ - 1) / 2) == one();
}

std::vector<std::uint32_t> FieldCtx::digits(FieldElement a) const {
  std::vector<std::uint32_t> d(m_);
  std::uint32_t x = a.index;
  for (std::uint32_t i = 0; i < m_; ++i, x /= p_) d[i] = x % p_;
  return d;
}

FieldElement FieldCtx::from_digits(std::span<const std::uint32_t> digits) const {
  if (digits.size() != m_) throw std::invalid_argument("digit vector length must equal m");
  std::uint32_t r = 0, place = 1;
  for (std::uint32_t i = 0; i < m_; ++i, place *= p_) {
    if (digits[i] >= p_) throw std::invalid_argument("digit out of range");
    r += digits[i] * place;
  }
  return {r};
}

std::uint64_t gcd_delta(const FieldCtx& ctx, std::uint32_t l) {
  return std::gcd(ipow(ctx.characteristic(), l) + 1, std::uint64_t{ctx.order()} - 1);
}

}  // namespace qdesign
