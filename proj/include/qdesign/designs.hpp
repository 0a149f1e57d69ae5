#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "qdesign/field.hpp"

namespace qdesign {

using Point = std::uint32_t;

// Values f(x) indexed by x, one entry per field element.
using PointMap = std::vector<std::uint32_t>;

// A set of points in canonical (strictly increasing) order.
class Block {
 public:
  Block() = default;
  // Sorts and removes duplicates.
  static Block from_points(std::vector<Point> points);
  // Requires strictly increasing input.
  static Block from_sorted(std::vector<Point> sorted);

  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  std::span<const Point> members() const { return members_; }
  bool contains(Point x) const;

  friend bool operator==(const Block&, const Block&) = default;
  friend auto operator<=>(const Block& a, const Block& b) { return a.members_ <=> b.members_; }

 private:
  explicit Block(std::vector<Point> members) : members_(std::move(members)) {}
  std::vector<Point> members_;
};

struct BlockHash {
  std::size_t operator()(const Block& b) const;
};

std::uint64_t hash_points(std::span<const Point> points);

// A simple incidence structure on points [0, v). Blocks are stored once in
// a flat pool; every repeat of an already present block bumps its
// multiplicity instead.
class IncidenceStructure {
 public:
  explicit IncidenceStructure(std::uint32_t v);

  // `members` must be strictly increasing and inside [0, v). Returns true
  // when the block was not present before.
  bool add(std::span<const Point> members, std::uint64_t multiplicity = 1);
  bool add(const Block& block, std::uint64_t multiplicity = 1) { return add(block.members(), multiplicity); }

  std::uint32_t v() const { return v_; }
  std::size_t block_count() const { return offsets_.size() - 1; }
  std::span<const Point> block(std::size_t i) const {
    return {pool_.data() + offsets_[i], pool_.data() + offsets_[i + 1]};
  }
  std::uint64_t multiplicity(std::size_t i) const { return multiplicity_[i]; }
  // Sum of all multiplicities.
  std::uint64_t total_multiplicity() const;
  std::optional<std::size_t> find(std::span<const Point> members) const;

  std::optional<std::size_t> uniform_block_size() const;
  std::size_t min_block_size() const;
  std::size_t max_block_size() const;
  // Multiplicity value -> number of distinct blocks with it.
  std::map<std::uint64_t, std::uint64_t> multiplicity_histogram() const;

  // Pairs (0, c) whose block passed the size filter in build_structure.
  std::uint64_t zero_slope_pairs = 0;

  void reserve(std::size_t blocks, std::size_t members);

 private:
  static constexpr std::uint32_t kNone = 0xffffffffu;
  std::optional<std::size_t> find_hashed(std::span<const Point> members, std::uint64_t h) const;

  std::uint32_t v_;
  std::vector<Point> pool_;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint64_t> multiplicity_;
  // hash -> first block id; collisions chained through next_.
  std::unordered_map<std::uint64_t, std::uint32_t> heads_;
  std::vector<std::uint32_t> next_;
};

// Multiset of block sizes over all q^2 pairs (b, c).
struct Spectrum {
  std::map<std::uint64_t, std::uint64_t> counts;
  std::uint64_t total() const;
};

// {f(x) + b x + c : x in GF(q)}.
Block block_of(const FieldCtx& ctx, const PointMap& f, FieldElement b, FieldElement c);

Spectrum value_spectrum(const FieldCtx& ctx, const PointMap& f);

// "size,count" header, rows by ascending size.
std::string spectrum_csv(const Spectrum& s);

struct BuildOptions {
  // Cap on stored block members (4 bytes each).
  std::uint64_t member_budget = 400'000'000;
};

// All distinct blocks B_(f,b,c) of size exactly k, with the number of (b, c)
// pairs producing each. Throws EmptyStructureError when no pair attains k.
IncidenceStructure build_structure(const FieldCtx& ctx, const PointMap& f, std::uint64_t k,
                                   const BuildOptions& options = {});

struct ExactMode {};
struct SampledMode {
  std::uint64_t samples;
  std::uint64_t seed;
};
using VerifyMode = std::variant<ExactMode, SampledMode>;

struct Counterexample {
  std::vector<Point> subset;
  std::uint64_t coverage;   // blocks containing `subset`
  std::uint64_t reference;  // coverage of the first t-subset examined
};

struct DesignReport {
  unsigned t = 2;
  std::uint32_t v = 0;
  std::optional<std::uint64_t> k;
  std::optional<std::uint64_t> lambda;
  std::uint64_t b = 0;
  bool is_design = false;
  std::string mode;  // "exact" or "sampled"
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> samples;
  std::optional<Counterexample> counterexample;

  // b * C(k,t) == lambda * C(v,t); vacuously true for non-designs.
  bool arithmetic_consistent() const;
};

inline constexpr std::uint64_t kExactIncrementBudget = 20'000'000'000ULL;

std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

// Total counter increments exact verification performs: sum over blocks
// of C(|B|, t).
std::uint64_t exact_increments(const IncidenceStructure& s, unsigned t);

// Exact mode counts every t-subset (t = 2 for any v the memory budget
// allows, t = 1 or 3 only for v <= 64). Sampled mode draws uniform
// t-subsets and can only falsify. Counter shards are per worker and merged
// by addition, so the report does not depend on `threads`.
DesignReport verify_t_design(const IncidenceStructure& s, unsigned t, const VerifyMode& mode,
                             unsigned threads = 1);

}  // namespace qdesign
