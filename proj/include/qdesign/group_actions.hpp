#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qdesign/designs.hpp"
#include "qdesign/field.hpp"
#include "qdesign/quadratic_family.hpp"

namespace qdesign {

// x -> u x + v with u != 0.
struct AffineMap {
  FieldElement u{1};
  FieldElement v{0};

  friend auto operator<=>(const AffineMap&, const AffineMap&) = default;
};

// full: every u != 0, order q(q-1). qr: u a nonzero square (odd q only),
// order q(q-1)/2.
enum class GroupVariant { full, qr };

std::string to_string(GroupVariant g);

struct AffineGroup {
  const FieldCtx* ctx;
  GroupVariant variant;

  // Throws std::invalid_argument for the qr variant over even q.
  AffineGroup(const FieldCtx& field, GroupVariant g);

  std::uint64_t order() const;
  bool contains(const AffineMap& g) const;
  // Multipliers in increasing index order.
  std::vector<std::uint32_t> multipliers() const;
};

FieldElement apply(const FieldCtx& ctx, const AffineMap& g, FieldElement x);
// g o h
AffineMap compose(const FieldCtx& ctx, const AffineMap& g, const AffineMap& h);
AffineMap inverse(const FieldCtx& ctx, const AffineMap& g);

Block apply(const FieldCtx& ctx, const AffineMap& g, const Block& block);

struct GroupBudget {
  std::uint64_t max_group_order = 10'000'000;
  std::uint32_t max_homogeneity_q = 512;
};

// Distinct images g(base), sorted. Throws BudgetError above the budget.
std::vector<Block> orbit(const AffineGroup& group, const Block& base, unsigned threads = 1,
                         const GroupBudget& budget = {});

struct StabilizerReport {
  std::uint64_t mu = 0;
  std::vector<AffineMap> elements;  // sorted by (u, v)
};

StabilizerReport stabilizer(const AffineGroup& group, const Block& base, unsigned threads = 1,
                            const GroupBudget& budget = {});

// Closed under composition and inversion, and contains the identity.
bool is_subgroup(const FieldCtx& ctx, const std::vector<AffineMap>& elements);

struct HomogeneityReport {
  bool homogeneous = false;
  std::uint64_t pairs_reached = 0;
  std::uint64_t pairs_total = 0;
  std::optional<std::pair<Point, Point>> witness;  // an unreached 2-subset
};

// Orbit of the seed pair {0, 1}; the group is 2-homogeneous iff that orbit
// is every 2-subset.
HomogeneityReport is_2_homogeneous(const AffineGroup& group, const GroupBudget& budget = {});

// Checks every ordered pair of 2-subsets directly (q <= 64).
HomogeneityReport is_2_homogeneous_all_pairs(const AffineGroup& group);

struct EqualityReport {
  std::uint64_t a1_size = 0;  // {B_(f,b,c) : b != 0}
  std::uint64_t a2_size = 0;  // {u B_l + v : u != 0}
  std::optional<std::uint64_t> a3_size;  // {u B_l + v : u square}, odd q only
  bool a1_eq_a2 = false;
  std::optional<bool> a1_eq_a3;
  std::optional<bool> a3_subset_a2;
};

inline constexpr std::uint64_t kEqualityMaxQ = 2048;

EqualityReport block_set_equality(const FamilySpec& spec, unsigned threads = 1);

}  // namespace qdesign
