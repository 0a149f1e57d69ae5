#include "qdesign/group_actions.hpp"

#include <algorithm>
#include <bit>

#include "qdesign/errors.hpp"
#include "qdesign/parallel.hpp"

namespace qdesign {

std::string to_string(GroupVariant g) { return g == GroupVariant::full ? "full" : "qr"; }

AffineGroup::AffineGroup(const FieldCtx& field, GroupVariant g) : ctx(&field), variant(g) {
  if (g == GroupVariant::qr && field.characteristic() == 2)
    throw std::invalid_argument("the quadratic-residue affine group needs odd q");
}

std::uint64_t AffineGroup::order() const {
  const std::uint64_t q = ctx->order();
  return variant == GroupVariant::full ? q * (q - 1) : q * (q - 1) / 2;
}

bool AffineGroup::contains(const AffineMap& g) const {
  if (g.u.index == 0 || g.u.index >= ctx->order() || g.v.index >= ctx->order()) return false;
  return variant == GroupVariant::full || ctx->is_qr(g.u);
}

std::vector<std::uint32_t> AffineGroup::multipliers() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t u = 1; u < ctx->order(); ++u)
    if (variant == GroupVariant::full || ctx->is_qr({u})) out.push_back(u);
  return out;
}

FieldElement apply(const FieldCtx& ctx, const AffineMap& g, FieldElement x) {
  return ctx.add(ctx.mul(g.u, x), g.v);
}

AffineMap compose(const FieldCtx& ctx, const AffineMap& g, const AffineMap& h) {
  return {ctx.mul(g.u, h.u), ctx.add(ctx.mul(g.u, h.v), g.v)};
}

AffineMap inverse(const FieldCtx& ctx, const AffineMap& g) {
  const FieldElement ui = ctx.inv(g.u);
  return {ui, ctx.neg(ctx.mul(ui, g.v))};
}

namespace {

void image_into(const FieldCtx& ctx, std::uint32_t u, std::uint32_t v, std::span<const Point> block,
                std::vector<std::uint64_t>& mark, std::vector<Point>& out) {
  for (Point x : block) {
    const std::uint32_t y = ctx.add_raw(ctx.mul_raw(u, x), v);
    mark[y >> 6] |= std::uint64_t{1} << (y & 63);
  }
  out.clear();
  for (std::size_t w = 0; w < mark.size(); ++w) {
    std::uint64_t word = mark[w];
    while (word) {
      out.push_back(static_cast<Point>(w * 64 + std::countr_zero(word)));
      word &= word - 1;
    }
    mark[w] = 0;
  }
}

void check_budget(const AffineGroup& group, const GroupBudget& budget) {
  if (group.order() > budget.max_group_order)
    throw BudgetError("group order " + std::to_string(group.order()) + " exceeds the enumeration budget of " +
                      std::to_string(budget.max_group_order));
}

void check_block(const FieldCtx& ctx, const Block& b) {
  for (Point x : b.members())
    if (x >= ctx.order()) throw std::out_of_range("block member outside the field");
}

IncidenceStructure orbit_structure(const AffineGroup& group, const Block& base, unsigned threads) {
  const FieldCtx& ctx = *group.ctx;
  const auto us = group.multipliers();
  std::vector<IncidenceStructure> parts(std::max(1u, std::min<unsigned>(threads, us.size())),
                                        IncidenceStructure(ctx.order()));
  parallel_chunks(static_cast<unsigned>(parts.size()), us.size(),
                  [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
                    std::vector<std::uint64_t> mark((ctx.order() + 63) / 64, 0);
                    std::vector<Point> img;
                    for (std::uint64_t i = begin; i < end; ++i)
                      for (std::uint32_t v = 0; v < ctx.order(); ++v) {
                        image_into(ctx, us[i], v, base.members(), mark, img);
                        parts[w].add(img);
                      }
                  });
  for (std::size_t w = 1; w < parts.size(); ++w)
    for (std::size_t i = 0; i < parts[w].block_count(); ++i) parts[0].add(parts[w].block(i), parts[w].multiplicity(i));
  return std::move(parts[0]);
}

}  // namespace

Block apply(const FieldCtx& ctx, const AffineMap& g, const Block& block) {
  check_block(ctx, block);
  std::vector<std::uint64_t> mark((ctx.order() + 63) / 64, 0);
  std::vector<Point> img;
  image_into(ctx, ctx.element(g.u.index).index, ctx.element(g.v.index).index, block.members(), mark, img);
  return Block::from_sorted(std::move(img));
}

std::vector<Block> orbit(const AffineGroup& group, const Block& base, unsigned threads, const GroupBudget& budget) {
  check_budget(group, budget);
  check_block(*group.ctx, base);
  const auto s = orbit_structure(group, base, threads);
  std::vector<Block> out;
  out.reserve(s.block_count());
  for (std::size_t i = 0; i < s.block_count(); ++i)
    out.push_back(Block::from_sorted(std::vector<Point>(s.block(i).begin(), s.block(i).end())));
  std::sort(out.begin(), out.end());
  return out;
}

StabilizerReport stabilizer(const AffineGroup& group, const Block& base, unsigned threads, const GroupBudget& budget) {
  check_budget(group, budget);
  check_block(*group.ctx, base);
  const FieldCtx& ctx = *group.ctx;
  std::vector<char> in(ctx.order(), 0);
  for (Point x : base.members()) in[x] = 1;
  const auto us = group.multipliers();
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, us.size()));
  std::vector<std::vector<AffineMap>> found(workers);
  parallel_chunks(workers, us.size(), [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      const std::uint32_t u = us[i];
      for (std::uint32_t v = 0; v < ctx.order(); ++v) {
        bool fixes = true;
        for (Point x : base.members())
          if (!in[ctx.add_raw(ctx.mul_raw(u, x), v)]) {
            fixes = false;
            break;
          }
        if (fixes) found[w].push_back({{u}, {v}});
      }
    }
  });
  StabilizerReport r;
  for (auto& part : found) r.elements.insert(r.elements.end(), part.begin(), part.end());
  std::sort(r.elements.begin(), r.elements.end());
  r.mu = r.elements.size();
  return r;
}

bool is_subgroup(const FieldCtx& ctx, const std::vector<AffineMap>& elements) {
  std::vector<AffineMap> sorted(elements);
  std::sort(sorted.begin(), sorted.end());
  auto has = [&](const AffineMap& g) { return std::binary_search(sorted.begin(), sorted.end(), g); };
  if (!has(AffineMap{})) return false;
  for (const auto& g : sorted) {
    if (!has(inverse(ctx, g))) return false;
    for (const auto& h : sorted)
      if (!has(compose(ctx, g, h))) return false;
  }
  return true;
}

namespace {

std::uint64_t pair_rank(Point a, Point b) {
  if (a > b) std::swap(a, b);
  return std::uint64_t{b} * (b - 1) / 2 + a;
}

std::pair<Point, Point> pair_unrank(std::uint64_t r) {
  Point b = 1;
  while (std::uint64_t{b + 1} * b / 2 <= r) ++b;
  return {static_cast<Point>(r - std::uint64_t{b} * (b - 1) / 2), b};
}

}  // namespace

HomogeneityReport is_2_homogeneous(const AffineGroup& group, const GroupBudget& budget) {
  const FieldCtx& ctx = *group.ctx;
  const std::uint32_t q = ctx.order();
  if (q > budget.max_homogeneity_q)
    throw BudgetError("2-homogeneity check is limited to q <= " + std::to_string(budget.max_homogeneity_q));
  HomogeneityReport r;
  r.pairs_total = std::uint64_t{q} * (q - 1) / 2;
  std::vector<char> reached(r.pairs_total, 0);
  // {0, 1} -> {v, u + v}
  for (std::uint32_t u : group.multipliers())
    for (std::uint32_t v = 0; v < q; ++v) {
      const std::uint64_t idx = pair_rank(v, ctx.add_raw(u, v));
      if (!reached[idx]) {
        reached[idx] = 1;
        ++r.pairs_reached;
      }
    }
  r.homogeneous = r.pairs_reached == r.pairs_total;
  if (!r.homogeneous) {
    const auto it = std::find(reached.begin(), reached.end(), 0);
    r.witness = pair_unrank(static_cast<std::uint64_t>(it - reached.begin()));
  }
  return r;
}

HomogeneityReport is_2_homogeneous_all_pairs(const AffineGroup& group) {
  const FieldCtx& ctx = *group.ctx;
  const std::uint32_t q = ctx.order();
  if (q > 64) throw BudgetError("all-pairs homogeneity oracle is limited to q <= 64");
  HomogeneityReport r;
  r.pairs_total = std::uint64_t{q} * (q - 1) / 2;
  auto admissible = [&](FieldElement u) { return group.contains(AffineMap{u, ctx.zero()}); };
  std::vector<char> reached_from_all(r.pairs_total, 1);
  for (Point x1 = 0; x1 < q; ++x1)
    for (Point x2 = x1 + 1; x2 < q; ++x2) {
      const FieldElement dx = ctx.sub({x1}, {x2});
      for (Point y1 = 0; y1 < q; ++y1)
        for (Point y2 = y1 + 1; y2 < q; ++y2) {
          // x1 -> y1, x2 -> y2 or x1 -> y2, x2 -> y1.
          const FieldElement u = ctx.div(ctx.sub({y1}, {y2}), dx);
          if (!admissible(u) && !admissible(ctx.neg(u))) reached_from_all[pair_rank(y1, y2)] = 0;
        }
    }
  for (std::uint64_t i = 0; i < r.pairs_total; ++i) {
    if (reached_from_all[i])
      ++r.pairs_reached;
    else if (!r.witness)
      r.witness = pair_unrank(i);
  }
  r.homogeneous = r.pairs_reached == r.pairs_total;
  return r;
}

EqualityReport block_set_equality(const FamilySpec& spec, unsigned threads) {
  if (spec.q() > kEqualityMaxQ)
    throw BudgetError("block-set equality is limited to q <= " + std::to_string(kEqualityMaxQ));
  const FieldCtx ctx = make_field(spec);
  const std::uint32_t q = ctx.order();
  const auto f = family_map(ctx, spec);
  const Block base = image_set(ctx, spec);

  IncidenceStructure a1(q);
  std::vector<std::uint64_t> mark((q + 63) / 64, 0);
  std::vector<Point> members;
  for (std::uint32_t b = 1; b < q; ++b)
    for (std::uint32_t c = 0; c < q; ++c) {
      for (std::uint32_t x = 0; x < q; ++x) {
        const std::uint32_t y = ctx.add_raw(ctx.add_raw(f[x], ctx.mul_raw(b, x)), c);
        mark[y >> 6] |= std::uint64_t{1} << (y & 63);
      }
      members.clear();
      for (std::size_t w = 0; w < mark.size(); ++w) {
        std::uint64_t word = mark[w];
        while (word) {
          members.push_back(static_cast<Point>(w * 64 + std::countr_zero(word)));
          word &= word - 1;
        }
        mark[w] = 0;
      }
      a1.add(members);
    }

  auto same = [](const IncidenceStructure& x, const IncidenceStructure& y) {
    if (x.block_count() != y.block_count()) return false;
    for (std::size_t i = 0; i < x.block_count(); ++i)
      if (!y.find(x.block(i))) return false;
    return true;
  };
  auto subset = [](const IncidenceStructure& x, const IncidenceStructure& y) {
    for (std::size_t i = 0; i < x.block_count(); ++i)
      if (!y.find(x.block(i))) return false;
    return true;
  };

  EqualityReport r;
  const auto a2 = orbit_structure(AffineGroup(ctx, GroupVariant::full), base, threads);
  r.a1_size = a1.block_count();
  r.a2_size = a2.block_count();
  r.a1_eq_a2 = same(a1, a2);
  if (spec.p != 2) {
    const auto a3 = orbit_structure(AffineGroup(ctx, GroupVariant::qr), base, threads);
    r.a3_size = a3.block_count();
    r.a1_eq_a3 = same(a1, a3);
    r.a3_subset_a2 = subset(a3, a2);
  }
  return r;
}

}  // namespace qdesign
