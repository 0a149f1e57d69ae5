#include "qdesign/designs.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>

#include "qdesign/errors.hpp"
#include "qdesign/parallel.hpp"

namespace qdesign {

// ---------------------------------------------------------------------------
// Block

Block Block::from_points(std::vector<Point> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return Block(std::move(points));
}

Block Block::from_sorted(std::vector<Point> sorted) {
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i - 1] >= sorted[i]) throw std::invalid_argument("block members must be strictly increasing");
  return Block(std::move(sorted));
}

bool Block::contains(Point x) const { return std::binary_search(members_.begin(), members_.end(), x); }

std::uint64_t hash_points(std::span<const Point> points) {
  // FNV-1a over 32-bit words followed by a murmur finalizer.
  std::uint64_t h = 0xcbf29ce484222325ULL ^ points.size();
  for (Point x : points) {
    h ^= x;
    h *= 0x100000001b3ULL;
  }
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  return h;
}

std::size_t BlockHash::operator()(const Block& b) const { return hash_points(b.members()); }

// ---------------------------------------------------------------------------
// IncidenceStructure

IncidenceStructure::IncidenceStructure(std::uint32_t v) : v_(v) {}

void IncidenceStructure::reserve(std::size_t blocks, std::size_t members) {
  pool_.reserve(members);
  offsets_.reserve(blocks + 1);
  multiplicity_.reserve(blocks);
  next_.reserve(blocks);
  heads_.reserve(blocks);
}

std::optional<std::size_t> IncidenceStructure::find_hashed(std::span<const Point> members,
                                                           std::uint64_t h) const {
  auto it = heads_.find(h);
  if (it == heads_.end()) return std::nullopt;
  for (std::uint32_t id = it->second; id != kNone; id = next_[id]) {
    auto other = block(id);
    if (other.size() == members.size() &&
        std::memcmp(other.data(), members.data(), members.size() * sizeof(Point)) == 0)
      return id;
  }
  return std::nullopt;
}

std::optional<std::size_t> IncidenceStructure::find(std::span<const Point> members) const {
  return find_hashed(members, hash_points(members));
}

bool IncidenceStructure::add(std::span<const Point> members, std::uint64_t multiplicity) {
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (members[i] >= v_) throw std::out_of_range("block member outside the point set");
    if (i > 0 && members[i - 1] >= members[i])
      throw std::invalid_argument("block members must be strictly increasing");
  }
  const std::uint64_t h = hash_points(members);
  if (auto id = find_hashed(members, h)) {
    multiplicity_[*id] += multiplicity;
    return false;
  }
  if (block_count() >= kNone) throw BudgetError("too many distinct blocks");
  const auto id = static_cast<std::uint32_t>(block_count());
  pool_.insert(pool_.end(), members.begin(), members.end());
  offsets_.push_back(pool_.size());
  multiplicity_.push_back(multiplicity);
  auto [it, inserted] = heads_.try_emplace(h, id);
  next_.push_back(inserted ? kNone : it->second);
  it->second = id;
  return true;
}

std::uint64_t IncidenceStructure::total_multiplicity() const {
  std::uint64_t t = 0;
  for (auto m : multiplicity_) t += m;
  return t;
}

std::optional<std::size_t> IncidenceStructure::uniform_block_size() const {
  if (block_count() == 0) return std::nullopt;
  const std::size_t k = block(0).size();
  for (std::size_t i = 1; i < block_count(); ++i)
    if (block(i).size() != k) return std::nullopt;
  return k;
}

std::size_t IncidenceStructure::min_block_size() const {
  std::size_t k = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < block_count(); ++i) k = std::min(k, block(i).size());
  return block_count() ? k : 0;
}

std::size_t IncidenceStructure::max_block_size() const {
  std::size_t k = 0;
  for (std::size_t i = 0; i < block_count(); ++i) k = std::max(k, block(i).size());
  return k;
}

std::map<std::uint64_t, std::uint64_t> IncidenceStructure::multiplicity_histogram() const {
  std::map<std::uint64_t, std::uint64_t> h;
  for (auto m : multiplicity_) ++h[m];
  return h;
}

// ---------------------------------------------------------------------------
// Image sets and spectra

namespace {

void check_map(const FieldCtx& ctx, const PointMap& f) {
  if (f.size() != ctx.order()) throw std::invalid_argument("point map must have one value per field element");
  for (auto y : f)
    if (y >= ctx.order()) throw std::out_of_range("point map value outside the field");
}

// Marks {f(x) + b x + c} in `mark` (q bits, cleared by the caller) and
// returns the number of distinct values.
std::size_t mark_image(const FieldCtx& ctx, const PointMap& f, std::uint32_t b, std::uint32_t c,
                       std::vector<std::uint64_t>& mark) {
  std::size_t count = 0;
  const std::uint32_t q = ctx.order();
  for (std::uint32_t x = 0; x < q; ++x) {
    const std::uint32_t y = ctx.add_raw(ctx.add_raw(f[x], ctx.mul_raw(b, x)), c);
    std::uint64_t& word = mark[y >> 6];
    const std::uint64_t bit = std::uint64_t{1} << (y & 63);
    if (!(word & bit)) {
      word |= bit;
      ++count;
    }
  }
  return count;
}

// Drains set bits of `mark` into `out` in increasing order, clearing them.
void drain_marks(std::vector<std::uint64_t>& mark, std::vector<Point>& out) {
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

}  // namespace

Block block_of(const FieldCtx& ctx, const PointMap& f, FieldElement b, FieldElement c) {
  check_map(ctx, f);
  std::vector<std::uint64_t> mark((ctx.order() + 63) / 64, 0);
  mark_image(ctx, f, ctx.element(b.index).index, ctx.element(c.index).index, mark);
  std::vector<Point> members;
  drain_marks(mark, members);
  return Block::from_sorted(std::move(members));
}

std::uint64_t Spectrum::total() const {
  std::uint64_t t = 0;
  for (auto& [size, count] : counts) t += count;
  return t;
}

Spectrum value_spectrum(const FieldCtx& ctx, const PointMap& f) {
  check_map(ctx, f);
  const std::uint32_t q = ctx.order();
  std::vector<std::uint64_t> mark((q + 63) / 64, 0);
  Spectrum s;
  // Translating by c is a bijection, so each b contributes q equal sizes.
  for (std::uint32_t b = 0; b < q; ++b) {
    const std::size_t size = mark_image(ctx, f, b, 0, mark);
    std::fill(mark.begin(), mark.end(), 0);
    s.counts[size] += q;
  }
  return s;
}

std::string spectrum_csv(const Spectrum& s) {
  std::ostringstream out;
  out << "size,count\n";
  for (auto& [size, count] : s.counts) out << size << ',' << count << '\n';
  return out.str();
}

IncidenceStructure build_structure(const FieldCtx& ctx, const PointMap& f, std::uint64_t k,
                                   const BuildOptions& options) {
  check_map(ctx, f);
  const std::uint32_t q = ctx.order();
  if (k < 2 || k > q) throw std::invalid_argument("block size k must satisfy 2 <= k <= q");

  std::vector<std::uint64_t> mark((q + 63) / 64, 0);
  std::vector<std::uint32_t> slopes;
  for (std::uint32_t b = 0; b < q; ++b) {
    if (mark_image(ctx, f, b, 0, mark) == k) slopes.push_back(b);
    std::fill(mark.begin(), mark.end(), 0);
    // Refuse as soon as the slopes found so far exceed the budget.
    if (slopes.size() * std::uint64_t{q} * k > options.member_budget)
      throw BudgetError("structure would hold at least " + std::to_string(slopes.size() * std::uint64_t{q} * k) +
                        " block members, above the budget of " + std::to_string(options.member_budget));
  }
  if (slopes.empty()) throw EmptyStructureError("no (b, c) pair yields a block of size " + std::to_string(k));

  IncidenceStructure s(q);
  s.reserve(slopes.size() * q, slopes.size() * q * k);
  std::vector<Point> base, members;
  for (std::uint32_t b : slopes) {
    mark_image(ctx, f, b, 0, mark);
    drain_marks(mark, base);
    for (std::uint32_t c = 0; c < q; ++c) {
      for (Point x : base) {
        const std::uint32_t y = ctx.add_raw(x, c);
        mark[y >> 6] |= std::uint64_t{1} << (y & 63);
      }
      drain_marks(mark, members);
      s.add(members);
      if (b == 0) ++s.zero_slope_pairs;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Verification

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

bool DesignReport::arithmetic_consistent() const {
  if (!is_design) return true;
  if (!k || !lambda) return false;
  const unsigned __int128 lhs = static_cast<unsigned __int128>(b) * binomial(*k, t);
  const unsigned __int128 rhs = static_cast<unsigned __int128>(*lambda) * binomial(v, t);
  return lhs == rhs;
}

std::uint64_t exact_increments(const IncidenceStructure& s, unsigned t) {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < s.block_count(); ++i) total += binomial(s.block(i).size(), t);
  return total;
}

namespace {

constexpr std::uint64_t kShardMemoryBudget = std::uint64_t{2} << 30;  // bytes, all shards
constexpr std::uint32_t kExactHigherTMaxV = 64;

// Rank of a sorted t-subset in the combinatorial number system; for t = 2
// this is the triangular index j(j-1)/2 + i.
std::uint64_t rank_subset(std::span<const Point> subset) {
  std::uint64_t r = 0;
  for (std::size_t i = 0; i < subset.size(); ++i) r += binomial(subset[i], i + 1);
  return r;
}

std::vector<Point> unrank_subset(std::uint64_t r, unsigned t) {
  std::vector<Point> out(t);
  for (unsigned i = t; i-- > 0;) {
    Point c = i;
    while (binomial(c + 1, i + 1) <= r) ++c;
    out[i] = c;
    r -= binomial(c, i + 1);
  }
  return out;
}

DesignReport base_report(const IncidenceStructure& s, unsigned t) {
  DesignReport r;
  r.t = t;
  r.v = s.v();
  r.b = s.block_count();
  if (auto k = s.uniform_block_size()) r.k = *k;
  return r;
}

void verify_exact(const IncidenceStructure& s, unsigned t, unsigned threads, DesignReport& r) {
  const std::uint32_t v = s.v();
  if (t >= 3 && v > kExactHigherTMaxV)
    throw BudgetError("exact verification with t >= 3 is limited to v <= 64");
  if (s.block_count() > std::numeric_limits<std::uint32_t>::max())
    throw BudgetError("block count would overflow 32-bit coverage counters");
  const std::uint64_t counters = binomial(v, t);
  const std::uint64_t shard_bytes = counters * sizeof(std::uint32_t);
  if (shard_bytes > kShardMemoryBudget) throw BudgetError("coverage counter array exceeds the memory budget");
  threads = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, kShardMemoryBudget / shard_bytes)));
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::size_t>(1, s.block_count())));

  std::vector<std::vector<std::uint32_t>> shards(threads);
  parallel_chunks(threads, s.block_count(), [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
    auto& cnt = shards[w];
    cnt.assign(counters, 0);
    std::uint32_t* c = cnt.data();
    std::vector<Point> combo(t);
    std::vector<std::size_t> pos(t);
    for (std::uint64_t bi = begin; bi < end; ++bi) {
      const auto blk = s.block(bi);
      const std::size_t n = blk.size();
      if (t == 1) {
        for (Point x : blk) ++c[x];
      } else if (t == 2) {
        for (std::size_t j = 1; j < n; ++j) {
          std::uint32_t* row = c + (std::uint64_t{blk[j]} * (blk[j] - 1) / 2);
          for (std::size_t i = 0; i < j; ++i) ++row[blk[i]];
        }
      } else {
        if (n < t) continue;
        for (unsigned i = 0; i < t; ++i) pos[i] = i;
        while (true) {
          for (unsigned i = 0; i < t; ++i) combo[i] = blk[pos[i]];
          ++c[rank_subset(combo)];
          int i = static_cast<int>(t) - 1;
          while (i >= 0 && pos[i] == n - t + i) --i;
          if (i < 0) break;
          ++pos[i];
          for (unsigned j = i + 1; j < t; ++j) pos[j] = pos[j - 1] + 1;
        }
      }
    }
  });

  auto& total = shards[0];
  for (unsigned w = 1; w < threads; ++w)
    for (std::uint64_t i = 0; i < counters; ++i) total[i] += shards[w][i];

  r.mode = "exact";
  if (counters == 0) {
    r.is_design = false;
    return;
  }
  const std::uint32_t reference = total[0];
  for (std::uint64_t i = 1; i < counters; ++i) {
    if (total[i] != reference) {
      r.counterexample = Counterexample{unrank_subset(i, t), total[i], reference};
      r.is_design = false;
      return;
    }
  }
  r.lambda = reference;
  r.is_design = r.k.has_value() && *r.k >= t && r.b > 0;
}

void verify_sampled(const IncidenceStructure& s, unsigned t, const SampledMode& mode, unsigned threads,
                    DesignReport& r) {
  const std::uint32_t v = s.v();
  const std::uint64_t b = s.block_count();
  const std::uint64_t words = (b + 63) / 64;
  if (std::uint64_t{v} * words * 8 > kShardMemoryBudget)
    throw BudgetError("point incidence bitsets exceed the memory budget");
  if (t > v) throw std::invalid_argument("t exceeds the number of points");

  // incidence[x] has bit i set when block i contains x.
  std::vector<std::uint64_t> incidence(std::uint64_t{v} * words, 0);
  for (std::uint64_t i = 0; i < b; ++i)
    for (Point x : s.block(i)) incidence[x * words + (i >> 6)] |= std::uint64_t{1} << (i & 63);

  std::mt19937_64 rng(mode.seed);
  std::uniform_int_distribution<Point> pick(0, v - 1);
  std::vector<Point> samples(mode.samples * t);
  for (std::uint64_t n = 0; n < mode.samples; ++n) {
    Point* sub = samples.data() + n * t;
    for (unsigned i = 0; i < t; ++i) {
      Point x;
      do x = pick(rng);
      while (std::find(sub, sub + i, x) != sub + i);
      sub[i] = x;
    }
    std::sort(sub, sub + t);
  }

  std::vector<std::uint64_t> coverage(mode.samples);
  parallel_chunks(threads, mode.samples, [&](unsigned, std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t n = begin; n < end; ++n) {
      const Point* sub = samples.data() + n * t;
      std::uint64_t count = 0;
      for (std::uint64_t w = 0; w < words; ++w) {
        std::uint64_t word = incidence[sub[0] * words + w];
        for (unsigned i = 1; i < t && word; ++i) word &= incidence[sub[i] * words + w];
        count += std::popcount(word);
      }
      coverage[n] = count;
    }
  });

  r.mode = "sampled";
  r.seed = mode.seed;
  r.samples = mode.samples;
  if (mode.samples == 0) {
    r.is_design = false;
    return;
  }
  for (std::uint64_t n = 1; n < mode.samples; ++n) {
    if (coverage[n] != coverage[0]) {
      const Point* sub = samples.data() + n * t;
      r.counterexample = Counterexample{std::vector<Point>(sub, sub + t), coverage[n], coverage[0]};
      r.is_design = false;
      return;
    }
  }
  r.lambda = coverage[0];
  r.is_design = r.k.has_value() && *r.k >= t && b > 0;
}

}  // namespace

DesignReport verify_t_design(const IncidenceStructure& s, unsigned t, const VerifyMode& mode,
                             unsigned threads) {
  if (t < 1) throw std::invalid_argument("t must be at least 1");
  if (t > 3) throw std::invalid_argument("t >= 4 is not supported");
  if (s.block_count() > 0 && t > s.min_block_size())
    throw std::invalid_argument("t exceeds the smallest block size");
  DesignReport r = base_report(s, t);
  if (std::holds_alternative<ExactMode>(mode))
    verify_exact(s, t, std::max(1u, threads), r);
  else
    verify_sampled(s, t, std::get<SampledMode>(mode), std::max(1u, threads), r);
  return r;
}

}  // namespace qdesign
