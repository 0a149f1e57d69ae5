#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "qdesign/designs.hpp"
#include "qdesign/errors.hpp"
#include "qdesign/quadratic_family.hpp"

using namespace qdesign;

namespace {

IncidenceStructure fano() {
  IncidenceStructure s(7);
  for (std::uint32_t i = 0; i < 7; ++i) {
    std::vector<Point> b{i, (i + 1) % 7, (i + 3) % 7};
    std::sort(b.begin(), b.end());
    s.add(b);
  }
  return s;
}

// All k-subsets of [0, v).
IncidenceStructure complete(std::uint32_t v, std::uint32_t k) {
  IncidenceStructure s(v);
  std::vector<Point> b(k);
  for (std::uint32_t mask = 0; mask < (1u << v); ++mask) {
    if (static_cast<std::uint32_t>(__builtin_popcount(mask)) != k) continue;
    b.clear();
    for (std::uint32_t i = 0; i < v; ++i)
      if (mask >> i & 1) b.push_back(i);
    s.add(b);
  }
  return s;
}

// Distinct blocks; multiplicity is bookkeeping, not part of the design.
std::vector<std::vector<std::uint32_t>> distinct_blocks(const IncidenceStructure& s) {
  std::vector<std::vector<std::uint32_t>> out;
  for (std::size_t i = 0; i < s.block_count(); ++i) {
    auto b = s.block(i);
    out.emplace_back(b.begin(), b.end());
  }
  return out;
}

}  // namespace

TEST_CASE("Block construction and membership") {
  const auto b = Block::from_points({5, 1, 3, 1});
  CHECK(b.size() == 3);
  CHECK(b.contains(3));
  CHECK_FALSE(b.contains(2));
  CHECK(b == Block::from_sorted({1, 3, 5}));
  CHECK_THROWS_AS(Block::from_sorted({3, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Block::from_sorted({1, 1}), std::invalid_argument);
  CHECK(BlockHash{}(b) == BlockHash{}(Block::from_points({1, 3, 5})));
}

TEST_CASE("IncidenceStructure deduplicates and tracks multiplicity") {
  IncidenceStructure s(6);
  const std::vector<Point> a{0, 1, 2}, b{1, 2, 3}, c{0, 1};
  CHECK(s.add(a));
  CHECK(s.add(b));
  CHECK_FALSE(s.add(a, 2));
  CHECK(s.add(c));
  CHECK(s.block_count() == 3);
  CHECK(s.multiplicity(*s.find(a)) == 3);
  CHECK(s.total_multiplicity() == 5);
  CHECK_FALSE(s.uniform_block_size().has_value());
  CHECK(s.min_block_size() == 2);
  CHECK(s.max_block_size() == 3);
  CHECK(s.multiplicity_histogram() == std::map<std::uint64_t, std::uint64_t>{{1, 2}, {3, 1}});
  CHECK_FALSE(s.find(std::vector<Point>{0, 2}).has_value());
  CHECK_THROWS_AS(s.add(std::vector<Point>{2, 1}), std::invalid_argument);
  CHECK_THROWS_AS(s.add(std::vector<Point>{1, 6}), std::out_of_range);

  // Copies keep working independently of the original.
  IncidenceStructure copy = s;
  copy.add(std::vector<Point>{4, 5});
  CHECK(copy.block_count() == 4);
  CHECK(s.block_count() == 3);
  CHECK(copy.find(a).has_value());
  IncidenceStructure moved = std::move(copy);
  CHECK(moved.find(std::vector<Point>{4, 5}).has_value());
}

TEST_CASE("value spectrum of x^3 over GF(8)") {
  const FieldCtx f(2, 3);
  const auto spec = FamilySpec::make(2, 3, 1);
  const auto s = value_spectrum(f, family_map(f, spec));
  CHECK(s.counts == std::map<std::uint64_t, std::uint64_t>{{5, 56}, {8, 8}});
  CHECK(s.total() == 64);
  CHECK(spectrum_csv(s) == "size,count\n5,56\n8,8\n");
}

TEST_CASE("value spectra match the oracle and total q^2") {
  struct Case {
    std::uint32_t p, m, l;
    std::map<std::uint64_t, std::uint64_t> counts;
  };
  const std::vector<Case> cases = {
      {2, 3, 2, {{5, 56}, {8, 8}}},       {3, 3, 1, {{14, 27}, {17, 702}}}, {3, 3, 2, {{14, 27}, {17, 702}}},
      {5, 2, 1, {{5, 25}, {15, 600}}},    {2, 4, 1, {{6, 16}, {11, 240}}},  {3, 2, 1, {{3, 9}, {6, 72}}},
      {2, 5, 1, {{21, 992}, {32, 32}}},
  };
  for (const auto& c : cases) {
    const auto spec = FamilySpec::make(c.p, c.m, c.l);
    const auto f = make_field(spec);
    const auto s = value_spectrum(f, family_map(f, spec));
    CAPTURE(to_string(spec));
    CHECK(s.counts == c.counts);
    CHECK(s.total() == spec.q() * spec.q());
  }
}

TEST_CASE("build_structure matches the oracle block family") {
  for (auto [p, m, l] : std::vector<std::array<std::uint32_t, 3>>{{2, 3, 1}, {3, 2, 1}, {2, 4, 1}, {5, 2, 1}, {3, 3, 1}}) {
    const auto spec = FamilySpec::make(p, m, l);
    const auto f = make_field(spec);
    const std::uint64_t k = image_set(f, spec).size();
    const auto s = build_structure(f, family_map(f, spec), k);
    const oracle::Field o(p, m, f.modulus());
    const auto expected = oracle::blocks(o, spec.exponent(), k);
    CAPTURE(to_string(spec));
    REQUIRE(s.block_count() == expected.size());
    for (std::size_t i = 0; i < s.block_count(); ++i) {
      const auto b = s.block(i);
      const auto it = expected.find(std::vector<std::uint32_t>(b.begin(), b.end()));
      REQUIRE(it != expected.end());
      CHECK(it->second == s.multiplicity(i));
    }
  }
}

TEST_CASE("build_structure reports zero-slope blocks and rejects bad sizes") {
  // In GF(8) every b = 0 block is the whole field, so k = 8 comes only from b = 0.
  const auto spec = FamilySpec::make(2, 3, 1);
  const auto f = make_field(spec);
  const auto map = family_map(f, spec);
  const auto whole = build_structure(f, map, 8);
  CHECK(whole.block_count() == 1);
  CHECK(whole.multiplicity(0) == 8);
  CHECK(whole.zero_slope_pairs == 8);
  CHECK(build_structure(f, map, 5).zero_slope_pairs == 0);
  CHECK_THROWS_AS(build_structure(f, map, 6), EmptyStructureError);
  CHECK_THROWS_AS(build_structure(f, map, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_structure(f, map, 9), std::invalid_argument);
  CHECK_THROWS_AS(build_structure(f, map, 5, BuildOptions{100}), BudgetError);
}

TEST_CASE("exact verification of small known designs") {
  const auto r = verify_t_design(fano(), 2, ExactMode{});
  CHECK(r.is_design);
  CHECK(r.k == 3u);
  CHECK(r.lambda == 1u);
  CHECK(r.b == 7);
  CHECK(r.arithmetic_consistent());
  CHECK(r.mode == "exact");
  CHECK_FALSE(r.counterexample.has_value());

  const auto r1 = verify_t_design(fano(), 1, ExactMode{});
  CHECK(r1.is_design);
  CHECK(r1.lambda == 3u);

  const auto c = complete(6, 4);
  const auto r3 = verify_t_design(c, 3, ExactMode{});
  CHECK(r3.is_design);
  CHECK(r3.lambda == 3u);
  CHECK(r3.b == 15);

  IncidenceStructure broken = fano();
  broken.add(std::vector<Point>{0, 1, 2});
  const auto rb = verify_t_design(broken, 2, ExactMode{});
  CHECK_FALSE(rb.is_design);
  REQUIRE(rb.counterexample.has_value());
  CHECK(rb.counterexample->coverage != rb.counterexample->reference);
  CHECK_FALSE(rb.lambda.has_value());

  CHECK_THROWS_AS(verify_t_design(fano(), 4, ExactMode{}), std::invalid_argument);
  CHECK_THROWS_AS(verify_t_design(fano(), 0, ExactMode{}), std::invalid_argument);
}

TEST_CASE("non-uniform structures are not designs") {
  IncidenceStructure s(4);
  s.add(std::vector<Point>{0, 1});
  s.add(std::vector<Point>{0, 1, 2});
  const auto r = verify_t_design(s, 1, ExactMode{});
  CHECK_FALSE(r.is_design);
  CHECK_FALSE(r.k.has_value());
}

TEST_CASE("exact verifier agrees with a per-subset scan for v <= 32") {
  for (auto [p, m, l] : std::vector<std::array<std::uint32_t, 3>>{
           {2, 3, 1}, {2, 3, 2}, {3, 2, 1}, {2, 4, 1}, {2, 4, 3}, {5, 2, 1}, {3, 3, 1}, {3, 3, 2}, {2, 5, 1}}) {
    const auto spec = FamilySpec::make(p, m, l);
    const auto f = make_field(spec);
    const auto spectrum = value_spectrum(f, family_map(f, spec));
    for (auto [k, count] : spectrum.counts) {
      if (k < 2) continue;
      const auto s = build_structure(f, family_map(f, spec), k);
      const auto coverages = oracle::pair_coverages(f.order(), distinct_blocks(s));
      const auto r = verify_t_design(s, 2, ExactMode{}, 2);
      CAPTURE(to_string(spec));
      CAPTURE(k);
      CHECK(r.is_design == (coverages.size() == 1));
      if (r.is_design) CHECK(*r.lambda == *coverages.begin());
      if (r.counterexample) {
        CHECK(coverages.count(r.counterexample->coverage));
        CHECK(coverages.count(r.counterexample->reference));
      }
    }
  }
}

TEST_CASE("reports do not depend on the thread count") {
  const auto spec = FamilySpec::make(2, 4, 1);
  const auto f = make_field(spec);
  const auto s = build_structure(f, family_map(f, spec), 11);
  const auto serial = verify_t_design(s, 2, ExactMode{}, 1);
  for (unsigned threads : {2u, 3u, 8u}) {
    const auto par = verify_t_design(s, 2, ExactMode{}, threads);
    CHECK(par.is_design == serial.is_design);
    REQUIRE(par.counterexample.has_value());
    CHECK(par.counterexample->subset == serial.counterexample->subset);
    CHECK(par.counterexample->coverage == serial.counterexample->coverage);
    const auto sp = verify_t_design(s, 2, SampledMode{5000, 7}, threads);
    const auto ss = verify_t_design(s, 2, SampledMode{5000, 7}, 1);
    CHECK(sp.is_design == ss.is_design);
    CHECK(sp.counterexample.has_value() == ss.counterexample.has_value());
    if (sp.counterexample) CHECK(sp.counterexample->subset == ss.counterexample->subset);
  }
}

TEST_CASE("sampled mode never rejects a design and is reproducible") {
  const auto spec = FamilySpec::make(3, 3, 2);
  const auto f = make_field(spec);
  const auto s = build_structure(f, family_map(f, spec), 17);
  const auto r = verify_t_design(s, 2, SampledMode{20000, 42}, 2);
  CHECK(r.is_design);
  CHECK(r.mode == "sampled");
  CHECK(r.seed == 42u);
  CHECK(r.samples == 20000u);
  CHECK(r.lambda == 136u);

  const auto neg = FamilySpec::make(5, 2, 1);
  const auto g = make_field(neg);
  const auto t = build_structure(g, family_map(g, neg), 15);
  const auto a = verify_t_design(t, 2, SampledMode{20000, 9});
  const auto b = verify_t_design(t, 2, SampledMode{20000, 9});
  CHECK_FALSE(a.is_design);
  REQUIRE(a.counterexample.has_value());
  CHECK(a.counterexample->subset == b.counterexample->subset);
}

TEST_CASE("increment counts and binomials") {
  CHECK(binomial(5, 2) == 10);
  CHECK(binomial(4, 5) == 0);
  CHECK(binomial(512, 3) == 22238720);
  CHECK(exact_increments(fano(), 2) == 21);
  CHECK(exact_increments(fano(), 3) == 7);
}

TEST_CASE("randomized structures: exact verifier agrees with the scan") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const std::uint32_t v = 5 + rng() % 8;
    const std::uint32_t k = 2 + rng() % (v - 2);
    IncidenceStructure s(v);
    const int nb = 1 + rng() % 12;
    for (int i = 0; i < nb; ++i) {
      std::vector<Point> pts(v);
      std::iota(pts.begin(), pts.end(), 0);
      std::shuffle(pts.begin(), pts.end(), rng);
      pts.resize(k);
      std::sort(pts.begin(), pts.end());
      s.add(pts, 1 + rng() % 3);
    }
    const auto coverages = oracle::pair_coverages(v, distinct_blocks(s));
    const auto r = verify_t_design(s, 2, ExactMode{}, 1 + trial % 3);
    CHECK(r.is_design == (coverages.size() == 1));
    CHECK(r.b == s.block_count());
    if (r.is_design) CHECK(r.arithmetic_consistent());
  }
}
