#include <doctest.h>

#include <numeric>

#include "oracles.hpp"
#include "qdesign/errors.hpp"
#include "qdesign/quadratic_family.hpp"

using namespace qdesign;

TEST_CASE("FamilySpec validation") {
  CHECK_THROWS_AS(FamilySpec::make(4, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(FamilySpec::make(2, 3, 0), std::invalid_argument);
  CHECK_THROWS_AS(FamilySpec::make(2, 3, 3), std::invalid_argument);
  CHECK_THROWS_AS(FamilySpec::make(2, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(FamilySpec::make(2, 21, 1), std::invalid_argument);
  const auto s = FamilySpec::make(3, 5, 2);
  CHECK(s.q() == 243);
  CHECK(s.exponent() == 10);
  CHECK(s.coprime());
  CHECK_FALSE(FamilySpec::make(2, 4, 2).coprime());
}

TEST_CASE("closed-form rootless counts") {
  // m even: (p^(m+1) - p) / (2(p+1))
  CHECK(bluher_predicted(FamilySpec::make(2, 4, 1)) == 5);
  CHECK(bluher_predicted(FamilySpec::make(5, 2, 1)) == 10);
  // m odd, p odd: (p^(m+1) - 1) / (2(p+1))
  CHECK(bluher_predicted(FamilySpec::make(3, 3, 1)) == 10);
  // m odd, p = 2: (p^(m+1) + p) / (2(p+1))
  CHECK(bluher_predicted(FamilySpec::make(2, 3, 1)) == 3);
  CHECK_THROWS_AS(bluher_predicted(FamilySpec::make(2, 4, 2)), std::domain_error);
  CHECK_THROWS_AS(predicted_k(FamilySpec::make(3, 4, 2)), std::domain_error);
}

TEST_CASE("|B_l| for the worked parameters") {
  CHECK(predicted_k(FamilySpec::make(2, 3, 1)) == 5);
  CHECK(predicted_k(FamilySpec::make(2, 9, 1)) == 341);
  CHECK(predicted_k(FamilySpec::make(3, 3, 2)) == 17);
  CHECK(predicted_k(FamilySpec::make(3, 5, 2)) == 152);
  CHECK(predicted_k(FamilySpec::make(5, 2, 1)) == 15);
  CHECK(predicted_k(FamilySpec::make(2, 4, 1)) == 11);
}

TEST_CASE("brute-force rootless counts match the closed form and the naive search") {
  for (std::uint32_t p : {2u, 3u, 5u, 7u})
    for (std::uint32_t m = 2; ipow(p, m) <= 729; ++m)
      for (std::uint32_t l = 1; l < m; ++l) {
        const auto spec = FamilySpec::make(p, m, l);
        const auto f = make_field(spec);
        const auto r = bluher_bruteforce(f, spec);
        CAPTURE(to_string(spec));
        if (ipow(p, m) <= 243) CHECK(r.brute_forced == bluher_count_naive(f, spec));
        CHECK(image_set(f, spec).size() == spec.q() - r.brute_forced);
        if (spec.coprime()) {
          REQUIRE(r.predicted.has_value());
          CHECK(r.agrees);
          CHECK(image_set(f, spec).size() == predicted_k(spec));
        } else {
          CHECK_FALSE(r.predicted.has_value());
        }
      }
}

TEST_CASE("image set agrees with the oracle field") {
  for (auto [p, m, l] : std::vector<std::array<std::uint32_t, 3>>{{2, 4, 1}, {3, 3, 2}, {5, 2, 1}, {7, 2, 1}}) {
    const auto spec = FamilySpec::make(p, m, l);
    const auto f = make_field(spec);
    const oracle::Field o(p, m, f.modulus());
    std::set<std::uint32_t> expected;
    for (std::uint32_t x = 0; x < o.q; ++x) expected.insert(o.add(o.pow(x, spec.exponent()), x));
    const auto b = image_set(f, spec);
    CHECK(std::vector<std::uint32_t>(b.members().begin(), b.members().end()) ==
          std::vector<std::uint32_t>(expected.begin(), expected.end()));
  }
}

TEST_CASE("range classification") {
  const auto t1 = classify_case(FamilySpec::make(2, 9, 1));
  CHECK(t1.range == RangeFlag::theorem1);
  CHECK(t1.v == 512);
  CHECK(t1.k == 341u);
  CHECK(t1.lambda == 115940u);
  CHECK(t1.b == 261632u);
  CHECK(t1.trivial_stabilizer_expected);

  const auto c1 = classify_case(FamilySpec::make(2, 5, 1));
  CHECK(c1.range == RangeFlag::conjecture1);
  CHECK(c1.lambda == 420u);
  CHECK(c1.b == 992u);
  CHECK_FALSE(c1.trivial_stabilizer_expected);

  CHECK(classify_case(FamilySpec::make(2, 8, 1)).range == RangeFlag::conjecture1);  // 4*1+4 = 8, not < 8
  CHECK(classify_case(FamilySpec::make(2, 10, 1)).range == RangeFlag::theorem1);
  CHECK(classify_case(FamilySpec::make(2, 6, 3)).range == RangeFlag::unclassified);  // gcd 3

  const auto c2 = classify_case(FamilySpec::make(3, 3, 2));
  CHECK(c2.range == RangeFlag::conjecture2);
  CHECK(c2.lambda == 136u);
  CHECK(c2.b == 351u);
  CHECK(classify_case(FamilySpec::make(3, 5, 2)).range == RangeFlag::conjecture2);
  CHECK(classify_case(FamilySpec::make(3, 7, 1)).range == RangeFlag::theorem2);  // 6 < 7
  CHECK(classify_case(FamilySpec::make(3, 5, 1)).range == RangeFlag::conjecture2);  // 6 < 5 fails
  CHECK(classify_case(FamilySpec::make(7, 3, 1)).range == RangeFlag::conjecture2);

  const auto neg = classify_case(FamilySpec::make(5, 2, 1));
  CHECK(neg.range == RangeFlag::negative_control);
  CHECK(neg.k == 15u);
  CHECK_FALSE(neg.lambda.has_value());
  CHECK(classify_case(FamilySpec::make(3, 4, 1)).range == RangeFlag::negative_control);  // 81 = 1 mod 4
  CHECK(classify_case(FamilySpec::make(3, 2, 1)).range == RangeFlag::negative_control);  // 9 = 1 mod 4
  CHECK(classify_case(FamilySpec::make(2, 2, 1)).range == RangeFlag::unclassified);      // m < 3
}

TEST_CASE("check_case outcomes and statuses") {
  const auto d = check_case(FamilySpec::make(3, 3, 2), ExactMode{});
  CHECK(d.design.is_design);
  CHECK(d.design.lambda == 136u);
  CHECK(d.design.b == 351);
  CHECK(d.status == CheckStatus::finding);
  CHECK(d.note.find("confirmed") != std::string::npos);
  CHECK(d.multiplicities == std::map<std::uint64_t, std::uint64_t>{{2, 351}});

  const auto n = check_case(FamilySpec::make(5, 2, 1), ExactMode{});
  CHECK_FALSE(n.design.is_design);
  CHECK(n.status == CheckStatus::pass);
  CHECK(n.multiplicities == std::map<std::uint64_t, std::uint64_t>{{6, 100}});

  // m = 4: the predicted 2-design does not appear.
  const auto f = check_case(FamilySpec::make(2, 4, 1), ExactMode{});
  CHECK_FALSE(f.design.is_design);
  CHECK(f.design.b == 80);
  CHECK(f.status == CheckStatus::finding);
  CHECK(f.note.find("not confirmed") != std::string::npos);

  const auto e = check_case(FamilySpec::make(2, 5, 1), ExactMode{});
  CHECK(e.design.is_design);
  CHECK(e.design.lambda == 420u);
  CHECK(e.design.b == 992);
}

TEST_CASE("check_case budget handling") {
  CheckOptions tight;
  tight.increment_budget = 1000;
  CHECK_THROWS_AS(check_case(FamilySpec::make(3, 3, 2), ExactMode{}, tight), BudgetError);
  tight.force = true;
  CHECK(check_case(FamilySpec::make(3, 3, 2), ExactMode{}, tight).design.mode == "exact");
  tight.force = false;
  tight.fallback = SampledMode{2000, 3};
  const auto r = check_case(FamilySpec::make(3, 3, 2), ExactMode{}, tight);
  CHECK(r.design.mode == "sampled");
  CHECK(r.design.seed == 3u);
  CHECK(r.design.is_design);
  CHECK(r.note.find("sampled") != std::string::npos);
}

TEST_CASE("check_case with an explicit block size") {
  const auto r = check_case(FamilySpec::make(3, 3, 1), 14, ExactMode{});
  CHECK(r.design.k == 14u);
  CHECK(r.image_size == 17);
  CHECK(r.zero_slope_pairs == 27);  // only b = 0 gives size 14
  CHECK(r.status == CheckStatus::finding);
  CHECK_THROWS_AS(check_case(FamilySpec::make(3, 3, 1), 15, ExactMode{}), EmptyStructureError);
}
