#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "nflab/errors.hpp"
#include "nflab/rng.hpp"
#include "nflab/theory_lab.hpp"
#include "support.hpp"

using namespace nflab;
using nflab::test::make_fn;
using nflab::test::make_uniform_class;

namespace {

// Independent oracle for the |X|=3 bijective anchor: enumerate ordered pairs
// by hand and average the best value seen.
Rational oracle_pair_mean_best(bool with_replacement) {
  const ValueIndex values[3] = {1, 2, 3};
  Rational sum = 0;
  std::uint64_t count = 0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      if (!with_replacement && a == b) continue;
      sum += std::max(values[a], values[b]);
      ++count;
    }
  }
  return sum / count;
}

FunctionClass bijective_three() {
  return FunctionClass::uniform({make_fn({1, 2, 3}, 4)});
}

}  // namespace

TEST_CASE("expected_performance matches enumerated pair averages") {
  // sampling two of {1,2,3} without replacement: mean max is 8/3
  CHECK(oracle_pair_mean_best(false) == Rational(8, 3));
  // with replacement over the 9 equiprobable pairs: 22/9
  CHECK(oracle_pair_mean_best(true) == Rational(22, 9));

  const auto fc = bijective_three();
  const auto enum_report =
      expected_performance(*random_enumeration(), fc, best_so_far(), 3, Mode::exact());
  CHECK(enum_report.exact_entries()[1] == Rational(8, 3));
  CHECK(enum_report.exact_entries()[0] == Rational(2));  // mean of {1,2,3}
  CHECK(enum_report.exact_entries()[2] == Rational(3));  // full codomain seen

  const auto repl_report =
      expected_performance(*random_with_replacement(), fc, best_so_far(), 3, Mode::exact());
  CHECK(repl_report.exact_entries()[1] == Rational(22, 9));
}

TEST_CASE("distinct-count expectation for replacement sampling") {
  // |X|=3, t=2: P(same point twice) = 1/3, so E|S| = 1/3 + 2*(2/3) = 5/3
  const auto report = expected_performance(*random_with_replacement(), bijective_three(),
                                           distinct_count(), 2, Mode::exact());
  CHECK(report.exact_entries()[1] == Rational(5, 3));
}

TEST_CASE("minimally revisiting algorithms see the full codomain at t = |X|") {
  RandomStream rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const std::uint64_t x = 2 + rng.uniform_below(3);
    std::vector<ValueIndex> table(x);
    for (auto& v : table) v = static_cast<ValueIndex>(rng.uniform_below(3));
    const auto fc =
        FunctionClass::uniform({ObjectiveFunction(SearchSpace(x), ValueAlphabet(3), table)});
    const ValueIndex best = *std::max_element(table.begin(), table.end());
    for (const auto& algorithm : {random_enumeration(), natural_enumeration()}) {
      const auto report =
          expected_performance(*algorithm, fc, best_so_far(), x, Mode::exact());
      CHECK(report.exact_entries().back() == Rational(best));
    }
  }
}

TEST_CASE("expected_performance weights classes by exact rationals") {
  // two singleton-orbit constants with unequal weights
  const FunctionClass fc({make_fn({0, 0}, 3), make_fn({2, 2}, 3)},
                         {Rational(1, 4), Rational(3, 4)});
  const auto report =
      expected_performance(*random_enumeration(), fc, best_so_far(), 1, Mode::exact());
  CHECK(report.exact_entries()[0] == Rational(1, 4) * 0 + Rational(3, 4) * 2);
}

TEST_CASE("expected_performance rejects infeasible requests") {
  const auto fc = bijective_three();
  CHECK_THROWS_AS(
      expected_performance(*random_enumeration(), fc, best_so_far(), 0, Mode::exact()),
      DomainError);
  CHECK_THROWS_AS(expected_performance(*random_enumeration(),
                                       FunctionClass(SearchSpace(2), ValueAlphabet(2)),
                                       best_so_far(), 2, Mode::exact()),
                  DomainError);
  CHECK_THROWS_AS(Mode::monte_carlo(0), DomainError);
}

TEST_CASE("monte carlo expectations bracket the exact value") {
  const auto fc = bijective_three();
  const auto exact =
      expected_performance(*random_with_replacement(), fc, best_so_far(), 2, Mode::exact());
  const auto mc = expected_performance(*random_with_replacement(), fc, best_so_far(), 2,
                                       Mode::monte_carlo(20000), 17);
  const auto& cell = mc.monte_carlo_entries()[1];
  const double truth = exact.exact_entries()[1].convert_to<double>();
  CHECK(cell.ci_low <= truth);
  CHECK(cell.ci_high >= truth);
  CHECK(cell.samples == 20000);
  CHECK(mc.seed() == 17);
}

TEST_CASE("monte carlo results are independent of the worker count") {
  const auto fc = bijective_three();
  const auto one = expected_performance(*random_with_replacement(), fc, distinct_count(), 4,
                                        Mode::monte_carlo(50000), 3, 1);
  const auto four = expected_performance(*random_with_replacement(), fc, distinct_count(), 4,
                                         Mode::monte_carlo(50000), 3, 4);
  REQUIRE(one.budget() == four.budget());
  for (std::size_t t = 0; t < one.budget(); ++t) {
    CHECK(one.monte_carlo_entries()[t].mean == four.monte_carlo_entries()[t].mean);
    CHECK(one.monte_carlo_entries()[t].ci_low == four.monte_carlo_entries()[t].ci_low);
  }
}

TEST_CASE("delta_vs_enumeration anchors") {
  const auto fc = bijective_three();
  SUBCASE("enumeration against itself is identically zero") {
    const auto delta =
        delta_vs_enumeration(*random_enumeration(), fc, best_so_far(), 6, Mode::exact());
    for (const auto& d : delta.delta.exact_entries()) CHECK(d == Rational(0));
  }
  SUBCASE("replacement sampling loses exactly 2/9 at t=2") {
    const auto delta =
        delta_vs_enumeration(*random_with_replacement(), fc, best_so_far(), 2, Mode::exact());
    CHECK(delta.delta.exact_entries()[1] == Rational(-2, 9));
  }
  SUBCASE("any fixed order ties enumeration at t=|X| on a singleton class") {
    const auto delta = delta_vs_enumeration(*fixed_enumeration({2, 0, 1}), fc, best_so_far(),
                                            3, Mode::exact());
    CHECK(delta.delta.exact_entries()[2] == Rational(0));
  }
}

TEST_CASE("check_dominance holds on orbit classes and arbitrary weights") {
  SUBCASE("uniform orbit, |X|=4, |Y|=3") {
    const auto fc = FunctionClass::uniform(orbit(make_fn({0, 1, 2, 2})));
    const auto result = check_dominance(fc, best_so_far(), *random_with_replacement(), 8);
    CHECK(result.dominates);
  }
  SUBCASE("constant classes give exact equality at every t") {
    const auto fc = FunctionClass::uniform({make_fn({1, 1, 1}, 2)});
    const auto result = check_dominance(fc, best_so_far(), *random_with_replacement(), 6);
    CHECK(result.dominates);
    for (std::size_t t = 0; t < 6; ++t)
      CHECK(result.enumeration.exact_entries()[t] == result.algorithm.exact_entries()[t]);
  }
  SUBCASE("non-c.u.p. class with lopsided rational weights") {
    const FunctionClass fc({make_fn({0, 2, 1}, 3), make_fn({2, 2, 0}, 3)},
                           {Rational(9, 10), Rational(1, 10)});
    for (const auto& rival :
         {random_with_replacement(), revisit_j_algorithm(2),
          encode_wrapper(natural_enumeration(), GrowthFunction({0, 1, 0, 2}, 3))}) {
      const auto result = check_dominance(fc, best_so_far(), *rival, 6);
      CHECK(result.dominates);
    }
  }
}

TEST_CASE("check_sharpened_nfl separates c.u.p. from non-c.u.p. classes") {
  const std::vector<AlgorithmPtr> orders = {fixed_enumeration({0, 1}), fixed_enumeration({1, 0})};

  SUBCASE("the full space is closed under permutation") {
    const auto fc = FunctionClass::uniform(full_function_space(SearchSpace(2), ValueAlphabet(2)));
    const auto result = check_sharpened_nfl(fc, best_so_far(), orders);
    CHECK(result.scores_equivalent);
    CHECK(result.trace_sets_equivalent);
  }
  SUBCASE("a bare singleton is not") {
    const auto fc = make_uniform_class({{0, 1}}, 2);
    const auto result = check_sharpened_nfl(fc, best_so_far(), orders);
    CHECK_FALSE(result.scores_equivalent);  // {0} vs {1} at t=1
    CHECK_FALSE(result.trace_sets_equivalent);
  }
  SUBCASE("a single algorithm is trivially equivalent to itself") {
    const auto fc = make_uniform_class({{0, 1}}, 2);
    const auto result = check_sharpened_nfl(fc, best_so_far(), {fixed_enumeration({1, 0})});
    CHECK(result.scores_equivalent);
    CHECK(result.trace_sets_equivalent);
  }
  SUBCASE("non-uniform weights are rejected") {
    const FunctionClass fc({make_fn({0, 1}), make_fn({1, 0})}, {Rational(2, 3), Rational(1, 3)});
    CHECK_THROWS_AS(check_sharpened_nfl(fc, best_so_far(), orders), DomainError);
  }
  SUBCASE("revisiting algorithms are rejected by trace inspection") {
    const auto fc = make_uniform_class({{0, 1}, {1, 0}}, 2);
    // decodes to the point sequence 0,0,1: a guaranteed early revisit
    const auto revisiting = encode_wrapper(natural_enumeration(), GrowthFunction({0, 0, 1}, 2));
    CHECK_THROWS_AS(check_sharpened_nfl(fc, best_so_far(), {revisiting}, 2), DomainError);
  }
}

TEST_CASE("non-c.u.p. classes always separate some pair of orders at trace level") {
  RandomStream rng(404);
  int tested = 0;
  while (tested < 30) {
    const std::uint64_t x = 2 + rng.uniform_below(2);  // 2..3
    const std::uint64_t y = 2;
    std::set<std::vector<ValueIndex>> tables;
    const std::uint64_t picks = 1 + rng.uniform_below(3);
    for (std::uint64_t i = 0; i < picks; ++i) {
      std::vector<ValueIndex> t(x);
      for (auto& v : t) v = static_cast<ValueIndex>(rng.uniform_below(y));
      tables.insert(t);
    }
    std::vector<ObjectiveFunction> functions;
    for (const auto& t : tables) functions.emplace_back(SearchSpace(x), ValueAlphabet(y), t);
    const FunctionClass fc = FunctionClass::uniform(std::move(functions));
    if (is_cup(fc)) continue;

    std::vector<AlgorithmPtr> all_orders;
    std::vector<PointIndex> order(x);
    for (std::uint64_t i = 0; i < x; ++i) order[i] = static_cast<PointIndex>(i);
    do {
      all_orders.push_back(fixed_enumeration(order));
    } while (std::next_permutation(order.begin(), order.end()));

    const auto result = check_sharpened_nfl(fc, best_so_far(), all_orders);
    CHECK_FALSE(result.trace_sets_equivalent);
    ++tested;
  }
}

TEST_CASE("check_revisit_breaks_cup on the worked examples") {
  const auto pair_orbit = make_uniform_class({{0, 1}, {1, 0}}, 2);
  CHECK(check_revisit_breaks_cup(pair_orbit, {0}));

  const auto constants = make_uniform_class({{0, 0}}, 1);
  CHECK_FALSE(check_revisit_breaks_cup(constants, {0}));

  CHECK_THROWS_AS(check_revisit_breaks_cup(make_uniform_class({{0, 1}}, 2), {0}), DomainError);
  CHECK_THROWS_AS(check_revisit_breaks_cup(pair_orbit, {}), DomainError);
}

TEST_CASE("p_exact matches the closed form and its edge cases") {
  CHECK(p_exact(4, 2, 2) == Rational(2, 5));
  CHECK(p_exact(4, 2, 0) == Rational(1));
  for (std::uint64_t r : {1ull, 3ull, 10ull}) CHECK(p_exact(5, 5, r) == Rational(1));
  CHECK_THROWS_AS(p_exact(4, 5, 1), DomainError);
  CHECK_THROWS_AS(p_exact(4, 0, 1), DomainError);
}

TEST_CASE("p_exact equals the explicit closure ratio on a small grid") {
  for (std::uint64_t x = 1; x <= 4; ++x) {
    for (std::uint64_t lambda_j = 1; lambda_j <= x; ++lambda_j) {
      for (std::uint64_t r = 0; r <= 3; ++r) {
        // canonical representative: lambda_j copies of value 0, the rest distinct
        std::vector<ValueIndex> table(x);
        for (std::uint64_t p = 0; p < x; ++p)
          table[p] = p < lambda_j ? 0 : static_cast<ValueIndex>(p - lambda_j + 1);
        const auto f = ObjectiveFunction(SearchSpace(x), ValueAlphabet(1 + (x - lambda_j)),
                                         std::move(table));
        const auto fc = FunctionClass::uniform(orbit(f));
        const auto extended = extend_class_revisit_j(fc, r);
        REQUIRE(extended.size() == fc.size());

        const auto closure = orbit(extended.functions().front());
        for (const auto& g : extended.functions())
          REQUIRE(std::binary_search(closure.begin(), closure.end(), g));
        const Rational brute(BigInt(extended.size()), BigInt(closure.size()));
        CHECK(p_exact(x, lambda_j, r) == brute);
      }
    }
  }
}

TEST_CASE("p_bound dominates p_exact and decreases in r") {
  // frozen from an independent evaluation of the integral-bracketed bound
  CHECK(p_bound(4, 2, 2) == doctest::Approx(0.6350657928161356).epsilon(1e-12));
  CHECK(p_exact(4, 2, 2).convert_to<double>() <= p_bound(4, 2, 2));

  for (std::uint64_t x = 3; x <= 12; ++x)
    for (std::uint64_t lambda_j = 1; lambda_j < x; ++lambda_j)
      for (std::uint64_t r = 1; r <= 20; ++r)
        CHECK(p_exact(x, lambda_j, r).convert_to<double>() <= p_bound(x, lambda_j, r));

  double previous = p_bound(4, 2, 1);
  for (std::uint64_t r = 2; r <= 50; ++r) {
    const double current = p_bound(4, 2, r);
    CHECK(current < previous);
    previous = current;
  }

  CHECK_THROWS_AS(p_bound(4, 2, 0), DomainError);
  CHECK_THROWS_AS(p_bound(4, 4, 1), DomainError);
}

TEST_CASE("log of p_exact equals the per-revisit log-ratio sum") {
  for (const auto& [x, lambda_j] :
       std::vector<std::pair<std::uint64_t, std::uint64_t>>{{4, 2}, {10, 3}, {100, 10}}) {
    for (std::uint64_t r : {1ull, 5ull, 50ull, 200ull}) {
      const double via_rational = log_value(p_exact(x, lambda_j, r));
      const double via_sum = log_p_exact(x, lambda_j, r);
      CHECK(std::abs(via_rational - via_sum) <= 1e-12 * std::abs(via_sum));
    }
  }
}

TEST_CASE("distinguishability_trial estimates the trace-sharing probability") {
  SUBCASE("r=0 on a complete orbit always shares") {
    const auto fc = FunctionClass::uniform(orbit(make_fn({0, 0, 1, 2})));
    const auto estimate = distinguishability_trial(fc, *natural_enumeration(), 2000, 11);
    CHECK(estimate.estimate == 1.0);
    CHECK(estimate.successes == estimate.trials);
  }
  SUBCASE("the (|X|=4, lambda_j=2, r=2) construction estimates 2/5") {
    const auto fc = FunctionClass::uniform(orbit(make_fn({0, 0, 1, 2})));
    const auto extended = extend_class_revisit_j(fc, 2);
    const std::uint64_t trials = 100000;
    const auto estimate = distinguishability_trial(extended, *natural_enumeration(), trials, 5);
    const double p = 0.4;
    const double se = std::sqrt(p * (1 - p) / static_cast<double>(trials));
    CHECK(std::abs(estimate.estimate - p) <= 3 * se);
    CHECK(estimate.ci_low <= estimate.estimate);
    CHECK(estimate.ci_high >= estimate.estimate);
  }
  SUBCASE("degenerate inputs are rejected") {
    const auto fc = FunctionClass::uniform(orbit(make_fn({0, 1})));
    CHECK_THROWS_AS(distinguishability_trial(fc, *natural_enumeration(), 0, 1), DomainError);
    const FunctionClass mixed({make_fn({0, 0}, 2), make_fn({0, 1}, 2)},
                              {Rational(1, 2), Rational(1, 2)});
    CHECK_THROWS_AS(distinguishability_trial(mixed, *natural_enumeration(), 10, 1),
                    DomainError);
  }
}

TEST_CASE("reports serialize to the documented CSV shapes") {
  const auto exact = ExpectationReport::exact({Rational(8, 3), Rational(3)});
  CHECK(exact.to_csv() == "t,expectation_num,expectation_den\n1,8,3\n2,3,1\n");
  CHECK(DeltaReport{ExpectationReport::exact({Rational(-2, 9)})}.to_csv() ==
        "t,delta_num,delta_den\n1,-2,9\n");

  const auto mc = ExpectationReport::monte_carlo({{0.5, 0.25, 0.75, 100}}, 7);
  const std::string csv = mc.to_csv();
  CHECK(csv.find("t,mean,ci_low,ci_high,samples\n") == 0);
  CHECK(csv.find("1,0.5,0.25,0.75,100\n") != std::string::npos);
  CHECK_THROWS_AS(ExpectationReport::monte_carlo({{0.5, 0.4, 0.6, 0}}, 1), DomainError);
  CHECK_THROWS_AS(exact.monte_carlo_entries(), DomainError);
}

TEST_CASE("exact mode is refused for opaque algorithms") {
  struct Opaque final : SearchAlgorithm {
    Opaque() : SearchAlgorithm("opaque", StateSizeClass::kConstant, true) {}
    PointIndex choose_next(const Trace&, const SearchSpace&, const ValueAlphabet&,
                           RandomStream&) const override {
      return 0;
    }
  };
  const Opaque opaque;
  CHECK_THROWS_AS(
      expected_performance(opaque, bijective_three(), best_so_far(), 2, Mode::exact()), Error);
  // monte_carlo still works
  const auto report = expected_performance(opaque, bijective_three(), best_so_far(), 2,
                                           Mode::monte_carlo(100), 1);
  CHECK(report.monte_carlo_entries()[0].mean == doctest::Approx(1.0));
}
