#include "doctest.h"

#include <algorithm>
#include <set>

#include "nflab/errors.hpp"
#include "nflab/function_space.hpp"
#include "nflab/rng.hpp"
#include "support.hpp"

using namespace nflab;
using nflab::test::make_fn;
using nflab::test::make_uniform_class;

TEST_CASE("histogram counts table entries") {
  CHECK(histogram(make_fn({0, 0, 1})).counts() ==
        std::map<ValueIndex, std::uint64_t>{{0, 2}, {1, 1}});
  CHECK(histogram(make_fn({2, 2, 2})).counts() == std::map<ValueIndex, std::uint64_t>{{2, 3}});
  CHECK(histogram(make_fn({0, 1, 2, 0})).counts() ==
        std::map<ValueIndex, std::uint64_t>{{0, 2}, {1, 1}, {2, 1}});
}

TEST_CASE("most_common_value breaks ties toward the lowest value") {
  CHECK(histogram(make_fn({0, 0, 1})).most_common_value() == 0);
  CHECK(histogram(make_fn({0, 1, 2})).most_common_value() == 0);
  CHECK(histogram(make_fn({2, 1, 1})).most_common_value() == 1);
  CHECK(histogram(make_fn({2, 2, 2})).most_common_value() == 2);
}

TEST_CASE("orbit enumerates distinct table permutations") {
  const auto members = orbit(make_fn({0, 0, 1}));
  std::set<std::vector<ValueIndex>> tables;
  for (const auto& f : members) tables.insert(f.table());
  CHECK(tables == std::set<std::vector<ValueIndex>>{{0, 0, 1}, {0, 1, 0}, {1, 0, 0}});

  CHECK(orbit(make_fn({1, 1})).size() == 1);
  CHECK(orbit(make_fn({0, 1})).size() == 2);
}

TEST_CASE("orbit respects the enumeration cap") {
  std::vector<ValueIndex> bijective(10);
  for (ValueIndex i = 0; i < 10; ++i) bijective[i] = i;
  CHECK_THROWS_AS(orbit(make_fn(bijective), 100), CapExceededError);
}

TEST_CASE("orbit_size matches the multinomial formula") {
  CHECK(orbit_size(histogram(make_fn({0, 0, 1}))) == 3);
  CHECK(orbit_size(histogram(make_fn({0, 0, 0, 0}, 1))) == 1);
  CHECK(orbit_size(histogram(make_fn({0, 1, 2, 0}))) == 12);
}

TEST_CASE("orbit_size equals enumerated orbit cardinality exhaustively") {
  // Every histogram with |X| <= 5, |Y| <= 3, via sorted representative tables.
  for (std::uint64_t x = 1; x <= 5; ++x) {
    for (std::uint64_t y = 1; y <= 3; ++y) {
      std::vector<ValueIndex> table(x, 0);
      while (true) {
        if (std::is_sorted(table.begin(), table.end())) {
          const auto f = ObjectiveFunction(SearchSpace(x), ValueAlphabet(y), table);
          CHECK(orbit_size(histogram(f)) == orbit(f).size());
        }
        std::size_t pos = table.size();
        bool done = false;
        while (pos > 0) {
          --pos;
          if (++table[pos] < y) break;
          table[pos] = 0;
          if (pos == 0) done = true;
        }
        if (done) break;
      }
    }
  }
}

TEST_CASE("is_cup on the worked examples") {
  CHECK(is_cup(make_uniform_class({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, 2)));
  CHECK_FALSE(is_cup(make_uniform_class({{0, 1}}, 2)));
  CHECK(is_cup(make_uniform_class({{0, 1}, {1, 0}}, 2)));
}

TEST_CASE("is_cup means the class equals the union of member orbits") {
  RandomStream rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t x = 1 + rng.uniform_below(4);
    const std::uint64_t y = 1 + rng.uniform_below(3);
    std::set<std::vector<ValueIndex>> tables;
    const std::uint64_t picks = 1 + rng.uniform_below(4);
    for (std::uint64_t i = 0; i < picks; ++i) {
      std::vector<ValueIndex> t(x);
      for (auto& v : t) v = static_cast<ValueIndex>(rng.uniform_below(y));
      tables.insert(t);
    }
    std::vector<ObjectiveFunction> functions;
    for (const auto& t : tables)
      functions.emplace_back(SearchSpace(x), ValueAlphabet(y), t);
    const FunctionClass fc = FunctionClass::uniform(std::move(functions));

    std::set<std::vector<ValueIndex>> closure;
    for (const auto& f : fc.functions())
      for (const auto& g : orbit(f)) closure.insert(g.table());
    const bool equals_closure = closure.size() == fc.size();
    CHECK(is_cup(fc) == equals_closure);
  }
}

TEST_CASE("is_block_uniform on the worked examples") {
  SUBCASE("uniform over the full space is block uniform") {
    auto full = full_function_space(SearchSpace(2), ValueAlphabet(2));
    CHECK(is_block_uniform(FunctionClass::uniform(std::move(full))));
  }
  SUBCASE("unequal weights within one orbit are not") {
    FunctionClass fc({make_fn({0, 1}), make_fn({1, 0})}, {Rational(2, 3), Rational(1, 3)});
    CHECK_FALSE(is_block_uniform(fc));
    CHECK(is_cup(fc));
  }
  SUBCASE("per-orbit uniform weights are block uniform") {
    FunctionClass fc({make_fn({0, 1}), make_fn({1, 0}), make_fn({0, 0}, 2)},
                     {Rational(1, 4), Rational(1, 4), Rational(1, 2)});
    CHECK(is_block_uniform(fc));
  }
  SUBCASE("block uniform implies closed under permutation") {
    RandomStream rng(77);
    for (int trial = 0; trial < 100; ++trial) {
      const std::uint64_t x = 1 + rng.uniform_below(3);
      const std::uint64_t y = 1 + rng.uniform_below(3);
      std::set<std::vector<ValueIndex>> tables;
      std::vector<ValueIndex> t(x);
      for (auto& v : t) v = static_cast<ValueIndex>(rng.uniform_below(y));
      tables.insert(t);
      std::vector<ObjectiveFunction> functions;
      for (const auto& tab : tables)
        functions.emplace_back(SearchSpace(x), ValueAlphabet(y), tab);
      const FunctionClass fc = FunctionClass::uniform(std::move(functions));
      if (is_block_uniform(fc)) CHECK(is_cup(fc));
    }
  }
}

TEST_CASE("extend_for_revisits pins values of the appended copies") {
  CHECK(extend_for_revisits(make_fn({0, 1}), {0}).table() == std::vector<ValueIndex>{0, 1, 0});
  CHECK(extend_for_revisits(make_fn({0, 1}), {}).table() == std::vector<ValueIndex>{0, 1});
  CHECK(extend_for_revisits(make_fn({0, 0, 1, 2}), {0, 0}).table() ==
        std::vector<ValueIndex>{0, 0, 1, 2, 0, 0});
  // canonical order: sorted by source point
  CHECK(extend_for_revisits(make_fn({3, 1, 2}), {2, 0}).table() ==
        std::vector<ValueIndex>{3, 1, 2, 3, 2});
  CHECK_THROWS_AS(extend_for_revisits(make_fn({0, 1}), {2}), DomainError);
}

TEST_CASE("extend_for_revisits only adds multiplicity at revisited values") {
  RandomStream rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t x = 1 + rng.uniform_below(5);
    const std::uint64_t y = 1 + rng.uniform_below(3);
    std::vector<ValueIndex> t(x);
    for (auto& v : t) v = static_cast<ValueIndex>(rng.uniform_below(y));
    std::vector<PointIndex> revisits(rng.uniform_below(4));
    for (auto& p : revisits) p = static_cast<PointIndex>(rng.uniform_below(x));

    const auto f = ObjectiveFunction(SearchSpace(x), ValueAlphabet(y), t);
    const auto extended = extend_for_revisits(f, revisits);
    CHECK(extended.space().size() == x + revisits.size());

    auto counts = histogram(f).counts();
    for (PointIndex p : revisits) ++counts[f(p)];
    CHECK(histogram(extended).counts() == counts);
  }
}

TEST_CASE("extend_class maps members pointwise and keeps weights") {
  FunctionClass fc({make_fn({0, 1}), make_fn({1, 0}), make_fn({0, 0}, 2)},
                   {Rational(1, 2), Rational(1, 4), Rational(1, 4)});
  const auto extended = extend_class(fc, {1});
  REQUIRE(extended.size() == 3);
  CHECK(extended.space().size() == 3);
  // sorted member order: [0,0,0] < [0,1,1] < [1,0,0]
  CHECK(extended.functions()[0].table() == std::vector<ValueIndex>{0, 0, 0});
  CHECK(extended.functions()[1].table() == std::vector<ValueIndex>{0, 1, 1});
  CHECK(extended.functions()[2].table() == std::vector<ValueIndex>{1, 0, 0});
  CHECK(extended.weights()[0] == Rational(1, 4));
  CHECK(extended.weights()[1] == Rational(1, 2));
  CHECK(extended.weights()[2] == Rational(1, 4));

  const FunctionClass empty(SearchSpace(2), ValueAlphabet(2));
  CHECK(extend_class(empty, {0}).empty());
  CHECK(extend_class(empty, {0}).space().size() == 3);
}

TEST_CASE("extend_class_revisit_j produces one shared histogram") {
  const auto base = make_fn({0, 0, 1, 2});
  const FunctionClass fc = FunctionClass::uniform(orbit(base));
  REQUIRE(fc.size() == 12);

  const auto extended = extend_class_revisit_j(fc, 2);
  CHECK(extended.size() == 12);
  CHECK_FALSE(is_cup(extended));

  const Histogram expected(std::map<ValueIndex, std::uint64_t>{{0, 4}, {1, 1}, {2, 1}});
  for (const auto& f : extended.functions()) CHECK(histogram(f) == expected);

  // Independent closure count: all 3^6 tables on six points with the shared
  // histogram.
  int closure = 0;
  std::vector<ValueIndex> t(6, 0);
  while (true) {
    int c0 = 0, c1 = 0, c2 = 0;
    for (ValueIndex v : t) {
      if (v == 0) ++c0;
      if (v == 1) ++c1;
      if (v == 2) ++c2;
    }
    if (c0 == 4 && c1 == 1 && c2 == 1) ++closure;
    std::size_t pos = t.size();
    bool done = false;
    while (pos > 0) {
      --pos;
      if (++t[pos] < 3) break;
      t[pos] = 0;
      if (pos == 0) done = true;
    }
    if (done) break;
  }
  CHECK(closure == 30);
  CHECK(orbit_size(expected) == 30);
}

TEST_CASE("revisiting breaks closure for any class with a non-constant member") {
  RandomStream rng(555);
  int checked = 0;
  while (checked < 100) {
    const std::uint64_t x = 2 + rng.uniform_below(4);
    const std::uint64_t y = 2 + rng.uniform_below(2);
    std::vector<ValueIndex> t(x);
    for (auto& v : t) v = static_cast<ValueIndex>(rng.uniform_below(y));
    const auto f = ObjectiveFunction(SearchSpace(x), ValueAlphabet(y), t);
    if (histogram(f).counts().size() < 2) continue;  // want a non-constant member

    const FunctionClass fc = FunctionClass::uniform(orbit(f));
    std::vector<PointIndex> revisits(1 + rng.uniform_below(3));
    for (auto& p : revisits) p = static_cast<PointIndex>(rng.uniform_below(x));

    const auto extended = extend_class(fc, revisits);
    CHECK(extended.size() == fc.size());
    CHECK_FALSE(is_cup(extended));
    ++checked;
  }
}

TEST_CASE("extending constant-only classes keeps closure") {
  const FunctionClass constants = make_uniform_class({{0, 0}}, 1);
  const auto extended = extend_class(constants, {0});
  CHECK(is_cup(extended));
  CHECK(extended.functions()[0].table() == std::vector<ValueIndex>{0, 0, 0});
}

TEST_CASE("FunctionClass validates weights and membership") {
  CHECK_THROWS_AS(FunctionClass({make_fn({0, 1})}, {Rational(1, 2)}), DomainError);
  CHECK_THROWS_AS(FunctionClass({make_fn({0, 1}), make_fn({0, 1})},
                                {Rational(1, 2), Rational(1, 2)}),
                  DomainError);
  CHECK_THROWS_AS(FunctionClass({make_fn({0, 1}), make_fn({0, 1, 0})},
                                {Rational(1, 2), Rational(1, 2)}),
                  DomainError);
  const FunctionClass fc = make_uniform_class({{0, 1}, {1, 0}}, 2);
  CHECK(fc.contains(make_fn({0, 1})));
  CHECK_FALSE(fc.contains(make_fn({0, 0}, 2)));
  CHECK(fc.uniform_weights());
}

TEST_CASE("full_function_space enumerates Y^X under a cap") {
  CHECK(full_function_space(SearchSpace(2), ValueAlphabet(2)).size() == 4);
  CHECK(full_function_space(SearchSpace(3), ValueAlphabet(3)).size() == 27);
  CHECK(full_function_space(SearchSpace(4), ValueAlphabet(1)).size() == 1);
  CHECK_THROWS_AS(full_function_space(SearchSpace(30), ValueAlphabet(3)), CapExceededError);
}
