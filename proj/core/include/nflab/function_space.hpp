#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <vector>

#include "nflab/rational.hpp"

namespace nflab {

using PointIndex = std::uint32_t;
using ValueIndex = std::uint32_t;

// A finite search space; its points are the indices 0..size-1.
class SearchSpace {
 public:
  explicit SearchSpace(std::uint64_t size);
  std::uint64_t size() const { return size_; }
  friend bool operator==(const SearchSpace&, const SearchSpace&) = default;

 private:
  std::uint64_t size_;
};

// A finite value set with the natural total order on its indices 0..size-1.
class ValueAlphabet {
 public:
  explicit ValueAlphabet(std::uint64_t size);
  std::uint64_t size() const { return size_; }
  friend bool operator==(const ValueAlphabet&, const ValueAlphabet&) = default;

 private:
  std::uint64_t size_;
};

// A total table from points to value indices.
class ObjectiveFunction {
 public:
  ObjectiveFunction(SearchSpace space, ValueAlphabet alphabet, std::vector<ValueIndex> table);

  const SearchSpace& space() const { return space_; }
  const ValueAlphabet& alphabet() const { return alphabet_; }
  const std::vector<ValueIndex>& table() const { return table_; }
  ValueIndex operator()(PointIndex point) const;

  friend bool operator==(const ObjectiveFunction&, const ObjectiveFunction&) = default;
  // Lexicographic on (space, alphabet, table); gives classes a canonical member order.
  friend std::strong_ordering operator<=>(const ObjectiveFunction& a, const ObjectiveFunction& b);

 private:
  SearchSpace space_;
  ValueAlphabet alphabet_;
  std::vector<ValueIndex> table_;
};

// Value multiplicities of a function's table; zero counts are never stored.
class Histogram {
 public:
  explicit Histogram(std::map<ValueIndex, std::uint64_t> counts);

  const std::map<ValueIndex, std::uint64_t>& counts() const { return counts_; }
  std::uint64_t total() const;
  std::uint64_t count_of(ValueIndex value) const;
  // The most frequent value; ties break toward the lowest value index.
  ValueIndex most_common_value() const;

  friend bool operator==(const Histogram&, const Histogram&) = default;
  friend std::strong_ordering operator<=>(const Histogram&, const Histogram&) = default;

 private:
  std::map<ValueIndex, std::uint64_t> counts_;
};

// A finite set of objective functions over one shared space/alphabet, plus
// exact rational weights summing to 1 (vacuous for the empty class). Members
// are kept sorted and distinct.
class FunctionClass {
 public:
  FunctionClass(SearchSpace space, ValueAlphabet alphabet);
  FunctionClass(std::vector<ObjectiveFunction> functions, std::vector<Rational> weights);
  static FunctionClass uniform(std::vector<ObjectiveFunction> functions);

  std::size_t size() const { return functions_.size(); }
  bool empty() const { return functions_.empty(); }
  const std::vector<ObjectiveFunction>& functions() const { return functions_; }
  const std::vector<Rational>& weights() const { return weights_; }
  const SearchSpace& space() const { return space_; }
  const ValueAlphabet& alphabet() const { return alphabet_; }

  bool contains(const ObjectiveFunction& f) const;
  bool uniform_weights() const;

 private:
  SearchSpace space_;
  ValueAlphabet alphabet_;
  std::vector<ObjectiveFunction> functions_;
  std::vector<Rational> weights_;
};

inline constexpr std::uint64_t kDefaultOrbitCap = 1'000'000;

Histogram histogram(const ObjectiveFunction& f);

// |X|! / prod_v count(v)!, in exact arbitrary-precision arithmetic.
BigInt orbit_size(const Histogram& h);

// All distinct table permutations of f, sorted; throws CapExceededError when
// the multinomial count exceeds cap.
std::vector<ObjectiveFunction> orbit(const ObjectiveFunction& f,
                                     std::uint64_t cap = kDefaultOrbitCap);

// True iff the member set is a union of complete permutation orbits.
// Weights are ignored.
bool is_cup(const FunctionClass& fc, std::uint64_t cap = kDefaultOrbitCap);

// True iff every permutation orbit intersecting the class is wholly contained
// in it and carries one weight on all of its members.
bool is_block_uniform(const FunctionClass& fc, std::uint64_t cap = kDefaultOrbitCap);

// Lowest point index that f maps to the given value; error if absent.
PointIndex lowest_point_with_value(const ObjectiveFunction& f, ValueIndex value);

// f extended to a space with one extra point per multiset entry, each new
// point constrained to its source point's value. New entries are appended
// sorted by source point, then by copy number.
ObjectiveFunction extend_for_revisits(const ObjectiveFunction& f,
                                      const std::vector<PointIndex>& revisited_points);

// extend_for_revisits applied pointwise; weights carry over unchanged.
FunctionClass extend_class(const FunctionClass& fc,
                           const std::vector<PointIndex>& revisited_points);

// Extends every member by `revisit_count` copies of its own most-common-value
// point (lowest point index mapped to the most common value, lowest value on
// ties). All extensions of a shared-histogram class share one histogram.
FunctionClass extend_class_revisit_j(const FunctionClass& fc, std::uint64_t revisit_count);

// Every function over the given space and alphabet; throws CapExceededError
// when |Y|^|X| exceeds cap.
std::vector<ObjectiveFunction> full_function_space(const SearchSpace& space,
                                                   const ValueAlphabet& alphabet,
                                                   std::uint64_t cap = kDefaultOrbitCap);

}  // namespace nflab
