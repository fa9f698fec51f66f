#pragma once

#include <compare>
#include <functional>
#include <string>
#include <vector>

#include "nflab/rational.hpp"
#include "nflab/search_algorithms.hpp"

namespace nflab {

// A set of value indices; stored sorted and distinct.
class ValueSet {
 public:
  ValueSet() = default;
  explicit ValueSet(std::vector<ValueIndex> values);
  static ValueSet from_mask(std::uint64_t mask);

  bool empty() const { return values_.empty(); }
  std::size_t size() const { return values_.size(); }
  const std::vector<ValueIndex>& values() const { return values_; }
  bool contains(ValueIndex v) const;
  bool subset_of(const ValueSet& other) const;
  ValueSet with(ValueIndex v) const;

  friend bool operator==(const ValueSet&, const ValueSet&) = default;

 private:
  std::vector<ValueIndex> values_;
};

// Extended rational: finite values plus -inf/+inf sentinels, totally ordered.
class Score {
 public:
  Score() : Score(Rational(0)) {}
  Score(Rational value) : kind_(Kind::kFinite), value_(std::move(value)) {}
  Score(long long value) : Score(Rational(value)) {}
  static Score neg_infinity();
  static Score pos_infinity();

  bool finite() const { return kind_ == Kind::kFinite; }
  bool is_neg_infinity() const { return kind_ == Kind::kNegInfinity; }
  bool is_pos_infinity() const { return kind_ == Kind::kPosInfinity; }
  // Pre: finite().
  const Rational& value() const;
  double to_double() const;
  std::string str() const;

  friend bool operator==(const Score& a, const Score& b);
  friend std::strong_ordering operator<=>(const Score& a, const Score& b);

 private:
  enum class Kind { kNegInfinity, kFinite, kPosInfinity };
  explicit Score(Kind kind) : kind_(kind) {}
  Kind kind_;
  Rational value_;
};

// A performance measure defined only on the set of distinct observed values,
// monotone under set inclusion; higher is better.
class SensibleMeasure {
 public:
  SensibleMeasure(std::string name, std::function<Score(const ValueSet&)> evaluator,
                  bool declared_monotone = true);

  const std::string& name() const { return name_; }
  bool declared_monotone() const { return declared_monotone_; }
  Score operator()(const ValueSet& values) const { return evaluator_(values); }

 private:
  std::string name_;
  std::function<Score(const ValueSet&)> evaluator_;
  bool declared_monotone_;
};

// Distinct values among the first n steps; n must not exceed the trace length.
ValueSet distinct_values(const Trace& trace, std::size_t n);

// Highest observed value index; the empty set scores -inf.
SensibleMeasure best_so_far();

// Number of distinct observed values.
SensibleMeasure distinct_count();

// 1 once any value >= v has been observed, else 0.
SensibleMeasure threshold_hit(ValueIndex v);

Score score(const SensibleMeasure& measure, const Trace& trace, std::size_t n);

}  // namespace nflab
