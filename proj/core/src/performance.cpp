#include "nflab/performance.hpp"

#include <algorithm>
#include <limits>

#include "nflab/errors.hpp"

namespace nflab {

ValueSet::ValueSet(std::vector<ValueIndex> values) : values_(std::move(values)) {
  std::sort(values_.begin(), values_.end());
  values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
}

ValueSet ValueSet::from_mask(std::uint64_t mask) {
  std::vector<ValueIndex> values;
  for (ValueIndex v = 0; v < 64; ++v)
    if (mask >> v & 1) values.push_back(v);
  ValueSet set;
  set.values_ = std::move(values);  // already sorted and distinct
  return set;
}

bool ValueSet::contains(ValueIndex v) const {
  return std::binary_search(values_.begin(), values_.end(), v);
}

bool ValueSet::subset_of(const ValueSet& other) const {
  return std::includes(other.values_.begin(), other.values_.end(), values_.begin(),
                       values_.end());
}

ValueSet ValueSet::with(ValueIndex v) const {
  if (contains(v)) return *this;
  std::vector<ValueIndex> values = values_;
  values.insert(std::upper_bound(values.begin(), values.end(), v), v);
  ValueSet set;
  set.values_ = std::move(values);
  return set;
}

Score Score::neg_infinity() { return Score(Kind::kNegInfinity); }
Score Score::pos_infinity() { return Score(Kind::kPosInfinity); }

const Rational& Score::value() const {
  if (!finite()) throw DomainError("Score: no finite value on an infinite score");
  return value_;
}

double Score::to_double() const {
  switch (kind_) {
    case Kind::kNegInfinity:
      return -std::numeric_limits<double>::infinity();
    case Kind::kPosInfinity:
      return std::numeric_limits<double>::infinity();
    case Kind::kFinite:
      break;
  }
  return value_.convert_to<double>();
}

std::string Score::str() const {
  if (is_neg_infinity()) return "-inf";
  if (is_pos_infinity()) return "+inf";
  return to_fraction_string(value_);
}

bool operator==(const Score& a, const Score& b) {
  return a.kind_ == b.kind_ && (a.kind_ != Score::Kind::kFinite || a.value_ == b.value_);
}

std::strong_ordering operator<=>(const Score& a, const Score& b) {
  if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;  // -inf < finite < +inf
  if (a.kind_ != Score::Kind::kFinite) return std::strong_ordering::equal;
  if (a.value_ < b.value_) return std::strong_ordering::less;
  if (b.value_ < a.value_) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

SensibleMeasure::SensibleMeasure(std::string name, std::function<Score(const ValueSet&)> evaluator,
                                 bool declared_monotone)
    : name_(std::move(name)), evaluator_(std::move(evaluator)),
      declared_monotone_(declared_monotone) {}

ValueSet distinct_values(const Trace& trace, std::size_t n) {
  if (n > trace.size()) throw DomainError("distinct_values: n exceeds the trace length");
  std::vector<ValueIndex> values;
  values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) values.push_back(trace[i].value);
  return ValueSet(std::move(values));
}

SensibleMeasure best_so_far() {
  return SensibleMeasure("best_so_far", [](const ValueSet& s) {
    if (s.empty()) return Score::neg_infinity();
    return Score(Rational(s.values().back()));
  });
}

SensibleMeasure distinct_count() {
  return SensibleMeasure("distinct_count",
                         [](const ValueSet& s) { return Score(Rational(s.size())); });
}

SensibleMeasure threshold_hit(ValueIndex v) {
  return SensibleMeasure("threshold(v=" + std::to_string(v) + ")", [v](const ValueSet& s) {
    const bool hit = !s.empty() && s.values().back() >= v;
    return Score(Rational(hit ? 1 : 0));
  });
}

Score score(const SensibleMeasure& measure, const Trace& trace, std::size_t n) {
  return measure(distinct_values(trace, n));
}

}  // namespace nflab
