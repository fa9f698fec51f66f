#include "nflab/function_space.hpp"

#include <algorithm>
#include <numeric>

#include "nflab/errors.hpp"

namespace nflab {

SearchSpace::SearchSpace(std::uint64_t size) : size_(size) {
  if (size == 0) throw DomainError("SearchSpace: size must be >= 1");
}

ValueAlphabet::ValueAlphabet(std::uint64_t size) : size_(size) {
  if (size == 0) throw DomainError("ValueAlphabet: size must be >= 1");
}

ObjectiveFunction::ObjectiveFunction(SearchSpace space, ValueAlphabet alphabet,
                                     std::vector<ValueIndex> table)
    : space_(space), alphabet_(alphabet), table_(std::move(table)) {
  if (table_.size() != space_.size())
    throw DomainError("ObjectiveFunction: table length must equal the space size");
  for (ValueIndex v : table_)
    if (v >= alphabet_.size())
      throw DomainError("ObjectiveFunction: table entry outside the alphabet");
}

ValueIndex ObjectiveFunction::operator()(PointIndex point) const {
  if (point >= table_.size()) throw DomainError("ObjectiveFunction: point out of range");
  return table_[point];
}

std::strong_ordering operator<=>(const ObjectiveFunction& a, const ObjectiveFunction& b) {
  if (auto c = a.space_.size() <=> b.space_.size(); c != 0) return c;
  if (auto c = a.alphabet_.size() <=> b.alphabet_.size(); c != 0) return c;
  return a.table_ <=> b.table_;
}

Histogram::Histogram(std::map<ValueIndex, std::uint64_t> counts) : counts_(std::move(counts)) {
  for (const auto& [value, count] : counts_)
    if (count == 0) throw DomainError("Histogram: zero counts must not be stored");
  if (counts_.empty()) throw DomainError("Histogram: at least one value required");
}

std::uint64_t Histogram::total() const {
  std::uint64_t sum = 0;
  for (const auto& [value, count] : counts_) sum += count;
  return sum;
}

std::uint64_t Histogram::count_of(ValueIndex value) const {
  auto it = counts_.find(value);
  return it == counts_.end() ? 0 : it->second;
}

ValueIndex Histogram::most_common_value() const {
  ValueIndex best = counts_.begin()->first;
  std::uint64_t best_count = counts_.begin()->second;
  for (const auto& [value, count] : counts_) {
    if (count > best_count) {  // ties keep the lowest value index
      best = value;
      best_count = count;
    }
  }
  return best;
}

namespace {

void validate_members(const SearchSpace& space, const ValueAlphabet& alphabet,
                      const std::vector<ObjectiveFunction>& functions) {
  for (const auto& f : functions) {
    if (!(f.space() == space) || !(f.alphabet() == alphabet))
      throw DomainError("FunctionClass: members must share one space and alphabet");
  }
}

}  // namespace

FunctionClass::FunctionClass(SearchSpace space, ValueAlphabet alphabet)
    : space_(space), alphabet_(alphabet) {}

FunctionClass::FunctionClass(std::vector<ObjectiveFunction> functions,
                             std::vector<Rational> weights)
    : space_(functions.empty()
                 ? throw DomainError(
                       "FunctionClass: use the (space, alphabet) constructor for empty classes")
                 : functions.front().space()),
      alphabet_(functions.front().alphabet()) {
  if (functions.size() != weights.size())
    throw DomainError("FunctionClass: one weight per function required");
  validate_members(space_, alphabet_, functions);

  std::vector<std::size_t> order(functions.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return functions[a] < functions[b]; });

  Rational total = 0;
  functions_.reserve(functions.size());
  weights_.reserve(weights.size());
  for (std::size_t i : order) {
    if (!functions_.empty() && functions_.back() == functions[i])
      throw DomainError("FunctionClass: duplicate member");
    if (weights[i] < 0) throw DomainError("FunctionClass: weights must be nonnegative");
    total += weights[i];
    functions_.push_back(std::move(functions[i]));
    weights_.push_back(weights[i]);
  }
  if (total != 1) throw DomainError("FunctionClass: weights must sum exactly to 1");
}

FunctionClass FunctionClass::uniform(std::vector<ObjectiveFunction> functions) {
  if (functions.empty())
    throw DomainError("FunctionClass::uniform: empty class needs an explicit space/alphabet");
  const std::size_t count = functions.size();
  const Rational w(1, static_cast<unsigned long long>(count));
  return FunctionClass(std::move(functions), std::vector<Rational>(count, w));
}

bool FunctionClass::contains(const ObjectiveFunction& f) const {
  return std::binary_search(functions_.begin(), functions_.end(), f);
}

bool FunctionClass::uniform_weights() const {
  for (const auto& w : weights_)
    if (w != weights_.front()) return false;
  return true;
}

Histogram histogram(const ObjectiveFunction& f) {
  std::map<ValueIndex, std::uint64_t> counts;
  for (ValueIndex v : f.table()) ++counts[v];
  return Histogram(std::move(counts));
}

BigInt orbit_size(const Histogram& h) {
  BigInt size = factorial(h.total());
  for (const auto& [value, count] : h.counts()) size /= factorial(count);
  return size;
}

std::vector<ObjectiveFunction> orbit(const ObjectiveFunction& f, std::uint64_t cap) {
  if (orbit_size(histogram(f)) > cap)
    throw CapExceededError("orbit: multinomial count exceeds the enumeration cap");
  std::vector<ValueIndex> table = f.table();
  std::sort(table.begin(), table.end());
  std::vector<ObjectiveFunction> members;
  do {
    members.emplace_back(f.space(), f.alphabet(), table);
  } while (std::next_permutation(table.begin(), table.end()));
  return members;  // next_permutation from sorted start: ascending and distinct
}

namespace {

// Member counts grouped by histogram, with the cap applied per group.
std::map<Histogram, std::vector<std::size_t>> group_by_histogram(const FunctionClass& fc,
                                                                 std::uint64_t cap) {
  std::map<Histogram, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < fc.size(); ++i)
    groups[histogram(fc.functions()[i])].push_back(i);
  for (const auto& [h, members] : groups)
    if (orbit_size(h) > cap)
      throw CapExceededError("is_cup: orbit size exceeds the enumeration cap");
  return groups;
}

}  // namespace

bool is_cup(const FunctionClass& fc, std::uint64_t cap) {
  // Two functions are table permutations of each other iff they share a
  // histogram, so a class is a union of complete orbits iff each histogram
  // group has exactly orbit_size members.
  for (const auto& [h, members] : group_by_histogram(fc, cap))
    if (BigInt(members.size()) != orbit_size(h)) return false;
  return true;
}

bool is_block_uniform(const FunctionClass& fc, std::uint64_t cap) {
  for (const auto& [h, members] : group_by_histogram(fc, cap)) {
    if (BigInt(members.size()) != orbit_size(h)) return false;
    const Rational& first = fc.weights()[members.front()];
    for (std::size_t i : members)
      if (fc.weights()[i] != first) return false;
  }
  return true;
}

PointIndex lowest_point_with_value(const ObjectiveFunction& f, ValueIndex value) {
  for (std::size_t p = 0; p < f.table().size(); ++p)
    if (f.table()[p] == value) return static_cast<PointIndex>(p);
  throw DomainError("lowest_point_with_value: value not in the codomain");
}

ObjectiveFunction extend_for_revisits(const ObjectiveFunction& f,
                                      const std::vector<PointIndex>& revisited_points) {
  std::vector<PointIndex> sorted = revisited_points;
  std::sort(sorted.begin(), sorted.end());
  std::vector<ValueIndex> table = f.table();
  table.reserve(table.size() + sorted.size());
  for (PointIndex p : sorted) {
    if (p >= f.space().size())
      throw DomainError("extend_for_revisits: revisited point out of range");
    table.push_back(f.table()[p]);
  }
  return ObjectiveFunction(SearchSpace(f.space().size() + sorted.size()), f.alphabet(),
                           std::move(table));
}

FunctionClass extend_class(const FunctionClass& fc,
                           const std::vector<PointIndex>& revisited_points) {
  if (fc.empty())
    return FunctionClass(SearchSpace(fc.space().size() + revisited_points.size()),
                         fc.alphabet());
  std::vector<ObjectiveFunction> extended;
  extended.reserve(fc.size());
  for (const auto& f : fc.functions()) extended.push_back(extend_for_revisits(f, revisited_points));
  return FunctionClass(std::move(extended), fc.weights());
}

FunctionClass extend_class_revisit_j(const FunctionClass& fc, std::uint64_t revisit_count) {
  if (fc.empty())
    return FunctionClass(SearchSpace(fc.space().size() + revisit_count), fc.alphabet());
  std::vector<ObjectiveFunction> extended;
  extended.reserve(fc.size());
  for (const auto& f : fc.functions()) {
    const ValueIndex j = histogram(f).most_common_value();
    const std::vector<PointIndex> revisits(revisit_count, lowest_point_with_value(f, j));
    extended.push_back(extend_for_revisits(f, revisits));
  }
  return FunctionClass(std::move(extended), fc.weights());
}

std::vector<ObjectiveFunction> full_function_space(const SearchSpace& space,
                                                   const ValueAlphabet& alphabet,
                                                   std::uint64_t cap) {
  BigInt count = 1;
  for (std::uint64_t i = 0; i < space.size(); ++i) {
    count *= alphabet.size();
    if (count > cap) throw CapExceededError("full_function_space: |Y|^|X| exceeds the cap");
  }
  std::vector<ObjectiveFunction> all;
  all.reserve(count.convert_to<std::size_t>());
  std::vector<ValueIndex> table(space.size(), 0);
  while (true) {
    all.emplace_back(space, alphabet, table);
    std::size_t pos = table.size();
    while (pos > 0) {
      --pos;
      if (++table[pos] < alphabet.size()) break;
      table[pos] = 0;
      if (pos == 0) return all;
    }
  }
}

}  // namespace nflab
