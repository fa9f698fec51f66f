#include "nflab/search_algorithms.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_set>

#include "nflab/errors.hpp"

namespace nflab {

namespace {
// Salt spaces for seed derivation, one per stochastic consumer.
constexpr std::uint64_t kEnumerationSalt = 0x72616e64u;
constexpr std::uint64_t kReplacementSalt = 0x7265706cu;
}  // namespace

std::vector<PointIndex> Trace::point_sequence() const {
  std::vector<PointIndex> points;
  points.reserve(steps_.size());
  for (const auto& s : steps_) points.push_back(s.point);
  return points;
}

std::vector<ValueIndex> Trace::value_sequence() const {
  std::vector<ValueIndex> values;
  values.reserve(steps_.size());
  for (const auto& s : steps_) values.push_back(s.value);
  return values;
}

bool Trace::non_revisiting_prefix(std::uint64_t space_size) const {
  const std::size_t n = std::min<std::size_t>(steps_.size(), space_size);
  std::unordered_set<PointIndex> seen;
  for (std::size_t i = 0; i < n; ++i)
    if (!seen.insert(steps_[i].point).second) return false;
  return true;
}

Trace run(const SearchAlgorithm& algorithm, const ObjectiveFunction& f, std::size_t budget,
          std::uint64_t seed) {
  if (budget == 0) throw DomainError("run: budget must be >= 1");
  RandomStream stream(seed);
  Trace trace;
  for (std::size_t k = 0; k < budget; ++k) {
    const PointIndex x = algorithm.choose_next(trace, f.space(), f.alphabet(), stream);
    if (x >= f.space().size())
      throw Error("run: algorithm '" + algorithm.name() + "' chose an out-of-range point");
    trace.append(x, f(x));
  }
  return trace;
}

GrowthFunction::GrowthFunction(std::vector<PointIndex> mapping, std::uint64_t solution_size)
    : mapping_(std::move(mapping)), solution_size_(solution_size) {
  if (mapping_.empty()) throw DomainError("GrowthFunction: encoded space must be nonempty");
  if (solution_size_ == 0) throw DomainError("GrowthFunction: solution space must be nonempty");
  std::vector<bool> hit(solution_size_, false);
  for (PointIndex x : mapping_) {
    if (x >= solution_size_) throw DomainError("GrowthFunction: mapping target out of range");
    hit[x] = true;
  }
  for (bool h : hit)
    if (!h) throw DomainError("GrowthFunction: mapping must be surjective");
  injective_ = mapping_.size() == solution_size_;
}

GrowthFunction GrowthFunction::identity(std::uint64_t size) {
  std::vector<PointIndex> mapping(size);
  std::iota(mapping.begin(), mapping.end(), PointIndex{0});
  return GrowthFunction(std::move(mapping), size);
}

PointIndex GrowthFunction::operator()(std::uint64_t encoded_point) const {
  if (encoded_point >= mapping_.size())
    throw DomainError("GrowthFunction: encoded point out of range");
  return mapping_[encoded_point];
}

namespace {

// --- exact decision models ------------------------------------------------

class FixedOrderModel final : public DecisionModel {
 public:
  FixedOrderModel(std::vector<PointIndex> order, std::uint64_t space_size)
      : order_(std::move(order)), space_size_(space_size) {}

  State initial_state() const override { return {0}; }

  std::vector<Branch> step(const State& state, const ObjectiveFunction&) const override {
    const std::uint64_t k = state[0];
    const auto idx = static_cast<std::size_t>(k % space_size_);
    const PointIndex point = order_.empty() ? static_cast<PointIndex>(idx) : order_[idx];
    return {{point, {k + 1}, Rational(1)}};
  }

 private:
  std::vector<PointIndex> order_;  // empty means natural order
  std::uint64_t space_size_;
};

// Uniform over unvisited points: sequential sampling of a uniformly random
// visit order. Uniform over the whole space once exhausted (the observed
// value set is complete by then, so sensible-measure scores are unaffected).
class UniformEnumerationModel final : public DecisionModel {
 public:
  explicit UniformEnumerationModel(std::uint64_t space_size) : space_size_(space_size) {}

  State initial_state() const override { return {0}; }

  std::vector<Branch> step(const State& state, const ObjectiveFunction&) const override {
    const std::uint64_t visited = state[0];
    std::vector<Branch> branches;
    std::uint64_t unvisited = 0;
    for (std::uint64_t p = 0; p < space_size_; ++p)
      if (!(visited >> p & 1)) ++unvisited;
    if (unvisited == 0) {
      const Rational prob(1, space_size_);
      for (std::uint64_t p = 0; p < space_size_; ++p)
        branches.push_back({static_cast<PointIndex>(p), {visited}, prob});
      return branches;
    }
    const Rational prob(1, unvisited);
    for (std::uint64_t p = 0; p < space_size_; ++p)
      if (!(visited >> p & 1))
        branches.push_back({static_cast<PointIndex>(p), {visited | (std::uint64_t{1} << p)}, prob});
    return branches;
  }

 private:
  std::uint64_t space_size_;
};

class UniformReplacementModel final : public DecisionModel {
 public:
  explicit UniformReplacementModel(std::uint64_t space_size) : space_size_(space_size) {}

  State initial_state() const override { return {}; }

  std::vector<Branch> step(const State&, const ObjectiveFunction&) const override {
    std::vector<Branch> branches;
    const Rational prob(1, space_size_);
    for (std::uint64_t p = 0; p < space_size_; ++p)
      branches.push_back({static_cast<PointIndex>(p), {}, prob});
    return branches;
  }

 private:
  std::uint64_t space_size_;
};

PointIndex revisit_target(const ObjectiveFunction& f) {
  return lowest_point_with_value(f, histogram(f).most_common_value());
}

class RevisitJModel final : public DecisionModel {
 public:
  RevisitJModel(std::uint64_t space_size, std::uint64_t revisit_count)
      : space_size_(space_size), revisit_count_(revisit_count) {}

  State initial_state() const override { return {0}; }

  std::vector<Branch> step(const State& state, const ObjectiveFunction& f) const override {
    const std::uint64_t k = state[0];
    PointIndex point;
    if (k < space_size_) {
      point = static_cast<PointIndex>(k);
    } else if (k < space_size_ + revisit_count_) {
      point = revisit_target(f);  // the full table has been observed by now
    } else {
      point = static_cast<PointIndex>((k - revisit_count_) % space_size_);
    }
    return {{point, {k + 1}, Rational(1)}};
  }

 private:
  std::uint64_t space_size_;
  std::uint64_t revisit_count_;
};

class EncodedModel final : public DecisionModel {
 public:
  EncodedModel(std::unique_ptr<DecisionModel> inner, GrowthFunction growth)
      : inner_(std::move(inner)), growth_(std::move(growth)) {}

  State initial_state() const override { return inner_->initial_state(); }

  std::vector<Branch> step(const State& state, const ObjectiveFunction& f) const override {
    // The inner algorithm searches W and sees the decoded objective f(g(w)).
    std::vector<ValueIndex> composed(growth_.encoded_size());
    for (std::uint64_t w = 0; w < growth_.encoded_size(); ++w)
      composed[w] = f.table()[growth_(w)];
    const ObjectiveFunction decoded(SearchSpace(growth_.encoded_size()), f.alphabet(),
                                    std::move(composed));
    std::vector<Branch> branches = inner_->step(state, decoded);
    for (auto& b : branches) b.point = growth_(b.point);
    return branches;
  }

 private:
  std::unique_ptr<DecisionModel> inner_;
  GrowthFunction growth_;
};

// --- algorithms -------------------------------------------------------------

class FixedEnumeration final : public SearchAlgorithm {
 public:
  explicit FixedEnumeration(std::optional<std::vector<PointIndex>> order)
      : SearchAlgorithm(order ? "fixed_enum" : "natural_enum",
                        order ? StateSizeClass::kLinear : StateSizeClass::kLogarithmic,
                        /*minimally_revisiting=*/true),
        order_(std::move(order)) {
    if (order_) {
      if (order_->empty()) throw DomainError("fixed_enumeration: order must be nonempty");
      std::vector<PointIndex> sorted = *order_;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 0; i < sorted.size(); ++i)
        if (sorted[i] != i) throw DomainError("fixed_enumeration: order must be a permutation");
    }
  }

  PointIndex choose_next(const Trace& prefix, const SearchSpace& space, const ValueAlphabet&,
                         RandomStream&) const override {
    const std::uint64_t n = space.size();
    if (order_ && order_->size() != n)
      throw DomainError("fixed_enumeration: order length does not match the space");
    const auto idx = static_cast<std::size_t>(prefix.size() % n);
    return order_ ? (*order_)[idx] : static_cast<PointIndex>(idx);
  }

  std::unique_ptr<DecisionModel> decision_model(const SearchSpace& space) const override {
    if (order_ && order_->size() != space.size())
      throw DomainError("fixed_enumeration: order length does not match the space");
    return std::make_unique<FixedOrderModel>(order_.value_or(std::vector<PointIndex>{}),
                                             space.size());
  }

  std::optional<std::size_t> run_state_bytes(const SearchSpace&) const override {
    const std::size_t order_bytes = order_ ? order_->size() * sizeof(PointIndex) : 0;
    return sizeof(std::uint64_t) + order_bytes;
  }

 private:
  std::optional<std::vector<PointIndex>> order_;
};

class RandomEnumeration final : public SearchAlgorithm {
 public:
  explicit RandomEnumeration(std::uint64_t salt)
      : SearchAlgorithm("random_enum", StateSizeClass::kLogarithmic,
                        /*minimally_revisiting=*/true),
        salt_(salt) {}

  PointIndex choose_next(const Trace& prefix, const SearchSpace& space, const ValueAlphabet&,
                         RandomStream& stream) const override {
    const std::uint64_t n = space.size();
    const std::uint64_t key = derive_seed(stream.initial_seed(), kEnumerationSalt ^ salt_);
    const KeyedPermutation perm(n, key);
    return static_cast<PointIndex>(perm(prefix.size() % n));
  }

  std::unique_ptr<DecisionModel> decision_model(const SearchSpace& space) const override {
    if (space.size() > 64) return nullptr;  // exact mode tracks visited sets in one word
    return std::make_unique<UniformEnumerationModel>(space.size());
  }

  std::optional<std::size_t> run_state_bytes(const SearchSpace&) const override {
    // (permutation key, step counter, domain size) regardless of |X|.
    return KeyedPermutation::state_bytes() + sizeof(std::uint64_t);
  }

 private:
  std::uint64_t salt_;
};

class RandomWithReplacement final : public SearchAlgorithm {
 public:
  explicit RandomWithReplacement(std::uint64_t salt)
      : SearchAlgorithm("random_replacement", StateSizeClass::kConstant,
                        /*minimally_revisiting=*/false),
        salt_(salt) {}

  PointIndex choose_next(const Trace& prefix, const SearchSpace& space, const ValueAlphabet&,
                         RandomStream& stream) const override {
    const std::uint64_t step_seed =
        derive_seed(stream.initial_seed(), kReplacementSalt ^ salt_) + prefix.size();
    RandomStream step_stream(step_seed);
    return static_cast<PointIndex>(step_stream.uniform_below(space.size()));
  }

  std::unique_ptr<DecisionModel> decision_model(const SearchSpace& space) const override {
    return std::make_unique<UniformReplacementModel>(space.size());
  }

  std::optional<std::size_t> run_state_bytes(const SearchSpace&) const override {
    return 2 * sizeof(std::uint64_t);
  }

 private:
  std::uint64_t salt_;
};

class RevisitJ final : public SearchAlgorithm {
 public:
  explicit RevisitJ(std::uint64_t revisit_count)
      // revisits happen only after the space is exhausted
      : SearchAlgorithm("revisit_j(r=" + std::to_string(revisit_count) + ")",
                        StateSizeClass::kLogarithmic, /*minimally_revisiting=*/true),
        revisit_count_(revisit_count) {}

  PointIndex choose_next(const Trace& prefix, const SearchSpace& space, const ValueAlphabet&,
                         RandomStream&) const override {
    const std::uint64_t n = space.size();
    const std::uint64_t k = prefix.size();
    if (k < n) return static_cast<PointIndex>(k);
    if (k < n + revisit_count_) {
      // Most frequent value among the first n observations, lowest value on
      // ties; then the lowest-index observed point mapped to it.
      std::map<ValueIndex, std::uint64_t> counts;
      for (std::size_t i = 0; i < n; ++i) ++counts[prefix[i].value];
      const ValueIndex j = Histogram(std::move(counts)).most_common_value();
      for (std::size_t i = 0; i < n; ++i)
        if (prefix[i].value == j) return prefix[i].point;
    }
    return static_cast<PointIndex>((k - revisit_count_) % n);
  }

  std::unique_ptr<DecisionModel> decision_model(const SearchSpace& space) const override {
    return std::make_unique<RevisitJModel>(space.size(), revisit_count_);
  }

  std::optional<std::size_t> run_state_bytes(const SearchSpace&) const override {
    return 2 * sizeof(std::uint64_t);
  }

 private:
  std::uint64_t revisit_count_;
};

class EncodeWrapper final : public SearchAlgorithm {
 public:
  EncodeWrapper(AlgorithmPtr inner, GrowthFunction growth)
      : SearchAlgorithm("encoded(" + inner->name() + ")", StateSizeClass::kLinear,
                        inner->minimally_revisiting() && growth.injective()),
        inner_(std::move(inner)),
        growth_(std::move(growth)) {}

  PointIndex choose_next(const Trace& prefix, const SearchSpace& space,
                         const ValueAlphabet& alphabet, RandomStream& stream) const override {
    if (space.size() != growth_.solution_size())
      throw DomainError("encode_wrapper: growth function does not match the space");
    const SearchSpace encoded_space(growth_.encoded_size());
    // The inner algorithm sees the run seed unchanged, so an identity growth
    // function leaves the wrapped algorithm bit-identical to the inner one.
    RandomStream inner_stream(stream.initial_seed());
    // Replay the inner decisions to reconstruct the encoded-space trace; the
    // observed values are shared with the outer trace by construction.
    Trace inner_prefix;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
      const PointIndex w =
          inner_->choose_next(inner_prefix, encoded_space, alphabet, inner_stream);
      inner_prefix.append(w, prefix[i].value);
    }
    const PointIndex w = inner_->choose_next(inner_prefix, encoded_space, alphabet, inner_stream);
    return growth_(w);
  }

  std::unique_ptr<DecisionModel> decision_model(const SearchSpace& space) const override {
    if (space.size() != growth_.solution_size())
      throw DomainError("encode_wrapper: growth function does not match the space");
    auto inner_model = inner_->decision_model(SearchSpace(growth_.encoded_size()));
    if (!inner_model) return nullptr;
    return std::make_unique<EncodedModel>(std::move(inner_model), growth_);
  }

 private:
  AlgorithmPtr inner_;
  GrowthFunction growth_;
};

}  // namespace

AlgorithmPtr fixed_enumeration(std::vector<PointIndex> order) {
  return std::make_shared<FixedEnumeration>(std::move(order));
}

AlgorithmPtr natural_enumeration() { return std::make_shared<FixedEnumeration>(std::nullopt); }

AlgorithmPtr random_enumeration(std::uint64_t salt) {
  return std::make_shared<RandomEnumeration>(salt);
}

AlgorithmPtr random_with_replacement(std::uint64_t salt) {
  return std::make_shared<RandomWithReplacement>(salt);
}

AlgorithmPtr revisit_j_algorithm(std::uint64_t revisit_count) {
  return std::make_shared<RevisitJ>(revisit_count);
}

AlgorithmPtr encode_wrapper(AlgorithmPtr inner, GrowthFunction g) {
  return std::make_shared<EncodeWrapper>(std::move(inner), std::move(g));
}

Trace uniform_random_trace(const ObjectiveFunction& f, std::size_t length, std::uint64_t seed) {
  RandomStream stream(seed);
  Trace trace;
  for (std::size_t i = 0; i < length; ++i) {
    const auto p = static_cast<PointIndex>(stream.uniform_below(f.space().size()));
    trace.append(p, f(p));
  }
  return trace;
}

}  // namespace nflab
