#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nflab/function_space.hpp"
#include "nflab/rational.hpp"
#include "nflab/rng.hpp"

namespace nflab {

class RandomStream;

struct TraceStep {
  PointIndex point;
  ValueIndex value;
  friend bool operator==(const TraceStep&, const TraceStep&) = default;
  friend std::strong_ordering operator<=>(const TraceStep&, const TraceStep&) = default;
};

// Ordered (point, value) pairs produced by running an algorithm on a function.
class Trace {
 public:
  Trace() = default;
  explicit Trace(std::vector<TraceStep> steps) : steps_(std::move(steps)) {}

  std::size_t size() const { return steps_.size(); }
  bool empty() const { return steps_.empty(); }
  const TraceStep& operator[](std::size_t i) const { return steps_[i]; }
  const std::vector<TraceStep>& steps() const { return steps_; }
  void append(PointIndex point, ValueIndex value) { steps_.push_back({point, value}); }

  std::vector<PointIndex> point_sequence() const;
  std::vector<ValueIndex> value_sequence() const;
  // True iff no point repeats among the first min(n, space size) steps.
  bool non_revisiting_prefix(std::uint64_t space_size) const;

  friend bool operator==(const Trace&, const Trace&) = default;

 private:
  std::vector<TraceStep> steps_;
};

enum class StateSizeClass { kConstant, kLogarithmic, kLinear };

// Exact per-step distribution over next points as a function of an opaque
// decision state; drives closed-form expectation work. Implementations may
// consult the objective only for information the real algorithm would have
// observed by that state.
class DecisionModel {
 public:
  using State = std::vector<std::uint64_t>;
  struct Branch {
    PointIndex point;
    State next_state;
    Rational probability;
  };

  virtual ~DecisionModel() = default;
  virtual State initial_state() const = 0;
  virtual std::vector<Branch> step(const State& state, const ObjectiveFunction& f) const = 0;
};

// A deterministic decision procedure: given a trace prefix and a seed-derived
// random stream, chooses the next point to visit. Instances are immutable;
// per-run state lives in the run invocation.
class SearchAlgorithm {
 public:
  virtual ~SearchAlgorithm() = default;

  const std::string& name() const { return name_; }
  StateSizeClass state_size_class() const { return state_size_class_; }
  // True when the algorithm never revisits a point while unvisited points
  // remain (revisits after exhausting the space do not count).
  bool minimally_revisiting() const { return minimally_revisiting_; }

  virtual PointIndex choose_next(const Trace& prefix, const SearchSpace& space,
                                 const ValueAlphabet& alphabet, RandomStream& stream) const = 0;

  // Exact-mode model; null when closed-form enumeration is unsupported.
  virtual std::unique_ptr<DecisionModel> decision_model(const SearchSpace&) const {
    return nullptr;
  }

  // Serialized per-run state footprint in bytes, when meaningfully bounded.
  virtual std::optional<std::size_t> run_state_bytes(const SearchSpace&) const {
    return std::nullopt;
  }

 protected:
  SearchAlgorithm(std::string name, StateSizeClass state_size_class, bool minimally_revisiting)
      : name_(std::move(name)),
        state_size_class_(state_size_class),
        minimally_revisiting_(minimally_revisiting) {}

 private:
  std::string name_;
  StateSizeClass state_size_class_;
  bool minimally_revisiting_;
};

using AlgorithmPtr = std::shared_ptr<const SearchAlgorithm>;

// Runs the algorithm for exactly `budget` steps. Reproducible from
// (algorithm, function, budget, seed); an out-of-range choice is a defect in
// the algorithm and surfaces as an Error.
Trace run(const SearchAlgorithm& algorithm, const ObjectiveFunction& f, std::size_t budget,
          std::uint64_t seed);

// Decoding map from an encoded representation space W onto the solution
// space; non-injective mappings model redundant encodings.
class GrowthFunction {
 public:
  GrowthFunction(std::vector<PointIndex> mapping, std::uint64_t solution_size);
  static GrowthFunction identity(std::uint64_t size);

  std::uint64_t encoded_size() const { return mapping_.size(); }
  std::uint64_t solution_size() const { return solution_size_; }
  const std::vector<PointIndex>& mapping() const { return mapping_; }
  PointIndex operator()(std::uint64_t encoded_point) const;
  bool injective() const { return injective_; }

 private:
  std::vector<PointIndex> mapping_;
  std::uint64_t solution_size_;
  bool injective_;
};

// Visits points in the given cyclic order, starting from its first element
// and wrapping after exhaustion; ignores observed values.
AlgorithmPtr fixed_enumeration(std::vector<PointIndex> order);

// Natural-order enumeration 0,1,2,... over whatever space it is run on.
AlgorithmPtr natural_enumeration();

// Sampling without replacement in logarithmic state: the visit order is a
// seed-keyed bijective permutation of the index set, evaluated one step at a
// time. Per-run state is (key, step counter); wraps cyclically once the
// space is exhausted. The effective key mixes `salt` with the run seed.
AlgorithmPtr random_enumeration(std::uint64_t salt = 0);

// Each step picks a point uniformly and independently from the whole space.
AlgorithmPtr random_with_replacement(std::uint64_t salt = 0);

// Enumerates the space in natural order, then revisits the lowest-index point
// mapped to the most frequent observed value (lowest value on ties) for
// `revisit_count` further steps, then resumes the natural cycle.
AlgorithmPtr revisit_j_algorithm(std::uint64_t revisit_count);

// Searches X by running `inner` on the encoded space W and decoding each
// choice through g; inner observes the objective values of the decoded
// points. A non-injective g makes the wrapped algorithm revisit.
AlgorithmPtr encode_wrapper(AlgorithmPtr inner, GrowthFunction g);

// Point sequence uniform over all |X|^length sequences, values from f.
Trace uniform_random_trace(const ObjectiveFunction& f, std::size_t length, std::uint64_t seed);

}  // namespace nflab
