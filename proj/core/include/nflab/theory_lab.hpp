#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nflab/function_space.hpp"
#include "nflab/performance.hpp"
#include "nflab/rational.hpp"
#include "nflab/search_algorithms.hpp"

namespace nflab {

// Expectation computation mode: full enumeration with exact rationals, or
// seeded Monte Carlo sampling.
class Mode {
 public:
  static Mode exact() { return Mode(0); }
  static Mode monte_carlo(std::uint64_t samples);

  bool is_exact() const { return samples_ == 0; }
  std::uint64_t samples() const { return samples_; }

 private:
  explicit Mode(std::uint64_t samples) : samples_(samples) {}
  std::uint64_t samples_;
};

struct MonteCarloCell {
  double mean;
  double ci_low;   // 95% normal-approximation interval
  double ci_high;
  std::uint64_t samples;
};

// Per-t expected scores for t = 1..budget: exact rationals from full
// enumeration, or Monte Carlo cells with the seed that produced them.
class ExpectationReport {
 public:
  static ExpectationReport exact(std::vector<Rational> per_t);
  static ExpectationReport monte_carlo(std::vector<MonteCarloCell> per_t, std::uint64_t seed);

  bool is_exact() const { return is_exact_; }
  std::size_t budget() const;
  const std::vector<Rational>& exact_entries() const;
  const std::vector<MonteCarloCell>& monte_carlo_entries() const;
  std::uint64_t seed() const { return seed_; }

  // Exact mode: (t, <label>_num, <label>_den); Monte Carlo:
  // (t, mean, ci_low, ci_high, samples). Includes the header row.
  std::string to_csv(const std::string& label = "expectation") const;

 private:
  ExpectationReport() = default;
  bool is_exact_ = true;
  std::vector<Rational> exact_;
  std::vector<MonteCarloCell> cells_;
  std::uint64_t seed_ = 0;
};

// Per-t deviation of an algorithm's expected score from random enumeration's.
struct DeltaReport {
  ExpectationReport delta;
  std::string to_csv() const { return delta.to_csv("delta"); }
};

// Per-t expectation of the measure over the class weights and the algorithm's
// randomness. Exact mode requires a decision model (available for every
// shipped reference algorithm) and desk-scale spaces; opaque algorithms must
// use monte_carlo.
ExpectationReport expected_performance(const SearchAlgorithm& algorithm, const FunctionClass& fc,
                                       const SensibleMeasure& measure, std::size_t budget,
                                       const Mode& mode, std::uint64_t seed = 0,
                                       unsigned threads = 1);

DeltaReport delta_vs_enumeration(const SearchAlgorithm& algorithm, const FunctionClass& fc,
                                 const SensibleMeasure& measure, std::size_t budget,
                                 const Mode& mode, std::uint64_t seed = 0, unsigned threads = 1);

// Exact expectation of the algorithm's ensemble under uniform relabelings of
// the search space: the closed-form realization of "a randomly chosen
// algorithm sharing this decision structure". Equals the per-member
// expectation averaged over each member's uniform permutation orbit, so a
// specific visit order cannot align with a weight-biased class.
ExpectationReport ensemble_expected_performance(const SearchAlgorithm& algorithm,
                                                const FunctionClass& fc,
                                                const SensibleMeasure& measure,
                                                std::size_t budget,
                                                std::uint64_t cap = kDefaultOrbitCap);

struct DominanceResult {
  bool dominates;  // enumeration >= the revisiting ensemble at every t
  ExpectationReport enumeration;
  ExpectationReport algorithm;  // ensemble expectation of the rival
};

// Exact-mode comparison of a uniformly random enumeration against a randomly
// chosen algorithm with the given rival's decision structure (its uniform
// relabeling ensemble). Holds with >= at every t for any rival, any weights,
// any sensible measure; equality throughout on constant-only classes.
DominanceResult check_dominance(const FunctionClass& fc, const SensibleMeasure& measure,
                                const SearchAlgorithm& revisiting, std::size_t budget);

struct SharpenedNflResult {
  bool scores_equivalent;      // identical per-t score multisets over the class
  bool trace_sets_equivalent;  // identical observed-value-sequence multisets
};

// Compares the supplied non-revisiting algorithms over a uniformly weighted
// class. Equivalence holds for every measure iff the class is closed under
// permutation; a fixed measure may fail to separate a non-c.u.p. class, so
// the value-sequence comparison is reported alongside.
SharpenedNflResult check_sharpened_nfl(const FunctionClass& fc, const SensibleMeasure& measure,
                                       const std::vector<AlgorithmPtr>& algorithms,
                                       std::size_t budget = 0 /* 0 = |X| */);

// True iff extending the (c.u.p.) class for the given nonempty revisit
// multiset yields a class that is not closed under permutation. Guaranteed
// whenever some member is non-constant.
bool check_revisit_breaks_cup(const FunctionClass& fc, const std::vector<PointIndex>& revisits,
                              std::uint64_t cap = kDefaultOrbitCap);

// |X|!/(|X|+r)! * (lambda_j+r)!/lambda_j!: the fraction of the extended
// closure's traces that the revisiting construction can produce.
Rational p_exact(std::uint64_t x_size, std::uint64_t lambda_j, std::uint64_t r);

// ln p_exact as the sum of per-revisit log ratios.
double log_p_exact(std::uint64_t x_size, std::uint64_t lambda_j, std::uint64_t r);

// Integral upper bound on p_exact as a quotient of n^n terms:
//   ((lambda_j+r+1)^(lambda_j+r+1) * x^x) / ((lambda_j+1)^(lambda_j+1) * (x+r)^(x+r)).
// Follows from bracketing the log sum by integrals of ln(lambda_j+t) and
// ln(x+t); dominance over p_exact is verified numerically in the test suite.
double p_bound(std::uint64_t x_size, std::uint64_t lambda_j, std::uint64_t r);

struct TrialEstimate {
  double estimate;
  double ci_low;  // 95% binomial normal approximation
  double ci_high;
  std::uint64_t successes;
  std::uint64_t trials;
  std::uint64_t seed;
};

// Monte Carlo estimate of the probability that a uniformly random
// non-revisiting search of the extended class shares an observed-value
// sequence with the given algorithm. The extended class must share one
// histogram across members (as the revisit construction guarantees).
TrialEstimate distinguishability_trial(const FunctionClass& extended,
                                       const SearchAlgorithm& algorithm, std::uint64_t trials,
                                       std::uint64_t seed);

}  // namespace nflab
