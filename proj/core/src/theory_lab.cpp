#include "nflab/theory_lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <thread>

#include "nflab/errors.hpp"
#include "nflab/rng.hpp"

namespace nflab {

namespace {

constexpr double kZ95 = 1.959963984540054;
constexpr std::uint64_t kMonteCarloChunk = 4096;
constexpr std::uint64_t kCheckSeed = 0;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Mode Mode::monte_carlo(std::uint64_t samples) {
  if (samples == 0) throw DomainError("Mode::monte_carlo: sample count must be positive");
  return Mode(samples);
}

ExpectationReport ExpectationReport::exact(std::vector<Rational> per_t) {
  ExpectationReport report;
  report.is_exact_ = true;
  report.exact_ = std::move(per_t);
  return report;
}

ExpectationReport ExpectationReport::monte_carlo(std::vector<MonteCarloCell> per_t,
                                                 std::uint64_t seed) {
  for (const auto& cell : per_t)
    if (cell.samples == 0)
      throw DomainError("ExpectationReport: Monte Carlo cells need positive sample counts");
  ExpectationReport report;
  report.is_exact_ = false;
  report.cells_ = std::move(per_t);
  report.seed_ = seed;
  return report;
}

std::size_t ExpectationReport::budget() const {
  return is_exact_ ? exact_.size() : cells_.size();
}

const std::vector<Rational>& ExpectationReport::exact_entries() const {
  if (!is_exact_) throw DomainError("ExpectationReport: not an exact report");
  return exact_;
}

const std::vector<MonteCarloCell>& ExpectationReport::monte_carlo_entries() const {
  if (is_exact_) throw DomainError("ExpectationReport: not a Monte Carlo report");
  return cells_;
}

std::string ExpectationReport::to_csv(const std::string& label) const {
  std::string out;
  if (is_exact_) {
    out = "t," + label + "_num," + label + "_den\n";
    for (std::size_t t = 0; t < exact_.size(); ++t) {
      out += std::to_string(t + 1) + ',' + numerator(exact_[t]).str() + ',' +
             denominator(exact_[t]).str() + '\n';
    }
  } else {
    out = "t,mean,ci_low,ci_high,samples\n";
    for (std::size_t t = 0; t < cells_.size(); ++t) {
      const auto& c = cells_[t];
      out += std::to_string(t + 1) + ',' + format_double(c.mean) + ',' +
             format_double(c.ci_low) + ',' + format_double(c.ci_high) + ',' +
             std::to_string(c.samples) + '\n';
    }
  }
  return out;
}

namespace {

struct DistributionKey {
  DecisionModel::State state;
  std::uint64_t value_mask;
  friend auto operator<=>(const DistributionKey&, const DistributionKey&) = default;
};

// Per-t expectations on one function: dynamic programming over
// (decision state, observed-value set) with exact rational probabilities.
std::vector<Rational> exact_scores_for_function(const DecisionModel& model,
                                                const ObjectiveFunction& f,
                                                const SensibleMeasure& measure,
                                                std::size_t budget) {
  if (f.alphabet().size() > 64)
    throw Error("exact mode supports alphabets of at most 64 values");
  std::map<DistributionKey, Rational> dist;
  dist[{model.initial_state(), 0}] = 1;
  std::vector<Rational> per_t;
  per_t.reserve(budget);
  for (std::size_t t = 1; t <= budget; ++t) {
    std::map<DistributionKey, Rational> next;
    for (const auto& [key, prob] : dist) {
      for (const auto& branch : model.step(key.state, f)) {
        const ValueIndex v = f.table()[branch.point];
        next[{branch.next_state, key.value_mask | (std::uint64_t{1} << v)}] +=
            prob * branch.probability;
      }
    }
    dist = std::move(next);
    Rational expectation = 0;
    for (const auto& [key, prob] : dist) {
      const Score s = measure(ValueSet::from_mask(key.value_mask));
      if (!s.finite())
        throw Error("exact expectation: measure returned an infinite score at t >= 1");
      expectation += prob * s.value();
    }
    per_t.push_back(std::move(expectation));
  }
  return per_t;
}

ExpectationReport exact_expectation(const SearchAlgorithm& algorithm, const FunctionClass& fc,
                                    const SensibleMeasure& measure, std::size_t budget) {
  const auto model = algorithm.decision_model(fc.space());
  if (!model)
    throw Error("exact mode is unsupported for algorithm '" + algorithm.name() +
                "'; use monte_carlo");
  std::vector<Rational> totals(budget, Rational(0));
  for (std::size_t i = 0; i < fc.size(); ++i) {
    if (fc.weights()[i] == 0) continue;
    const auto per_t = exact_scores_for_function(*model, fc.functions()[i], measure, budget);
    for (std::size_t t = 0; t < budget; ++t) totals[t] += fc.weights()[i] * per_t[t];
  }
  return ExpectationReport::exact(std::move(totals));
}

struct ChunkPartial {
  std::vector<double> sum;
  std::vector<double> sum_sq;
};

// Monte Carlo estimation with a fixed chunk layout, so results are
// byte-identical for any worker count.
ExpectationReport monte_carlo_expectation(const SearchAlgorithm& algorithm,
                                          const FunctionClass& fc,
                                          const SensibleMeasure& measure, std::size_t budget,
                                          std::uint64_t samples, std::uint64_t seed,
                                          unsigned threads) {
  std::vector<double> cumulative(fc.size());
  double acc = 0;
  for (std::size_t i = 0; i < fc.size(); ++i) {
    acc += fc.weights()[i].convert_to<double>();
    cumulative[i] = acc;
  }
  cumulative.back() = 1.0;

  const std::uint64_t chunk_count = (samples + kMonteCarloChunk - 1) / kMonteCarloChunk;
  std::vector<ChunkPartial> partials(chunk_count);

  const auto work = [&](std::uint64_t chunk) {
    ChunkPartial partial{std::vector<double>(budget, 0.0), std::vector<double>(budget, 0.0)};
    const std::uint64_t begin = chunk * kMonteCarloChunk;
    const std::uint64_t end = std::min(samples, begin + kMonteCarloChunk);
    for (std::uint64_t i = begin; i < end; ++i) {
      const std::uint64_t trial_seed = derive_seed(seed, i);
      RandomStream pick(derive_seed(trial_seed, 0));
      const double u = pick.next_unit();
      std::size_t fi = 0;
      while (fi + 1 < cumulative.size() && u >= cumulative[fi]) ++fi;
      const Trace trace = run(algorithm, fc.functions()[fi], budget, derive_seed(trial_seed, 1));
      ValueSet observed;
      for (std::size_t t = 1; t <= budget; ++t) {
        observed = observed.with(trace[t - 1].value);
        const double s = measure(observed).to_double();
        partial.sum[t - 1] += s;
        partial.sum_sq[t - 1] += s * s;
      }
    }
    partials[chunk] = std::move(partial);
  };

  if (threads <= 1 || chunk_count <= 1) {
    for (std::uint64_t c = 0; c < chunk_count; ++c) work(c);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    const unsigned worker_count = std::min<std::uint64_t>(threads, chunk_count);
    pool.reserve(worker_count);
    for (unsigned w = 0; w < worker_count; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t c = next.fetch_add(1); c < chunk_count; c = next.fetch_add(1)) work(c);
      });
    }
    for (auto& t : pool) t.join();
  }

  std::vector<MonteCarloCell> cells(budget);
  for (std::size_t t = 0; t < budget; ++t) {
    double sum = 0, sum_sq = 0;
    for (const auto& partial : partials) {  // fixed reduction order
      sum += partial.sum[t];
      sum_sq += partial.sum_sq[t];
    }
    const double n = static_cast<double>(samples);
    const double mean = sum / n;
    const double variance = samples > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)) : 0.0;
    const double half_width = kZ95 * std::sqrt(variance / n);
    cells[t] = {mean, mean - half_width, mean + half_width, samples};
  }
  return ExpectationReport::monte_carlo(std::move(cells), seed);
}

}  // namespace

ExpectationReport expected_performance(const SearchAlgorithm& algorithm, const FunctionClass& fc,
                                       const SensibleMeasure& measure, std::size_t budget,
                                       const Mode& mode, std::uint64_t seed, unsigned threads) {
  if (fc.empty()) throw DomainError("expected_performance: class must be nonempty");
  if (budget == 0) throw DomainError("expected_performance: budget must be >= 1");
  if (mode.is_exact()) return exact_expectation(algorithm, fc, measure, budget);
  return monte_carlo_expectation(algorithm, fc, measure, budget, mode.samples(), seed, threads);
}

DeltaReport delta_vs_enumeration(const SearchAlgorithm& algorithm, const FunctionClass& fc,
                                 const SensibleMeasure& measure, std::size_t budget,
                                 const Mode& mode, std::uint64_t seed, unsigned threads) {
  const auto baseline = random_enumeration();
  if (mode.is_exact()) {
    const auto algo = expected_performance(algorithm, fc, measure, budget, mode);
    const auto enums = expected_performance(*baseline, fc, measure, budget, mode);
    std::vector<Rational> delta(budget);
    for (std::size_t t = 0; t < budget; ++t)
      delta[t] = algo.exact_entries()[t] - enums.exact_entries()[t];
    return DeltaReport{ExpectationReport::exact(std::move(delta))};
  }
  const auto algo = expected_performance(algorithm, fc, measure, budget, mode,
                                         derive_seed(seed, 0xa), threads);
  const auto enums = expected_performance(*baseline, fc, measure, budget, mode,
                                          derive_seed(seed, 0xe), threads);
  std::vector<MonteCarloCell> delta(budget);
  for (std::size_t t = 0; t < budget; ++t) {
    const auto& a = algo.monte_carlo_entries()[t];
    const auto& e = enums.monte_carlo_entries()[t];
    const double mean = a.mean - e.mean;
    const double se_a = (a.ci_high - a.mean) / kZ95;
    const double se_e = (e.ci_high - e.mean) / kZ95;
    const double half_width = kZ95 * std::sqrt(se_a * se_a + se_e * se_e);
    delta[t] = {mean, mean - half_width, mean + half_width, a.samples};
  }
  return DeltaReport{ExpectationReport::monte_carlo(std::move(delta), seed)};
}

ExpectationReport ensemble_expected_performance(const SearchAlgorithm& algorithm,
                                                const FunctionClass& fc,
                                                const SensibleMeasure& measure,
                                                std::size_t budget, std::uint64_t cap) {
  if (fc.empty()) throw DomainError("ensemble_expected_performance: class must be nonempty");
  if (budget == 0) throw DomainError("ensemble_expected_performance: budget must be >= 1");
  const auto model = algorithm.decision_model(fc.space());
  if (!model)
    throw Error("exact mode is unsupported for algorithm '" + algorithm.name() +
                "'; use monte_carlo");

  // Relabeling the space is the same as permuting the member's table, and
  // each orbit member arises from equally many relabelings; functions with
  // one histogram share their orbit average.
  std::map<Histogram, std::vector<Rational>> orbit_average;
  std::vector<Rational> totals(budget, Rational(0));
  for (std::size_t i = 0; i < fc.size(); ++i) {
    if (fc.weights()[i] == 0) continue;
    const Histogram h = histogram(fc.functions()[i]);
    auto it = orbit_average.find(h);
    if (it == orbit_average.end()) {
      const auto members = orbit(fc.functions()[i], cap);
      std::vector<Rational> average(budget, Rational(0));
      for (const auto& member : members) {
        const auto per_t = exact_scores_for_function(*model, member, measure, budget);
        for (std::size_t t = 0; t < budget; ++t) average[t] += per_t[t];
      }
      const Rational count(static_cast<unsigned long long>(members.size()));
      for (auto& a : average) a /= count;
      it = orbit_average.emplace(h, std::move(average)).first;
    }
    for (std::size_t t = 0; t < budget; ++t) totals[t] += fc.weights()[i] * it->second[t];
  }
  return ExpectationReport::exact(std::move(totals));
}

DominanceResult check_dominance(const FunctionClass& fc, const SensibleMeasure& measure,
                                const SearchAlgorithm& revisiting, std::size_t budget) {
  const auto baseline = random_enumeration();
  auto enums = expected_performance(*baseline, fc, measure, budget, Mode::exact());
  auto algo = ensemble_expected_performance(revisiting, fc, measure, budget);
  bool dominates = true;
  for (std::size_t t = 0; t < budget; ++t)
    if (enums.exact_entries()[t] < algo.exact_entries()[t]) dominates = false;
  return DominanceResult{dominates, std::move(enums), std::move(algo)};
}

SharpenedNflResult check_sharpened_nfl(const FunctionClass& fc, const SensibleMeasure& measure,
                                       const std::vector<AlgorithmPtr>& algorithms,
                                       std::size_t budget) {
  if (fc.empty()) throw DomainError("check_sharpened_nfl: class must be nonempty");
  if (!fc.uniform_weights())
    throw DomainError("check_sharpened_nfl: the theorem is stated for sets; weights must be uniform");
  if (budget == 0) budget = static_cast<std::size_t>(fc.space().size());

  std::vector<std::vector<std::vector<Score>>> score_multisets;
  std::vector<std::vector<std::vector<ValueIndex>>> trace_multisets;
  for (const auto& algorithm : algorithms) {
    std::vector<std::vector<Score>> scores;
    std::vector<std::vector<ValueIndex>> traces;
    for (const auto& f : fc.functions()) {
      const Trace trace = run(*algorithm, f, budget, kCheckSeed);
      if (!trace.non_revisiting_prefix(fc.space().size()))
        throw DomainError("check_sharpened_nfl: algorithm '" + algorithm->name() +
                          "' revisits before exhausting the space");
      std::vector<Score> per_t;
      per_t.reserve(budget);
      for (std::size_t t = 1; t <= budget; ++t) per_t.push_back(score(measure, trace, t));
      scores.push_back(std::move(per_t));
      traces.push_back(trace.value_sequence());
    }
    std::sort(scores.begin(), scores.end());
    std::sort(traces.begin(), traces.end());
    score_multisets.push_back(std::move(scores));
    trace_multisets.push_back(std::move(traces));
  }

  SharpenedNflResult result{true, true};
  for (std::size_t i = 1; i < algorithms.size(); ++i) {
    if (score_multisets[i] != score_multisets[0]) result.scores_equivalent = false;
    if (trace_multisets[i] != trace_multisets[0]) result.trace_sets_equivalent = false;
  }
  return result;
}

bool check_revisit_breaks_cup(const FunctionClass& fc, const std::vector<PointIndex>& revisits,
                              std::uint64_t cap) {
  if (revisits.empty())
    throw DomainError("check_revisit_breaks_cup: revisit multiset must be nonempty");
  if (!is_cup(fc, cap))
    throw DomainError("check_revisit_breaks_cup: class must be closed under permutation");
  return !is_cup(extend_class(fc, revisits), cap);
}

Rational p_exact(std::uint64_t x_size, std::uint64_t lambda_j, std::uint64_t r) {
  if (x_size == 0) throw DomainError("p_exact: |X| must be >= 1");
  if (lambda_j == 0 || lambda_j > x_size)
    throw DomainError("p_exact: lambda_j must satisfy 1 <= lambda_j <= |X|");
  Rational p = 1;
  for (std::uint64_t i = 1; i <= r; ++i)
    p *= Rational(lambda_j + i, x_size + i);
  return p;
}

double log_p_exact(std::uint64_t x_size, std::uint64_t lambda_j, std::uint64_t r) {
  if (x_size == 0) throw DomainError("log_p_exact: |X| must be >= 1");
  if (lambda_j == 0 || lambda_j > x_size)
    throw DomainError("log_p_exact: lambda_j must satisfy 1 <= lambda_j <= |X|");
  double sum = 0;
  for (std::uint64_t i = 1; i <= r; ++i)
    sum += std::log(static_cast<double>(lambda_j + i) / static_cast<double>(x_size + i));
  return sum;
}

double p_bound(std::uint64_t x_size, std::uint64_t lambda_j, std::uint64_t r) {
  if (r == 0) throw DomainError("p_bound: r must be >= 1");
  if (lambda_j == 0 || lambda_j >= x_size)
    throw DomainError("p_bound: lambda_j must satisfy 1 <= lambda_j < |X|");
  const auto xlnx = [](std::uint64_t n) {
    return static_cast<double>(n) * std::log(static_cast<double>(n));
  };
  return std::exp(xlnx(lambda_j + r + 1) + xlnx(x_size) - xlnx(lambda_j + 1) - xlnx(x_size + r));
}

TrialEstimate distinguishability_trial(const FunctionClass& extended,
                                       const SearchAlgorithm& algorithm, std::uint64_t trials,
                                       std::uint64_t seed) {
  if (trials == 0) throw DomainError("distinguishability_trial: trial count must be positive");
  if (extended.empty()) throw DomainError("distinguishability_trial: class must be nonempty");
  const Histogram shared = histogram(extended.functions().front());
  for (const auto& f : extended.functions())
    if (!(histogram(f) == shared))
      throw DomainError("distinguishability_trial: members must share one histogram");

  const auto n = static_cast<std::size_t>(extended.space().size());
  std::set<std::vector<ValueIndex>> algorithm_traces;
  for (const auto& f : extended.functions())
    algorithm_traces.insert(run(algorithm, f, n, kCheckSeed).value_sequence());

  // A uniformly random non-revisiting search of any fixed member produces a
  // uniformly random ordering of the shared value multiset.
  const auto& base = extended.functions().front().table();
  std::uint64_t successes = 0;
  std::vector<ValueIndex> permuted(n);
  for (std::uint64_t i = 0; i < trials; ++i) {
    const auto perm = random_permutation(n, derive_seed(seed, i));
    for (std::size_t k = 0; k < n; ++k) permuted[k] = base[static_cast<std::size_t>(perm[k])];
    if (algorithm_traces.contains(permuted)) ++successes;
  }

  const double estimate = static_cast<double>(successes) / static_cast<double>(trials);
  const double se = std::sqrt(estimate * (1 - estimate) / static_cast<double>(trials));
  return TrialEstimate{estimate, estimate - kZ95 * se, estimate + kZ95 * se,
                       successes, trials, seed};
}

}  // namespace nflab
