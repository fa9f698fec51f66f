#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nflab/class_io.hpp"
#include "nflab/errors.hpp"
#include "nflab/registry.hpp"
#include "nflab/rng.hpp"
#include "nflab/theory_lab.hpp"

namespace nflab::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kAssertionFailure = 1;
constexpr int kUsageError = 2;

// ---------------------------------------------------------------------------
// options and provenance

struct Options {
  std::string command;
  std::string suite;
  std::uint64_t space = 0;
  std::uint64_t alphabet = 0;
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
  std::string mode_text = "exact";
  std::vector<std::string> class_specs;
  std::vector<std::string> algo_specs;
  std::vector<std::string> measure_specs;
  std::string out_dir = "reports";
  unsigned threads = 1;
  std::uint64_t instances = 0;   // verify suites; 0 = suite default
  std::uint64_t orders = 20;     // sharpened_nfl
  std::uint64_t lambda_j = 0;    // p_ratio
  std::uint64_t revisits = 0;    // p_ratio r
  bool revisits_set = false;
  std::uint64_t realized_seeds = 100;  // game
};

Mode parse_mode(const std::string& text) {
  if (text == "exact") return Mode::exact();
  if (text.rfind("mc:", 0) == 0) {
    const std::string count = text.substr(3);
    try {
      return Mode::monte_carlo(std::stoull(count));
    } catch (const std::exception&) {
      throw DomainError("--mode mc:<samples>: bad sample count '" + count + "'");
    }
  }
  throw DomainError("--mode must be 'exact' or 'mc:<samples>', got '" + text + "'");
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Canonical experiment identity; excludes the output directory and worker
// count so reruns land byte-identical wherever and however they execute.
std::string config_digest(const Options& o) {
  std::ostringstream ss;
  ss << "command=" << o.command << '\n';
  if (!o.suite.empty()) ss << "suite=" << o.suite << '\n';
  ss << "space=" << o.space << '\n'
     << "alphabet=" << o.alphabet << '\n'
     << "budget=" << o.budget << '\n'
     << "seed=" << o.seed << '\n'
     << "mode=" << o.mode_text << '\n'
     << "instances=" << o.instances << '\n'
     << "orders=" << o.orders << '\n'
     << "lambda_j=" << o.lambda_j << '\n'
     << "r=" << (o.revisits_set ? std::to_string(o.revisits) : "unset") << '\n'
     << "realized_seeds=" << o.realized_seeds << '\n';
  for (const auto& c : o.class_specs) ss << "class=" << c << '\n';
  for (const auto& a : o.algo_specs) ss << "algo=" << a << '\n';
  for (const auto& m : o.measure_specs) ss << "measure=" << m << '\n';
  return hex64(fnv1a(ss.str()));
}

std::string provenance_header(const Options& o, const std::string& note = "") {
  std::string header = "# nflab " + o.command;
  if (!o.suite.empty()) header += " " + o.suite;
  header += "\n# config_digest=" + config_digest(o) + "\n# master_seed=" +
            std::to_string(o.seed) + "\n# mode=" + o.mode_text + "\n";
  if (!note.empty()) header += "# note=" + note + "\n";
  return header;
}

std::string sanitize(const std::string& name) {
  std::string out;
  bool previous_underscore = false;
  for (char c : name) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) != 0;
    if (keep) {
      out.push_back(c);
      previous_underscore = false;
    } else if (!previous_underscore && !out.empty()) {
      out.push_back('_');
      previous_underscore = true;
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

// Machine-readable failure record; one file per failed invocation.
struct FailureLog {
  json records = json::array();

  void add(const std::string& check, const std::string& detail) {
    records.push_back({{"check", check}, {"detail", detail}});
  }
  bool empty() const { return records.empty(); }
  void write(const fs::path& out_dir, const Options& o) const {
    json doc;
    doc["command"] = o.command;
    if (!o.suite.empty()) doc["suite"] = o.suite;
    doc["config_digest"] = config_digest(o);
    doc["master_seed"] = o.seed;
    doc["failures"] = records;
    write_file(out_dir / "failures.json", doc.dump(2) + "\n");
  }
};

// ---------------------------------------------------------------------------
// randomized instance construction

ObjectiveFunction random_function(RandomStream& rng, std::uint64_t x, std::uint64_t y) {
  std::vector<ValueIndex> table(x);
  for (auto& v : table) v = static_cast<ValueIndex>(rng.uniform_below(y));
  return ObjectiveFunction(SearchSpace(x), ValueAlphabet(y), std::move(table));
}

FunctionClass random_weighted_class(RandomStream& rng, std::uint64_t x, std::uint64_t y) {
  std::set<ObjectiveFunction> members;
  const std::uint64_t picks = 1 + rng.uniform_below(6);
  for (std::uint64_t i = 0; i < picks; ++i) members.insert(random_function(rng, x, y));
  std::vector<ObjectiveFunction> functions(members.begin(), members.end());
  std::vector<Rational> weights(functions.size());
  std::uint64_t total = 0;
  std::vector<std::uint64_t> raw(functions.size());
  for (auto& w : raw) {
    w = 1 + rng.uniform_below(9);
    total += w;
  }
  for (std::size_t i = 0; i < raw.size(); ++i) weights[i] = Rational(raw[i], total);
  return FunctionClass(std::move(functions), std::move(weights));
}

// Union of permutation orbits with at least one non-constant member.
FunctionClass random_cup_class(RandomStream& rng, std::uint64_t x, std::uint64_t y) {
  std::set<ObjectiveFunction> members;
  const std::uint64_t picks = 1 + rng.uniform_below(2);
  for (std::uint64_t i = 0; i < picks; ++i)
    for (auto& g : orbit(random_function(rng, x, y))) members.insert(std::move(g));
  bool has_non_constant = false;
  for (const auto& f : members)
    if (histogram(f).counts().size() > 1) has_non_constant = true;
  while (!has_non_constant) {
    const auto f = random_function(rng, x, y);
    if (histogram(f).counts().size() < 2) continue;
    for (auto& g : orbit(f)) members.insert(std::move(g));
    has_non_constant = true;
  }
  return FunctionClass::uniform({members.begin(), members.end()});
}

GrowthFunction random_redundant_growth(RandomStream& rng, std::uint64_t x) {
  const std::uint64_t w = x + 1 + rng.uniform_below(x);
  std::vector<PointIndex> mapping(w);
  for (std::uint64_t i = 0; i < x; ++i) mapping[i] = static_cast<PointIndex>(i);
  for (std::uint64_t i = x; i < w; ++i)
    mapping[i] = static_cast<PointIndex>(rng.uniform_below(x));
  for (std::uint64_t i = w; i > 1; --i)
    std::swap(mapping[i - 1], mapping[rng.uniform_below(i)]);
  return GrowthFunction(std::move(mapping), x);
}

AlgorithmPtr random_rival(RandomStream& rng, std::uint64_t x, std::uint64_t kind) {
  switch (kind % 3) {
    case 0:
      return random_with_replacement(rng.uniform_below(1000));
    case 1:
      return revisit_j_algorithm(1 + rng.uniform_below(3));
    default: {
      auto inner = rng.uniform_below(2) == 0 ? natural_enumeration() : random_enumeration();
      return encode_wrapper(std::move(inner), random_redundant_growth(rng, x));
    }
  }
}

// ---------------------------------------------------------------------------
// verify suites

int verify_sharpened_nfl(const Options& o, const fs::path& out) {
  const std::uint64_t x = o.space ? o.space : 4;
  const std::uint64_t y = o.alphabet ? o.alphabet : 2;
  const std::size_t budget = o.budget ? o.budget : x;
  const auto fc =
      FunctionClass::uniform(full_function_space(SearchSpace(x), ValueAlphabet(y)));

  std::vector<AlgorithmPtr> algorithms;
  for (std::uint64_t i = 0; i < o.orders; ++i) {
    const auto perm64 = random_permutation(x, derive_seed(o.seed, i));
    std::vector<PointIndex> order(perm64.begin(), perm64.end());
    algorithms.push_back(fixed_enumeration(std::move(order)));
  }

  std::vector<SensibleMeasure> measures;
  if (o.measure_specs.empty()) {
    measures.push_back(best_so_far());
    measures.push_back(distinct_count());
    measures.push_back(threshold_hit(static_cast<ValueIndex>(y / 2)));
  } else {
    for (const auto& spec : o.measure_specs) measures.push_back(make_measure(spec));
  }

  FailureLog failures;
  std::string body = "phase,measure,instances,equivalent,trace_equivalent\n";
  for (const auto& measure : measures) {
    const auto result = check_sharpened_nfl(fc, measure, algorithms, budget);
    body += "cup_equivalence," + measure.name() + ",1," +
            std::to_string(result.scores_equivalent ? 1 : 0) + ',' +
            std::to_string(result.trace_sets_equivalent ? 1 : 0) + '\n';
    if (!result.scores_equivalent || !result.trace_sets_equivalent)
      failures.add("cup_equivalence", "measure " + measure.name() +
                                          ": non-revisiting orders disagree on a c.u.p. class");
  }

  // Non-c.u.p. classes must separate some pair of orders at the trace level.
  RandomStream rng(derive_seed(o.seed, 0xbad));
  const std::uint64_t control_x = std::min<std::uint64_t>(x, 4);
  std::vector<AlgorithmPtr> all_orders;
  std::vector<PointIndex> order(control_x);
  for (std::uint64_t i = 0; i < control_x; ++i) order[i] = static_cast<PointIndex>(i);
  do {
    all_orders.push_back(fixed_enumeration(order));
  } while (std::next_permutation(order.begin(), order.end()));
  int separated = 0;
  const int controls = 10;
  for (int i = 0; i < controls;) {
    std::set<ObjectiveFunction> members;
    const std::uint64_t picks = 1 + rng.uniform_below(3);
    for (std::uint64_t k = 0; k < picks; ++k)
      members.insert(random_function(rng, control_x, y));
    const FunctionClass control = FunctionClass::uniform({members.begin(), members.end()});
    if (is_cup(control)) continue;
    const auto result = check_sharpened_nfl(control, best_so_far(), all_orders);
    if (!result.trace_sets_equivalent) ++separated;
    ++i;
  }
  body += "noncup_separation,best_so_far," + std::to_string(controls) + ",," +
          std::to_string(separated == controls ? 1 : 0) + '\n';
  if (separated != controls)
    failures.add("noncup_separation", "a non-c.u.p. class left every order pair trace-equal");

  write_file(out / "verify_sharpened_nfl.csv", provenance_header(o) + body);
  if (!failures.empty()) {
    failures.write(out, o);
    return kAssertionFailure;
  }
  return kOk;
}

int verify_revisit_cup(const Options& o, const fs::path& out) {
  const std::uint64_t max_x = o.space ? o.space : 5;
  const std::uint64_t max_y = o.alphabet ? o.alphabet : 3;
  const std::uint64_t instances = o.instances ? o.instances : 50;

  RandomStream rng(derive_seed(o.seed, 0xc09));
  FailureLog failures;
  std::string body = "instance,space,alphabet,class_size,extended_size,revisits,breaks_cup\n";
  for (std::uint64_t i = 0; i < instances; ++i) {
    const std::uint64_t x = 2 + rng.uniform_below(max_x - 1);
    const std::uint64_t y = 2 + rng.uniform_below(max_y - 1);
    const FunctionClass fc = random_cup_class(rng, x, y);
    std::vector<PointIndex> revisits(1 + rng.uniform_below(3));
    for (auto& p : revisits) p = static_cast<PointIndex>(rng.uniform_below(x));

    const auto extended = extend_class(fc, revisits);
    const bool breaks = check_revisit_breaks_cup(fc, revisits);
    body += std::to_string(i) + ',' + std::to_string(x) + ',' + std::to_string(y) + ',' +
            std::to_string(fc.size()) + ',' + std::to_string(extended.size()) + ',' +
            std::to_string(revisits.size()) + ',' + std::to_string(breaks ? 1 : 0) + '\n';
    if (!breaks)
      failures.add("breaks_cup", "instance " + std::to_string(i) +
                                     ": extension stayed closed under permutation");
    if (extended.size() != fc.size())
      failures.add("size_preserved", "instance " + std::to_string(i) +
                                         ": extension changed the class size");
  }
  write_file(out / "verify_revisit_cup.csv", provenance_header(o) + body);
  if (!failures.empty()) {
    failures.write(out, o);
    return kAssertionFailure;
  }
  return kOk;
}

// One p-ratio row, with brute-force closure cross-check where feasible.
struct PRatioRow {
  std::uint64_t x, lambda_j, r;
  Rational exact;
  double bound = std::nan("");
  bool bound_applicable = false;
  bool brute_checked = false;
  bool brute_match = true;
  bool log_identity_ok = true;
};

PRatioRow p_ratio_row(std::uint64_t x, std::uint64_t lambda_j, std::uint64_t r,
                      std::uint64_t brute_cap) {
  PRatioRow row{x, lambda_j, r, p_exact(x, lambda_j, r)};
  if (r >= 1 && lambda_j < x) {
    row.bound = p_bound(x, lambda_j, r);
    row.bound_applicable = true;
  }
  const double via_sum = log_p_exact(x, lambda_j, r);
  const double via_rational = log_value(row.exact);
  row.log_identity_ok = std::abs(via_rational - via_sum) <= 1e-12 * std::max(1.0, std::abs(via_sum));

  // brute force when the closures fit under the cap: canonical representative
  // (lambda_j copies of value 0, the rest distinct), explicit enumeration
  std::vector<ValueIndex> table(x);
  for (std::uint64_t p = 0; p < x; ++p)
    table[p] = p < lambda_j ? 0 : static_cast<ValueIndex>(p - lambda_j + 1);
  const ObjectiveFunction f(SearchSpace(x), ValueAlphabet(1 + (x - lambda_j)), std::move(table));
  const auto h = histogram(f);
  std::map<ValueIndex, std::uint64_t> extended_counts = h.counts();
  extended_counts[h.most_common_value()] += r;
  if (orbit_size(h) <= brute_cap && orbit_size(Histogram(extended_counts)) <= brute_cap) {
    const auto fc = FunctionClass::uniform(orbit(f, brute_cap));
    const auto extended = extend_class_revisit_j(fc, r);
    const auto closure = orbit(extended.functions().front(), brute_cap);
    bool all_members_inside = true;
    for (const auto& g : extended.functions())
      if (!std::binary_search(closure.begin(), closure.end(), g)) all_members_inside = false;
    const Rational brute(BigInt(extended.size()), BigInt(closure.size()));
    row.brute_checked = true;
    row.brute_match = all_members_inside && brute == row.exact;
  }
  return row;
}

int verify_p_ratio(const Options& o, const fs::path& out) {
  FailureLog failures;
  std::vector<PRatioRow> rows;
  const std::uint64_t brute_cap = 200000;

  if (o.space || o.lambda_j || o.revisits_set) {
    if (!(o.space && o.lambda_j && o.revisits_set))
      throw DomainError("p_ratio takes --space, --lambda-j and --r together (or none for the grid)");
    rows.push_back(p_ratio_row(o.space, o.lambda_j, o.revisits, brute_cap));
  } else {
    // default grid: exhaustive brute-force cross-check plus a bound sweep
    for (std::uint64_t x = 1; x <= 6; ++x)
      for (std::uint64_t lambda_j = 1; lambda_j <= x; ++lambda_j)
        for (std::uint64_t r = 0; r <= 3; ++r)
          rows.push_back(p_ratio_row(x, lambda_j, r, brute_cap));
    for (std::uint64_t x = 3; x <= 50; ++x)
      for (std::uint64_t lambda_j = 1; lambda_j < x; ++lambda_j)
        for (std::uint64_t r = 1; r <= 20; r += (r < 4 ? 1 : 4))
          rows.push_back(p_ratio_row(x, lambda_j, r, 0));
  }

  std::string body = "x,lambda_j,r,p_num,p_den,p,bound,brute_checked,brute_match,log_identity\n";
  for (const auto& row : rows) {
    body += std::to_string(row.x) + ',' + std::to_string(row.lambda_j) + ',' +
            std::to_string(row.r) + ',' + numerator(row.exact).str() + ',' +
            denominator(row.exact).str() + ',' +
            format_double(row.exact.convert_to<double>()) + ',' +
            (row.bound_applicable ? format_double(row.bound) : std::string("")) + ',' +
            std::to_string(row.brute_checked ? 1 : 0) + ',' +
            std::to_string(row.brute_match ? 1 : 0) + ',' +
            std::to_string(row.log_identity_ok ? 1 : 0) + '\n';
    const std::string at = "(x=" + std::to_string(row.x) +
                           ", lambda_j=" + std::to_string(row.lambda_j) +
                           ", r=" + std::to_string(row.r) + ")";
    if (row.brute_checked && !row.brute_match)
      failures.add("brute_match", "closed form disagrees with closure enumeration at " + at);
    if (row.bound_applicable && row.exact.convert_to<double>() > row.bound)
      failures.add("bound", "p exceeds its integral bound at " + at);
    if (!row.log_identity_ok) failures.add("log_identity", "log-sum identity broke at " + at);
  }

  write_file(out / "verify_p_ratio.csv", provenance_header(o) + body);
  if (!failures.empty()) {
    failures.write(out, o);
    return kAssertionFailure;
  }
  return kOk;
}

int verify_dominance(const Options& o, const fs::path& out) {
  const std::uint64_t max_x = o.space ? o.space : 5;
  const std::uint64_t max_y = o.alphabet ? o.alphabet : 3;
  const std::uint64_t instances = o.instances ? o.instances : 100;

  FailureLog failures;
  std::string body = "instance,space,alphabet,class_size,rival,budget,dominates\n";

  // anchor: two-step expectations on a bijective three-point function
  const FunctionClass anchor = FunctionClass::uniform({ObjectiveFunction(
      SearchSpace(3), ValueAlphabet(4), std::vector<ValueIndex>{1, 2, 3})});
  const auto enum_anchor =
      expected_performance(*random_enumeration(), anchor, best_so_far(), 2, Mode::exact());
  const auto repl_anchor = expected_performance(*random_with_replacement(), anchor,
                                                best_so_far(), 2, Mode::exact());
  if (enum_anchor.exact_entries()[1] != Rational(8, 3))
    failures.add("anchor_enumeration", "expected 8/3, got " +
                                           to_fraction_string(enum_anchor.exact_entries()[1]));
  if (repl_anchor.exact_entries()[1] != Rational(22, 9))
    failures.add("anchor_replacement", "expected 22/9, got " +
                                           to_fraction_string(repl_anchor.exact_entries()[1]));
  body += "anchor,3,4,1,random_replacement,2," +
          std::to_string(enum_anchor.exact_entries()[1] >= repl_anchor.exact_entries()[1] ? 1 : 0) +
          '\n';

  RandomStream rng(derive_seed(o.seed, 0xd0));
  for (std::uint64_t i = 0; i < instances; ++i) {
    const std::uint64_t x = 1 + rng.uniform_below(max_x);
    const std::uint64_t y = 1 + rng.uniform_below(max_y);
    const FunctionClass fc = random_weighted_class(rng, x, y);
    const std::size_t budget = o.budget ? o.budget : 2 * x;
    for (std::uint64_t kind = 0; kind < 3; ++kind) {
      const auto rival = random_rival(rng, x, kind);
      const auto result = check_dominance(fc, best_so_far(), *rival, budget);
      body += std::to_string(i) + ',' + std::to_string(x) + ',' + std::to_string(y) + ',' +
              std::to_string(fc.size()) + ',' + rival->name() + ',' + std::to_string(budget) +
              ',' + std::to_string(result.dominates ? 1 : 0) + '\n';
      if (!result.dominates)
        failures.add("dominance", "instance " + std::to_string(i) + " rival " + rival->name());
    }
  }

  write_file(out / "verify_dominance.csv", provenance_header(o) + body);
  if (!failures.empty()) {
    failures.write(out, o);
    return kAssertionFailure;
  }
  return kOk;
}

int verify_delta(const Options& o, const fs::path& out) {
  const std::uint64_t max_x = o.space ? o.space : 5;
  const std::uint64_t max_y = o.alphabet ? o.alphabet : 3;
  const std::uint64_t instances = o.instances ? o.instances : 20;

  FailureLog failures;
  std::string body = "instance,space,alphabet,class_size,budget,max_abs_delta_num,max_abs_delta_den\n";

  // anchor: replacement sampling loses exactly 2/9 at t=2 on the bijective triple
  const FunctionClass anchor = FunctionClass::uniform({ObjectiveFunction(
      SearchSpace(3), ValueAlphabet(4), std::vector<ValueIndex>{1, 2, 3})});
  const auto anchor_delta = delta_vs_enumeration(*random_with_replacement(), anchor,
                                                 best_so_far(), 2, Mode::exact());
  if (anchor_delta.delta.exact_entries()[1] != Rational(-2, 9))
    failures.add("anchor_delta",
                 "expected -2/9, got " +
                     to_fraction_string(anchor_delta.delta.exact_entries()[1]));

  RandomStream rng(derive_seed(o.seed, 0xde17a));
  for (std::uint64_t i = 0; i < instances; ++i) {
    const std::uint64_t x = 1 + rng.uniform_below(max_x);
    const std::uint64_t y = 1 + rng.uniform_below(max_y);
    const FunctionClass fc = random_weighted_class(rng, x, y);
    const std::size_t budget = o.budget ? o.budget : 2 * x;
    const auto delta =
        delta_vs_enumeration(*random_enumeration(), fc, best_so_far(), budget, Mode::exact());
    Rational worst = 0;
    for (const auto& d : delta.delta.exact_entries())
      if (abs(d) > worst) worst = abs(d);
    body += std::to_string(i) + ',' + std::to_string(x) + ',' + std::to_string(y) + ',' +
            std::to_string(fc.size()) + ',' + std::to_string(budget) + ',' +
            numerator(worst).str() + ',' + denominator(worst).str() + '\n';
    if (worst != 0)
      failures.add("enum_self_delta", "instance " + std::to_string(i) +
                                          ": enumeration deviated from itself");
  }

  write_file(out / "verify_delta.csv", provenance_header(o) + body);
  if (!failures.empty()) {
    failures.write(out, o);
    return kAssertionFailure;
  }
  return kOk;
}

int cmd_verify(const Options& o) {
  const fs::path out(o.out_dir);
  fs::create_directories(out);
  if (o.suite == "sharpened_nfl") return verify_sharpened_nfl(o, out);
  if (o.suite == "revisit_cup") return verify_revisit_cup(o, out);
  if (o.suite == "p_ratio") return verify_p_ratio(o, out);
  if (o.suite == "dominance") return verify_dominance(o, out);
  if (o.suite == "delta") return verify_delta(o, out);
  std::cerr << "nflab verify: unknown suite '" << o.suite
            << "' (expected sharpened_nfl, revisit_cup, p_ratio, dominance or delta)\n";
  return kUsageError;
}

// ---------------------------------------------------------------------------
// bench

int cmd_bench(const Options& o) {
  if (o.class_specs.size() != 1)
    throw DomainError("bench needs exactly one --class source");
  const fs::path out(o.out_dir);
  fs::create_directories(out);
  const Mode mode = parse_mode(o.mode_text);

  const FunctionClass fc =
      make_function_class(o.class_specs.front(), o.space, o.alphabet, o.seed);
  if (fc.empty()) throw DomainError("bench: the class is empty");
  const std::size_t budget = o.budget ? o.budget : 2 * fc.space().size();

  std::vector<SensibleMeasure> measures;
  for (const auto& spec :
       o.measure_specs.empty() ? std::vector<std::string>{"best_so_far"} : o.measure_specs)
    measures.push_back(make_measure(spec));

  std::vector<std::pair<std::string, AlgorithmPtr>> algorithms;
  for (const auto& spec : o.algo_specs) algorithms.emplace_back(spec, make_algorithm(spec));

  const auto baseline = random_enumeration();
  for (const auto& measure : measures) {
    const auto baseline_report = expected_performance(*baseline, fc, measure, budget, mode,
                                                      derive_seed(o.seed, 0xb5), o.threads);
    write_file(out / ("bench_expectation_baseline_" + sanitize(measure.name()) + ".csv"),
               provenance_header(o) + baseline_report.to_csv());

    std::vector<std::string> plot_columns;
    std::vector<std::vector<double>> plot_series;
    plot_columns.push_back("random_enum");
    {
      std::vector<double> series;
      for (std::size_t t = 0; t < budget; ++t)
        series.push_back(baseline_report.is_exact()
                             ? baseline_report.exact_entries()[t].convert_to<double>()
                             : baseline_report.monte_carlo_entries()[t].mean);
      plot_series.push_back(std::move(series));
    }

    for (std::size_t a = 0; a < algorithms.size(); ++a) {
      const auto& [spec, algorithm] = algorithms[a];
      const auto report = expected_performance(*algorithm, fc, measure, budget, mode,
                                               derive_seed(o.seed, 0xa0 + a), o.threads);
      const auto delta = delta_vs_enumeration(*algorithm, fc, measure, budget, mode,
                                              derive_seed(o.seed, 0xd0 + a), o.threads);
      const std::string stem = sanitize(spec) + "_" + sanitize(measure.name());
      write_file(out / ("bench_expectation_" + stem + ".csv"),
                 provenance_header(o) + report.to_csv());
      write_file(out / ("bench_delta_" + stem + ".csv"),
                 provenance_header(o) + delta.to_csv());

      plot_columns.push_back(sanitize(spec));
      std::vector<double> series;
      for (std::size_t t = 0; t < budget; ++t)
        series.push_back(report.is_exact() ? report.exact_entries()[t].convert_to<double>()
                                           : report.monte_carlo_entries()[t].mean);
      plot_series.push_back(std::move(series));
    }

    std::string plot = "t";
    for (const auto& c : plot_columns) plot += ',' + c;
    plot += '\n';
    for (std::size_t t = 0; t < budget; ++t) {
      plot += std::to_string(t + 1);
      for (const auto& series : plot_series) plot += ',' + format_double(series[t]);
      plot += '\n';
    }
    write_file(out / ("plot_" + sanitize(measure.name()) + ".csv"),
               provenance_header(o) + plot);
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// game

int cmd_game(const Options& o) {
  if (o.class_specs.size() != 2)
    throw DomainError("game needs two --class sources: the training class and the unseen class");
  const fs::path out(o.out_dir);
  fs::create_directories(out);
  const Mode mode = parse_mode(o.mode_text);

  const FunctionClass training =
      make_function_class(o.class_specs[0], o.space, o.alphabet, o.seed);
  const FunctionClass unseen =
      make_function_class(o.class_specs[1], o.space, o.alphabet, o.seed);
  if (training.empty() || unseen.empty()) throw DomainError("game: classes must be nonempty");
  if (!(training.space() == unseen.space()) || !(training.alphabet() == unseen.alphabet()))
    throw DomainError("game: classes must share one space and alphabet");
  for (const auto& f : training.functions())
    if (unseen.contains(f))
      throw DomainError("game: classes overlap; the game needs disjoint problem sets");

  const std::size_t budget = o.budget ? o.budget : 2 * training.space().size();
  if (o.algo_specs.empty()) throw DomainError("game needs at least one --algo");

  std::vector<SensibleMeasure> measures;
  for (const auto& spec :
       o.measure_specs.empty() ? std::vector<std::string>{"best_so_far"} : o.measure_specs)
    measures.push_back(make_measure(spec));

  const auto baseline = random_enumeration();
  const std::string curve_note =
      "full per-t expectation curves; no scalar summary is implied";
  FailureLog failures;

  for (const auto& measure : measures) {
    for (std::size_t a = 0; a < o.algo_specs.size(); ++a) {
      const auto algorithm = make_algorithm(o.algo_specs[a]);
      const std::string stem = sanitize(o.algo_specs[a]) + "_" + sanitize(measure.name());

      // training-side performance data, as handed to the player
      const auto training_report = expected_performance(
          *algorithm, training, measure, budget, mode, derive_seed(o.seed, 0x70 + a), o.threads);
      write_file(out / ("game_training_" + stem + ".csv"),
                 provenance_header(o, curve_note) + training_report.to_csv());

      // unseen-side: exact expectations for both players plus realized averages
      const auto algo_unseen = expected_performance(
          *algorithm, unseen, measure, budget, mode, derive_seed(o.seed, 0x80 + a), o.threads);
      const auto enum_unseen = expected_performance(
          *baseline, unseen, measure, budget, mode, derive_seed(o.seed, 0x90 + a), o.threads);
      const auto realized_algo = expected_performance(
          *algorithm, unseen, measure, budget, Mode::monte_carlo(o.realized_seeds),
          derive_seed(o.seed, 0x100 + a), o.threads);
      const auto realized_enum = expected_performance(
          *baseline, unseen, measure, budget, Mode::monte_carlo(o.realized_seeds),
          derive_seed(o.seed, 0x200 + a), o.threads);

      std::string body;
      if (mode.is_exact()) {
        const auto ensemble =
            ensemble_expected_performance(*algorithm, unseen, measure, budget);
        body =
            "t,algo_num,algo_den,enum_num,enum_den,delta_num,delta_den,"
            "ensemble_delta_num,ensemble_delta_den,realized_algo,realized_enum,realized_seeds\n";
        for (std::size_t t = 0; t < budget; ++t) {
          const Rational delta = algo_unseen.exact_entries()[t] - enum_unseen.exact_entries()[t];
          const Rational ensemble_delta =
              ensemble.exact_entries()[t] - enum_unseen.exact_entries()[t];
          body += std::to_string(t + 1) + ',' + numerator(algo_unseen.exact_entries()[t]).str() +
                  ',' + denominator(algo_unseen.exact_entries()[t]).str() + ',' +
                  numerator(enum_unseen.exact_entries()[t]).str() + ',' +
                  denominator(enum_unseen.exact_entries()[t]).str() + ',' +
                  numerator(delta).str() + ',' + denominator(delta).str() + ',' +
                  numerator(ensemble_delta).str() + ',' + denominator(ensemble_delta).str() +
                  ',' + format_double(realized_algo.monte_carlo_entries()[t].mean) + ',' +
                  format_double(realized_enum.monte_carlo_entries()[t].mean) + ',' +
                  std::to_string(o.realized_seeds) + '\n';

          if (!algorithm->minimally_revisiting() && ensemble_delta > 0)
            failures.add("prediction",
                         "algorithm " + o.algo_specs[a] + " ensemble beat enumeration at t=" +
                             std::to_string(t + 1) + " on the unseen class");
        }
        // enumeration must sit exactly at zero deviation from itself
        const auto enum_delta =
            delta_vs_enumeration(*baseline, unseen, measure, budget, Mode::exact());
        for (const auto& d : enum_delta.delta.exact_entries())
          if (d != 0) failures.add("enum_zero", "enumeration deviated from itself");
      } else {
        body = "t,algo_mean,enum_mean,delta_mean,realized_algo,realized_enum,realized_seeds\n";
        for (std::size_t t = 0; t < budget; ++t) {
          const auto& ac = algo_unseen.monte_carlo_entries()[t];
          const auto& ec = enum_unseen.monte_carlo_entries()[t];
          body += std::to_string(t + 1) + ',' + format_double(ac.mean) + ',' +
                  format_double(ec.mean) + ',' + format_double(ac.mean - ec.mean) + ',' +
                  format_double(realized_algo.monte_carlo_entries()[t].mean) + ',' +
                  format_double(realized_enum.monte_carlo_entries()[t].mean) + ',' +
                  std::to_string(o.realized_seeds) + '\n';
        }
      }
      write_file(out / ("game_unseen_" + stem + ".csv"),
                 provenance_header(o, curve_note) + body);
    }
  }

  if (!failures.empty()) {
    failures.write(out, o);
    return kAssertionFailure;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// argument plumbing

// Flat key=value config files mirror the long flags; lines are inserted in
// place of --config, so later command-line flags win for scalar options.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> expanded;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] != "--config") {
      expanded.push_back(args[i]);
      continue;
    }
    if (i + 1 >= args.size()) throw DomainError("--config needs a file path");
    const std::string path = args[++i];
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      const auto last = line.find_last_not_of(" \t\r");
      const std::string text = line.substr(first, last - first + 1);
      if (text.empty() || text.front() == '#') continue;
      const auto eq = text.find('=');
      if (eq == std::string::npos)
        throw ParseError(path, line_no, "expected key=value, got '" + text + "'");
      expanded.push_back("--" + text.substr(0, eq));
      expanded.push_back(text.substr(eq + 1));
    }
  }
  return expanded;
}

void add_common_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--space", o.space, "Search-space size for class generators");
  cmd->add_option("--alphabet", o.alphabet, "Value-alphabet size for class generators");
  cmd->add_option("--budget", o.budget, "Trace length (default: suite-specific or 2|X|)");
  cmd->add_option("--seed", o.seed, "Master seed; every derived seed is a function of it")
      ->required();
  cmd->add_option("--mode", o.mode_text, "exact or mc:<samples>")
      ->capture_default_str();
  cmd->add_option("--class", o.class_specs,
                  "Function-class file or generator spec (repeatable)");
  cmd->add_option("--algo", o.algo_specs, "Algorithm spec (repeatable)");
  cmd->add_option("--measure", o.measure_specs, "Measure spec (repeatable)");
  cmd->add_option("--out", o.out_dir, "Report directory")->capture_default_str();
  cmd->add_option("--threads", o.threads, "Worker threads for Monte Carlo cells")
      ->capture_default_str();
}

// Scalar flags take the last occurrence, so config-file values lose to
// explicit command-line flags that follow them.
void apply_take_last(CLI::App* cmd) {
  for (auto* opt : cmd->get_options())
    if (opt->get_expected_max() == 1) opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

}  // namespace

int run(const std::vector<std::string>& args) {
  Options o;
  CLI::App app{"nflab: brute-force verification and benchmarking for black-box search"};
  app.require_subcommand(0, 1);
  app.set_help_all_flag("--help-all");

  auto* verify = app.add_subcommand(
      "verify", "Run a verification suite (sharpened_nfl, revisit_cup, p_ratio, dominance, delta)");
  verify->add_option("suite", o.suite, "Suite name")->required();
  add_common_flags(verify, o);
  verify->add_option("--instances", o.instances, "Randomized instance count (suite default)");
  verify->add_option("--orders", o.orders, "Random visit orders for sharpened_nfl")
      ->capture_default_str();
  verify->add_option("--lambda-j", o.lambda_j, "Most-common-value multiplicity for p_ratio");
  auto* r_opt = verify->add_option("--r", o.revisits, "Revisit count for p_ratio");
  apply_take_last(verify);

  auto* bench = app.add_subcommand("bench", "Expected-score curves against the enumeration baseline");
  add_common_flags(bench, o);
  apply_take_last(bench);

  auto* game = app.add_subcommand(
      "game", "Train-vs-unseen comparison: supply --class twice (training, then unseen)");
  add_common_flags(game, o);
  game->add_option("--realized-seeds", o.realized_seeds,
                   "Samples for the realized-performance averages")
      ->capture_default_str();
  apply_take_last(game);

  try {
    const auto expanded = expand_config(args);
    std::vector<const char*> argv;
    argv.push_back("nflab");
    for (const auto& a : expanded) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "nflab: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    std::cerr << "nflab: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (verify->parsed()) {
      o.command = "verify";
      o.revisits_set = r_opt->count() > 0;
      return cmd_verify(o);
    }
    if (bench->parsed()) {
      o.command = "bench";
      return cmd_bench(o);
    }
    if (game->parsed()) {
      o.command = "game";
      return cmd_game(o);
    }
    std::cerr << app.help();
    return kUsageError;
  } catch (const ParseError& e) {
    std::cerr << "nflab: " << e.what() << "\n";
    return kUsageError;
  } catch (const DomainError& e) {
    std::cerr << "nflab: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    std::cerr << "nflab: " << e.what() << "\n";
    return kUsageError;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace nflab::cli
