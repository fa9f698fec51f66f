#include "nflab/registry.hpp"

#include <algorithm>
#include <charconv>

#include "nflab/class_io.hpp"
#include "nflab/errors.hpp"
#include "nflab/rng.hpp"

namespace nflab {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

std::uint64_t to_u64(const std::string& text, const std::string& what) {
  std::uint64_t value = 0;
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    throw DomainError(what + ": expected an unsigned integer, got '" + text + "'");
  return value;
}

// Split on top-level commas only.
std::vector<std::string> split_args(const std::string& text) {
  std::vector<std::string> parts;
  std::string current;
  int depth = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!trim(current).empty() || !parts.empty()) parts.push_back(trim(current));
  return parts;
}

std::vector<PointIndex> parse_dash_list(const std::string& text, const std::string& what) {
  std::vector<PointIndex> values;
  std::string current;
  for (char c : text + "-") {
    if (c == '-') {
      values.push_back(static_cast<PointIndex>(to_u64(trim(current), what)));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  return values;
}

}  // namespace

bool ParsedSpec::has(const std::string& key) const {
  return std::any_of(params.begin(), params.end(),
                     [&](const auto& p) { return p.first == key; });
}

std::string ParsedSpec::get(const std::string& key, const std::string& fallback) const {
  for (const auto& [k, v] : params)
    if (k == key) return v;
  return fallback;
}

ParsedSpec parse_spec(const std::string& spec) {
  const std::string text = trim(spec);
  const auto open = text.find('(');
  ParsedSpec parsed;
  if (open == std::string::npos) {
    parsed.name = text;
    return parsed;
  }
  if (text.back() != ')')
    throw DomainError("spec '" + spec + "': missing closing parenthesis");
  parsed.name = trim(text.substr(0, open));
  const std::string inside = text.substr(open + 1, text.size() - open - 2);
  if (trim(inside).empty()) return parsed;
  for (const auto& part : split_args(inside)) {
    const auto eq = part.find('=');
    // '=' inside a nested spec belongs to the nested spec, not to this level
    const auto nested = part.find('(');
    if (eq == std::string::npos || (nested != std::string::npos && nested < eq)) {
      parsed.params.emplace_back("", part);
    } else {
      parsed.params.emplace_back(trim(part.substr(0, eq)), trim(part.substr(eq + 1)));
    }
  }
  return parsed;
}

AlgorithmPtr make_algorithm(const std::string& spec, const std::filesystem::path& base_dir) {
  const ParsedSpec parsed = parse_spec(spec);
  if (parsed.name == "fixed_enum") {
    if (!parsed.has("order")) return natural_enumeration();
    return fixed_enumeration(parse_dash_list(parsed.get("order"), "fixed_enum order"));
  }
  if (parsed.name == "random_enum")
    return random_enumeration(to_u64(parsed.get("seed", "0"), "random_enum seed"));
  if (parsed.name == "random_replacement")
    return random_with_replacement(to_u64(parsed.get("seed", "0"), "random_replacement seed"));
  if (parsed.name == "revisit_j")
    return revisit_j_algorithm(to_u64(parsed.get("r", "1"), "revisit_j r"));
  if (parsed.name == "encoded") {
    if (!parsed.has("inner") || !parsed.has("growth"))
      throw DomainError("encoded(...) needs inner=<spec> and growth=<file>");
    auto inner = make_algorithm(parsed.get("inner"), base_dir);
    auto growth = read_growth_function_file(base_dir / parsed.get("growth"));
    return encode_wrapper(std::move(inner), std::move(growth));
  }
  throw DomainError("unknown algorithm spec '" + spec + "'");
}

SensibleMeasure make_measure(const std::string& spec) {
  const ParsedSpec parsed = parse_spec(spec);
  if (parsed.name == "best_so_far") return best_so_far();
  if (parsed.name == "distinct_count") return distinct_count();
  if (parsed.name == "threshold")
    return threshold_hit(static_cast<ValueIndex>(to_u64(parsed.get("v", "0"), "threshold v")));
  throw DomainError("unknown measure spec '" + spec + "'");
}

namespace {

FunctionClass random_subset_class(std::uint64_t space_size, std::uint64_t alphabet_size,
                                  std::uint64_t count, std::uint64_t seed) {
  if (space_size == 0 || alphabet_size == 0)
    throw DomainError("random-subset needs explicit space and alphabet sizes");
  BigInt total = 1;
  for (std::uint64_t i = 0; i < space_size; ++i) {
    total *= alphabet_size;
    if (total > BigInt(1) << 62)
      throw DomainError("random-subset: |Y|^|X| too large to index");
  }
  const auto domain = total.convert_to<std::uint64_t>();
  if (count == 0 || count > domain)
    throw DomainError("random-subset: n must satisfy 1 <= n <= |Y|^|X|");

  // Uniform sampling without replacement via a keyed index bijection.
  const KeyedPermutation perm(domain, seed);
  std::vector<ObjectiveFunction> functions;
  functions.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint64_t index = perm(i);
    std::vector<ValueIndex> table(space_size);
    for (std::uint64_t p = 0; p < space_size; ++p) {
      table[p] = static_cast<ValueIndex>(index % alphabet_size);
      index /= alphabet_size;
    }
    functions.emplace_back(SearchSpace(space_size), ValueAlphabet(alphabet_size),
                           std::move(table));
  }
  return FunctionClass::uniform(std::move(functions));
}

}  // namespace

FunctionClass make_function_class(const std::string& spec_or_path, std::uint64_t space_size,
                                  std::uint64_t alphabet_size, std::uint64_t master_seed,
                                  const std::filesystem::path& base_dir) {
  const ParsedSpec parsed = parse_spec(spec_or_path);

  if (parsed.name == "full-space") {
    if (space_size == 0 || alphabet_size == 0)
      throw DomainError("full-space needs explicit space and alphabet sizes");
    return FunctionClass::uniform(
        full_function_space(SearchSpace(space_size), ValueAlphabet(alphabet_size)));
  }

  if (parsed.name == "orbit-of") {
    std::vector<ValueIndex> table;
    for (const auto& [key, value] : parsed.params) {
      if (!key.empty()) throw DomainError("orbit-of takes a plain value list");
      table.push_back(static_cast<ValueIndex>(to_u64(value, "orbit-of value")));
    }
    if (table.empty()) throw DomainError("orbit-of needs at least one value");
    if (space_size != 0 && space_size != table.size())
      throw DomainError("orbit-of: table length disagrees with the requested space size");
    const std::uint64_t alphabet =
        alphabet_size != 0 ? alphabet_size
                           : *std::max_element(table.begin(), table.end()) + std::uint64_t{1};
    const std::uint64_t table_size = table.size();
    const ObjectiveFunction f(SearchSpace(table_size), ValueAlphabet(alphabet),
                              std::move(table));
    return FunctionClass::uniform(orbit(f));
  }

  if (parsed.name == "random-subset") {
    const std::string n_text = parsed.has("n") ? parsed.get("n")
                               : !parsed.params.empty() && parsed.params[0].first.empty()
                                   ? parsed.params[0].second
                                   : "";
    if (n_text.empty()) throw DomainError("random-subset needs n");
    std::uint64_t seed = derive_seed(master_seed, 0x5eed);
    if (parsed.has("seed")) seed = to_u64(parsed.get("seed"), "random-subset seed");
    else if (parsed.params.size() > 1 && parsed.params[1].first.empty())
      seed = to_u64(parsed.params[1].second, "random-subset seed");
    return random_subset_class(space_size, alphabet_size, to_u64(n_text, "random-subset n"),
                               seed);
  }

  const std::filesystem::path path = base_dir / spec_or_path;
  if (!std::filesystem::exists(path))
    throw DomainError("'" + spec_or_path +
                      "' is neither a known class generator nor an existing file");
  FunctionClass fc = read_function_class_file(path);
  if (space_size != 0 && fc.space().size() != space_size)
    throw DomainError("class file space size disagrees with the requested space size");
  if (alphabet_size != 0 && fc.alphabet().size() != alphabet_size)
    throw DomainError("class file alphabet size disagrees with the requested alphabet size");
  return fc;
}

}  // namespace nflab
