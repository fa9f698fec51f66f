#include "nflab/class_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "nflab/errors.hpp"

namespace nflab {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

bool skippable(const std::string& line) { return line.empty() || line.front() == '#'; }

std::uint64_t parse_u64(const std::string& token, const std::string& source, std::size_t line) {
  try {
    std::size_t consumed = 0;
    if (token.empty() || token.front() == '-') throw std::invalid_argument(token);
    const unsigned long long v = std::stoull(token, &consumed);
    if (consumed != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw ParseError(source, line, "expected an unsigned integer, got '" + token + "'");
  }
}

// "key=<int>" with a fixed key.
std::uint64_t parse_keyed(const std::string& token, const std::string& key,
                          const std::string& source, std::size_t line) {
  const auto eq = token.find('=');
  if (eq == std::string::npos || token.substr(0, eq) != key)
    throw ParseError(source, line, "expected '" + key + "=<int>', got '" + token + "'");
  return parse_u64(token.substr(eq + 1), source, line);
}

std::vector<std::uint64_t> parse_int_list(const std::string& text, const std::string& source,
                                          std::size_t line) {
  std::vector<std::uint64_t> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(parse_u64(trim(item), source, line));
  if (values.empty()) throw ParseError(source, line, "expected a comma-separated integer list");
  return values;
}

Rational parse_weight(const std::string& text, const std::string& source, std::size_t line) {
  const auto slash = text.find('/');
  if (slash == std::string::npos)
    throw ParseError(source, line, "weights use the form <num>/<den>, got '" + text + "'");
  const std::uint64_t num = parse_u64(trim(text.substr(0, slash)), source, line);
  const std::uint64_t den = parse_u64(trim(text.substr(slash + 1)), source, line);
  if (den == 0) throw ParseError(source, line, "weight denominator must be nonzero");
  return Rational(num, den);
}

}  // namespace

FunctionClass read_function_class(std::istream& in, const std::string& source_name) {
  std::string line;
  std::size_t line_no = 0;

  bool have_header = false;
  std::uint64_t space_size = 0, alphabet_size = 0;
  std::vector<ObjectiveFunction> functions;
  std::vector<std::optional<Rational>> weights;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (skippable(text)) continue;

    if (!have_header) {
      std::stringstream ss(text);
      std::string space_token, alphabet_token, extra;
      ss >> space_token >> alphabet_token;
      if (ss >> extra) throw ParseError(source_name, line_no, "unexpected token '" + extra + "'");
      space_size = parse_keyed(space_token, "space", source_name, line_no);
      alphabet_size = parse_keyed(alphabet_token, "alphabet", source_name, line_no);
      if (space_size == 0 || alphabet_size == 0)
        throw ParseError(source_name, line_no, "space and alphabet must be >= 1");
      have_header = true;
      continue;
    }

    std::string values_text = text;
    std::optional<Rational> weight;
    if (const auto at = text.find('@'); at != std::string::npos) {
      values_text = trim(text.substr(0, at));
      weight = parse_weight(trim(text.substr(at + 1)), source_name, line_no);
    }
    const auto raw = parse_int_list(values_text, source_name, line_no);
    if (raw.size() != space_size)
      throw ParseError(source_name, line_no,
                       "expected " + std::to_string(space_size) + " values, got " +
                           std::to_string(raw.size()));
    std::vector<ValueIndex> table;
    table.reserve(raw.size());
    for (std::uint64_t v : raw) {
      if (v >= alphabet_size)
        throw ParseError(source_name, line_no, "value index " + std::to_string(v) +
                                                   " outside alphabet of size " +
                                                   std::to_string(alphabet_size));
      table.push_back(static_cast<ValueIndex>(v));
    }
    functions.emplace_back(SearchSpace(space_size), ValueAlphabet(alphabet_size),
                           std::move(table));
    weights.push_back(std::move(weight));
  }

  if (!have_header) throw ParseError(source_name, line_no, "missing 'space= alphabet=' header");
  if (functions.empty()) return FunctionClass(SearchSpace(space_size), ValueAlphabet(alphabet_size));

  Rational explicit_sum = 0;
  std::size_t unweighted = 0;
  for (const auto& w : weights) {
    if (w) explicit_sum += *w;
    else ++unweighted;
  }
  Rational fill = 0;
  if (unweighted > 0) {
    const Rational remaining = Rational(1) - explicit_sum;
    if (remaining < 0)
      throw ParseError(source_name, line_no, "explicit weights sum to more than 1");
    fill = remaining / unweighted;
  } else if (explicit_sum != 1) {
    throw ParseError(source_name, line_no, "weights must sum exactly to 1");
  }
  std::vector<Rational> resolved;
  resolved.reserve(weights.size());
  for (const auto& w : weights) resolved.push_back(w ? *w : fill);
  return FunctionClass(std::move(functions), std::move(resolved));
}

FunctionClass read_function_class_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open function-class file: " + path.string());
  return read_function_class(in, path.string());
}

void write_function_class(std::ostream& out, const FunctionClass& fc) {
  out << "space=" << fc.space().size() << " alphabet=" << fc.alphabet().size() << "\n";
  for (std::size_t i = 0; i < fc.size(); ++i) {
    const auto& table = fc.functions()[i].table();
    for (std::size_t p = 0; p < table.size(); ++p) {
      if (p > 0) out << ',';
      out << table[p];
    }
    out << '@' << numerator(fc.weights()[i]) << '/' << denominator(fc.weights()[i]) << "\n";
  }
}

GrowthFunction read_growth_function(std::istream& in, const std::string& source_name) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::uint64_t encoded_size = 0, solution_size = 0;
  std::optional<GrowthFunction> growth;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (skippable(text)) continue;
    if (!have_header) {
      std::stringstream ss(text);
      std::string w_token, x_token, extra;
      ss >> w_token >> x_token;
      if (ss >> extra) throw ParseError(source_name, line_no, "unexpected token '" + extra + "'");
      encoded_size = parse_keyed(w_token, "w", source_name, line_no);
      solution_size = parse_keyed(x_token, "x", source_name, line_no);
      have_header = true;
      continue;
    }
    if (growth) throw ParseError(source_name, line_no, "multiple mapping lines");
    const auto raw = parse_int_list(text, source_name, line_no);
    if (raw.size() != encoded_size)
      throw ParseError(source_name, line_no,
                       "expected " + std::to_string(encoded_size) + " mapping entries, got " +
                           std::to_string(raw.size()));
    std::vector<PointIndex> mapping;
    mapping.reserve(raw.size());
    for (std::uint64_t v : raw) {
      if (v >= solution_size)
        throw ParseError(source_name, line_no, "mapping target " + std::to_string(v) +
                                                   " outside solution space of size " +
                                                   std::to_string(solution_size));
      mapping.push_back(static_cast<PointIndex>(v));
    }
    try {
      growth = GrowthFunction(std::move(mapping), solution_size);
    } catch (const DomainError& e) {
      throw ParseError(source_name, line_no, e.what());
    }
  }
  if (!have_header) throw ParseError(source_name, line_no, "missing 'w= x=' header");
  if (!growth) throw ParseError(source_name, line_no, "missing mapping line");
  return *growth;
}

GrowthFunction read_growth_function_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open growth-function file: " + path.string());
  return read_growth_function(in, path.string());
}

}  // namespace nflab
