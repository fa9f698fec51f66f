#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "nflab/function_space.hpp"
#include "nflab/performance.hpp"
#include "nflab/search_algorithms.hpp"

namespace nflab {

// "name" or "name(arg, key=value, ...)"; nested parentheses are kept intact
// inside argument values.
struct ParsedSpec {
  std::string name;
  std::vector<std::pair<std::string, std::string>> params;  // positional entries use key ""

  bool has(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback = "") const;
};

ParsedSpec parse_spec(const std::string& spec);

// Algorithm registry: fixed_enum[(order=2-0-1)], random_enum[(seed=<int>)],
// random_replacement[(seed=<int>)], revisit_j(r=<int>),
// encoded(inner=<spec>, growth=<file>).
AlgorithmPtr make_algorithm(const std::string& spec,
                            const std::filesystem::path& base_dir = ".");

// Measure registry: best_so_far, distinct_count, threshold(v=<int>).
SensibleMeasure make_measure(const std::string& spec);

// Function-class source: a file path, or a generator spec among
// full-space, orbit-of(v0,v1,...), random-subset(n=<int>[,seed=<int>]).
// Generators need explicit space/alphabet sizes (orbit-of takes its space
// from the table); file classes must agree with the sizes when nonzero.
FunctionClass make_function_class(const std::string& spec_or_path, std::uint64_t space_size,
                                  std::uint64_t alphabet_size, std::uint64_t master_seed,
                                  const std::filesystem::path& base_dir = ".");

}  // namespace nflab
