#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "nflab/function_space.hpp"
#include "nflab/search_algorithms.hpp"

namespace nflab {

// Function-class text format:
//   space=<int> alphabet=<int>
//   v0,v1,...,v{n-1}[@<num>/<den>]
// Blank lines and lines starting with '#' are ignored. Entries without a
// weight suffix share the probability mass left over by the explicit weights,
// uniformly; with no unweighted entries the explicit weights must sum to 1.
FunctionClass read_function_class(std::istream& in, const std::string& source_name);
FunctionClass read_function_class_file(const std::filesystem::path& path);
void write_function_class(std::ostream& out, const FunctionClass& fc);

// Growth-function text format:
//   w=<int> x=<int>
//   t0,t1,...,t{w-1}
GrowthFunction read_growth_function(std::istream& in, const std::string& source_name);
GrowthFunction read_growth_function_file(const std::filesystem::path& path);

}  // namespace nflab
