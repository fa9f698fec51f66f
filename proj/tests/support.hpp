#pragma once

#include <algorithm>
#include <vector>

#include "nflab/function_space.hpp"

namespace nflab::test {

// Table literal -> function; alphabet defaults to max entry + 1.
inline ObjectiveFunction make_fn(std::vector<ValueIndex> table, std::uint64_t alphabet = 0) {
  if (alphabet == 0) alphabet = *std::max_element(table.begin(), table.end()) + std::uint64_t{1};
  const std::uint64_t size = table.size();
  return ObjectiveFunction(SearchSpace(size), ValueAlphabet(alphabet), std::move(table));
}

inline FunctionClass make_uniform_class(std::vector<std::vector<ValueIndex>> tables,
                                        std::uint64_t alphabet) {
  std::vector<ObjectiveFunction> functions;
  functions.reserve(tables.size());
  for (auto& t : tables) functions.push_back(make_fn(std::move(t), alphabet));
  return FunctionClass::uniform(std::move(functions));
}

}  // namespace nflab::test
