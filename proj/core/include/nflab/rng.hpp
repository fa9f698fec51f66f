#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace nflab {

// splitmix64 finalizer; full-avalanche 64-bit mixer.
std::uint64_t mix64(std::uint64_t v);

// Stable per-(master, index) seed derivation for reproducible fan-out.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Deterministic PRNG with portable, exactly-uniform bounded draws. The draw
// sequence depends only on the seed and the call order, never on platform
// library internals.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), counter_(0) {}

  std::uint64_t initial_seed() const { return seed_; }
  std::uint64_t next_u64();
  // Uniform draw from {0, ..., bound-1}; bound >= 1.
  std::uint64_t uniform_below(std::uint64_t bound);
  // Uniform in [0, 1) with 53 random bits.
  double next_unit();

 private:
  std::uint64_t seed_;
  std::uint64_t counter_;
};

// Keyed bijection of {0, ..., domain_size-1} onto itself in constant state:
// a fixed-round balanced Feistel network over the smallest power-of-two cover
// of the domain, with out-of-range images walked back into the domain by
// iterating the network (cycle walking). Evaluating one image costs a
// constant expected number of rounds, and the whole object serializes to a
// handful of machine words regardless of the domain size.
class KeyedPermutation {
 public:
  KeyedPermutation(std::uint64_t domain_size, std::uint64_t key);

  std::uint64_t domain_size() const { return domain_; }
  std::uint64_t key() const { return key_; }

  // Image of index under the permutation; pre: index < domain_size().
  std::uint64_t operator()(std::uint64_t index) const;

  // Serialized footprint of the defining state (key and domain size).
  static constexpr std::size_t state_bytes() { return 2 * sizeof(std::uint64_t); }

  static constexpr int kRounds = 6;

 private:
  std::uint64_t feistel(std::uint64_t x) const;

  std::uint64_t domain_;
  std::uint64_t key_;
  std::uint32_t bits_;
  std::uint64_t round_keys_[kRounds];
};

// Materialized uniform permutation of {0, ..., n-1} (Fisher-Yates).
std::vector<std::uint64_t> random_permutation(std::uint64_t n, std::uint64_t seed);

}  // namespace nflab
