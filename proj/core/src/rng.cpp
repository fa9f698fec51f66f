#include "nflab/rng.hpp"

#include "nflab/errors.hpp"

namespace nflab {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;
}

std::uint64_t mix64(std::uint64_t v) {
  v ^= v >> 30;
  v *= 0xbf58476d1ce4e5b9ull;
  v ^= v >> 27;
  v *= 0x94d049bb133111ebull;
  v ^= v >> 31;
  return v;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master + kGolden * (index + 1));
}

std::uint64_t RandomStream::next_u64() {
  ++counter_;
  return mix64(seed_ + kGolden * counter_);
}

std::uint64_t RandomStream::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw DomainError("uniform_below: bound must be >= 1");
  // Lemire's multiply-shift with rejection; exactly uniform.
  std::uint64_t x = next_u64();
  unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = next_u64();
      m = static_cast<unsigned __int128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double RandomStream::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

KeyedPermutation::KeyedPermutation(std::uint64_t domain_size, std::uint64_t key)
    : domain_(domain_size), key_(key) {
  if (domain_size == 0) throw DomainError("KeyedPermutation: domain must be nonempty");
  bits_ = 0;
  while (bits_ < 64 && (std::uint64_t{1} << bits_) < domain_) ++bits_;
  for (int i = 0; i < kRounds; ++i) round_keys_[i] = mix64(key_ + kGolden * (i + 1));
}

std::uint64_t KeyedPermutation::feistel(std::uint64_t x) const {
  // Half widths alternate when the cover has an odd bit count; an even round
  // count restores the original split, so the map stays a bijection.
  std::uint32_t hi_bits = bits_ - bits_ / 2;
  std::uint32_t lo_bits = bits_ / 2;
  for (int round = 0; round < kRounds; ++round) {
    const std::uint64_t lo_mask = (std::uint64_t{1} << lo_bits) - 1;
    const std::uint64_t hi_mask = (std::uint64_t{1} << hi_bits) - 1;
    const std::uint64_t lo = x & lo_mask;
    const std::uint64_t hi = x >> lo_bits;
    const std::uint64_t round_value = mix64(lo ^ round_keys_[round]) & hi_mask;
    x = (lo << hi_bits) | (hi ^ round_value);
    std::swap(hi_bits, lo_bits);
  }
  return x;
}

std::uint64_t KeyedPermutation::operator()(std::uint64_t index) const {
  if (domain_ == 1) return 0;
  std::uint64_t y = feistel(index);
  while (y >= domain_) y = feistel(y);
  return y;
}

std::vector<std::uint64_t> random_permutation(std::uint64_t n, std::uint64_t seed) {
  std::vector<std::uint64_t> perm(n);
  for (std::uint64_t i = 0; i < n; ++i) perm[i] = i;
  RandomStream stream(seed);
  for (std::uint64_t i = n; i > 1; --i) {
    const std::uint64_t j = stream.uniform_below(i);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

}  // namespace nflab
