#include "psmaudit/rng.hpp"

namespace psmaudit {

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection sampling on the top of the range keeps the draw unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t v = engine_();
  while (v >= limit) v = engine_();
  return v % n;
}

void Fnv1a::update(std::string_view bytes) {
  for (unsigned char c : bytes) {
    state_ ^= c;
    state_ *= 1099511628211ull;
  }
}

void Fnv1a::update_u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    state_ ^= (v >> (8 * i)) & 0xffu;
    state_ *= 1099511628211ull;
  }
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view label) {
  Fnv1a h;
  h.update_u64(base);
  h.update(label);
  return h.digest();
}

}  // namespace psmaudit
