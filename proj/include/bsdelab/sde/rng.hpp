#pragma once

#include <array>
#include <cstdint>

namespace bsdelab {

// Philox4x32-10 counter-based generator. Each (counter, key) pair maps to
// four independent 32-bit words, so any (path, step, component) coordinate
// can be evaluated without sequential state. This is what makes path
// generation bit-identical across worker counts.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter round_10(Counter ctr, Key key);

  // Two independent uniform doubles in (0,1] from one block; never 0 so the
  // Box-Muller log is safe.
  static void uniforms(Counter ctr, Key key, double& u0, double& u1);

  // Two standard normals per counter block via Box-Muller.
  static void normals(Counter ctr, Key key, double& n0, double& n1);
};

// Addresses the normal increment for (path, step, component) under a seed.
// Components are packed two per Philox block.
double gaussian_at(std::uint64_t seed, std::uint64_t path, std::uint32_t step,
                   std::uint32_t component);

}  // namespace bsdelab
