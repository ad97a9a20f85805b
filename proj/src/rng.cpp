#include "bsdelab/sde/rng.hpp"

#include <cmath>

namespace bsdelab {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline Philox4x32::Counter one_round(Philox4x32::Counter ctr, Philox4x32::Key key) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kM0, ctr[0], hi0, lo0);
  mulhilo(kM1, ctr[2], hi1, lo1);
  return {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace

Philox4x32::Counter Philox4x32::round_10(Counter ctr, Key key) {
  ctr = one_round(ctr, key);
  for (int r = 1; r < 10; ++r) {
    key[0] += kW0;
    key[1] += kW1;
    ctr = one_round(ctr, key);
  }
  return ctr;
}

void Philox4x32::uniforms(Counter ctr, Key key, double& u0, double& u1) {
  const Counter out = round_10(ctr, key);
  const std::uint64_t a = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
  const std::uint64_t b = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
  // Map to (0,1]: (x+1)/2^64 with 53-bit resolution.
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  u0 = (static_cast<double>(a >> 11) + 1.0) * kScale;
  u1 = (static_cast<double>(b >> 11) + 1.0) * kScale;
}

void Philox4x32::normals(Counter ctr, Key key, double& n0, double& n1) {
  double u0, u1;
  uniforms(ctr, key, u0, u1);
  const double r = std::sqrt(-2.0 * std::log(u0));
  const double theta = 2.0 * M_PI * u1;
  n0 = r * std::cos(theta);
  n1 = r * std::sin(theta);
}

double gaussian_at(std::uint64_t seed, std::uint64_t path, std::uint32_t step,
                   std::uint32_t component) {
  const Philox4x32::Counter ctr = {static_cast<std::uint32_t>(path),
                                   static_cast<std::uint32_t>(path >> 32), step, component >> 1};
  const Philox4x32::Key key = {static_cast<std::uint32_t>(seed),
                               static_cast<std::uint32_t>(seed >> 32)};
  double n0, n1;
  Philox4x32::normals(ctr, key, n0, n1);
  return (component & 1u) ? n1 : n0;
}

}  // namespace bsdelab
