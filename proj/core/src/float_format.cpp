#include "nymp/float_format.hpp"

#include <bit>
#include <cfenv>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "nymp/errors.hpp"

namespace nymp {

namespace {

// IEEE-style derived quantities for a (significand_bits, exponent_bits)
// pair: bias = 2^(eb-1)-1, min_exponent = 1-bias, max finite =
// (2 - 2^-sig) * 2^bias.
FloatFormat ieee_like(std::string name, int sig, int eb) {
  FloatFormat f;
  f.name = std::move(name);
  f.significand_bits = sig;
  f.exponent_bits = eb;
  f.unit_roundoff = std::ldexp(1.0, -(sig + 1));
  int bias = (1 << (eb - 1)) - 1;
  f.min_exponent = 1 - bias;
  f.x_min = std::ldexp(1.0, f.min_exponent);
  f.x_s_min = std::ldexp(1.0, f.min_exponent - sig);
  f.x_max = (2.0 - std::ldexp(1.0, -sig)) * std::ldexp(1.0, bias);
  return f;
}

}  // namespace

FloatFormat builtin_format(const std::string& name) {
  if (name == "fp16") return ieee_like("fp16", 10, 5);
  if (name == "fp32") return ieee_like("fp32", 23, 8);
  if (name == "fp64") return ieee_like("fp64", 52, 11);
  if (name == "fp8e5m2") {
    // Quoted with unit roundoff 2^-2, i.e. one stored significand bit, and
    // the full binary16 range.
    FloatFormat f = ieee_like("fp8e5m2", 1, 5);
    f.x_max = 65504.0;
    return f;
  }
  if (name == "fp8e4m3") {
    // Unit roundoff 2^-3 (two stored bits); the extended-range variant with
    // maximum 448 = 1.75 * 2^8.
    FloatFormat f = ieee_like("fp8e4m3", 2, 4);
    f.x_max = 448.0;
    return f;
  }
  throw config_error("unknown float format '" + name +
                     "' (expected fp16, fp32, fp64, fp8e5m2 or fp8e4m3)");
}

double round_to(double x, const FloatFormat& fmt) {
  if (!std::isfinite(x))
    throw std::invalid_argument("round_to: input must be finite");
  if (fmt.is_working_precision() || x == 0.0) return x;

  double m = std::abs(x);
  // Below half the smallest subnormal everything flushes to zero (exactly
  // half ties to even, i.e. also zero, so strict is enough and keeps the
  // general path free of fp64-subnormal exponents).
  if (m < 0.5 * fmt.x_s_min) return std::copysign(0.0, x);

  // floor(log2 m) read straight from the fp64 exponent field; m is a normal
  // double here for every simulated format.
  int e = static_cast<int>(std::bit_cast<std::uint64_t>(m) >> 52) - 1023;
  if (e < fmt.min_exponent) e = fmt.min_exponent;  // subnormal spacing

  // Grid spacing 2^(e - sig).  m/q lands in [0, 2^(sig+1)], so nearbyint
  // (ties to even under the default rounding mode) performs the grid
  // rounding exactly, including the carry into the next binade.
  double q = std::bit_cast<double>(
      static_cast<std::uint64_t>(e - fmt.significand_bits + 1023) << 52);
  double r = std::nearbyint(m / q) * q;

  if (r > fmt.x_max) {
    if (fmt.overflow_policy == OverflowPolicy::Error) {
      std::ostringstream msg;
      msg << "round_to: |" << x << "| overflows " << fmt.name
          << " (x_max = " << fmt.x_max << ")";
      throw overflow_error(msg.str());
    }
    r = std::numeric_limits<double>::infinity();
  }
  return std::copysign(r, x);
}

}  // namespace nymp
