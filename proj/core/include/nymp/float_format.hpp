#pragma once

#include <string>

namespace nymp {

enum class OverflowPolicy { Error, SaturateToInf };

// Parameter set of a simulated binary floating point format.  Values of the
// format are ordinary fp64 doubles constrained to the format's grid; only the
// grid geometry lives here.  All simulated arithmetic is performed in fp64
// and re-rounded, so every format must be strictly coarser than fp64.
//
// significand_bits counts stored bits, excluding the implicit leading one,
// which fixes unit_roundoff = 2^-(significand_bits+1) and
// x_s_min = x_min * 2^-significand_bits.
struct FloatFormat {
  std::string name;
  int significand_bits = 0;
  int exponent_bits = 0;
  double unit_roundoff = 0;  // half the grid spacing just above 1
  double x_s_min = 0;        // smallest positive subnormal
  double x_min = 0;          // smallest positive normal
  double x_max = 0;          // largest finite value
  OverflowPolicy overflow_policy = OverflowPolicy::Error;

  // Exponent of x_min; grid spacing never shrinks below 2^(min_exponent -
  // significand_bits), which yields gradual underflow.
  int min_exponent = 0;

  // fp64 values round-trip unchanged, so rounding can be skipped entirely.
  bool is_working_precision() const { return significand_bits >= 52; }
};

// Built-in formats: "fp16", "fp32", "fp64" (IEEE binary16/32/64) plus the two
// 8-bit formats "fp8e5m2" and "fp8e4m3".  The 8-bit presets follow the
// convention that quotes their unit roundoffs as 2^-2 and 2^-3: one and two
// stored significand bits respectively, with x_max pinned to 65504 (the
// binary16 ceiling) for e5m2 and 448 for e4m3.  Unknown names raise
// config_error.
FloatFormat builtin_format(const std::string& name);

// Round a finite fp64 value to the nearest point of the format grid, ties to
// even.  Results below x_s_min/2 in magnitude flush to (signed) zero through
// the gradual underflow range.  Results beyond x_max follow the format's
// overflow policy: throw nymp::overflow_error naming the value, or return
// +-inf.  Non-finite input is a precondition violation and raises
// std::invalid_argument.
double round_to(double x, const FloatFormat& fmt);

}  // namespace nymp
