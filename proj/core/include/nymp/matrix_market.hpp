#pragma once

#include <string>

#include "nymp/spd_matrix.hpp"

namespace nymp {

// Reader for Matrix Market coordinate files declared
// `matrix coordinate real symmetric` (the SuiteSparse SPD convention).
// The stored triangle is mirrored and the matrix densified.  Malformed
// files raise config_error naming the offending line; matrices that fail
// the PSD check raise numeric_error.
SpdMatrix load_matrix_market(const std::string& path);

// Writer producing the same dialect (lower triangle, 17 significant digits),
// so save -> load round-trips bit-exactly.
void save_matrix_market(const SpdMatrix& a, const std::string& path);

}  // namespace nymp
