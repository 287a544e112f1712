#pragma once

#include <string>

#include "covqec/covariant_codes.hpp"
#include "covqec/symmetry_rep.hpp"

namespace covqec {

// Binary container: magic "CVQC", little-endian u32 version, u32 payload tag,
// then the payload. Doubles are stored as raw IEEE-754 bits, so a roundtrip
// reproduces every matrix entry exactly. Loaders throw std::runtime_error
// with the offending path when the header or payload is malformed.

void save_schur_decomposition(const SchurDecomposition& schur, const std::string& path);
SchurDecomposition load_schur_decomposition(const std::string& path);

// Load "<cache_dir>/schur_n<n>_d<d>.cvqc" if present, otherwise construct the
// decomposition and save it there. Purely an optimization: the returned
// object is bit-identical either way.
SchurDecomposition schur_decomposition_cached(int n, int d, const std::string& cache_dir);

struct StoredU1Code {
  U1CodeSpec spec;
  CommutantUnitary unitary;
};

struct StoredSudCode {
  SUdCodeSpec spec;
  CommutantUnitary unitary;
};

void save_u1_code(const U1CodeSpec& spec, const CommutantUnitary& unitary,
                  const std::string& path);
StoredU1Code load_u1_code(const std::string& path);

void save_sud_code(const SUdCodeSpec& spec, const CommutantUnitary& unitary,
                   const std::string& path);
StoredSudCode load_sud_code(const std::string& path);

}  // namespace covqec
