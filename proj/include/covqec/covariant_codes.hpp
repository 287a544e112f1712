#pragma once

#include <cstdint>

#include "covqec/symmetry_rep.hpp"
#include "covqec/tensor_core.hpp"

namespace covqec {

// Phase-covariant code on n qubits: k logical qubits appended with the
// ancilla |1...1 0...0> (alpha ones) and rotated by a random block-diagonal
// unitary that preserves total Hamming weight.
struct U1CodeSpec {
  int n = 0;
  int k = 0;
  int alpha = 0;
  std::uint64_t seed = 0;
};

void check_u1_spec(const U1CodeSpec& spec);

// Permutation-covariant code on n qudits of dimension d: one logical qudit
// appended with the gauge-maximally-mixed state on the lambda isotypic block
// (lambda a partition of n-1) and rotated by a random unitary acting on the
// multiplicity spaces of the n-qudit Schur decomposition.
struct SUdCodeSpec {
  int n = 0;
  int d = 0;
  Partition lambda;
  int psi_index = 0;  // which multiplicity basis vector seeds the appended state
  std::uint64_t seed = 0;
};

void check_sud_spec(const SUdCodeSpec& spec);

// A unitary drawn block-wise from the Haar measure on the commutant of the
// relevant symmetry action. Blocks are kept alongside the assembled matrix so
// samplers and serialization stay exact.
struct CommutantUnitary {
  enum class Kind { weight_sectors, multiplicity_blocks };
  Kind kind = Kind::weight_sectors;
  std::vector<Mat> blocks;
  Mat assembled;
};

// Haar unitary on each Hamming-weight sector of n qubits. Each block gets an
// independent stream derived from (seed, kind tag, block index).
CommutantUnitary sample_u1_unitary(int n, std::uint64_t seed);

// Haar unitary on each multiplicity space R_lambda' of the n-qudit Schur
// decomposition, assembled as sum_lambda' W (I_L tensor V_R) W^dag.
CommutantUnitary sample_sud_unitary(const SchurDecomposition& schur, std::uint64_t seed);

// Columns are the codewords of the logical basis states; 2^n x 2^k.
Mat u1_encoding_isometry(const U1CodeSpec& spec, const CommutantUnitary& unitary);

Mat encode_u1(const U1CodeSpec& spec, const CommutantUnitary& unitary, const Mat& logical);

// The appended gauge state: (I_L / l tensor |psi_index><psi_index|) on the
// lambda block of n-1 qudits, embedded densely.
Mat sud_gauge_state(const SUdCodeSpec& spec, const SchurDecomposition& schur_n_minus_1);

Mat encode_sud(const SUdCodeSpec& spec, const CommutantUnitary& unitary,
               const SchurDecomposition& schur_n_minus_1, const Mat& logical);

// Purification of the encoding applied to half of a maximally entangled
// logical pair: state on A (2^n) tensor R (2^k), A major.
Vec u1_choi_vector(const U1CodeSpec& spec, const CommutantUnitary& unitary);

// Encoded half of a maximally entangled pair for the qudit code: density on
// A (d^n) tensor R (d), A major. Mixed whenever the gauge block has rank > 1.
Mat sud_choi_state(const SUdCodeSpec& spec, const CommutantUnitary& unitary,
                   const SchurDecomposition& schur_n_minus_1);

// Worst residual over `trials` random group elements of the covariance
// property: a logical phase rotation commutes with encoding up to the fixed
// ancilla phase (U(1)), and a logical unitary u maps the encoded state to its
// u^{tensor n} rotation (SU(d)).
double check_covariance_u1(const U1CodeSpec& spec, const CommutantUnitary& unitary, int trials,
                           Rng& rng);
double check_covariance_sud(const SUdCodeSpec& spec, const CommutantUnitary& unitary,
                            const SchurDecomposition& schur_n_minus_1, int trials, Rng& rng);

}  // namespace covqec
