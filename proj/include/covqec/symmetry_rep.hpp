#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "covqec/tensor_core.hpp"

namespace covqec {

// A partition is a non-increasing list of positive parts. Functions that take
// partitions validate this and throw std::invalid_argument otherwise.
using Partition = std::vector<int>;

void check_partition(const Partition& lambda);
int partition_weight(const Partition& lambda);

// All partitions of n with at most max_rows rows, in descending
// lexicographic order, e.g. partitions(4, 2) = {4}, {3,1}, {2,2}.
std::vector<Partition> partitions(int n, int max_rows);

// Shapes obtained from lambda by adding one box, keeping at most d rows,
// in descending lexicographic order.
std::vector<Partition> adds_one_box(const Partition& lambda, int d);

struct TableauCounts {
  long long standard;      // standard Young tableaux of the shape
  long long semistandard;  // semistandard tableaux with entries in {1..d}
};

// Exact integer tableau counts by the hook length formulas. The standard
// count is the symmetric-group irrep dimension (multiplicity space), the
// semistandard count the U(d) irrep dimension (gauge space). Caps at
// |lambda| <= 24 so the exact arithmetic cannot overflow; use the log-domain
// variants beyond that.
TableauCounts hook_counts(const Partition& lambda, int d);

// Brute-force enumeration counterparts, used as independent cross-checks.
long long count_standard_tableaux_enum(const Partition& lambda);
long long count_semistandard_tableaux_enum(const Partition& lambda, int d);

// log2 of the tableau counts via lgamma, valid for |lambda| far beyond the
// exact cap (relative accuracy ~1e-12).
double log2_standard_count(const Partition& lambda);
double log2_semistandard_count(const Partition& lambda, int d);

double log2_factorial(long long n);
// log2 C(n, k); relative accuracy 1e-12 for n up to 1e6.
double log2_binomial(long long n, long long k);
double binary_entropy(double p);

// Littlewood-Richardson coefficient c^{lambda}_{mu nu} counted by
// backtracking over LR skew tableaux of shape lambda/mu and content nu.
// Capped at |lambda| <= 8.
long long lr_coefficient(const Partition& mu, const Partition& nu, const Partition& lambda);

// Symmetric group characters chi_lambda(cycle_type) by the
// Murnaghan-Nakayama rule. cycle_type is a partition of the same weight.
long long character(const Partition& lambda, const Partition& cycle_type);
long long conjugacy_class_size(const Partition& cycle_type);

// Basis indices of each Hamming-weight sector of n qubits; sectors[w] is the
// ascending list of indices with popcount w.
std::vector<std::vector<long long>> hamming_sectors(int n);

// --- symmetric group action on (C^d)^{tensor n} -----------------------------

std::vector<int> cycle_type(const std::vector<int>& perm);

// Index map of the operator O_pi that routes tensor factor i to slot pi[i];
// out_index = map[in_index]. Composition satisfies O_pi O_sigma = O_{pi o sigma}
// with (pi o sigma)(i) = pi(sigma(i)).
std::vector<long long> permutation_index_map(const std::vector<int>& perm, int d);
Mat permutation_operator(const std::vector<int>& perm, int d);

// Row-major filling of the shape with 0..n-1; the first standard tableau in
// row-lexicographic order.
std::vector<std::vector<int>> first_standard_tableau(const Partition& lambda);

// Young symmetrizer e_T = (sum of row-group ops) * (signed sum of
// column-group ops) for a tableau whose entries are tensor positions 0..n-1.
// Capped at n <= 8 and d^n <= kMaxDenseDim.
Mat young_symmetrizer(const std::vector<std::vector<int>>& tableau, int d);

// Isotypic projector onto the lambda block of Schur-Weyl duality, built from
// the character expansion (r_lambda/n!) sum_pi chi_lambda(pi) O_pi.
// Same caps as young_symmetrizer.
Mat schur_projector(const Partition& lambda, int n, int d);

struct SchurBlock {
  Partition shape;
  long long unitary_dim;   // l: dimension of the U(d) irrep (gauge space L)
  long long standard_dim;  // r: dimension of the S_n irrep (multiplicity space R)
  // d^n x (l*r) isometry; column a*r + s is gauge index a, multiplicity
  // index s, so conjugating U^{tensor n} gives U_lambda tensor I_R and
  // conjugating O_pi gives I_L tensor D_lambda(pi).
  Mat isometry;
};

struct SchurDecomposition {
  int n = 0;
  int d = 0;
  std::vector<SchurBlock> blocks;

  const SchurBlock& block(const Partition& shape) const;
  Mat projector(std::size_t block_index) const;  // W W^dag
};

// Full Schur basis for n qudits of local dimension d. Deterministic: the
// gauge frame is seeded by the first standard tableau's symmetrizer image and
// the multiplicity frame by a breadth-first orbit sweep under adjacent
// transpositions with shared expansion coefficients across gauge indices.
// Capped at n <= 8 and d^n <= kMaxDenseDim.
SchurDecomposition schur_decomposition(int n, int d);

// Twirl over the symmetric group: (1/n!) sum_pi (O_pi tensor I_ref) M
// (O_pi tensor I_ref)^dag, evaluated by projecting onto the commutant blocks
// rather than by direct summation. M lives on (C^d)^n tensor C^ref_dim.
// This equals the Haar average over the code's commutant unitaries.
Mat permutation_average(const Mat& m, const SchurDecomposition& schur, long long ref_dim = 1);

// Coefficients c_mu with Tr_s[Pi_lambda / (l r)] = sum_mu c_mu Pi_mu, where
// the trace is over any s of the |lambda| qudits and mu runs over partitions
// of |lambda| - s with at most d rows. Exact combinatorial evaluation via
// Littlewood-Richardson coefficients; capped at |lambda| <= 8.
std::vector<std::pair<Partition, double>> isotypic_partial_trace(const Partition& lambda, int d,
                                                                 int s);

}  // namespace covqec
