#pragma once

#include <cstdint>
#include <vector>

#include "covqec/symmetry_rep.hpp"
#include "covqec/tensor_core.hpp"

namespace covqec {

// A bipartite positive operator on P (x) Q stored dense, P major. Trace may be
// below 1 (subnormalized states are meaningful here); never above 1 + 1e-10.
struct BipartiteState {
  Mat rho;
  long long dim_p = 0;
  long long dim_q = 0;
};

void check_bipartite_state(const BipartiteState& state, double tol = 1e-9);

// Conditional min-entropy H_min(P|Q) = -log2 min{Tr sigma : I_P (x) sigma >= rho}
// with a feasible dual point, so dual <= optimum <= primal certifies the value.
struct HminResult {
  double hmin = 0.0;
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;  // primal - dual, both in trace units
  int iterations = 0;
};

// Damped-Newton log-barrier path following on the primal; total dimension must
// be <= 64. Throws on non-positive input or dimension over the cap.
HminResult hmin_sdp(const BipartiteState& state);

// Alternating projections on the slack operator with bisection over Tr sigma;
// kept as an independent cross-check of hmin_sdp (threshold 1e-8, cap 10^4).
HminResult hmin_sdp_projection(const BipartiteState& state);

// Exact value for a pure state: -2 log2(sum of Schmidt coefficients).
double hmin_pure(const Vec& psi, long long dim_p, long long dim_q);

struct HminBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// Operator-norm sandwich valid for any bipartite positive operator:
//   -log2 ||rho||_inf - log2 dim_q <= H_min(P|Q) <= -log2 ||rho||_inf.
HminBounds hmin_norm_bounds(const BipartiteState& state);

// Direct sum over the P register with a shared Q register. H_min of the result
// obeys the disjoint-block sandwich (1/m) sum_i s_i <= s <= sum_i s_i in trace
// units, with equality of constraints per block.
BipartiteState direct_sum_blocks(const std::vector<BipartiteState>& blocks);

// Drop the orthogonal complement of the P marginal's support (eigenvalues
// below tol * max). Leaves H_min(P|Q) unchanged.
BipartiteState restrict_to_support(const BipartiteState& state, double tol = 1e-12);

// --- block decompositions and the averaged state -----------------------------

// H = oplus_j L_j (x) M_j described by per-block isometries whose columns are
// ordered L-major (column a * multiplicity + s).
struct DsBlock {
  Mat isometry;
  long long unitary_dim = 0;       // dim L_j
  long long multiplicity_dim = 0;  // dim M_j
};

struct DsDecomposition {
  long long total_dim = 0;
  std::vector<DsBlock> blocks;
};

void check_ds_decomposition(const DsDecomposition& decomp);

DsDecomposition ds_from_schur(const SchurDecomposition& schur);

// Hamming-weight sectors of n qubits: unitary_dim 1, multiplicity C(n, j).
DsDecomposition ds_u1_sectors(int n);

// Average of rho (on H (x) ref) over Haar-random block unitaries acting on the
// multiplicity factors: keeps each block's L (x) ref component and replaces the
// multiplicity factor by its maximally mixed state.
Mat block_average(const Mat& rho, const DsDecomposition& decomp, long long ref_dim);

// --- exact environment-pair states of the phase-covariant family -------------
// The state whose min-entropy controls decoupling is block diagonal in the
// kept-site weight i. Block i carries a projector of rank C(n-t, i) tensored
// with a pure component whose nonzero entries pair the erased-copy string v
// with the environment string e = v and the logical string l with the
// reference string r = l.

struct U1LambdaChoi {
  long long n = 0;
  int k = 0;
  int t = 0;
  long long alpha = 0;
  struct Block {
    int kept_weight = 0;  // i
    // component index (v << k) | l -> amplitude 1 / sqrt(2^k C(n, wt(l)+alpha))
    std::vector<std::pair<long long, double>> amplitudes;
  };
  std::vector<Block> blocks;  // nonempty blocks only, ascending i
};

U1LambdaChoi u1_lambda_choi(long long n, int k, int t, long long alpha);

// Dense assembly on the pair-register support basis {(x, ab): wt(ab) = wt(x)+alpha}
// with Q = E (x) R of dimension 2^{t+k}; small n only.
BipartiteState u1_lambda_dense(const U1LambdaChoi& lambda);

// The same state assembled from its definition (embed the maximally entangled
// logical pair through the sector-uniform encoding, keep the kept-site string
// as a classical label); used to validate the structured form.
BipartiteState u1_lambda_first_principles(long long n, int k, int t, long long alpha);

// Replace each block's rank-C(n-t,i) projector by a rank-1 projector; the SDP
// constraint is per block, so H_min is exactly unchanged, and the support
// restriction brings (6,1,1,3) down to total dimension 16.
BipartiteState u1_lambda_compressed(const U1LambdaChoi& lambda);

// kappa = sum_i (sum_j C(t,j-i) C(k,j-alpha) / sqrt(2^k C(n,j)))^2, with the
// sandwich -log2 kappa <= H_min <= -log2 kappa + log2(k+t+1).
long double u1_kappa(long long n, int k, int t, long long alpha);
// Log-domain evaluation usable up to n ~ 1e6 (kappa itself underflows there).
long double u1_log2_kappa(long long n, int k, int t, long long alpha);
HminBounds u1_kappa_bounds(long long n, int k, int t, long long alpha);

// --- worst-case (basis or two-term superposition) inputs ----------------------

struct U1LambdaWorst {
  long long n = 0;
  int k = 0;
  int t = 0;
  long long alpha = 0;
  long long x = 0;
  long long xprime = -1;  // -1: single basis input
};

U1LambdaWorst u1_lambda_worst(long long n, int k, int t, long long alpha, long long x,
                              long long xprime = -1);

// Dense assembly with Q = E of dimension 2^t on the pair-register support basis.
BipartiteState u1_lambda_worst_dense(const U1LambdaWorst& lambda);

// Trace of the explicit feasible sigma for a basis input of physical weight j:
// sum over environment weights of C(t,i)^2 / C(n,j) (equals C(2t,t)/C(n,j)
// when the weight range is unconstrained).
double u1_worst_sigma_trace(long long n, int t, long long j);

// Sandwich [-log2 S, -log2 S + log2(t+1)] on H_min of the basis-input state.
HminBounds u1_worst_bounds(long long n, int t, long long j);

// Overlap functional for a two-basis-term superposition with physical weights
// ja, jb: chi = sum_i (C(t,ja-i)/sqrt(C(n,ja)) + C(t,jb-i)/sqrt(C(n,jb)))^2.
// -log2(chi/2) lower-bounds H_min always; it is NOT an upper bound when
// ja = jb (the two components share environment-side Schmidt vectors and chi
// degenerates to exactly 4x the single-input value).
double u1_chi_superposition(long long n, int t, long long ja, long long jb);

// --- closed-form lower bounds --------------------------------------------------

// Per-sector dimensions in the log domain (unitary factor and multiplicity
// factor) for the generic bound below.
struct SectorDims {
  double log2_unitary = 0.0;
  double log2_multiplicity = 0.0;
};

// H_min >= -(2t + k) log2 d - max over supported sectors of
// (log2_unitary - log2_multiplicity).
double hmin_general_lower_bound(const std::vector<SectorDims>& sectors,
                                const std::vector<int>& support, int t, int k, int d);

// Phase-covariant specialization: min_{j in [alpha, alpha+k]} log2 C(n,j) - (2t+k).
double hmin_u1_lower_bound(long long n, int k, int t, long long alpha);

// Entropy-form relaxation with the explicit polynomial correction:
//   n * min{H_b(alpha/n), H_b((alpha+k)/n)} - (2t + k) - log2(n + 1).
double hmin_u1_entropy_lower_bound(long long n, int k, int t, long long alpha);

// Permutation-covariant bound for a gauge shape lambda and t lost qudits:
//   -2t log2 d - max over lambda' (lambda plus t boxes, at most d rows) of
//   log2(unitary dim / multiplicity dim), evaluated with hook formulas in the
//   log domain so it scales to n in the hundreds.
double hmin_sud_lower_bound(const Partition& lambda, int d, int t);

// Right-hand side of the partial decoupling bound: 2^{-hmin/2}.
double decoupling_rhs(double hmin);

}  // namespace covqec
