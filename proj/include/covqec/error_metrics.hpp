#pragma once

#include <cstdint>
#include <vector>

#include "covqec/covariant_codes.hpp"
#include "covqec/symmetry_rep.hpp"
#include "covqec/tensor_core.hpp"

namespace covqec {

// Which physical sites are lost to the environment. An empty set is the
// noiseless limit and is accepted; ops that genuinely need t >= 1 say so.
struct ErasurePattern {
  int n = 0;
  std::vector<int> erased;  // strictly increasing site indices

  int t() const { return static_cast<int>(erased.size()); }
};

void check_erasure_pattern(const ErasurePattern& pattern);
ErasurePattern first_sites(int n, int t);

// How the environment-side reference state zeta is chosen when reporting
// recovery-error upper bounds. `iterative` is a local fidelity-maximizing
// fixed point and is never used for acceptance-grade numbers.
enum class ZetaStrategy { marginal, maximally_mixed, iterative };

struct SymmetryTermResult {
  long long n = 0;
  int k = 0;
  int t = 0;
  long long alpha = 0;
  double fidelity = 0.0;
  double purified = 0.0;
  double trace_dist = 0.0;
};

struct ErrorReport {
  std::uint64_t seed = 0;
  double eps_choi_upper = 0.0;
  double eps_worst_upper = 0.0;
  double decoupling_term = 0.0;
  double symmetry_term = 0.0;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;  // in natural-log coordinates
  double residual_rms = 0.0;
  int points = 0;
};

struct WorstInputResult {
  std::vector<double> spectrum;
  double eps = 0.0;
};

// Exact binomial coefficient; throws DimensionCapError if it would overflow
// 64 bits.
long long binomial_exact(long long n, long long k);

// --- closed forms for the phase-covariant family ----------------------------
// All interiors run in long double so the 1 - fidelity cancellation at large n
// keeps full relative accuracy.

// Probability ratio C(n-t, a-i) / C(n, a) evaluated by falling factorials;
// zero outside the admissible range. Valid for n up to ~1e6.
long double u1_ratio(long long n, int t, long long a, int i);

// Environment weight distribution of the averaged code:
// 2^{-k} sum_j C(k,j) u1_ratio(n, t, j + alpha, i).
long double u1_beta(long long n, int k, int t, long long alpha, int i);

// Distance between the average environment state (with reference) and the
// decoupled product target, as fidelity / purified distance / trace distance.
SymmetryTermResult u1_choi_symmetry_term(long long n, int k, int t, long long alpha);

// Same distance maximized over logical basis inputs (depends only on the
// logical weight; the maximum over weights 0..k is returned).
double u1_worst_symmetry_term(long long n, int k, int t, long long alpha);

// Dense builders for the small-system regime (2^{t+k} <= kMaxDenseDim).
Mat u1_average_complementary(long long n, int k, int t, long long alpha);  // on E (x) R
Mat u1_zeta_marginal(long long n, int k, int t, long long alpha);          // on E

// --- sampled codes -----------------------------------------------------------

// Environment-plus-reference output of one sampled code acting on half a
// maximally entangled logical pair; E (erased sites, ascending) major, R minor.
Mat u1_complementary_choi(const U1CodeSpec& spec, const CommutantUnitary& unitary,
                          const ErasurePattern& pattern);

// Environment output for the logical basis input |x>.
Mat u1_complementary_basis(const U1CodeSpec& spec, const CommutantUnitary& unitary,
                           const ErasurePattern& pattern, long long x);

// Fidelity-maximizing environment state by fixed-point iteration
// (tolerance 1e-9 in trace norm, 200 iteration cap).
Mat iterative_zeta(const Mat& out, long long env_dim, long long ref_dim);

ErrorReport sampled_code_errors_u1(const U1CodeSpec& spec, const CommutantUnitary& unitary,
                                   const ErasurePattern& pattern, ZetaStrategy strategy);

// --- permutation-covariant family --------------------------------------------

// Closed form of the average single-site environment state with reference:
// (1/n) |phi><phi| + (1 - 1/n) I/d (x) I/d, independent of the gauge shape.
Mat sud_average_env(long long n, int d);
double sud_average_env_error(long long n, int d);

Mat sud_complementary_choi(const SUdCodeSpec& spec, const CommutantUnitary& unitary,
                           const SchurDecomposition& schur_n_minus_1,
                           const ErasurePattern& pattern);

Mat sud_complementary_pure(const SUdCodeSpec& spec, const CommutantUnitary& unitary,
                           const SchurDecomposition& schur_n_minus_1,
                           const ErasurePattern& pattern, const Vec& psi);

// eps_worst_upper is found by projected gradient ascent over pure logical
// inputs with 16 deterministic restarts seeded from the code seed.
ErrorReport sampled_code_errors_sud(const SUdCodeSpec& spec, const CommutantUnitary& unitary,
                                    const SchurDecomposition& schur_n_minus_1,
                                    const ErasurePattern& pattern, ZetaStrategy strategy);

// --- worst-case input for the averaged single-erasure channel ----------------

// Recovery-error upper bound for an input with the given Schmidt spectrum fed
// into the averaged channel rho -> rho/n + (1 - 1/n) Tr[rho] I/d; exact
// d^2-dimensional evaluation, valid for any n.
double sud_worst_input_error(const std::vector<double>& spectrum, long long n);

// Projected gradient ascent over the Schmidt simplex with random restarts.
WorstInputResult sud_worst_input_search(int d, long long n, int starts, std::uint64_t seed);

// --- fitting and aggregation utilities ---------------------------------------

// Least-squares line through (ln x, ln y); requires at least 8 points and
// strictly positive data.
SlopeFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys);

// sum_t C(n,t) p^t (1-p)^{n-t} values[t] for i.i.d. per-site loss.
double binomial_convolve(const std::vector<double>& per_count_values, int n, double p);

}  // namespace covqec
