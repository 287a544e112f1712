#include "covqec/min_entropy.hpp"

#include <bit>
#include <cmath>
#include <vector>

#include "covqec/covariant_codes.hpp"
#include "covqec/error_metrics.hpp"
#include "doctest.h"

using namespace covqec;

namespace {

BipartiteState random_mixed_state(long long dp, long long dq, long long rank, Rng& rng) {
  BipartiteState state;
  state.dim_p = dp;
  state.dim_q = dq;
  state.rho = random_density_matrix(dp * dq, rank, rng);
  return state;
}

// kappa evaluated directly from its defining double sum in long double,
// independent of the log-sum-exp evaluation in the library.
long double kappa_direct(long long n, int k, int t, long long alpha) {
  long double total = 0.0L;
  for (long long i = 0; i <= n - t; ++i) {
    long double inner = 0.0L;
    for (long long j = alpha; j <= alpha + k; ++j) {
      long long ct = binomial_exact(t, j - i);
      long long ck = binomial_exact(k, j - alpha);
      if (ct == 0 || ck == 0) continue;
      inner += static_cast<long double>(ct) * static_cast<long double>(ck) /
               std::sqrt(static_cast<long double>((1LL << k) * binomial_exact(n, j)));
    }
    total += inner * inner;
  }
  return total;
}

}  // namespace

TEST_CASE("bipartite states are validated before optimization") {
  BipartiteState good;
  good.dim_p = 2;
  good.dim_q = 2;
  good.rho = 0.25 * identity(4);
  CHECK_NOTHROW(check_bipartite_state(good));

  BipartiteState wrong_dims = good;
  wrong_dims.dim_q = 3;
  CHECK_THROWS_AS(check_bipartite_state(wrong_dims), std::invalid_argument);

  BipartiteState overweight = good;
  overweight.rho = 0.5 * identity(4);  // trace 2
  CHECK_THROWS_AS(check_bipartite_state(overweight), std::invalid_argument);

  BipartiteState negative = good;
  negative.rho(0, 0) = -0.3;
  CHECK_THROWS_AS(check_bipartite_state(negative), std::invalid_argument);

  BipartiteState empty;
  empty.dim_p = 8;
  empty.dim_q = 8;
  empty.rho = Mat::Zero(64, 64);
  CHECK_THROWS_AS(hmin_sdp(empty), std::invalid_argument);

  BipartiteState too_big;
  too_big.dim_p = 16;
  too_big.dim_q = 8;
  too_big.rho = identity(128) / 128.0;
  CHECK_THROWS_AS(hmin_sdp(too_big), DimensionCapError);
}

TEST_CASE("the solver reproduces the closed form for pure states") {
  Rng rng(300);
  for (int trial = 0; trial < 20; ++trial) {
    long long dp = 2 + static_cast<long long>(rng.next_u64() % 3);
    long long dq = 2 + static_cast<long long>(rng.next_u64() % 3);
    Vec psi = random_state_vector(dp * dq, rng);
    BipartiteState state;
    state.dim_p = dp;
    state.dim_q = dq;
    state.rho = psi * psi.adjoint();
    auto result = hmin_sdp(state);
    double exact = hmin_pure(psi, dp, dq);
    CHECK(std::abs(result.hmin - exact) < 1e-6);
    CHECK(result.dual <= result.primal + 1e-12);
  }
  // Maximally entangled pure state on 4 x 4: coefficients sum to 2.
  Vec maxent = Vec::Zero(16);
  for (int i = 0; i < 4; ++i) maxent(i * 4 + i) = 0.5;
  CHECK(hmin_pure(maxent, 4, 4) == doctest::Approx(-2.0).epsilon(1e-12));
  // Product pure state has no side information to exploit.
  CHECK(hmin_pure(basis_vector(4, 1), 2, 2) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("solved values respect the operator norm sandwich on mixed states") {
  Rng rng(301);
  for (int trial = 0; trial < 15; ++trial) {
    long long dp = 2 + static_cast<long long>(rng.next_u64() % 3);
    long long dq = 2 + static_cast<long long>(rng.next_u64() % 3);
    long long rank = 1 + static_cast<long long>(rng.next_u64() % (dp * dq));
    auto state = random_mixed_state(dp, dq, rank, rng);
    auto bounds = hmin_norm_bounds(state);
    auto result = hmin_sdp(state);
    CHECK(result.hmin >= bounds.lower - 1e-9);
    CHECK(result.hmin <= bounds.upper + 1e-9);
    CHECK(result.gap >= -1e-12);
    // The clipped-inverse dual certificate is the looser side; on random
    // instances it settles a few 1e-5 below the primal.
    CHECK(result.gap < 2e-4 * std::max(1.0, result.primal));
  }
  // The sandwich width is exactly log2 dim_q by construction.
  auto state = random_mixed_state(3, 4, 5, rng);
  auto bounds = hmin_norm_bounds(state);
  CHECK(bounds.upper - bounds.lower == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("structured pair states match their first-principles assembly") {
  struct Case {
    long long n;
    int k;
    int t;
    long long alpha;
  };
  for (Case c : {Case{4, 1, 1, 1}, Case{6, 1, 1, 2}, Case{6, 1, 1, 3}}) {
    auto lambda = u1_lambda_choi(c.n, c.k, c.t, c.alpha);
    auto dense = u1_lambda_dense(lambda);
    auto direct = u1_lambda_first_principles(c.n, c.k, c.t, c.alpha);
    REQUIRE(dense.dim_p == direct.dim_p);
    REQUIRE(dense.dim_q == direct.dim_q);
    CHECK((dense.rho - direct.rho).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(dense.rho.trace().real() - 1.0) < 1e-12);

    long long support = 0;
    for (long long j = c.alpha; j <= c.alpha + c.k; ++j) {
      support += binomial_exact(c.k, j - c.alpha) * binomial_exact(c.n, j);
    }
    CHECK(dense.dim_p == support);
    CHECK(dense.dim_q == (1LL << (c.t + c.k)));
  }
}

TEST_CASE("projector compression never shifts the optimum") {
  auto lambda = u1_lambda_choi(4, 1, 1, 1);
  auto full = hmin_sdp(u1_lambda_dense(lambda));
  auto compressed = hmin_sdp(restrict_to_support(u1_lambda_compressed(lambda)));
  CHECK(std::abs(full.hmin - compressed.hmin) < 1e-9);
}

TEST_CASE("kappa sums match the direct evaluation and bracket the solver") {
  struct Case {
    long long n;
    int k;
    int t;
    long long alpha;
  };
  for (Case c : {Case{4, 1, 1, 1}, Case{6, 1, 1, 3}, Case{6, 2, 1, 2}, Case{8, 1, 2, 4},
                 Case{10, 1, 1, 5}}) {
    double direct = static_cast<double>(kappa_direct(c.n, c.k, c.t, c.alpha));
    CHECK(static_cast<double>(u1_kappa(c.n, c.k, c.t, c.alpha)) ==
          doctest::Approx(direct).epsilon(1e-12));
    CHECK(static_cast<double>(u1_log2_kappa(c.n, c.k, c.t, c.alpha)) ==
          doctest::Approx(std::log2(direct)).epsilon(1e-10));
    auto bounds = u1_kappa_bounds(c.n, c.k, c.t, c.alpha);
    CHECK(bounds.lower ==
          doctest::Approx(-static_cast<double>(u1_log2_kappa(c.n, c.k, c.t, c.alpha)))
              .epsilon(1e-12));
    CHECK(bounds.upper - bounds.lower ==
          doctest::Approx(std::log2(c.k + c.t + 1.0)).epsilon(1e-12));
  }
  CHECK(static_cast<double>(u1_kappa(4, 1, 1, 1)) == doctest::Approx(0.620790812).epsilon(1e-8));
  CHECK(static_cast<double>(u1_kappa(6, 1, 1, 3)) == doctest::Approx(0.174401694).epsilon(1e-8));
  CHECK(static_cast<double>(u1_kappa(10, 1, 1, 5)) ==
        doctest::Approx(0.013077163).epsilon(1e-7));

  // Log-domain evaluation survives n far beyond the dense regime: kappa tracks
  // 1 / C(n, alpha) up to a bounded combinatorial factor.
  double huge = static_cast<double>(u1_log2_kappa(1000000, 1, 1, 500000));
  CHECK(huge + log2_binomial(1000000, 500000) > -2.0);
  CHECK(huge + log2_binomial(1000000, 500000) < 6.0);

  SUBCASE("sandwich at the pinned instance") {
    auto lambda = u1_lambda_choi(6, 1, 1, 3);
    auto result = hmin_sdp(restrict_to_support(u1_lambda_compressed(lambda)));
    auto bounds = u1_kappa_bounds(6, 1, 1, 3);
    CHECK(result.hmin >= bounds.lower - 1e-6);
    CHECK(result.hmin <= bounds.upper + 1e-6);
    CHECK(result.hmin == doctest::Approx(2.519514045).epsilon(2e-6));
  }
  SUBCASE("sandwich at a two-erasure instance") {
    auto lambda = u1_lambda_choi(6, 1, 2, 2);
    auto result = hmin_sdp(restrict_to_support(u1_lambda_compressed(lambda)));
    auto bounds = u1_kappa_bounds(6, 1, 2, 2);
    CHECK(result.hmin >= bounds.lower - 1e-6);
    CHECK(result.hmin <= bounds.upper + 1e-6);
  }
}

TEST_CASE("disjoint block sums obey the trace sandwich") {
  Rng rng(555);
  for (int m : {2, 3, 4}) {
    std::vector<BipartiteState> blocks;
    double sum_s = 0.0, max_s = 0.0;
    for (int b = 0; b < m; ++b) {
      auto block = random_mixed_state(2, 3, 2, rng);
      block.rho /= m;  // keep the combined trace at 1
      blocks.push_back(block);
      double s = std::exp2(-hmin_sdp(block).hmin);
      sum_s += s;
      max_s = std::max(max_s, s);
    }
    auto combined = direct_sum_blocks(blocks);
    CHECK(combined.dim_p == 2 * m);
    CHECK(combined.dim_q == 3);
    double s_total = std::exp2(-hmin_sdp(combined).hmin);
    CHECK(s_total >= sum_s / m - 1e-7);
    CHECK(s_total >= max_s - 1e-7);
    CHECK(s_total <= sum_s + 1e-7);
  }
}

TEST_CASE("support restriction drops dead rows without moving the value") {
  Rng rng(808);
  auto small = random_mixed_state(2, 3, 3, rng);
  BipartiteState padded;
  padded.dim_p = 4;
  padded.dim_q = 3;
  padded.rho = Mat::Zero(12, 12);
  padded.rho.topLeftCorner(6, 6) = small.rho;
  auto restricted = restrict_to_support(padded);
  CHECK(restricted.dim_p == 2);
  CHECK(restricted.dim_q == 3);
  CHECK(std::abs(hmin_sdp(restricted).hmin - hmin_sdp(small).hmin) < 1e-8);
}

TEST_CASE("the projection solver independently certifies the barrier solver") {
  SUBCASE("structured instances agree tightly") {
    auto lambda = u1_lambda_choi(4, 1, 1, 1);
    auto state = restrict_to_support(u1_lambda_compressed(lambda));
    auto barrier = hmin_sdp(state);
    auto projection = hmin_sdp_projection(state);
    CHECK(std::abs(barrier.hmin - projection.hmin) < 1e-6);
    CHECK(projection.dual <= projection.primal + 1e-12);
  }
  SUBCASE("random instances stay on the sound side") {
    Rng rng(606);
    for (int trial = 0; trial < 5; ++trial) {
      auto state = random_mixed_state(3, 3, 4, rng);
      auto barrier = hmin_sdp(state);
      auto projection = hmin_sdp_projection(state);
      // The projection primal is a certified feasible trace, so its entropy
      // can only undershoot; accuracy is looser than the barrier's.
      CHECK(projection.hmin <= barrier.hmin + 1e-6);
      CHECK(projection.hmin >= barrier.hmin - 0.02);
    }
  }
}

TEST_CASE("worst-case basis inputs have an exactly solvable optimum") {
  auto lambda = u1_lambda_worst(6, 1, 1, 2, 1);
  auto dense = u1_lambda_worst_dense(lambda);
  CHECK(dense.dim_p == 20);
  CHECK(dense.dim_q == 2);
  auto result = hmin_sdp(dense);
  double sigma_trace = u1_worst_sigma_trace(6, 1, 3);
  CHECK(sigma_trace == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(result.hmin == doctest::Approx(-std::log2(sigma_trace)).epsilon(1e-7));

  auto bounds = u1_worst_bounds(6, 1, 3);
  CHECK(bounds.lower == doctest::Approx(-std::log2(0.1)).epsilon(1e-12));
  CHECK(bounds.upper - bounds.lower == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(result.hmin >= bounds.lower - 1e-7);
  CHECK(result.hmin <= bounds.upper + 1e-7);

  // Hand-compressed form: one rank-one block per environment weight, each
  // carrying 1/C(n,j) of trace weight per kept-register string.
  std::vector<BipartiteState> blocks;
  for (int i = 0; i <= 1; ++i) {
    BipartiteState block;
    block.dim_p = 1;
    block.dim_q = 2;
    block.rho = Mat::Zero(2, 2);
    long long mult = binomial_exact(5, 3 - i);
    block.rho(i, i) = static_cast<double>(mult) / 20.0 / static_cast<double>(mult);
    blocks.push_back(block);
  }
  auto compressed = hmin_sdp(direct_sum_blocks(blocks));
  CHECK(std::abs(compressed.hmin - result.hmin) < 1e-8);
}

TEST_CASE("superposition overlap functional") {
  SUBCASE("equal weights degenerate to four times the basis value") {
    double chi = u1_chi_superposition(6, 1, 3, 3);
    CHECK(chi == doctest::Approx(4.0 * u1_worst_sigma_trace(6, 1, 3)).epsilon(1e-12));
  }
  SUBCASE("mirrored weights reproduce the choi sum") {
    // Binomial symmetry C(6,j) = C(6,6-j) makes this pair coincide with kappa.
    double chi = u1_chi_superposition(6, 1, 2, 3);
    CHECK(chi / 2.0 ==
          doctest::Approx(static_cast<double>(u1_kappa(6, 1, 1, 3))).epsilon(1e-12));
  }
  SUBCASE("chi lower-bounds the solver on an unequal-weight superposition") {
    auto lambda = u1_lambda_worst(4, 1, 1, 1, 0, 1);
    auto result = hmin_sdp(u1_lambda_worst_dense(lambda));
    double chi = u1_chi_superposition(4, 1, 1, 2);
    CHECK(-std::log2(chi / 2.0) <= result.hmin + 1e-6);
  }
  SUBCASE("chi lower-bounds the solver on an equal-weight superposition") {
    auto lambda = u1_lambda_worst(5, 2, 1, 1, 1, 2);
    auto result = hmin_sdp(u1_lambda_worst_dense(lambda));
    double chi = u1_chi_superposition(5, 1, 2, 2);
    CHECK(-std::log2(chi / 2.0) <= result.hmin + 1e-6);
  }
}

TEST_CASE("block averaging is an idempotent commutant-invariant projection") {
  auto decomp = ds_u1_sectors(3);
  long long ref = 2;
  Rng rng(911);
  Mat rho = random_density_matrix(8 * ref, 8, rng);

  Mat avg = block_average(rho, decomp, ref);
  CHECK(std::abs(avg.trace().real() - rho.trace().real()) < 1e-12);
  Mat twice = block_average(avg, decomp, ref);
  CHECK((twice - avg).cwiseAbs().maxCoeff() < 1e-11);

  // Conjugating by any weight-sector unitary before averaging changes nothing.
  auto w = sample_u1_unitary(3, 4);
  Mat lifted = kron(w.assembled, identity(ref));
  Mat rotated = block_average(Mat(lifted * rho * lifted.adjoint()), decomp, ref);
  CHECK((rotated - avg).cwiseAbs().maxCoeff() < 1e-11);

  // Monte Carlo consistency: the average over sampled sector unitaries
  // converges to the projection.
  Mat mc = Mat::Zero(16, 16);
  const int samples = 400;
  for (int s = 0; s < samples; ++s) {
    auto u = sample_u1_unitary(3, 7000 + s);
    Mat op = kron(u.assembled, identity(ref));
    mc += op * rho * op.adjoint();
  }
  mc /= samples;
  CHECK((mc - avg).cwiseAbs().maxCoeff() < 0.03);

  // The same machinery accepts a Schur-Weyl block structure.
  auto schur = schur_decomposition(3, 2);
  auto sud_decomp = ds_from_schur(schur);
  CHECK_NOTHROW(check_ds_decomposition(sud_decomp));
  Mat sud_avg = block_average(rho, sud_decomp, ref);
  auto v = sample_sud_unitary(schur, 12);
  Mat sud_lift = kron(v.assembled, identity(ref));
  Mat sud_rot = block_average(Mat(sud_lift * rho * sud_lift.adjoint()), sud_decomp, ref);
  CHECK((sud_rot - sud_avg).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("closed-form lower bounds agree across their formulations") {
  SUBCASE("phase-covariant specialization equals the generic bound") {
    long long n = 10;
    std::vector<SectorDims> sectors(n + 1);
    for (long long j = 0; j <= n; ++j) {
      sectors[j] = SectorDims{0.0, log2_binomial(n, j)};
    }
    std::vector<int> support{5, 6};
    double generic = hmin_general_lower_bound(sectors, support, 1, 1, 2);
    double special = hmin_u1_lower_bound(n, 1, 1, 5);
    CHECK(generic == doctest::Approx(special).epsilon(1e-12));
    CHECK(special == doctest::Approx(4.714245518).epsilon(1e-8));
    CHECK(special == doctest::Approx(log2_binomial(10, 6) - 3.0).epsilon(1e-12));
  }
  SUBCASE("entropy relaxation stays below the exact bound") {
    double exact = hmin_u1_lower_bound(100, 1, 1, 50);
    double entropy = hmin_u1_entropy_lower_bound(100, 1, 1, 50);
    CHECK(entropy <= exact + 1e-9);
    CHECK(entropy == doctest::Approx(90.312933).epsilon(1e-6));
    CHECK(entropy >= 90.0);
  }
  SUBCASE("permutation-family bound from hook dimensions") {
    // lambda = (3,1), d = 2, t = 1: shapes (4,1) and (3,2) give
    // max log2(l/r) = log2(4/4) = 0, so the bound is -2t log2 d = -2.
    CHECK(hmin_sud_lower_bound({3, 1}, 2, 1) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(hmin_sud_lower_bound({50, 49}, 2, 1) == doctest::Approx(88.619708).epsilon(1e-6));
  }
  SUBCASE("constant ancilla weight grows like alpha log n") {
    double lo = hmin_u1_lower_bound(1 << 12, 1, 1, 5);
    double hi = hmin_u1_lower_bound(1 << 16, 1, 1, 5);
    CHECK(hi - lo == doctest::Approx(20.0).epsilon(1e-3));
  }
  SUBCASE("decoupling right-hand side") {
    CHECK(decoupling_rhs(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(decoupling_rhs(2.0) == doctest::Approx(0.5).epsilon(1e-12));
    double hmin = -static_cast<double>(u1_log2_kappa(6, 1, 1, 3));
    CHECK(decoupling_rhs(hmin) == doctest::Approx(0.417614288).epsilon(1e-7));
  }
}
