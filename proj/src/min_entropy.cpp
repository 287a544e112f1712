#include "covqec/min_entropy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "covqec/error_metrics.hpp"

namespace covqec {

namespace {

constexpr long long kSdpDimCap = 64;

int weight_of(long long x) { return std::popcount(static_cast<std::uint64_t>(x)); }

Mat hermitian_part(const Mat& m) { return 0.5 * (m + m.adjoint()); }

double max_eigenvalue(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double min_eigenvalue(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::vector<Mat> hermitian_basis(long long d) {
  std::vector<Mat> basis;
  basis.reserve(d * d);
  for (long long a = 0; a < d; ++a) {
    Mat b = Mat::Zero(d, d);
    b(a, a) = 1.0;
    basis.push_back(b);
  }
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (long long a = 0; a < d; ++a) {
    for (long long b = a + 1; b < d; ++b) {
      Mat re = Mat::Zero(d, d);
      re(a, b) = re(b, a) = inv_sqrt2;
      basis.push_back(re);
      Mat im = Mat::Zero(d, d);
      im(a, b) = cx(0.0, -inv_sqrt2);
      im(b, a) = cx(0.0, inv_sqrt2);
      basis.push_back(im);
    }
  }
  return basis;
}

bool cholesky_feasible(const Mat& s) {
  Eigen::LLT<Mat> llt(s);
  return llt.info() == Eigen::Success;
}

// Dual point from the barrier certificate: y = c * (I (x) sigma - Lam)^{-1}
// with eigenvalues of the slack clipped away from zero so y stays positive,
// then rescaled so Tr_P y <= I. Any such y is dual feasible, so Tr[Lam y]
// lower-bounds the optimum regardless of how the slack was produced.
double dual_value(const Mat& lam, const Mat& sigma, long long dp, long long dq, double c) {
  Mat s = kron(identity(dp), sigma) - lam;
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(s));
  double floor = 1e-15 * std::max(es.eigenvalues().maxCoeff(), 1e-30);
  Vec inv = es.eigenvalues().cwiseMax(floor).cwiseInverse() * c;
  Mat y = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
  Mat trp = partial_trace(y, {static_cast<int>(dp), static_cast<int>(dq)}, {1});
  double scale = max_eigenvalue(trp);
  if (scale > 1.0) y /= scale;
  return (lam * y).trace().real();
}

}  // namespace

void check_bipartite_state(const BipartiteState& state, double tol) {
  if (state.dim_p < 1 || state.dim_q < 1) {
    throw std::invalid_argument("BipartiteState: dimensions must be positive");
  }
  long long dim = state.dim_p * state.dim_q;
  if (state.rho.rows() != dim || state.rho.cols() != dim) {
    std::ostringstream msg;
    msg << "BipartiteState: operator is " << state.rho.rows() << "x" << state.rho.cols()
        << " but dim_p * dim_q = " << dim;
    throw std::invalid_argument(msg.str());
  }
  double herm = (state.rho - state.rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol) {
    std::ostringstream msg;
    msg << "BipartiteState: operator is not Hermitian (residual " << herm << ")";
    throw std::invalid_argument(msg.str());
  }
  double min_eig = min_eigenvalue(hermitian_part(state.rho));
  if (min_eig < -tol) {
    std::ostringstream msg;
    msg << "BipartiteState: operator is not positive (min eigenvalue " << min_eig << ")";
    throw std::invalid_argument(msg.str());
  }
  double trace = state.rho.trace().real();
  if (trace > 1.0 + 1e-10) {
    std::ostringstream msg;
    msg << "BipartiteState: trace " << trace << " exceeds 1";
    throw std::invalid_argument(msg.str());
  }
}

HminResult hmin_sdp(const BipartiteState& state) {
  check_bipartite_state(state);
  const long long dp = state.dim_p, dq = state.dim_q, dim = dp * dq;
  if (dim > kSdpDimCap) {
    std::ostringstream msg;
    msg << "hmin_sdp: dimension " << dim << " exceeds the solver cap " << kSdpDimCap;
    throw DimensionCapError(msg.str());
  }
  Mat lam = hermitian_part(state.rho);
  double lmax = max_eigenvalue(lam);
  if (lmax < 1e-300) {
    throw std::invalid_argument("hmin_sdp: operator is zero");
  }

  Mat sigma = (lmax + 1.0) * identity(dq);
  auto basis = hermitian_basis(dq);
  const int nb = static_cast<int>(basis.size());
  std::vector<Mat> lifted(nb);
  for (int a = 0; a < nb; ++a) lifted[a] = kron(identity(dp), basis[a]);

  double mu = std::max((lmax + 1.0) / dp, 1e-3);
  int iterations = 0;
  for (int stage = 0; stage < 200; ++stage) {
    for (int inner = 0; inner < 100; ++inner) {
      Mat s = kron(identity(dp), sigma) - lam;
      Eigen::LLT<Mat> llt(s);
      if (llt.info() != Eigen::Success) {
        throw std::runtime_error("hmin_sdp: interior iterate left the feasible cone");
      }
      std::vector<Mat> m(nb);
      Eigen::VectorXd grad(nb);
      for (int a = 0; a < nb; ++a) {
        m[a] = llt.solve(lifted[a]);
        grad(a) = basis[a].trace().real() - mu * m[a].trace().real();
      }
      Eigen::MatrixXd hess(nb, nb);
      for (int a = 0; a < nb; ++a) {
        for (int b = a; b < nb; ++b) {
          cx tr = (m[a].transpose().cwiseProduct(m[b])).sum();
          hess(a, b) = hess(b, a) = mu * tr.real();
        }
      }
      Eigen::VectorXd step = hess.ldlt().solve(grad);
      if (!step.allFinite()) {
        step = hess.completeOrthogonalDecomposition().solve(grad);
      }
      Mat dir = Mat::Zero(dq, dq);
      for (int a = 0; a < nb; ++a) dir += step(a) * basis[a];

      double ls = 1.0;
      bool moved = false;
      for (int bt = 0; bt < 60; ++bt) {
        Mat cand = sigma - ls * dir;
        if (cholesky_feasible(kron(identity(dp), cand) - lam)) {
          moved = true;
          break;
        }
        ls *= 0.5;
      }
      if (!moved) break;
      sigma -= ls * dir;
      ++iterations;
      double decrement = std::sqrt(std::max(grad.dot(step), 0.0));
      if (decrement < 1e-9 * std::max(1.0, mu)) break;
    }
    if (mu * dim < 1e-10) break;
    mu *= 0.2;
  }

  HminResult result;
  result.primal = sigma.trace().real();
  result.dual = dual_value(lam, sigma, dp, dq, mu);
  result.gap = result.primal - result.dual;
  result.hmin = -std::log2(result.primal);
  result.iterations = iterations;
  return result;
}

HminResult hmin_sdp_projection(const BipartiteState& state) {
  check_bipartite_state(state);
  const long long dp = state.dim_p, dq = state.dim_q, dim = dp * dq;
  if (dim > kSdpDimCap) {
    throw DimensionCapError("hmin_sdp_projection: dimension exceeds the solver cap");
  }
  Mat lam = hermitian_part(state.rho);
  double lmax = max_eigenvalue(lam);
  if (lmax < 1e-300) throw std::invalid_argument("hmin_sdp_projection: operator is zero");
  const std::vector<int> dims = {static_cast<int>(dp), static_cast<int>(dq)};
  const double feas_tol = 1e-8 * std::max(1.0, lmax);

  // Feasibility of {I (x) sigma >= lam, Tr sigma = tau} by alternating
  // projections between the PSD cone and the affine slack manifold. Every
  // iterate yields a certified feasible point sigma + |min eig| * I, so the
  // returned primal does not depend on how the probes are classified.
  Mat sigma_warm = (lmax + 1e-3) * identity(dq);
  double best_trace = dq * (lmax + 1e-3);
  Mat sigma_best = sigma_warm;
  auto probe = [&](double tau) -> bool {
    Mat sigma = sigma_warm;
    sigma += ((tau - sigma.trace().real()) / dq) * identity(dq);
    double prev_resid = -1e300;
    int stable = 0;
    for (int iter = 0; iter < 10000; ++iter) {
      Mat s = kron(identity(dp), sigma) - lam;
      Eigen::SelfAdjointEigenSolver<Mat> es(s);
      double resid = es.eigenvalues().minCoeff();
      double lift = std::max(0.0, -resid);
      double certified = sigma.trace().real() + lift * dq;
      if (certified < best_trace) {
        best_trace = certified;
        sigma_best = sigma + lift * identity(dq);
      }
      if (resid >= -feas_tol) {
        sigma_warm = sigma;
        return true;
      }
      if (std::abs(resid - prev_resid) < 1e-13 * std::max(1.0, std::abs(resid))) {
        if (++stable > 50) break;
      } else {
        stable = 0;
      }
      prev_resid = resid;
      Vec clipped = es.eigenvalues().cwiseMax(0.0);
      Mat plus = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
      sigma = partial_trace(plus + lam, dims, {1}) / static_cast<double>(dp);
      sigma = hermitian_part(sigma);
      sigma += ((tau - sigma.trace().real()) / dq) * identity(dq);
    }
    sigma_warm = sigma;  // a stalled iterate still sits near the optimal face
    return false;
  };

  double lo = std::max(lam.trace().real() / dp, 0.0);
  double hi = dq * lmax;
  while (hi - lo > 1e-8 * std::max(1.0, hi)) {
    double mid = 0.5 * (lo + hi);
    probe(mid);
    if (best_trace < hi) hi = std::max(best_trace, lo);
    if (mid < hi) lo = mid;
  }

  HminResult result;
  result.primal = best_trace;
  result.dual = dual_value(lam, sigma_best, dp, dq, 1e-9 * std::max(1.0, lmax));
  result.gap = result.primal - result.dual;
  result.hmin = -std::log2(result.primal);
  result.iterations = 0;
  return result;
}

double hmin_pure(const Vec& psi, long long dim_p, long long dim_q) {
  if (psi.size() != dim_p * dim_q) {
    throw std::invalid_argument("hmin_pure: vector size is not dim_p * dim_q");
  }
  Mat reshaped(dim_p, dim_q);
  for (long long p = 0; p < dim_p; ++p) {
    for (long long q = 0; q < dim_q; ++q) reshaped(p, q) = psi(p * dim_q + q);
  }
  Eigen::JacobiSVD<Mat> svd(reshaped);
  double sum = svd.singularValues().sum();
  if (sum < 1e-300) throw std::invalid_argument("hmin_pure: zero vector");
  return -2.0 * std::log2(sum);
}

HminBounds hmin_norm_bounds(const BipartiteState& state) {
  check_bipartite_state(state);
  double inf_norm = max_eigenvalue(hermitian_part(state.rho));
  if (inf_norm < 1e-300) throw std::invalid_argument("hmin_norm_bounds: operator is zero");
  HminBounds bounds;
  bounds.upper = -std::log2(inf_norm);
  bounds.lower = bounds.upper - std::log2(static_cast<double>(state.dim_q));
  return bounds;
}

BipartiteState direct_sum_blocks(const std::vector<BipartiteState>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("direct_sum_blocks: no blocks");
  long long dq = blocks.front().dim_q;
  long long dp_total = 0;
  for (const auto& blk : blocks) {
    if (blk.dim_q != dq) {
      throw std::invalid_argument("direct_sum_blocks: blocks must share the Q dimension");
    }
    dp_total += blk.dim_p;
  }
  BipartiteState out;
  out.dim_p = dp_total;
  out.dim_q = dq;
  ensure_dense_dim(dp_total * dq, "direct_sum_blocks");
  out.rho = Mat::Zero(dp_total * dq, dp_total * dq);
  long long offset = 0;
  for (const auto& blk : blocks) {
    for (long long p = 0; p < blk.dim_p; ++p) {
      for (long long pp = 0; pp < blk.dim_p; ++pp) {
        out.rho.block((offset + p) * dq, (offset + pp) * dq, dq, dq) =
            blk.rho.block(p * dq, pp * dq, dq, dq);
      }
    }
    offset += blk.dim_p;
  }
  return out;
}

BipartiteState restrict_to_support(const BipartiteState& state, double tol) {
  const long long dp = state.dim_p, dq = state.dim_q;
  Mat marginal = Mat::Zero(dp, dp);
  for (long long p = 0; p < dp; ++p) {
    for (long long pp = 0; pp < dp; ++pp) {
      cx acc = 0.0;
      for (long long q = 0; q < dq; ++q) acc += state.rho(p * dq + q, pp * dq + q);
      marginal(p, pp) = acc;
    }
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(marginal));
  double top = es.eigenvalues().maxCoeff();
  std::vector<long long> kept;
  for (long long idx = 0; idx < dp; ++idx) {
    if (es.eigenvalues()(idx) > tol * top) kept.push_back(idx);
  }
  long long m = static_cast<long long>(kept.size());
  Mat frame(dp, m);
  for (long long c = 0; c < m; ++c) frame.col(c) = es.eigenvectors().col(kept[c]);

  BipartiteState out;
  out.dim_p = m;
  out.dim_q = dq;
  out.rho = Mat::Zero(m * dq, m * dq);
  Mat lift = kron(frame, identity(dq));
  out.rho = lift.adjoint() * state.rho * lift;
  return out;
}

void check_ds_decomposition(const DsDecomposition& decomp) {
  long long sum = 0;
  for (const auto& blk : decomp.blocks) {
    if (blk.unitary_dim < 1 || blk.multiplicity_dim < 1) {
      throw std::invalid_argument("DsDecomposition: block dims must be positive");
    }
    if (blk.isometry.rows() != decomp.total_dim ||
        blk.isometry.cols() != blk.unitary_dim * blk.multiplicity_dim) {
      throw std::invalid_argument("DsDecomposition: isometry shape mismatch");
    }
    sum += blk.unitary_dim * blk.multiplicity_dim;
  }
  if (sum != decomp.total_dim) {
    std::ostringstream msg;
    msg << "DsDecomposition: block dims sum to " << sum << ", expected " << decomp.total_dim;
    throw std::invalid_argument(msg.str());
  }
}

DsDecomposition ds_from_schur(const SchurDecomposition& schur) {
  DsDecomposition out;
  out.total_dim = 1;
  for (int i = 0; i < schur.n; ++i) out.total_dim *= schur.d;
  for (const auto& blk : schur.blocks) {
    out.blocks.push_back({blk.isometry, blk.unitary_dim, blk.standard_dim});
  }
  check_ds_decomposition(out);
  return out;
}

DsDecomposition ds_u1_sectors(int n) {
  if (n < 1 || n > 20) throw std::invalid_argument("ds_u1_sectors: need 1 <= n <= 20");
  DsDecomposition out;
  out.total_dim = 1LL << n;
  for (int j = 0; j <= n; ++j) {
    std::vector<long long> strings;
    for (long long s = 0; s < (1LL << n); ++s) {
      if (weight_of(s) == j) strings.push_back(s);
    }
    DsBlock blk;
    blk.unitary_dim = 1;
    blk.multiplicity_dim = static_cast<long long>(strings.size());
    blk.isometry = Mat::Zero(out.total_dim, blk.multiplicity_dim);
    for (long long c = 0; c < blk.multiplicity_dim; ++c) blk.isometry(strings[c], c) = 1.0;
    out.blocks.push_back(std::move(blk));
  }
  check_ds_decomposition(out);
  return out;
}

Mat block_average(const Mat& rho, const DsDecomposition& decomp, long long ref_dim) {
  check_ds_decomposition(decomp);
  long long dim = decomp.total_dim * ref_dim;
  if (rho.rows() != dim || rho.cols() != dim) {
    throw std::invalid_argument("block_average: operator size is not total_dim * ref_dim");
  }
  Mat out = Mat::Zero(dim, dim);
  for (const auto& blk : decomp.blocks) {
    long long l = blk.unitary_dim, r = blk.multiplicity_dim;
    Mat lifted = kron(blk.isometry, identity(ref_dim));
    Mat inner = lifted.adjoint() * rho * lifted;  // on L (x) M (x) ref
    std::vector<int> dims = {static_cast<int>(l), static_cast<int>(r),
                             static_cast<int>(ref_dim)};
    Mat l_ref = partial_trace(inner, dims, {0, 2});
    Mat avg = kron(l_ref, identity(r)) / static_cast<double>(r);  // on (L, ref, M)
    avg = permute_subsystems(avg,
                             {static_cast<int>(l), static_cast<int>(ref_dim),
                              static_cast<int>(r)},
                             {0, 2, 1});
    out += lifted * avg * lifted.adjoint();
  }
  return out;
}

U1LambdaChoi u1_lambda_choi(long long n, int k, int t, long long alpha) {
  if (n < 1 || k < 0 || t < 0 || t > n || alpha < 0 || alpha + k > n) {
    throw std::invalid_argument("u1_lambda_choi: invalid (n, k, t, alpha)");
  }
  U1LambdaChoi lambda;
  lambda.n = n;
  lambda.k = k;
  lambda.t = t;
  lambda.alpha = alpha;
  for (long long i = std::max(0LL, alpha - t); i <= std::min<long long>(n - t, alpha + k);
       ++i) {
    U1LambdaChoi::Block block;
    block.kept_weight = static_cast<int>(i);
    for (long long l = 0; l < (1LL << k); ++l) {
      long long j = weight_of(l) + alpha;
      long long wv = j - i;
      if (wv < 0 || wv > t) continue;
      double amp = 1.0 / std::sqrt(std::ldexp(static_cast<double>(binomial_exact(n, j)), k));
      for (long long v = 0; v < (1LL << t); ++v) {
        if (weight_of(v) != wv) continue;
        block.amplitudes.emplace_back((v << k) | l, amp);
      }
    }
    if (!block.amplitudes.empty()) lambda.blocks.push_back(std::move(block));
  }
  return lambda;
}

namespace {

// Pair-register basis {(c, ab)} where c indexes the logical columns in play
// and ab runs over the physical strings of the matching weight.
struct PairBasis {
  std::vector<long long> offsets;                 // per column c
  std::vector<std::vector<long long>> ab_rank;    // per column: rank of ab or -1
  long long dim = 0;

  long long index(long long c, long long ab) const {
    long long rank = ab_rank[c][ab];
    if (rank < 0) throw std::logic_error("pair basis: string outside the support");
    return offsets[c] + rank;
  }
};

PairBasis make_pair_basis(long long n, const std::vector<long long>& column_weights) {
  PairBasis basis;
  for (long long j : column_weights) {
    basis.offsets.push_back(basis.dim);
    std::vector<long long> rank(1LL << n, -1);
    long long count = 0;
    for (long long ab = 0; ab < (1LL << n); ++ab) {
      if (weight_of(ab) == j) rank[ab] = count++;
    }
    basis.ab_rank.push_back(std::move(rank));
    basis.dim += count;
  }
  return basis;
}

}  // namespace

BipartiteState u1_lambda_dense(const U1LambdaChoi& lambda) {
  const long long n = lambda.n;
  const int k = lambda.k, t = lambda.t;
  std::vector<long long> weights;
  for (long long x = 0; x < (1LL << k); ++x) weights.push_back(weight_of(x) + lambda.alpha);
  PairBasis basis = make_pair_basis(n, weights);
  const long long dq = 1LL << (t + k);
  ensure_dense_dim(basis.dim * dq, "u1_lambda_dense");

  BipartiteState out;
  out.dim_p = basis.dim;
  out.dim_q = dq;
  out.rho = Mat::Zero(basis.dim * dq, basis.dim * dq);
  const long long logical_mask = (1LL << k) - 1;
  for (const auto& block : lambda.blocks) {
    for (long long ab2 = 0; ab2 < (1LL << (n - t)); ++ab2) {
      if (weight_of(ab2) != block.kept_weight) continue;
      Vec vec = Vec::Zero(basis.dim * dq);
      for (const auto& [component, amp] : block.amplitudes) {
        long long v = component >> k;
        long long l = component & logical_mask;
        long long ab = (v << (n - t)) | ab2;
        vec(basis.index(l, ab) * dq + component) = amp;
      }
      out.rho += vec * vec.adjoint();
    }
  }
  return out;
}

BipartiteState u1_lambda_first_principles(long long n, int k, int t, long long alpha) {
  if (n < 1 || k < 0 || t < 0 || t > n || alpha < 0 || alpha + k > n) {
    throw std::invalid_argument("u1_lambda_first_principles: invalid (n, k, t, alpha)");
  }
  std::vector<long long> weights;
  for (long long x = 0; x < (1LL << k); ++x) weights.push_back(weight_of(x) + alpha);
  PairBasis basis = make_pair_basis(n, weights);
  const long long dq = 1LL << (t + k);
  ensure_dense_dim(basis.dim * dq, "u1_lambda_first_principles");

  BipartiteState out;
  out.dim_p = basis.dim;
  out.dim_q = dq;
  out.rho = Mat::Zero(basis.dim * dq, basis.dim * dq);
  const double norm = std::ldexp(1.0, -(k + t)) * std::ldexp(1.0, static_cast<int>(n));
  for (long long m = 0; m < (1LL << (n - t)); ++m) {
    Vec vec = Vec::Zero(basis.dim * dq);
    for (long long x = 0; x < (1LL << k); ++x) {
      long long j = weight_of(x) + alpha;
      for (long long e = 0; e < (1LL << t); ++e) {
        if (weight_of(e) + weight_of(m) != j) continue;
        long long ab = (e << (n - t)) | m;
        double coef = std::sqrt(norm / static_cast<double>(binomial_exact(n, j)));
        vec(basis.index(x, ab) * dq + ((e << k) | x)) = coef;
      }
    }
    out.rho += vec * vec.adjoint() * std::ldexp(1.0, -static_cast<int>(n - t));
  }
  return out;
}

BipartiteState u1_lambda_compressed(const U1LambdaChoi& lambda) {
  const long long dq = 1LL << (lambda.t + lambda.k);
  std::vector<BipartiteState> blocks;
  for (const auto& block : lambda.blocks) {
    Vec vec = Vec::Zero(dq * dq);
    for (const auto& [component, amp] : block.amplitudes) {
      vec(component * dq + component) = amp;
    }
    blocks.push_back({Mat(vec * vec.adjoint()), dq, dq});
  }
  return restrict_to_support(direct_sum_blocks(blocks));
}

long double u1_log2_kappa(long long n, int k, int t, long long alpha) {
  if (n < 1 || k < 0 || t < 0 || t > n || alpha < 0 || alpha + k > n) {
    throw std::invalid_argument("u1_log2_kappa: invalid (n, k, t, alpha)");
  }
  std::vector<long double> block_logs;
  for (long long i = std::max(0LL, alpha - t); i <= std::min<long long>(n - t, alpha + k);
       ++i) {
    std::vector<long double> term_logs;
    for (long long j = alpha; j <= alpha + k; ++j) {
      if (j - i < 0 || j - i > t) continue;
      long double lg = static_cast<long double>(log2_binomial(t, j - i)) +
                       static_cast<long double>(log2_binomial(k, j - alpha)) -
                       0.5L * (static_cast<long double>(k) +
                               static_cast<long double>(log2_binomial(n, j)));
      term_logs.push_back(lg);
    }
    if (term_logs.empty()) continue;
    long double top = *std::max_element(term_logs.begin(), term_logs.end());
    long double sum = 0.0L;
    for (long double lg : term_logs) sum += std::exp2(lg - top);
    block_logs.push_back(2.0L * (top + std::log2(sum)));
  }
  if (block_logs.empty()) throw std::logic_error("u1_log2_kappa: empty block set");
  long double top = *std::max_element(block_logs.begin(), block_logs.end());
  long double sum = 0.0L;
  for (long double lg : block_logs) sum += std::exp2(lg - top);
  return top + std::log2(sum);
}

long double u1_kappa(long long n, int k, int t, long long alpha) {
  return std::exp2(u1_log2_kappa(n, k, t, alpha));
}

HminBounds u1_kappa_bounds(long long n, int k, int t, long long alpha) {
  double neg_log = static_cast<double>(-u1_log2_kappa(n, k, t, alpha));
  return {neg_log, neg_log + std::log2(static_cast<double>(k + t + 1))};
}

U1LambdaWorst u1_lambda_worst(long long n, int k, int t, long long alpha, long long x,
                              long long xprime) {
  if (n < 1 || k < 1 || t < 1 || t > n || alpha < 0 || alpha + k > n) {
    throw std::invalid_argument("u1_lambda_worst: invalid (n, k, t, alpha)");
  }
  if (x < 0 || x >= (1LL << k)) {
    throw std::invalid_argument("u1_lambda_worst: logical string out of range");
  }
  if (xprime >= (1LL << k) || xprime == x) {
    throw std::invalid_argument("u1_lambda_worst: xprime must be distinct or -1");
  }
  return {n, k, t, alpha, x, xprime < 0 ? -1 : xprime};
}

BipartiteState u1_lambda_worst_dense(const U1LambdaWorst& lambda) {
  const long long n = lambda.n;
  const int t = lambda.t;
  std::vector<long long> components = {lambda.x};
  if (lambda.xprime >= 0) components.push_back(lambda.xprime);
  std::vector<long long> weights;
  for (long long x : components) weights.push_back(weight_of(x) + lambda.alpha);
  PairBasis basis = make_pair_basis(n, weights);
  const long long dq = 1LL << t;
  ensure_dense_dim(basis.dim * dq, "u1_lambda_worst_dense");

  BipartiteState out;
  out.dim_p = basis.dim;
  out.dim_q = dq;
  out.rho = Mat::Zero(basis.dim * dq, basis.dim * dq);
  const double comp_scale = components.size() == 2 ? 0.5 : 1.0;
  for (long long m = 0; m < (1LL << (n - t)); ++m) {
    Vec vec = Vec::Zero(basis.dim * dq);
    for (std::size_t c = 0; c < components.size(); ++c) {
      long long j = weights[c];
      for (long long e = 0; e < (1LL << t); ++e) {
        if (weight_of(e) + weight_of(m) != j) continue;
        long long ab = (e << (n - t)) | m;
        double coef = std::sqrt(comp_scale * std::ldexp(1.0, static_cast<int>(n) - t) /
                                static_cast<double>(binomial_exact(n, j)));
        vec(basis.index(static_cast<long long>(c), ab) * dq + e) = coef;
      }
    }
    out.rho += vec * vec.adjoint() * std::ldexp(1.0, -static_cast<int>(n - t));
  }
  return out;
}

double u1_worst_sigma_trace(long long n, int t, long long j) {
  if (j < 0 || j > n || t < 0 || t > n) {
    throw std::invalid_argument("u1_worst_sigma_trace: invalid (n, t, j)");
  }
  long double sum = 0.0L;
  for (int i = 0; i <= t; ++i) {
    if (i > j || j - i > n - t) continue;
    long double term = static_cast<long double>(binomial_exact(t, i));
    sum += term * term / static_cast<long double>(binomial_exact(n, j));
  }
  return static_cast<double>(sum);
}

HminBounds u1_worst_bounds(long long n, int t, long long j) {
  double s = u1_worst_sigma_trace(n, t, j);
  if (s <= 0.0) throw std::invalid_argument("u1_worst_bounds: empty weight range");
  double lower = -std::log2(s);
  return {lower, lower + std::log2(static_cast<double>(t + 1))};
}

double u1_chi_superposition(long long n, int t, long long ja, long long jb) {
  if (ja < 0 || ja > n || jb < 0 || jb > n || t < 0 || t > n) {
    throw std::invalid_argument("u1_chi_superposition: invalid weights");
  }
  long double ca = std::sqrt(static_cast<long double>(binomial_exact(n, ja)));
  long double cb = std::sqrt(static_cast<long double>(binomial_exact(n, jb)));
  long double chi = 0.0L;
  for (long long i = std::min(ja, jb) - t; i <= std::max(ja, jb); ++i) {
    if (i < 0 || i > n - t) continue;
    long double term = 0.0L;
    if (ja - i >= 0 && ja - i <= t) {
      term += static_cast<long double>(binomial_exact(t, ja - i)) / ca;
    }
    if (jb - i >= 0 && jb - i <= t) {
      term += static_cast<long double>(binomial_exact(t, jb - i)) / cb;
    }
    chi += term * term;
  }
  return static_cast<double>(chi);
}

double hmin_general_lower_bound(const std::vector<SectorDims>& sectors,
                                const std::vector<int>& support, int t, int k, int d) {
  if (support.empty()) throw std::invalid_argument("hmin_general_lower_bound: empty support");
  double worst = -1e300;
  for (int j : support) {
    if (j < 0 || j >= static_cast<int>(sectors.size())) {
      throw std::invalid_argument("hmin_general_lower_bound: sector index out of range");
    }
    worst = std::max(worst, sectors[j].log2_unitary - sectors[j].log2_multiplicity);
  }
  return -(2.0 * t + k) * std::log2(static_cast<double>(d)) - worst;
}

double hmin_u1_lower_bound(long long n, int k, int t, long long alpha) {
  if (alpha < 0 || alpha + k > n) {
    throw std::invalid_argument("hmin_u1_lower_bound: invalid (n, k, alpha)");
  }
  double min_log = 1e300;
  for (long long j = alpha; j <= alpha + k; ++j) {
    min_log = std::min(min_log, log2_binomial(n, j));
  }
  return min_log - (2.0 * t + k);
}

double hmin_u1_entropy_lower_bound(long long n, int k, int t, long long alpha) {
  if (alpha < 0 || alpha + k > n) {
    throw std::invalid_argument("hmin_u1_entropy_lower_bound: invalid (n, k, alpha)");
  }
  double h_low = binary_entropy(static_cast<double>(alpha) / n);
  double h_high = binary_entropy(static_cast<double>(alpha + k) / n);
  return n * std::min(h_low, h_high) - (2.0 * t + k) - std::log2(static_cast<double>(n + 1));
}

double hmin_sud_lower_bound(const Partition& lambda, int d, int t) {
  check_partition(lambda);
  if (d < 1 || static_cast<int>(lambda.size()) > d) {
    throw std::invalid_argument("hmin_sud_lower_bound: shape needs more than d rows");
  }
  if (t < 0) throw std::invalid_argument("hmin_sud_lower_bound: t must be >= 0");
  int m = partition_weight(lambda);
  double worst = -1e300;
  bool found = false;
  for (const Partition& grown : partitions(m + t, d)) {
    bool contains = true;
    for (std::size_t row = 0; row < lambda.size(); ++row) {
      int grown_row = row < grown.size() ? grown[row] : 0;
      if (grown_row < lambda[row]) {
        contains = false;
        break;
      }
    }
    if (!contains) continue;
    found = true;
    double ratio = log2_semistandard_count(grown, d) - log2_standard_count(grown);
    worst = std::max(worst, ratio);
  }
  if (!found) throw std::logic_error("hmin_sud_lower_bound: no compatible grown shape");
  return -2.0 * t * std::log2(static_cast<double>(d)) - worst;
}

double decoupling_rhs(double hmin) { return std::exp2(-0.5 * hmin); }

}  // namespace covqec
