#include "covqec/error_metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

namespace covqec {

namespace {

long long ipow_ll(int base, int exp) {
  long long v = 1;
  for (int i = 0; i < exp; ++i) v *= base;
  return v;
}

int weight_of(long long x) { return std::popcount(static_cast<std::uint64_t>(x)); }

// Bit-level row permutation sending erased sites to the leading factors (in
// ascending order) and the kept sites after them.
std::vector<long long> erased_front_map(int n, const std::vector<int>& erased) {
  std::vector<int> position(n, -1);
  int next = 0;
  for (int site : erased) position[site] = next++;
  for (int q = 0; q < n; ++q) {
    if (position[q] < 0) position[q] = next++;
  }
  std::vector<long long> map(1LL << n);
  for (long long a = 0; a < (1LL << n); ++a) {
    long long out = 0;
    for (int q = 0; q < n; ++q) {
      if ((a >> (n - 1 - q)) & 1LL) out |= 1LL << (n - 1 - position[q]);
    }
    map[a] = out;
  }
  return map;
}

Mat contract_environment(const Mat& columns, double scale, int t, int n, long long ncols) {
  long long env_dim = 1LL << t;
  long long rest_dim = 1LL << (n - t);
  Mat out = Mat::Zero(env_dim * ncols, env_dim * ncols);
  for (long long e = 0; e < env_dim; ++e) {
    for (long long ep = 0; ep < env_dim; ++ep) {
      for (long long x = 0; x < ncols; ++x) {
        for (long long xp = 0; xp < ncols; ++xp) {
          cx acc = 0.0;
          for (long long rest = 0; rest < rest_dim; ++rest) {
            acc += columns(e * rest_dim + rest, x) * std::conj(columns(ep * rest_dim + rest, xp));
          }
          out(e * ncols + x, ep * ncols + xp) = acc * scale;
        }
      }
    }
  }
  return out;
}

Mat zeta_for_u1(ZetaStrategy strategy, const Mat& out, const U1CodeSpec& spec, int t) {
  switch (strategy) {
    case ZetaStrategy::marginal:
      return u1_zeta_marginal(spec.n, spec.k, t, spec.alpha);
    case ZetaStrategy::maximally_mixed:
      return maximally_mixed(1LL << t);
    case ZetaStrategy::iterative:
      return iterative_zeta(out, 1LL << t, 1LL << spec.k);
  }
  throw std::logic_error("zeta_for_u1: unknown strategy");
}

}  // namespace

void check_erasure_pattern(const ErasurePattern& pattern) {
  if (pattern.n < 1) throw std::invalid_argument("ErasurePattern: n must be >= 1");
  for (std::size_t i = 0; i < pattern.erased.size(); ++i) {
    if (pattern.erased[i] < 0 || pattern.erased[i] >= pattern.n) {
      throw std::invalid_argument("ErasurePattern: site index out of range");
    }
    if (i > 0 && pattern.erased[i] <= pattern.erased[i - 1]) {
      throw std::invalid_argument("ErasurePattern: site indices must be strictly increasing");
    }
  }
  if (static_cast<int>(pattern.erased.size()) >= pattern.n) {
    throw std::invalid_argument("ErasurePattern: must keep at least one site");
  }
}

ErasurePattern first_sites(int n, int t) {
  ErasurePattern pattern;
  pattern.n = n;
  for (int i = 0; i < t; ++i) pattern.erased.push_back(i);
  check_erasure_pattern(pattern);
  return pattern;
}

long long binomial_exact(long long n, long long k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  __int128 result = 1;
  for (long long i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > static_cast<__int128>(9'223'372'036'854'775'807LL)) {
      throw DimensionCapError("binomial_exact: value exceeds 64-bit range");
    }
  }
  return static_cast<long long>(result);
}

long double u1_ratio(long long n, int t, long long a, int i) {
  if (n < 1 || t < 0 || t > n) throw std::invalid_argument("u1_ratio: need 0 <= t <= n, n >= 1");
  if (a < 0 || a > n) throw std::invalid_argument("u1_ratio: weight outside [0, n]");
  if (i < 0 || i > t) return 0.0L;
  if (a - i < 0 || a - i > n - t) return 0.0L;
  long double num = 1.0L;
  for (int m = 0; m < i; ++m) num *= static_cast<long double>(a - m);
  for (int m = 0; m < t - i; ++m) num *= static_cast<long double>(n - a - m);
  long double den = 1.0L;
  for (int m = 0; m < t; ++m) den *= static_cast<long double>(n - m);
  return num / den;
}

long double u1_beta(long long n, int k, int t, long long alpha, int i) {
  if (k < 0) throw std::invalid_argument("u1_beta: k must be >= 0");
  if (alpha < 0 || alpha + k > n) {
    throw std::invalid_argument("u1_beta: need 0 <= alpha and alpha + k <= n");
  }
  long double sum = 0.0L;
  for (int j = 0; j <= k; ++j) {
    sum += static_cast<long double>(binomial_exact(k, j)) * u1_ratio(n, t, j + alpha, i);
  }
  return std::ldexp(sum, -k);
}

SymmetryTermResult u1_choi_symmetry_term(long long n, int k, int t, long long alpha) {
  SymmetryTermResult result;
  result.n = n;
  result.k = k;
  result.t = t;
  result.alpha = alpha;
  std::vector<long double> beta(t + 1), sqrt_beta(t + 1);
  for (int i = 0; i <= t; ++i) {
    beta[i] = u1_beta(n, k, t, alpha, i);
    sqrt_beta[i] = std::sqrt(beta[i]);
  }
  // 1 - F = 2^{-k} sum_{j,i} C(k,j) C(t,i) (sqrt(beta_i) - sqrt(ratio_{ji}))^2 / 2,
  // exact because both distributions are normalized; no cancellation at large n.
  long double one_minus_f = 0.0L;
  long double tdist = 0.0L;
  for (int j = 0; j <= k; ++j) {
    long double cj = static_cast<long double>(binomial_exact(k, j));
    for (int i = 0; i <= t; ++i) {
      long double ci = static_cast<long double>(binomial_exact(t, i));
      long double ratio = u1_ratio(n, t, j + alpha, i);
      long double diff = sqrt_beta[i] - std::sqrt(ratio);
      one_minus_f += cj * ci * diff * diff * 0.5L;
      tdist += cj * ci * std::fabs(ratio - beta[i]) * 0.5L;
    }
  }
  one_minus_f = std::ldexp(one_minus_f, -k);
  tdist = std::ldexp(tdist, -k);
  result.fidelity = static_cast<double>(1.0L - one_minus_f);
  result.purified = static_cast<double>(std::sqrt(one_minus_f * (2.0L - one_minus_f)));
  result.trace_dist = static_cast<double>(tdist);
  return result;
}

double u1_worst_symmetry_term(long long n, int k, int t, long long alpha) {
  std::vector<long double> sqrt_beta(t + 1);
  for (int i = 0; i <= t; ++i) sqrt_beta[i] = std::sqrt(u1_beta(n, k, t, alpha, i));
  long double worst = 0.0L;
  for (int w = 0; w <= k; ++w) {
    long double one_minus_f = 0.0L;
    for (int i = 0; i <= t; ++i) {
      long double ci = static_cast<long double>(binomial_exact(t, i));
      long double diff = sqrt_beta[i] - std::sqrt(u1_ratio(n, t, w + alpha, i));
      one_minus_f += ci * diff * diff * 0.5L;
    }
    worst = std::max(worst, std::sqrt(one_minus_f * (2.0L - one_minus_f)));
  }
  return static_cast<double>(worst);
}

Mat u1_average_complementary(long long n, int k, int t, long long alpha) {
  long long dim = 1LL << (t + k);
  ensure_dense_dim(dim, "u1_average_complementary");
  Mat avg = Mat::Zero(dim, dim);
  for (long long e = 0; e < (1LL << t); ++e) {
    for (long long x = 0; x < (1LL << k); ++x) {
      long double value =
          std::ldexp(u1_ratio(n, t, weight_of(x) + alpha, weight_of(e)), -k);
      avg(e * (1LL << k) + x, e * (1LL << k) + x) = static_cast<double>(value);
    }
  }
  return avg;
}

Mat u1_zeta_marginal(long long n, int k, int t, long long alpha) {
  long long dim = 1LL << t;
  ensure_dense_dim(dim, "u1_zeta_marginal");
  Mat zeta = Mat::Zero(dim, dim);
  for (long long e = 0; e < dim; ++e) {
    zeta(e, e) = static_cast<double>(u1_beta(n, k, t, alpha, weight_of(e)));
  }
  return zeta;
}

Mat u1_complementary_choi(const U1CodeSpec& spec, const CommutantUnitary& unitary,
                          const ErasurePattern& pattern) {
  check_u1_spec(spec);
  check_erasure_pattern(pattern);
  if (pattern.n != spec.n) {
    throw std::invalid_argument("u1_complementary_choi: pattern is for a different n");
  }
  Mat iso = u1_encoding_isometry(spec, unitary);
  auto map = erased_front_map(spec.n, pattern.erased);
  Mat permuted(iso.rows(), iso.cols());
  for (Eigen::Index r = 0; r < iso.rows(); ++r) permuted.row(map[r]) = iso.row(r);
  return contract_environment(permuted, std::ldexp(1.0, -spec.k), pattern.t(), spec.n,
                              1LL << spec.k);
}

Mat u1_complementary_basis(const U1CodeSpec& spec, const CommutantUnitary& unitary,
                           const ErasurePattern& pattern, long long x) {
  check_u1_spec(spec);
  check_erasure_pattern(pattern);
  if (x < 0 || x >= (1LL << spec.k)) {
    throw std::invalid_argument("u1_complementary_basis: logical index out of range");
  }
  Mat iso = u1_encoding_isometry(spec, unitary);
  auto map = erased_front_map(spec.n, pattern.erased);
  Mat column(iso.rows(), 1);
  for (Eigen::Index r = 0; r < iso.rows(); ++r) column(map[r], 0) = iso(r, x);
  return contract_environment(column, 1.0, pattern.t(), spec.n, 1);
}

Mat iterative_zeta(const Mat& out, long long env_dim, long long ref_dim) {
  if (out.rows() != env_dim * ref_dim) {
    throw std::invalid_argument("iterative_zeta: state size is not env_dim * ref_dim");
  }
  std::vector<int> dims = {static_cast<int>(env_dim), static_cast<int>(ref_dim)};
  Mat zeta = partial_trace(out, dims, {0});
  zeta /= zeta.trace().real();
  Mat ref_part = maximally_mixed(ref_dim);
  for (int iter = 0; iter < 200; ++iter) {
    Mat target_sqrt = matrix_sqrt_psd(kron(zeta, ref_part));
    Mat inner = matrix_sqrt_psd(target_sqrt * out * target_sqrt);
    Mat next = partial_trace(inner, dims, {0});
    next /= next.trace().real();
    double delta = trace_norm(next - zeta);
    zeta = next;
    if (delta <= 1e-9) break;
  }
  return zeta;
}

ErrorReport sampled_code_errors_u1(const U1CodeSpec& spec, const CommutantUnitary& unitary,
                                   const ErasurePattern& pattern, ZetaStrategy strategy) {
  int t = pattern.t();
  Mat out = u1_complementary_choi(spec, unitary, pattern);
  Mat avg = u1_average_complementary(spec.n, spec.k, t, spec.alpha);
  Mat zeta = zeta_for_u1(strategy, out, spec, t);
  Mat target = kron(zeta, maximally_mixed(1LL << spec.k));

  ErrorReport report;
  report.seed = spec.seed;
  report.eps_choi_upper = purified_distance(out, target);
  report.decoupling_term = purified_distance(out, avg);
  report.symmetry_term = purified_distance(avg, target);
  double worst = 0.0;
  for (long long x = 0; x < (1LL << spec.k); ++x) {
    Mat basis_out = u1_complementary_basis(spec, unitary, pattern, x);
    worst = std::max(worst, purified_distance(basis_out, zeta));
  }
  report.eps_worst_upper = worst;
  return report;
}

Mat sud_average_env(long long n, int d) {
  if (n < 2 || d < 2) throw std::invalid_argument("sud_average_env: need n >= 2, d >= 2");
  long long dim = static_cast<long long>(d) * d;
  Vec pair = Vec::Zero(dim);
  for (int i = 0; i < d; ++i) pair(static_cast<long long>(i) * d + i) = 1.0 / std::sqrt(d);
  double inv_n = 1.0 / static_cast<double>(n);
  return inv_n * (pair * pair.adjoint()) + (1.0 - inv_n) * maximally_mixed(dim);
}

double sud_average_env_error(long long n, int d) {
  long long dim = static_cast<long long>(d) * d;
  return purified_distance(sud_average_env(n, d), maximally_mixed(dim));
}

Mat sud_complementary_choi(const SUdCodeSpec& spec, const CommutantUnitary& unitary,
                           const SchurDecomposition& schur_n_minus_1,
                           const ErasurePattern& pattern) {
  check_erasure_pattern(pattern);
  if (pattern.n != spec.n) {
    throw std::invalid_argument("sud_complementary_choi: pattern is for a different n");
  }
  Mat choi = sud_choi_state(spec, unitary, schur_n_minus_1);
  std::vector<int> dims(spec.n + 1, spec.d);
  std::vector<int> keep = pattern.erased;
  keep.push_back(spec.n);  // the logical reference rides along
  return partial_trace(choi, dims, keep);
}

Mat sud_complementary_pure(const SUdCodeSpec& spec, const CommutantUnitary& unitary,
                           const SchurDecomposition& schur_n_minus_1,
                           const ErasurePattern& pattern, const Vec& psi) {
  check_erasure_pattern(pattern);
  if (psi.size() != spec.d) {
    throw std::invalid_argument("sud_complementary_pure: input must live on C^d");
  }
  Mat rho = psi * psi.adjoint();
  Mat encoded = encode_sud(spec, unitary, schur_n_minus_1, rho);
  std::vector<int> dims(spec.n, spec.d);
  return partial_trace(encoded, dims, pattern.erased);
}

namespace {

// Channel tensor of the environment map for one sampled qudit code:
// slot (i, j) holds the environment output of the operator |i><j|.
std::vector<std::vector<Mat>> sud_environment_tensor(const SUdCodeSpec& spec,
                                                     const CommutantUnitary& unitary,
                                                     const SchurDecomposition& schur_n_minus_1,
                                                     const ErasurePattern& pattern) {
  Mat gauge = sud_gauge_state(spec, schur_n_minus_1);
  std::vector<int> dims(spec.n, spec.d);
  std::vector<std::vector<Mat>> tensor(spec.d, std::vector<Mat>(spec.d));
  for (int i = 0; i < spec.d; ++i) {
    for (int j = 0; j < spec.d; ++j) {
      Mat unit = Mat::Zero(spec.d, spec.d);
      unit(i, j) = 1.0;
      Mat lifted = unitary.assembled * kron(unit, gauge) * unitary.assembled.adjoint();
      tensor[i][j] = partial_trace(lifted, dims, pattern.erased);
    }
  }
  return tensor;
}

double sud_pure_input_eps(const std::vector<std::vector<Mat>>& tensor, const Vec& psi,
                          const Mat& zeta) {
  int d = static_cast<int>(psi.size());
  Mat out = Mat::Zero(zeta.rows(), zeta.cols());
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      out += psi(i) * std::conj(psi(j)) * tensor[i][j];
    }
  }
  return purified_distance(out, zeta);
}

Vec normalize_state(Vec v) {
  double nrm = v.norm();
  if (nrm < 1e-300) throw std::runtime_error("ascent produced a null state");
  return v / nrm;
}

}  // namespace

ErrorReport sampled_code_errors_sud(const SUdCodeSpec& spec, const CommutantUnitary& unitary,
                                    const SchurDecomposition& schur_n_minus_1,
                                    const ErasurePattern& pattern, ZetaStrategy strategy) {
  int t = pattern.t();
  long long env_dim = ipow_ll(spec.d, t);
  Mat out = sud_complementary_choi(spec, unitary, schur_n_minus_1, pattern);

  Mat avg;
  if (t == 1) {
    avg = sud_average_env(spec.n, spec.d);
  } else {
    // No closed form kept for multi-site loss: average the pre-rotation state
    // over the commutant directly (small n only).
    SchurDecomposition schur_n = schur_decomposition(spec.n, spec.d);
    Vec pair = Vec::Zero(static_cast<long long>(spec.d) * spec.d);
    for (int i = 0; i < spec.d; ++i) {
      pair(static_cast<long long>(i) * spec.d + i) = 1.0 / std::sqrt(spec.d);
    }
    long long rest_dim = ipow_ll(spec.d, spec.n - 1);
    Mat pre = kron(Mat(pair * pair.adjoint()), sud_gauge_state(spec, schur_n_minus_1));
    pre = permute_subsystems(pre, {spec.d, spec.d, static_cast<int>(rest_dim)}, {0, 2, 1});
    Mat averaged = permutation_average(pre, schur_n, spec.d);
    std::vector<int> dims(spec.n + 1, spec.d);
    std::vector<int> keep = pattern.erased;
    keep.push_back(spec.n);
    avg = partial_trace(averaged, dims, keep);
  }

  Mat zeta;
  switch (strategy) {
    case ZetaStrategy::marginal: {
      std::vector<int> dims = {static_cast<int>(env_dim), spec.d};
      zeta = partial_trace(avg, dims, {0});
      break;
    }
    case ZetaStrategy::maximally_mixed:
      zeta = maximally_mixed(env_dim);
      break;
    case ZetaStrategy::iterative:
      zeta = iterative_zeta(out, env_dim, spec.d);
      break;
  }
  Mat target = kron(zeta, maximally_mixed(spec.d));

  ErrorReport report;
  report.seed = spec.seed;
  report.eps_choi_upper = purified_distance(out, target);
  report.decoupling_term = purified_distance(out, avg);
  report.symmetry_term = purified_distance(avg, target);

  // Worst pure input by projected ascent with deterministic restarts.
  auto tensor = sud_environment_tensor(spec, unitary, schur_n_minus_1, pattern);
  Rng rng(sub_seed(spec.seed, 0xA5CE17ULL));
  double best = 0.0;
  for (int start = 0; start < 16; ++start) {
    Vec psi = random_state_vector(spec.d, rng);
    double eps = sud_pure_input_eps(tensor, psi, zeta);
    double step = 0.3;
    for (int iter = 0; iter < 80 && step > 1e-7; ++iter) {
      // Numerical gradient over the real embedding of psi.
      Vec grad = Vec::Zero(spec.d);
      const double h = 1e-6;
      for (int c = 0; c < spec.d; ++c) {
        for (int part = 0; part < 2; ++part) {
          cx delta = (part == 0) ? cx(h, 0.0) : cx(0.0, h);
          Vec plus = normalize_state(psi + delta * basis_vector(spec.d, c));
          Vec minus = normalize_state(psi - delta * basis_vector(spec.d, c));
          double slope =
              (sud_pure_input_eps(tensor, plus, zeta) - sud_pure_input_eps(tensor, minus, zeta)) /
              (2.0 * h);
          grad(c) += (part == 0) ? cx(slope, 0.0) : cx(0.0, slope);
        }
      }
      Vec candidate = normalize_state(psi + step * grad);
      double cand_eps = sud_pure_input_eps(tensor, candidate, zeta);
      if (cand_eps > eps) {
        psi = candidate;
        eps = cand_eps;
      } else {
        step *= 0.5;
      }
    }
    best = std::max(best, eps);
  }
  report.eps_worst_upper = best;
  return report;
}

double sud_worst_input_error(const std::vector<double>& spectrum, long long n) {
  int d = static_cast<int>(spectrum.size());
  if (d < 2) throw std::invalid_argument("sud_worst_input_error: need at least two levels");
  if (n < 2) throw std::invalid_argument("sud_worst_input_error: need n >= 2");
  double sum = 0.0;
  for (double p : spectrum) {
    if (p < -1e-12) throw std::invalid_argument("sud_worst_input_error: negative weight");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("sud_worst_input_error: spectrum must sum to 1");
  }
  long long dim = static_cast<long long>(d) * d;
  Vec psi = Vec::Zero(dim);
  for (int i = 0; i < d; ++i) {
    psi(static_cast<long long>(i) * d + i) = std::sqrt(std::max(0.0, spectrum[i]));
  }
  Mat ref_marginal = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) ref_marginal(i, i) = std::max(0.0, spectrum[i]);
  double inv_n = 1.0 / static_cast<double>(n);
  Mat state = inv_n * (psi * psi.adjoint()) + (1.0 - inv_n) * kron(maximally_mixed(d), ref_marginal);
  Mat target = kron(maximally_mixed(d), ref_marginal);
  return purified_distance(state, target);
}

WorstInputResult sud_worst_input_search(int d, long long n, int starts, std::uint64_t seed) {
  if (d < 2) throw std::invalid_argument("sud_worst_input_search: need d >= 2");
  Rng rng(seed);
  WorstInputResult best;
  best.eps = -1.0;
  for (int s = 0; s < starts; ++s) {
    // Start 0 is the simplex barycenter; the landscape is nearly flat around
    // its maximum, so a principled start matters more than restart count.
    std::vector<double> p(d, 1.0 / d);
    if (s > 0) {
      double total = 0.0;
      for (int i = 0; i < d; ++i) {
        p[i] = -std::log(1.0 - rng.uniform());
        total += p[i];
      }
      for (int i = 0; i < d; ++i) p[i] /= total;
    }
    double eps = sud_worst_input_error(p, n);
    double step = 0.1;
    for (int iter = 0; iter < 300 && step > 1e-10; ++iter) {
      std::vector<double> grad(d, 0.0);
      const double h = 1e-7;
      for (int i = 0; i < d; ++i) {
        std::vector<double> plus = p, minus = p;
        plus[i] += h;
        minus[i] = std::max(0.0, minus[i] - h);
        double scale_p = std::accumulate(plus.begin(), plus.end(), 0.0);
        double scale_m = std::accumulate(minus.begin(), minus.end(), 0.0);
        for (double& v : plus) v /= scale_p;
        for (double& v : minus) v /= scale_m;
        grad[i] = (sud_worst_input_error(plus, n) - sud_worst_input_error(minus, n)) /
                  (scale_p - 1.0 + 1.0 - scale_m + 1e-300);
      }
      double mean_grad = std::accumulate(grad.begin(), grad.end(), 0.0) / d;
      std::vector<double> candidate(d);
      double total_c = 0.0;
      for (int i = 0; i < d; ++i) {
        candidate[i] = std::max(0.0, p[i] + step * (grad[i] - mean_grad));
        total_c += candidate[i];
      }
      if (total_c <= 0.0) {
        step *= 0.5;
        continue;
      }
      for (double& v : candidate) v /= total_c;
      double cand_eps = sud_worst_input_error(candidate, n);
      if (cand_eps > eps + 1e-16) {
        p = candidate;
        eps = cand_eps;
        // Let the step recover after successes; the gradient is O(1/n^2) near
        // the optimum and a monotone shrinking step cannot cross the simplex.
        step = std::min(0.5, step * 2.0);
      } else {
        step *= 0.5;
      }
    }
    if (eps > best.eps) {
      best.eps = eps;
      best.spectrum = p;
    }
  }
  return best;
}

SlopeFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("fit_loglog: size mismatch");
  if (xs.size() < 8) {
    std::ostringstream msg;
    msg << "fit_loglog: need at least 8 points for a slope estimate, got " << xs.size();
    throw std::invalid_argument(msg.str());
  }
  int m = static_cast<int>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::vector<double> lx(m), ly(m);
  for (int i = 0; i < m; ++i) {
    if (xs[i] <= 0.0 || ys[i] <= 0.0) {
      throw std::invalid_argument("fit_loglog: data must be strictly positive");
    }
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  double denom = m * sxx - sx * sx;
  if (std::abs(denom) < 1e-12) throw std::invalid_argument("fit_loglog: degenerate abscissae");
  SlopeFit fit;
  fit.points = m;
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  double ss = 0.0;
  for (int i = 0; i < m; ++i) {
    double resid = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss += resid * resid;
  }
  fit.residual_rms = std::sqrt(ss / m);
  return fit;
}

double binomial_convolve(const std::vector<double>& per_count_values, int n, double p) {
  if (static_cast<int>(per_count_values.size()) != n + 1) {
    throw std::invalid_argument("binomial_convolve: need exactly n + 1 values");
  }
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("binomial_convolve: p outside [0, 1]");
  if (p == 0.0) return per_count_values[0];
  if (p == 1.0) return per_count_values[n];
  long double acc = 0.0L;
  long double lp = std::log(static_cast<long double>(p));
  long double lq = std::log(static_cast<long double>(1.0 - p));
  for (int t = 0; t <= n; ++t) {
    long double logw = std::lgammal(n + 1.0L) - std::lgammal(t + 1.0L) -
                       std::lgammal(n - t + 1.0L) + t * lp + (n - t) * lq;
    acc += std::exp(logw) * static_cast<long double>(per_count_values[t]);
  }
  return static_cast<double>(acc);
}

}  // namespace covqec
