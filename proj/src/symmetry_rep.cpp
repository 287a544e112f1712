#include "covqec/symmetry_rep.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

namespace covqec {

namespace {

using int128 = __int128;

int128 gcd128(int128 a, int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Running product of small integer factors divided by another such product,
// kept reduced so the exact tableau-count arithmetic never overflows.
struct Fraction128 {
  int128 num = 1;
  int128 den = 1;
  void mul_num(long long f) {
    int128 g = gcd128(f, den);
    num *= f / g;
    den /= g;
  }
  void mul_den(long long f) {
    int128 g = gcd128(f, num);
    den *= f / g;
    num /= g;
  }
  long long to_integer(const std::string& what) const {
    if (den != 1) throw std::logic_error(what + ": non-integer hook-length quotient");
    if (num > int128(9'223'372'036'854'775'807LL)) {
      throw DimensionCapError(what + ": count exceeds 64-bit range");
    }
    return static_cast<long long>(num);
  }
};

Partition conjugate_partition(const Partition& lambda) {
  if (lambda.empty()) return {};
  Partition conj(lambda[0], 0);
  for (int part : lambda) {
    for (int j = 0; j < part; ++j) conj[j] += 1;
  }
  return conj;
}

std::vector<int> hook_lengths(const Partition& lambda) {
  Partition conj = conjugate_partition(lambda);
  std::vector<int> hooks;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    for (int j = 0; j < lambda[i]; ++j) {
      hooks.push_back(lambda[i] - j + conj[j] - static_cast<int>(i) - 1);
    }
  }
  return hooks;
}

void partitions_rec(int remaining, int max_part, int rows_left, Partition& current,
                    std::vector<Partition>& out) {
  if (remaining == 0) {
    out.push_back(current);
    return;
  }
  if (rows_left == 0) return;
  for (int p = std::min(remaining, max_part); p >= 1; --p) {
    current.push_back(p);
    partitions_rec(remaining - p, p, rows_left - 1, current, out);
    current.pop_back();
  }
}

long long syt_count_rec(const Partition& lambda, std::vector<int>& filled, int placed, int total) {
  if (placed == total) return 1;
  long long count = 0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (filled[i] >= lambda[i]) continue;
    if (i > 0 && filled[i - 1] <= filled[i]) continue;
    filled[i] += 1;
    count += syt_count_rec(lambda, filled, placed + 1, total);
    filled[i] -= 1;
  }
  return count;
}

long long ssyt_count_rec(const Partition& lambda, int d, std::vector<std::vector<int>>& grid,
                         std::size_t row, int col) {
  if (row == lambda.size()) return 1;
  if (col == lambda[row]) return ssyt_count_rec(lambda, d, grid, row + 1, 0);
  int lo = 1;
  if (col > 0) lo = std::max(lo, grid[row][col - 1]);
  if (row > 0) lo = std::max(lo, grid[row - 1][col] + 1);
  long long count = 0;
  for (int v = lo; v <= d; ++v) {
    grid[row][col] = v;
    count += ssyt_count_rec(lambda, d, grid, row, col + 1);
  }
  return count;
}

// Murnaghan-Nakayama via beta numbers: remove a border strip of length m by
// lowering one beta number, with sign (-1)^{#beta values jumped over}.
long long mn_character(const Partition& lambda, const std::vector<int>& mu, std::size_t mi) {
  if (mi == mu.size()) return lambda.empty() ? 1 : 0;
  if (lambda.empty()) return 0;
  int m = mu[mi];
  int rows = static_cast<int>(lambda.size());
  std::vector<int> beta(rows);
  for (int i = 0; i < rows; ++i) beta[i] = lambda[i] + (rows - 1 - i);
  long long total = 0;
  for (int i = 0; i < rows; ++i) {
    int lowered = beta[i] - m;
    if (lowered < 0) continue;
    bool collision = false;
    int height = 0;
    for (int j = 0; j < rows; ++j) {
      if (j == i) continue;
      if (beta[j] == lowered) collision = true;
      if (beta[j] > lowered && beta[j] < beta[i]) height += 1;
    }
    if (collision) continue;
    std::vector<int> nb = beta;
    nb[i] = lowered;
    std::sort(nb.begin(), nb.end(), std::greater<int>());
    Partition next;
    for (int t = 0; t < rows; ++t) {
      int part = nb[t] - (rows - 1 - t);
      if (part > 0) next.push_back(part);
    }
    long long sub = mn_character(next, mu, mi + 1);
    total += (height % 2 == 0) ? sub : -sub;
  }
  return total;
}

long long lr_fill_rec(const Partition& lambda, const Partition& mu_pad, const Partition& nu,
                      std::vector<std::vector<int>>& grid, std::vector<int>& used, std::size_t row,
                      int col) {
  if (row == lambda.size()) return 1;
  // Cells are visited right to left within each row (reverse reading order) so
  // the lattice-word condition can be enforced prefix by prefix.
  if (col < mu_pad[row]) return lr_fill_rec(lambda, mu_pad, nu, grid, used, row + 1,
                                            row + 1 < lambda.size() ? lambda[row + 1] - 1 : 0);
  long long count = 0;
  for (int v = 1; v <= static_cast<int>(nu.size()); ++v) {
    if (used[v] >= nu[v - 1]) continue;
    if (v > 1 && used[v] >= used[v - 1]) continue;                        // lattice word
    if (col + 1 < lambda[row] && v > grid[row][col + 1]) continue;        // weak rows
    if (row > 0 && col >= mu_pad[row - 1] && grid[row - 1][col] >= v) continue;  // strict cols
    grid[row][col] = v;
    used[v] += 1;
    count += lr_fill_rec(lambda, mu_pad, nu, grid, used, row, col - 1);
    used[v] -= 1;
  }
  return count;
}

// All bijections of `entries` onto itself, returned as full permutations of
// 0..n-1 (identity off the set) together with the bijection's sign.
std::vector<std::pair<std::vector<int>, int>> set_permutations(const std::vector<int>& entries,
                                                               int n) {
  std::vector<int> sorted = entries;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> arrangement = sorted;
  std::vector<std::pair<std::vector<int>, int>> out;
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < arrangement.size(); ++i) {
      for (std::size_t j = i + 1; j < arrangement.size(); ++j) {
        if (arrangement[i] > arrangement[j]) inversions += 1;
      }
    }
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = 0; i < sorted.size(); ++i) perm[sorted[i]] = arrangement[i];
    out.emplace_back(std::move(perm), inversions % 2 == 0 ? 1 : -1);
  } while (std::next_permutation(arrangement.begin(), arrangement.end()));
  return out;
}

// Direct product of per-set permutation groups (rows or columns of a tableau).
std::vector<std::pair<std::vector<int>, int>> product_group(
    const std::vector<std::vector<int>>& sets, int n) {
  std::vector<std::pair<std::vector<int>, int>> result;
  std::vector<int> id(n);
  std::iota(id.begin(), id.end(), 0);
  result.emplace_back(id, 1);
  for (const auto& set : sets) {
    if (set.size() < 2) continue;
    auto factor = set_permutations(set, n);
    std::vector<std::pair<std::vector<int>, int>> next;
    next.reserve(result.size() * factor.size());
    for (const auto& [base, bs] : result) {
      for (const auto& [f, fs] : factor) {
        std::vector<int> comp(n);
        for (int i = 0; i < n; ++i) comp[i] = f[base[i]];
        next.emplace_back(std::move(comp), bs * fs);
      }
    }
    result = std::move(next);
  }
  return result;
}

void ensure_symmetric_group_cap(int n, long long dim, const std::string& what) {
  if (n > 8) {
    std::ostringstream msg;
    msg << what << ": symmetric-group expansion is capped at n <= 8, got n = " << n;
    throw DimensionCapError(msg.str());
  }
  ensure_dense_dim(dim, what);
}

long long ipow(int base, int exp) {
  long long v = 1;
  for (int i = 0; i < exp; ++i) {
    if (v > 2 * kMaxDenseDim) return 2 * kMaxDenseDim + 1;  // saturate; callers only compare to caps
    v *= base;
  }
  return v;
}

void apply_index_map(const std::vector<long long>& map, const Eigen::VectorXd& in,
                     Eigen::VectorXd& out) {
  for (Eigen::Index i = 0; i < in.size(); ++i) out(map[i]) = in(i);
}

}  // namespace

void check_partition(const Partition& lambda) {
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (lambda[i] <= 0) throw std::invalid_argument("partition parts must be positive");
    if (i > 0 && lambda[i] > lambda[i - 1]) {
      throw std::invalid_argument("partition parts must be non-increasing");
    }
  }
}

int partition_weight(const Partition& lambda) {
  return std::accumulate(lambda.begin(), lambda.end(), 0);
}

std::vector<Partition> partitions(int n, int max_rows) {
  if (n < 0) throw std::invalid_argument("partitions: n must be non-negative");
  if (max_rows < 0) throw std::invalid_argument("partitions: max_rows must be non-negative");
  std::vector<Partition> out;
  Partition current;
  partitions_rec(n, n, max_rows, current, out);
  return out;
}

std::vector<Partition> adds_one_box(const Partition& lambda, int d) {
  check_partition(lambda);
  std::vector<Partition> out;
  for (std::size_t i = 0; i <= lambda.size(); ++i) {
    if (static_cast<int>(i) >= d) break;
    if (i > 0 && i < lambda.size() && lambda[i - 1] == lambda[i]) continue;
    Partition next = lambda;
    if (i == lambda.size()) {
      next.push_back(1);
    } else {
      next[i] += 1;
    }
    out.push_back(std::move(next));
  }
  return out;
}

TableauCounts hook_counts(const Partition& lambda, int d) {
  check_partition(lambda);
  int n = partition_weight(lambda);
  if (n > 24) {
    throw DimensionCapError(
        "hook_counts: exact counts are capped at |lambda| <= 24; use the log2 variants");
  }
  if (d < 0) throw std::invalid_argument("hook_counts: d must be non-negative");
  auto hooks = hook_lengths(lambda);

  Fraction128 standard;
  for (int k = 2; k <= n; ++k) standard.mul_num(k);
  for (int h : hooks) standard.mul_den(h);

  TableauCounts counts{};
  counts.standard = standard.to_integer("hook_counts(standard)");

  if (static_cast<int>(lambda.size()) > d) {
    counts.semistandard = 0;
    return counts;
  }
  Fraction128 semistandard;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    for (int j = 0; j < lambda[i]; ++j) {
      semistandard.mul_num(d + j - static_cast<int>(i));
    }
  }
  for (int h : hooks) semistandard.mul_den(h);
  counts.semistandard = semistandard.to_integer("hook_counts(semistandard)");
  return counts;
}

long long count_standard_tableaux_enum(const Partition& lambda) {
  check_partition(lambda);
  int n = partition_weight(lambda);
  if (n > 12) throw DimensionCapError("count_standard_tableaux_enum: capped at |lambda| <= 12");
  std::vector<int> filled(lambda.size(), 0);
  return syt_count_rec(lambda, filled, 0, n);
}

long long count_semistandard_tableaux_enum(const Partition& lambda, int d) {
  check_partition(lambda);
  if (partition_weight(lambda) > 12) {
    throw DimensionCapError("count_semistandard_tableaux_enum: capped at |lambda| <= 12");
  }
  if (static_cast<int>(lambda.size()) > d) return 0;
  std::vector<std::vector<int>> grid(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) grid[i].assign(lambda[i], 0);
  return ssyt_count_rec(lambda, d, grid, 0, 0);
}

double log2_factorial(long long n) {
  if (n < 0) throw std::invalid_argument("log2_factorial: negative argument");
  return static_cast<double>(std::lgammal(static_cast<long double>(n) + 1.0L) /
                             std::numbers::ln2_v<long double>);
}

double log2_binomial(long long n, long long k) {
  if (k < 0 || k > n) throw std::invalid_argument("log2_binomial: k outside [0, n]");
  long double v = std::lgammal(static_cast<long double>(n) + 1.0L) -
                  std::lgammal(static_cast<long double>(k) + 1.0L) -
                  std::lgammal(static_cast<long double>(n - k) + 1.0L);
  return static_cast<double>(v / std::numbers::ln2_v<long double>);
}

double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("binary_entropy: p outside [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double log2_standard_count(const Partition& lambda) {
  check_partition(lambda);
  long double v = std::lgammal(static_cast<long double>(partition_weight(lambda)) + 1.0L);
  for (int h : hook_lengths(lambda)) v -= std::log(static_cast<long double>(h));
  return static_cast<double>(v / std::numbers::ln2_v<long double>);
}

double log2_semistandard_count(const Partition& lambda, int d) {
  check_partition(lambda);
  if (static_cast<int>(lambda.size()) > d) {
    throw std::invalid_argument("log2_semistandard_count: more rows than the local dimension");
  }
  long double v = 0.0L;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    for (int j = 0; j < lambda[i]; ++j) {
      v += std::log(static_cast<long double>(d + j - static_cast<int>(i)));
    }
  }
  for (int h : hook_lengths(lambda)) v -= std::log(static_cast<long double>(h));
  return static_cast<double>(v / std::numbers::ln2_v<long double>);
}

long long lr_coefficient(const Partition& mu, const Partition& nu, const Partition& lambda) {
  check_partition(mu);
  check_partition(nu);
  check_partition(lambda);
  if (partition_weight(lambda) > 8) {
    throw DimensionCapError("lr_coefficient: capped at |lambda| <= 8");
  }
  if (partition_weight(mu) + partition_weight(nu) != partition_weight(lambda)) return 0;
  if (mu.size() > lambda.size()) return 0;
  Partition mu_pad(lambda.size(), 0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] > lambda[i]) return 0;  // mu not contained in lambda
    mu_pad[i] = mu[i];
  }
  if (lambda.empty()) return 1;
  std::vector<std::vector<int>> grid(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) grid[i].assign(lambda[i], 0);
  std::vector<int> used(nu.size() + 1, 0);
  return lr_fill_rec(lambda, mu_pad, nu, grid, used, 0, lambda[0] - 1);
}

long long character(const Partition& lambda, const Partition& cycle_type) {
  check_partition(lambda);
  check_partition(cycle_type);
  if (partition_weight(lambda) != partition_weight(cycle_type)) {
    throw std::invalid_argument("character: cycle type weight differs from shape weight");
  }
  return mn_character(lambda, cycle_type, 0);
}

long long conjugacy_class_size(const Partition& cycle_type) {
  check_partition(cycle_type);
  int n = partition_weight(cycle_type);
  if (n > 20) throw DimensionCapError("conjugacy_class_size: capped at n <= 20");
  std::map<int, int> multiplicity;
  for (int part : cycle_type) multiplicity[part] += 1;
  Fraction128 f;
  for (int k = 2; k <= n; ++k) f.mul_num(k);
  for (auto [part, count] : multiplicity) {
    for (int c = 0; c < count; ++c) f.mul_den(part);
    for (int c = 2; c <= count; ++c) f.mul_den(c);
  }
  return f.to_integer("conjugacy_class_size");
}

std::vector<std::vector<long long>> hamming_sectors(int n) {
  if (n < 1) throw std::invalid_argument("hamming_sectors: n must be >= 1");
  ensure_dense_dim(1LL << n, "hamming_sectors");
  std::vector<std::vector<long long>> sectors(n + 1);
  for (long long x = 0; x < (1LL << n); ++x) {
    sectors[std::popcount(static_cast<std::uint64_t>(x))].push_back(x);
  }
  return sectors;
}

std::vector<int> cycle_type(const std::vector<int>& perm) {
  int n = static_cast<int>(perm.size());
  std::vector<bool> seen(n, false);
  std::vector<int> lengths;
  for (int i = 0; i < n; ++i) {
    if (seen[i]) continue;
    int len = 0, j = i;
    while (!seen[j]) {
      seen[j] = true;
      j = perm[j];
      len += 1;
    }
    lengths.push_back(len);
  }
  std::sort(lengths.begin(), lengths.end(), std::greater<int>());
  return lengths;
}

std::vector<long long> permutation_index_map(const std::vector<int>& perm, int d) {
  int n = static_cast<int>(perm.size());
  long long dim = ipow(d, n);
  ensure_dense_dim(dim, "permutation_index_map");
  std::vector<int> dims(n, d);
  auto strides = index_strides(dims);
  std::vector<long long> out_stride(n);
  for (int i = 0; i < n; ++i) {
    if (perm[i] < 0 || perm[i] >= n) {
      throw std::invalid_argument("permutation_index_map: index out of range");
    }
    out_stride[i] = strides[perm[i]];
  }
  std::vector<long long> map(dim);
  for (long long x = 0; x < dim; ++x) {
    long long rem = x, y = 0;
    for (int i = 0; i < n; ++i) {
      y += (rem / strides[i]) * out_stride[i];
      rem %= strides[i];
    }
    map[x] = y;
  }
  return map;
}

Mat permutation_operator(const std::vector<int>& perm, int d) {
  auto map = permutation_index_map(perm, d);
  Mat op = Mat::Zero(map.size(), map.size());
  for (std::size_t x = 0; x < map.size(); ++x) op(map[x], x) = 1.0;
  return op;
}

std::vector<std::vector<int>> first_standard_tableau(const Partition& lambda) {
  check_partition(lambda);
  std::vector<std::vector<int>> tableau(lambda.size());
  int next = 0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    for (int j = 0; j < lambda[i]; ++j) tableau[i].push_back(next++);
  }
  return tableau;
}

namespace {

Eigen::MatrixXd young_symmetrizer_real(const std::vector<std::vector<int>>& tableau, int d) {
  Partition shape;
  std::vector<int> all_entries;
  for (const auto& row : tableau) {
    shape.push_back(static_cast<int>(row.size()));
    for (int e : row) all_entries.push_back(e);
  }
  check_partition(shape);
  int n = partition_weight(shape);
  std::vector<int> sorted_entries = all_entries;
  std::sort(sorted_entries.begin(), sorted_entries.end());
  for (int i = 0; i < n; ++i) {
    if (sorted_entries[i] != i) {
      throw std::invalid_argument("young_symmetrizer: entries must be a permutation of 0..n-1");
    }
  }
  long long dim = ipow(d, n);
  ensure_symmetric_group_cap(n, dim, "young_symmetrizer");

  std::vector<std::vector<int>> rows = tableau;
  std::vector<std::vector<int>> cols(shape.empty() ? 0 : shape[0]);
  for (std::size_t i = 0; i < tableau.size(); ++i) {
    for (std::size_t j = 0; j < tableau[i].size(); ++j) cols[j].push_back(tableau[i][j]);
  }
  auto row_group = product_group(rows, n);
  auto col_group = product_group(cols, n);

  Eigen::MatrixXd sym = Eigen::MatrixXd::Zero(dim, dim);
  std::vector<int> composed(n);
  for (const auto& [p, psign] : row_group) {
    (void)psign;
    for (const auto& [q, qsign] : col_group) {
      for (int i = 0; i < n; ++i) composed[i] = p[q[i]];
      auto map = permutation_index_map(composed, d);
      double w = static_cast<double>(qsign);
      for (long long x = 0; x < dim; ++x) sym(map[x], x) += w;
    }
  }
  return sym;
}

Eigen::MatrixXd schur_projector_real(const Partition& lambda, int n, int d) {
  check_partition(lambda);
  if (partition_weight(lambda) != n) {
    throw std::invalid_argument("schur_projector: shape weight differs from n");
  }
  long long dim = ipow(d, n);
  ensure_symmetric_group_cap(n, dim, "schur_projector");

  std::map<Partition, long long> chi;
  for (const auto& type : partitions(n, n)) chi[type] = character(lambda, type);
  long long r = hook_counts(lambda, d).standard;
  double factorial = 1.0;
  for (int k = 2; k <= n; ++k) factorial *= k;

  Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(dim, dim);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    long long value = chi[cycle_type(perm)];
    if (value == 0) continue;
    double coeff = static_cast<double>(r) * static_cast<double>(value) / factorial;
    auto map = permutation_index_map(perm, d);
    for (long long x = 0; x < dim; ++x) proj(map[x], x) += coeff;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return proj;
}

}  // namespace

Mat young_symmetrizer(const std::vector<std::vector<int>>& tableau, int d) {
  return young_symmetrizer_real(tableau, d).cast<cx>();
}

Mat schur_projector(const Partition& lambda, int n, int d) {
  return schur_projector_real(lambda, n, d).cast<cx>();
}

const SchurBlock& SchurDecomposition::block(const Partition& shape) const {
  for (const auto& b : blocks) {
    if (b.shape == shape) return b;
  }
  throw std::invalid_argument("SchurDecomposition: no block with the requested shape");
}

Mat SchurDecomposition::projector(std::size_t block_index) const {
  const Mat& w = blocks.at(block_index).isometry;
  return w * w.adjoint();
}

SchurDecomposition schur_decomposition(int n, int d) {
  if (n < 1 || d < 2) throw std::invalid_argument("schur_decomposition: need n >= 1, d >= 2");
  long long dim = ipow(d, n);
  ensure_symmetric_group_cap(n, dim, "schur_decomposition");

  // Index maps of the adjacent transpositions, enough to reach the whole
  // multiplicity space by repeated application.
  std::vector<std::vector<long long>> generators;
  for (int j = 0; j + 1 < n; ++j) {
    std::vector<int> t(n);
    std::iota(t.begin(), t.end(), 0);
    std::swap(t[j], t[j + 1]);
    generators.push_back(permutation_index_map(t, d));
  }

  SchurDecomposition dec;
  dec.n = n;
  dec.d = d;
  long long dim_accum = 0;
  for (const auto& shape : partitions(n, d)) {
    auto counts = hook_counts(shape, d);
    long long l = counts.semistandard;
    long long r = counts.standard;
    Eigen::MatrixXd proj = schur_projector_real(shape, n, d);

    // Gauge frame: orthonormalize the symmetrizer image of the row-major
    // tableau; its image is exactly (gauge space) x (one fixed Specht vector).
    Eigen::MatrixXd sym = young_symmetrizer_real(first_standard_tableau(shape), d);
    std::vector<Eigen::VectorXd> gauge;
    double col_scale = sym.cwiseAbs().maxCoeff();
    for (long long c = 0; c < dim && static_cast<long long>(gauge.size()) < l; ++c) {
      Eigen::VectorXd v = sym.col(c);
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& u : gauge) v -= u.dot(v) * u;
      }
      double nrm = v.norm();
      if (nrm > 1e-7 * col_scale) gauge.push_back(v / nrm);
    }
    if (static_cast<long long>(gauge.size()) != l) {
      std::ostringstream msg;
      msg << "schur_decomposition: symmetrizer image rank " << gauge.size() << " != " << l
          << " for a shape of weight " << n;
      throw std::runtime_error(msg.str());
    }

    // Multiplicity frame: breadth-first orbit sweep. The Gram-Schmidt
    // coefficients computed on gauge index 0 are reused verbatim for every
    // other gauge index; Schur's lemma makes the replicas exactly orthonormal.
    std::vector<std::vector<Eigen::VectorXd>> w(l);
    for (long long a = 0; a < l; ++a) w[a].push_back(gauge[a]);
    long long slots = 1;
    Eigen::VectorXd scratch(dim), candidate(dim);
    for (long long s = 0; s < slots && slots < r; ++s) {
      for (const auto& gen : generators) {
        apply_index_map(gen, w[0][s], candidate);
        std::vector<double> coeff(slots, 0.0);
        for (int pass = 0; pass < 2; ++pass) {
          for (long long t = 0; t < slots; ++t) {
            double beta = w[0][t].dot(candidate);
            candidate -= beta * w[0][t];
            coeff[t] += beta;
          }
        }
        double nrm = candidate.norm();
        if (nrm <= 1e-8) continue;
        for (long long a = 0; a < l; ++a) {
          apply_index_map(gen, w[a][s], scratch);
          for (long long t = 0; t < slots; ++t) scratch -= coeff[t] * w[a][t];
          w[a].push_back(scratch / nrm);
        }
        slots += 1;
        if (slots == r) break;
      }
    }
    if (slots != r) {
      std::ostringstream msg;
      msg << "schur_decomposition: orbit sweep found " << slots << " multiplicity slots, expected "
          << r;
      throw std::runtime_error(msg.str());
    }

    SchurBlock block;
    block.shape = shape;
    block.unitary_dim = l;
    block.standard_dim = r;
    Eigen::MatrixXd iso(dim, l * r);
    for (long long a = 0; a < l; ++a) {
      for (long long s = 0; s < r; ++s) iso.col(a * r + s) = w[a][s];
    }
    double ortho_err = (iso.transpose() * iso - Eigen::MatrixXd::Identity(l * r, l * r))
                           .cwiseAbs()
                           .maxCoeff();
    double proj_err = (iso * iso.transpose() - proj).cwiseAbs().maxCoeff();
    if (ortho_err > 1e-10 || proj_err > 1e-9) {
      std::ostringstream msg;
      msg << "schur_decomposition: basis checks failed (orthonormality " << ortho_err
          << ", projector residual " << proj_err << ")";
      throw std::runtime_error(msg.str());
    }
    block.isometry = iso.cast<cx>();
    dec.blocks.push_back(std::move(block));
    dim_accum += l * r;
  }
  if (dim_accum != dim) {
    std::ostringstream msg;
    msg << "schur_decomposition: block dimensions sum to " << dim_accum << ", expected " << dim;
    throw std::runtime_error(msg.str());
  }
  return dec;
}

Mat permutation_average(const Mat& m, const SchurDecomposition& schur, long long ref_dim) {
  long long dim = ipow(schur.d, schur.n);
  long long full = dim * ref_dim;
  ensure_dense_dim(full, "permutation_average");
  if (m.rows() != full || m.cols() != full) {
    throw std::invalid_argument("permutation_average: operator size does not match d^n * ref_dim");
  }
  Mat basis(dim, dim);
  long long offset = 0;
  std::vector<long long> offsets;
  for (const auto& b : schur.blocks) {
    offsets.push_back(offset);
    basis.block(0, offset, dim, b.unitary_dim * b.standard_dim) = b.isometry;
    offset += b.unitary_dim * b.standard_dim;
  }
  Mat w = (ref_dim > 1) ? kron(basis, identity(ref_dim)) : basis;
  Mat rotated = w.adjoint() * m * w;
  Mat averaged = Mat::Zero(full, full);
  for (std::size_t bi = 0; bi < schur.blocks.size(); ++bi) {
    long long l = schur.blocks[bi].unitary_dim;
    long long r = schur.blocks[bi].standard_dim;
    long long base = offsets[bi];
    for (long long a = 0; a < l; ++a) {
      for (long long ap = 0; ap < l; ++ap) {
        for (long long e = 0; e < ref_dim; ++e) {
          for (long long ep = 0; ep < ref_dim; ++ep) {
            cx acc = 0.0;
            for (long long s = 0; s < r; ++s) {
              acc += rotated((base + a * r + s) * ref_dim + e, (base + ap * r + s) * ref_dim + ep);
            }
            acc /= static_cast<double>(r);
            for (long long s = 0; s < r; ++s) {
              averaged((base + a * r + s) * ref_dim + e, (base + ap * r + s) * ref_dim + ep) = acc;
            }
          }
        }
      }
    }
  }
  return w * averaged * w.adjoint();
}

std::vector<std::pair<Partition, double>> isotypic_partial_trace(const Partition& lambda, int d,
                                                                 int s) {
  check_partition(lambda);
  int m = partition_weight(lambda);
  if (m > 8) throw DimensionCapError("isotypic_partial_trace: capped at |lambda| <= 8");
  if (s < 0 || s > m) throw std::invalid_argument("isotypic_partial_trace: s outside [0, weight]");
  if (static_cast<int>(lambda.size()) > d) {
    throw std::invalid_argument("isotypic_partial_trace: shape has more rows than d");
  }
  long long r_lambda = hook_counts(lambda, d).standard;
  std::vector<std::pair<Partition, double>> out;
  for (const auto& mu : partitions(m - s, d)) {
    long long l_mu = hook_counts(mu, d).semistandard;
    long long weighted = 0;
    for (const auto& nu : partitions(s, s)) {
      long long c = lr_coefficient(mu, nu, lambda);
      if (c == 0) continue;
      weighted += c * hook_counts(nu, s).standard;
    }
    if (weighted == 0) continue;
    double coeff = static_cast<double>(weighted) /
                   (static_cast<double>(r_lambda) * static_cast<double>(l_mu));
    out.emplace_back(mu, coeff);
  }
  return out;
}

}  // namespace covqec
