#include "covqec/tensor_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace covqec {

void ensure_dense_dim(long long dim, const std::string& what) {
  if (dim <= 0) {
    std::ostringstream msg;
    msg << what << ": dimension must be positive, got " << dim;
    throw std::invalid_argument(msg.str());
  }
  if (dim > kMaxDenseDim) {
    std::ostringstream msg;
    msg << what << ": dense dimension " << dim << " exceeds the supported cap of "
        << kMaxDenseDim << "; use a closed form or structured representation instead";
    throw DimensionCapError(msg.str());
  }
}

long long total_dim(const std::vector<int>& dims) {
  long long total = 1;
  for (int d : dims) {
    if (d < 1) throw std::invalid_argument("total_dim: local dimensions must be >= 1");
    total *= d;
  }
  return total;
}

std::vector<long long> index_strides(const std::vector<int>& dims) {
  std::vector<long long> strides(dims.size(), 1);
  for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i) {
    strides[i] = strides[i + 1] * dims[i + 1];
  }
  return strides;
}

long long pack_index(const std::vector<int>& dims, const std::vector<int>& digits) {
  if (dims.size() != digits.size()) {
    throw std::invalid_argument("pack_index: digit count does not match factor count");
  }
  auto strides = index_strides(dims);
  long long index = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (digits[i] < 0 || digits[i] >= dims[i]) {
      throw std::invalid_argument("pack_index: digit out of range");
    }
    index += strides[i] * digits[i];
  }
  return index;
}

std::vector<int> unpack_index(const std::vector<int>& dims, long long index) {
  auto strides = index_strides(dims);
  std::vector<int> digits(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) {
    digits[i] = static_cast<int>(index / strides[i]);
    index %= strides[i];
  }
  return digits;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    }
  }
  return out;
}

Vec kron_vec(const Vec& a, const Vec& b) {
  Vec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

Mat identity(long long dim) { return Mat::Identity(dim, dim); }

Mat maximally_mixed(long long dim) {
  return Mat::Identity(dim, dim) / static_cast<double>(dim);
}

Vec basis_vector(long long dim, long long index) {
  if (index < 0 || index >= dim) throw std::invalid_argument("basis_vector: index out of range");
  Vec v = Vec::Zero(dim);
  v(index) = 1.0;
  return v;
}

Mat partial_trace(const Mat& rho, const std::vector<int>& dims, const std::vector<int>& keep) {
  long long dim = total_dim(dims);
  if (rho.rows() != dim || rho.cols() != dim) {
    std::ostringstream msg;
    msg << "partial_trace: operator is " << rho.rows() << "x" << rho.cols()
        << " but the factorization gives total dimension " << dim;
    throw std::invalid_argument(msg.str());
  }
  for (std::size_t i = 0; i + 1 < keep.size(); ++i) {
    if (keep[i] >= keep[i + 1]) {
      throw std::invalid_argument("partial_trace: keep set must be strictly increasing");
    }
  }
  std::vector<bool> kept(dims.size(), false);
  for (int s : keep) {
    if (s < 0 || s >= static_cast<int>(dims.size())) {
      throw std::invalid_argument("partial_trace: keep index out of range");
    }
    kept[s] = true;
  }
  std::vector<int> traced;
  for (int s = 0; s < static_cast<int>(dims.size()); ++s) {
    if (!kept[s]) traced.push_back(s);
  }

  auto strides = index_strides(dims);
  long long keep_dim = 1, trace_dim = 1;
  std::vector<long long> keep_stride, keep_radix, trace_stride, trace_radix;
  for (int s : keep) {
    keep_stride.push_back(strides[s]);
    keep_radix.push_back(dims[s]);
    keep_dim *= dims[s];
  }
  for (int s : traced) {
    trace_stride.push_back(strides[s]);
    trace_radix.push_back(dims[s]);
    trace_dim *= dims[s];
  }

  // Precompute full-space offsets of every keep-index and trace-index tuple.
  auto offsets = [](long long count, const std::vector<long long>& stride,
                    const std::vector<long long>& radix) {
    std::vector<long long> off(count, 0);
    for (long long v = 0; v < count; ++v) {
      long long rem = v;
      for (int i = static_cast<int>(radix.size()) - 1; i >= 0; --i) {
        off[v] += (rem % radix[i]) * stride[i];
        rem /= radix[i];
      }
    }
    return off;
  };
  std::vector<long long> keep_off = offsets(keep_dim, keep_stride, keep_radix);
  std::vector<long long> trace_off = offsets(trace_dim, trace_stride, trace_radix);

  Mat out = Mat::Zero(keep_dim, keep_dim);
  for (long long r = 0; r < keep_dim; ++r) {
    for (long long c = 0; c < keep_dim; ++c) {
      cx acc = 0.0;
      for (long long t = 0; t < trace_dim; ++t) {
        acc += rho(keep_off[r] + trace_off[t], keep_off[c] + trace_off[t]);
      }
      out(r, c) = acc;
    }
  }
  return out;
}

namespace {

std::vector<long long> subsystem_permutation_map(const std::vector<int>& dims,
                                                 const std::vector<int>& perm) {
  if (perm.size() != dims.size()) {
    throw std::invalid_argument("permute_subsystems: permutation size mismatch");
  }
  std::vector<bool> seen(perm.size(), false);
  std::vector<int> new_dims(dims.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (perm[i] < 0 || perm[i] >= static_cast<int>(perm.size()) || seen[perm[i]]) {
      throw std::invalid_argument("permute_subsystems: not a permutation");
    }
    seen[perm[i]] = true;
    new_dims[perm[i]] = dims[i];
  }
  auto in_strides = index_strides(dims);
  auto out_strides = index_strides(new_dims);
  long long dim = total_dim(dims);
  std::vector<long long> map(dim);
  for (long long idx = 0; idx < dim; ++idx) {
    long long rem = idx, out = 0;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      long long digit = rem / in_strides[i];
      rem %= in_strides[i];
      out += digit * out_strides[perm[i]];
    }
    map[idx] = out;
  }
  return map;
}

}  // namespace

Vec permute_subsystems(const Vec& psi, const std::vector<int>& dims, const std::vector<int>& perm) {
  auto map = subsystem_permutation_map(dims, perm);
  if (psi.size() != static_cast<Eigen::Index>(map.size())) {
    throw std::invalid_argument("permute_subsystems: vector size mismatch");
  }
  Vec out(psi.size());
  for (Eigen::Index i = 0; i < psi.size(); ++i) out(map[i]) = psi(i);
  return out;
}

Mat permute_subsystems(const Mat& rho, const std::vector<int>& dims, const std::vector<int>& perm) {
  auto map = subsystem_permutation_map(dims, perm);
  if (rho.rows() != static_cast<Eigen::Index>(map.size()) || rho.rows() != rho.cols()) {
    throw std::invalid_argument("permute_subsystems: operator size mismatch");
  }
  Mat out(rho.rows(), rho.cols());
  for (Eigen::Index r = 0; r < rho.rows(); ++r) {
    for (Eigen::Index c = 0; c < rho.cols(); ++c) {
      out(map[r], map[c]) = rho(r, c);
    }
  }
  return out;
}

void check_density_matrix(const Mat& rho, double tol, const std::string& context) {
  if (rho.rows() != rho.cols()) {
    throw std::invalid_argument(context + ": density matrix must be square");
  }
  double herm_err = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm_err > tol) {
    std::ostringstream msg;
    msg << context << ": not Hermitian, max |rho - rho^dag| = " << herm_err;
    throw std::invalid_argument(msg.str());
  }
  double trace_err = std::abs(rho.trace() - cx(1.0));
  if (trace_err > tol) {
    std::ostringstream msg;
    msg << context << ": trace deviates from 1 by " << trace_err;
    throw std::invalid_argument(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -tol) {
    std::ostringstream msg;
    msg << context << ": smallest eigenvalue " << min_eig << " below -" << tol;
    throw std::invalid_argument(msg.str());
  }
}

Mat matrix_sqrt_psd(const Mat& rho) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho + rho.adjoint()));
  Eigen::VectorXd vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

double trace_norm(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues().sum();
}

double trace_distance(const Mat& rho, const Mat& sigma) {
  Mat diff = rho - sigma;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double fidelity(const Mat& rho, const Mat& sigma) {
  // F = || sqrt(rho) sqrt(sigma) ||_1, equal to Tr sqrt(sqrt(rho) sigma sqrt(rho)).
  Mat product = matrix_sqrt_psd(rho) * matrix_sqrt_psd(sigma);
  Eigen::JacobiSVD<Mat> svd(product);
  double f = svd.singularValues().sum();
  return std::min(f, 1.0);
}

double purified_distance(const Mat& rho, const Mat& sigma) {
  double f = fidelity(rho, sigma);
  return std::sqrt(std::max(0.0, 1.0 - f * f));
}

double operator_inf_norm_herm(const Mat& herm) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (herm + herm.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<double> schmidt_coefficients(const Vec& psi, long long dim_a, long long dim_b) {
  if (psi.size() != dim_a * dim_b) {
    throw std::invalid_argument("schmidt_coefficients: state size is not dim_a * dim_b");
  }
  Mat reshaped(dim_a, dim_b);
  for (long long a = 0; a < dim_a; ++a) {
    for (long long b = 0; b < dim_b; ++b) {
      reshaped(a, b) = psi(a * dim_b + b);
    }
  }
  Eigen::JacobiSVD<Mat> svd(reshaped);
  std::vector<double> out(svd.singularValues().data(),
                          svd.singularValues().data() + svd.singularValues().size());
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t sub_seed(std::uint64_t master, std::uint64_t tag) {
  return splitmix64(master ^ splitmix64(tag + 0x632BE59BD9B4E019ULL));
}

Rng::Rng(std::uint64_t seed) : seed_(seed), eng_(seed) {}

std::uint64_t Rng::next_u64() { return eng_(); }

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::gauss() {
  if (have_cached_) {
    have_cached_ = false;
    return cached_;
  }
  double u1 = 1.0 - uniform();  // (0, 1]
  double u2 = uniform();
  double radius = std::sqrt(-2.0 * std::log(u1));
  double angle = 2.0 * std::numbers::pi * u2;
  cached_ = radius * std::sin(angle);
  have_cached_ = true;
  return radius * std::cos(angle);
}

Mat haar_unitary(long long dim, Rng& rng) {
  ensure_dense_dim(dim, "haar_unitary");
  Mat g(dim, dim);
  for (long long r = 0; r < dim; ++r) {
    for (long long c = 0; c < dim; ++c) {
      double re = rng.gauss();
      double im = rng.gauss();
      g(r, c) = cx(re, im) * std::numbers::sqrt2 / 2.0;
    }
  }
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (long long i = 0; i < dim; ++i) {
    cx d = r(i, i);
    double mag = std::abs(d);
    q.col(i) *= (mag > 0) ? d / mag : cx(1.0);
  }
  return q;
}

Vec random_state_vector(long long dim, Rng& rng) {
  ensure_dense_dim(dim, "random_state_vector");
  Vec v(dim);
  for (long long i = 0; i < dim; ++i) v(i) = cx(rng.gauss(), rng.gauss());
  v.normalize();
  return v;
}

Mat random_density_matrix(long long dim, long long rank, Rng& rng) {
  ensure_dense_dim(dim, "random_density_matrix");
  if (rank < 1 || rank > dim) throw std::invalid_argument("random_density_matrix: bad rank");
  Mat g(dim, rank);
  for (long long r = 0; r < dim; ++r) {
    for (long long c = 0; c < rank; ++c) {
      g(r, c) = cx(rng.gauss(), rng.gauss());
    }
  }
  Mat rho = g * g.adjoint();
  rho /= rho.trace().real();
  return rho;
}

}  // namespace covqec
