#include "covqec/covariant_codes.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

namespace covqec {

namespace {

constexpr std::uint64_t kTagWeightSectors = 0xC0DE0001ULL;
constexpr std::uint64_t kTagMultiplicityBlocks = 0xC0DE0002ULL;

Mat kron_power(const Mat& u, int n) {
  Mat out = u;
  for (int i = 1; i < n; ++i) out = kron(out, u);
  return out;
}

}  // namespace

void check_u1_spec(const U1CodeSpec& spec) {
  std::ostringstream msg;
  if (spec.n < 2) {
    msg << "U1CodeSpec: n must be >= 2, got " << spec.n;
    throw std::invalid_argument(msg.str());
  }
  if (spec.k < 1 || spec.k >= spec.n) {
    msg << "U1CodeSpec: k must satisfy 1 <= k < n, got k = " << spec.k << ", n = " << spec.n;
    throw std::invalid_argument(msg.str());
  }
  if (spec.alpha < 0 || spec.alpha > spec.n - spec.k) {
    msg << "U1CodeSpec: alpha must satisfy 0 <= alpha <= n - k, got alpha = " << spec.alpha;
    throw std::invalid_argument(msg.str());
  }
}

void check_sud_spec(const SUdCodeSpec& spec) {
  std::ostringstream msg;
  if (spec.n < 2 || spec.d < 2) {
    msg << "SUdCodeSpec: need n >= 2 and d >= 2, got n = " << spec.n << ", d = " << spec.d;
    throw std::invalid_argument(msg.str());
  }
  check_partition(spec.lambda);
  if (partition_weight(spec.lambda) != spec.n - 1) {
    msg << "SUdCodeSpec: lambda must be a partition of n - 1 = " << spec.n - 1 << ", got weight "
        << partition_weight(spec.lambda);
    throw std::invalid_argument(msg.str());
  }
  if (static_cast<int>(spec.lambda.size()) > spec.d) {
    msg << "SUdCodeSpec: lambda has " << spec.lambda.size() << " rows, more than d = " << spec.d;
    throw std::invalid_argument(msg.str());
  }
  long long r = hook_counts(spec.lambda, spec.d).standard;
  if (spec.psi_index < 0 || spec.psi_index >= r) {
    msg << "SUdCodeSpec: psi_index " << spec.psi_index << " outside the multiplicity dimension "
        << r;
    throw std::invalid_argument(msg.str());
  }
}

CommutantUnitary sample_u1_unitary(int n, std::uint64_t seed) {
  auto sectors = hamming_sectors(n);
  long long dim = 1LL << n;
  CommutantUnitary u;
  u.kind = CommutantUnitary::Kind::weight_sectors;
  u.assembled = Mat::Zero(dim, dim);
  for (int j = 0; j <= n; ++j) {
    Rng rng(sub_seed(sub_seed(seed, kTagWeightSectors), static_cast<std::uint64_t>(j)));
    const auto& idx = sectors[j];
    Mat block = haar_unitary(static_cast<long long>(idx.size()), rng);
    for (std::size_t p = 0; p < idx.size(); ++p) {
      for (std::size_t q = 0; q < idx.size(); ++q) {
        u.assembled(idx[p], idx[q]) = block(p, q);
      }
    }
    u.blocks.push_back(std::move(block));
  }
  return u;
}

CommutantUnitary sample_sud_unitary(const SchurDecomposition& schur, std::uint64_t seed) {
  long long dim = 1;
  for (int i = 0; i < schur.n; ++i) dim *= schur.d;
  CommutantUnitary u;
  u.kind = CommutantUnitary::Kind::multiplicity_blocks;
  u.assembled = Mat::Zero(dim, dim);
  for (std::size_t b = 0; b < schur.blocks.size(); ++b) {
    const auto& block = schur.blocks[b];
    Rng rng(sub_seed(sub_seed(seed, kTagMultiplicityBlocks), static_cast<std::uint64_t>(b)));
    Mat v = haar_unitary(block.standard_dim, rng);
    u.assembled +=
        block.isometry * kron(identity(block.unitary_dim), v) * block.isometry.adjoint();
    u.blocks.push_back(std::move(v));
  }
  return u;
}

Mat u1_encoding_isometry(const U1CodeSpec& spec, const CommutantUnitary& unitary) {
  check_u1_spec(spec);
  long long dim = 1LL << spec.n;
  if (unitary.assembled.rows() != dim) {
    throw std::invalid_argument("u1_encoding_isometry: unitary size does not match 2^n");
  }
  // Ancilla |1...1 0...0>: alpha ones directly after the k logical qubits,
  // qubit 0 being the leftmost (most significant) factor.
  long long ancilla = 0;
  for (int i = spec.k; i < spec.k + spec.alpha; ++i) ancilla |= 1LL << (spec.n - 1 - i);
  Mat iso(dim, 1LL << spec.k);
  for (long long x = 0; x < (1LL << spec.k); ++x) {
    iso.col(x) = unitary.assembled.col((x << (spec.n - spec.k)) | ancilla);
  }
  return iso;
}

Mat encode_u1(const U1CodeSpec& spec, const CommutantUnitary& unitary, const Mat& logical) {
  Mat iso = u1_encoding_isometry(spec, unitary);
  if (logical.rows() != (1LL << spec.k) || logical.cols() != (1LL << spec.k)) {
    throw std::invalid_argument("encode_u1: logical state must be 2^k x 2^k");
  }
  return iso * logical * iso.adjoint();
}

Mat sud_gauge_state(const SUdCodeSpec& spec, const SchurDecomposition& schur_n_minus_1) {
  check_sud_spec(spec);
  if (schur_n_minus_1.n != spec.n - 1 || schur_n_minus_1.d != spec.d) {
    throw std::invalid_argument("sud_gauge_state: Schur decomposition is not for (n-1, d)");
  }
  const SchurBlock& block = schur_n_minus_1.block(spec.lambda);
  long long l = block.unitary_dim;
  long long r = block.standard_dim;
  Mat rho = Mat::Zero(block.isometry.rows(), block.isometry.rows());
  for (long long a = 0; a < l; ++a) {
    const auto col = block.isometry.col(a * r + spec.psi_index);
    rho += col * col.adjoint();
  }
  return rho / static_cast<double>(l);
}

Mat encode_sud(const SUdCodeSpec& spec, const CommutantUnitary& unitary,
               const SchurDecomposition& schur_n_minus_1, const Mat& logical) {
  if (logical.rows() != spec.d || logical.cols() != spec.d) {
    throw std::invalid_argument("encode_sud: logical state must be d x d");
  }
  Mat appended = kron(logical, sud_gauge_state(spec, schur_n_minus_1));
  return unitary.assembled * appended * unitary.assembled.adjoint();
}

Vec u1_choi_vector(const U1CodeSpec& spec, const CommutantUnitary& unitary) {
  Mat iso = u1_encoding_isometry(spec, unitary);
  long long dim_log = 1LL << spec.k;
  long long dim_phys = 1LL << spec.n;
  Vec psi = Vec::Zero(dim_phys * dim_log);
  double amp = 1.0 / std::sqrt(static_cast<double>(dim_log));
  for (long long x = 0; x < dim_log; ++x) {
    for (long long a = 0; a < dim_phys; ++a) {
      psi(a * dim_log + x) = amp * iso(a, x);
    }
  }
  return psi;
}

Mat sud_choi_state(const SUdCodeSpec& spec, const CommutantUnitary& unitary,
                   const SchurDecomposition& schur_n_minus_1) {
  check_sud_spec(spec);
  int d = spec.d;
  long long rest_dim = 1;
  for (int i = 0; i < spec.n - 1; ++i) rest_dim *= d;
  Vec pair = Vec::Zero(static_cast<long long>(d) * d);
  for (int i = 0; i < d; ++i) pair(static_cast<long long>(i) * d + i) = 1.0 / std::sqrt(d);
  // Assemble on A1 (x) R (x) rest, then reorder to A1 (x) rest (x) R.
  Mat state = kron(Mat(pair * pair.adjoint()), sud_gauge_state(spec, schur_n_minus_1));
  state = permute_subsystems(state, {d, d, static_cast<int>(rest_dim)}, {0, 2, 1});
  Mat v_full = kron(unitary.assembled, identity(d));
  return v_full * state * v_full.adjoint();
}

double check_covariance_u1(const U1CodeSpec& spec, const CommutantUnitary& unitary, int trials,
                           Rng& rng) {
  Mat iso = u1_encoding_isometry(spec, unitary);
  long long dim_log = 1LL << spec.k;
  long long dim_phys = 1LL << spec.n;
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    double theta = 2.0 * std::numbers::pi * rng.uniform();
    Vec log_phase(dim_log), phys_phase(dim_phys);
    for (long long x = 0; x < dim_log; ++x) {
      log_phase(x) = std::polar(1.0, theta * std::popcount(static_cast<std::uint64_t>(x)));
    }
    for (long long a = 0; a < dim_phys; ++a) {
      phys_phase(a) = std::polar(1.0, theta * std::popcount(static_cast<std::uint64_t>(a)));
    }
    cx ancilla_phase = std::polar(1.0, -theta * spec.alpha);
    Mat lhs = iso * log_phase.asDiagonal();
    Mat rhs = ancilla_phase * (phys_phase.asDiagonal() * iso);
    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  return worst;
}

double check_covariance_sud(const SUdCodeSpec& spec, const CommutantUnitary& unitary,
                            const SchurDecomposition& schur_n_minus_1, int trials, Rng& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    Mat u = haar_unitary(spec.d, rng);
    Vec phi = random_state_vector(spec.d, rng);
    Mat rho = phi * phi.adjoint();
    Mat lhs = encode_sud(spec, unitary, schur_n_minus_1, Mat(u * rho * u.adjoint()));
    Mat u_n = kron_power(u, spec.n);
    Mat rhs = u_n * encode_sud(spec, unitary, schur_n_minus_1, rho) * u_n.adjoint();
    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace covqec
