#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace covqec {

using cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Hard cap on any dense Hilbert-space dimension handled by this library.
// Everything larger must go through closed forms or structured representations.
inline constexpr long long kMaxDenseDim = 4096;

// Thrown when a requested dense object would exceed kMaxDenseDim (or another
// documented size cap such as the factorial cutoff in the symmetric-group code).
struct DimensionCapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void ensure_dense_dim(long long dim, const std::string& what);

// --- multi-factor index bookkeeping ---------------------------------------
// Subsystem 0 is the leftmost tensor factor, i.e. the most significant digit
// of a basis index.

long long total_dim(const std::vector<int>& dims);
std::vector<long long> index_strides(const std::vector<int>& dims);
long long pack_index(const std::vector<int>& dims, const std::vector<int>& digits);
std::vector<int> unpack_index(const std::vector<int>& dims, long long index);

Mat kron(const Mat& a, const Mat& b);
Vec kron_vec(const Vec& a, const Vec& b);

Mat identity(long long dim);
Mat maximally_mixed(long long dim);
Vec basis_vector(long long dim, long long index);

// Trace out every subsystem not listed in `keep`; `keep` must be strictly
// increasing. The result's factor order is the order of `keep`.
Mat partial_trace(const Mat& rho, const std::vector<int>& dims, const std::vector<int>& keep);

// Relabel subsystems: factor i of the input becomes factor perm[i] of the
// output. Works on state vectors and on operators (conjugation).
Vec permute_subsystems(const Vec& psi, const std::vector<int>& dims, const std::vector<int>& perm);
Mat permute_subsystems(const Mat& rho, const std::vector<int>& dims, const std::vector<int>& perm);

// --- state validation and distance measures --------------------------------

// Throws std::invalid_argument with a descriptive message if rho is not a
// density matrix within tolerance: Hermitian, unit trace, smallest eigenvalue
// >= -tol.
void check_density_matrix(const Mat& rho, double tol, const std::string& context);

Mat matrix_sqrt_psd(const Mat& rho);

double trace_norm(const Mat& m);                    // sum of singular values
double trace_distance(const Mat& rho, const Mat& sigma);
double fidelity(const Mat& rho, const Mat& sigma);  // Uhlmann root fidelity
double purified_distance(const Mat& rho, const Mat& sigma);
double operator_inf_norm_herm(const Mat& herm);

// Schmidt coefficients (descending singular values) of a pure bipartite state
// on dimA x dimB.
std::vector<double> schmidt_coefficients(const Vec& psi, long long dim_a, long long dim_b);

// --- deterministic randomness ----------------------------------------------

std::uint64_t splitmix64(std::uint64_t x);
// Deterministic sub-seed derivation used everywhere a master seed spawns
// per-block or per-sample streams.
std::uint64_t sub_seed(std::uint64_t master, std::uint64_t tag);

// mt19937_64 with an explicit Box-Muller gaussian so that sampled values are
// identical across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64();
  double uniform();  // [0, 1)
  double gauss();    // standard normal
  Rng substream(std::uint64_t tag) const { return Rng(sub_seed(seed_, tag)); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 eng_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

// Haar-distributed unitary via Ginibre + QR with the R-diagonal phase fix.
Mat haar_unitary(long long dim, Rng& rng);
Vec random_state_vector(long long dim, Rng& rng);
Mat random_density_matrix(long long dim, long long rank, Rng& rng);

}  // namespace covqec
