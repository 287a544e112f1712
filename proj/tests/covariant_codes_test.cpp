#include "covqec/covariant_codes.hpp"

#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "covqec/serialize.hpp"
#include "doctest.h"

using namespace covqec;

namespace {

std::filesystem::path fresh_dir(const std::string& leaf) {
  auto dir = std::filesystem::temp_directory_path() / leaf;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

long long weight_of(long long x) { return std::popcount(static_cast<std::uint64_t>(x)); }

}  // namespace

TEST_CASE("code specs are validated") {
  CHECK_NOTHROW(check_u1_spec({6, 1, 3, 0}));
  CHECK_NOTHROW(check_u1_spec({6, 1, 0, 0}));  // zero-weight ancilla is allowed here
  CHECK_THROWS_AS(check_u1_spec({6, 0, 3, 0}), std::invalid_argument);  // no logical qubits
  CHECK_THROWS_AS(check_u1_spec({6, 6, 1, 0}), std::invalid_argument);  // k must stay below n
  CHECK_THROWS_AS(check_u1_spec({6, 1, 6, 0}), std::invalid_argument);  // alpha > n - k
  CHECK_THROWS_AS(check_u1_spec({-1, 1, 1, 0}), std::invalid_argument);

  SUdCodeSpec good{4, 2, {3}, 0, 0};
  CHECK_NOTHROW(check_sud_spec(good));
  SUdCodeSpec wrong_weight{4, 2, {3, 1}, 0, 0};  // |lambda| must be n - 1
  CHECK_THROWS_AS(check_sud_spec(wrong_weight), std::invalid_argument);
  SUdCodeSpec too_many_rows{4, 2, {1, 1, 1}, 0, 0};
  CHECK_THROWS_AS(check_sud_spec(too_many_rows), std::invalid_argument);
}

TEST_CASE("u1 sampler draws an independent Haar block per weight sector") {
  int n = 5;
  auto unitary = sample_u1_unitary(n, 99);
  REQUIRE(unitary.kind == CommutantUnitary::Kind::weight_sectors);
  REQUIRE(unitary.blocks.size() == static_cast<std::size_t>(n + 1));
  auto sectors = hamming_sectors(n);
  for (int w = 0; w <= n; ++w) {
    long long size = static_cast<long long>(sectors[w].size());
    CHECK(unitary.blocks[w].rows() == size);
    Mat gram = unitary.blocks[w] * unitary.blocks[w].adjoint();
    CHECK((gram - identity(size)).cwiseAbs().maxCoeff() < 1e-12);
  }
  Mat gram = unitary.assembled * unitary.assembled.adjoint();
  CHECK((gram - identity(1 << n)).cwiseAbs().maxCoeff() < 1e-12);

  // Assembly places each block inside its own sector: no cross-weight entries.
  for (long long i = 0; i < (1 << n); ++i)
    for (long long j = 0; j < (1 << n); ++j) {
      if (weight_of(i) != weight_of(j)) CHECK(unitary.assembled(i, j) == cx(0, 0));
    }

  auto again = sample_u1_unitary(n, 99);
  CHECK((again.assembled - unitary.assembled).cwiseAbs().maxCoeff() == 0.0);
  auto other = sample_u1_unitary(n, 100);
  CHECK((other.assembled - unitary.assembled).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("u1 encoding is an isometry that fixes the total charge") {
  U1CodeSpec spec{6, 2, 2, 31};
  auto unitary = sample_u1_unitary(spec.n, spec.seed);
  Mat iso = u1_encoding_isometry(spec, unitary);
  REQUIRE(iso.rows() == 64);
  REQUIRE(iso.cols() == 4);
  CHECK((iso.adjoint() * iso - identity(4)).cwiseAbs().maxCoeff() < 1e-12);

  // |x> must land entirely in the weight sector wt(x) + alpha.
  for (long long x = 0; x < 4; ++x) {
    long long target = weight_of(x) + spec.alpha;
    for (long long a = 0; a < 64; ++a) {
      if (weight_of(a) != target) CHECK(std::abs(iso(a, x)) == 0.0);
    }
  }

  Mat logical = Mat::Zero(4, 4);
  logical(0, 0) = 0.5;
  logical(3, 3) = 0.5;
  Mat encoded = encode_u1(spec, unitary, logical);
  CHECK(std::abs(encoded.trace().real() - 1.0) < 1e-12);

  auto small = sample_u1_unitary(4, 1);
  CHECK_THROWS_AS(u1_encoding_isometry(spec, small), std::invalid_argument);
}

TEST_CASE("sampled codes are phase covariant; unrestricted Haar is not") {
  U1CodeSpec spec{6, 1, 3, 7};
  Rng rng(5);
  for (std::uint64_t seed = 20; seed < 25; ++seed) {
    auto unitary = sample_u1_unitary(spec.n, seed);
    CHECK(check_covariance_u1(spec, unitary, 4, rng) < 1e-9);
  }

  // Negative control: a Haar unitary on the full space has no weight
  // structure, so the covariance residual should be macroscopic.
  int violations = 0;
  const int controls = 40;
  Rng control_rng(6);
  for (int trial = 0; trial < controls; ++trial) {
    CommutantUnitary full;
    full.kind = CommutantUnitary::Kind::weight_sectors;
    full.assembled = haar_unitary(1 << spec.n, control_rng);
    if (check_covariance_u1(spec, full, 2, control_rng) > 0.01) ++violations;
  }
  CHECK(violations >= 38);
}

TEST_CASE("left composition with a fixed sector unitary preserves the code law") {
  // Haar left invariance per block: pre-rotating every sample by the same
  // commutant unitary must leave sampled statistics unchanged.
  U1CodeSpec spec{5, 1, 2, 0};
  auto fixed = sample_u1_unitary(spec.n, 123456);
  Rng ref_rng(77);
  Vec probe = random_state_vector(1 << spec.n, ref_rng);

  auto statistic = [&](const CommutantUnitary& unitary) {
    Mat iso = u1_encoding_isometry(spec, unitary);
    return std::norm(cx(probe.adjoint() * iso.col(0)));
  };

  const int trials = 80;
  double mean_plain = 0.0, mean_composed = 0.0, sq_plain = 0.0, sq_composed = 0.0;
  for (int i = 0; i < trials; ++i) {
    auto sample = sample_u1_unitary(spec.n, 1000 + i);
    double a = statistic(sample);
    CommutantUnitary composed = sample;
    composed.assembled = fixed.assembled * sample.assembled;
    for (std::size_t w = 0; w < sample.blocks.size(); ++w) {
      composed.blocks[w] = fixed.blocks[w] * sample.blocks[w];
    }
    double b = statistic(composed);
    mean_plain += a;
    mean_composed += b;
    sq_plain += a * a;
    sq_composed += b * b;
  }
  mean_plain /= trials;
  mean_composed /= trials;
  double var = (sq_plain / trials - mean_plain * mean_plain) +
               (sq_composed / trials - mean_composed * mean_composed);
  double sigma = std::sqrt(var / trials);
  CHECK(std::abs(mean_plain - mean_composed) < 5.0 * sigma + 1e-12);
}

TEST_CASE("u1 choi vector purifies the encoded maximally entangled pair") {
  U1CodeSpec spec{5, 2, 2, 9};
  auto unitary = sample_u1_unitary(spec.n, spec.seed);
  Vec choi = u1_choi_vector(spec, unitary);
  REQUIRE(choi.size() == (1 << spec.n) * (1 << spec.k));
  CHECK(choi.norm() == doctest::Approx(1.0).epsilon(1e-12));

  Mat iso = u1_encoding_isometry(spec, unitary);
  Vec expect = Vec::Zero(choi.size());
  long long dk = 1 << spec.k;
  for (long long x = 0; x < dk; ++x) {
    for (long long a = 0; a < (1 << spec.n); ++a) {
      expect(a * dk + x) += iso(a, x) / std::sqrt(static_cast<double>(dk));
    }
  }
  CHECK((choi - expect).cwiseAbs().maxCoeff() < 1e-12);

  Mat rho = choi * choi.adjoint();
  Mat r_marginal = partial_trace(rho, {1 << spec.n, 1 << spec.k}, {1});
  CHECK((r_marginal - maximally_mixed(dk)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sud sampler lives in the commutant of the collective action") {
  auto schur = schur_decomposition(4, 2);
  auto unitary = sample_sud_unitary(schur, 17);
  REQUIRE(unitary.kind == CommutantUnitary::Kind::multiplicity_blocks);
  REQUIRE(unitary.blocks.size() == schur.blocks.size());
  Mat gram = unitary.assembled * unitary.assembled.adjoint();
  CHECK((gram - identity(16)).cwiseAbs().maxCoeff() < 1e-11);

  Rng rng(3);
  for (int trial = 0; trial < 3; ++trial) {
    Mat u = haar_unitary(2, rng);
    Mat un = kron(kron(kron(u, u), u), u);
    CHECK((unitary.assembled * un - un * unitary.assembled).cwiseAbs().maxCoeff() < 1e-10);
  }

  auto again = sample_sud_unitary(schur, 17);
  CHECK((again.assembled - unitary.assembled).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sud gauge state is the block maximally mixed gauge with a pure multiplicity") {
  auto schur3 = schur_decomposition(3, 2);
  for (const Partition& lambda : {Partition{3}, Partition{2, 1}}) {
    SUdCodeSpec spec{4, 2, lambda, 0, 5};
    Mat gauge = sud_gauge_state(spec, schur3);
    CHECK(std::abs(gauge.trace().real() - 1.0) < 1e-12);
    CHECK((gauge - gauge.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

    const auto& block = schur3.block(lambda);
    Mat proj = block.isometry * block.isometry.adjoint();
    CHECK((proj * gauge * proj - gauge).cwiseAbs().maxCoeff() < 1e-12);

    // I_L / l (x) pure multiplicity vector has purity exactly 1 / l.
    double purity = (gauge * gauge).trace().real();
    CHECK(purity == doctest::Approx(1.0 / block.unitary_dim).epsilon(1e-10));
  }

  SUdCodeSpec bad_psi{4, 2, {3}, 9, 5};
  CHECK_THROWS_AS(sud_gauge_state(bad_psi, schur3), std::invalid_argument);
}

TEST_CASE("sud encoding is covariant and its choi state has a mixed logical marginal") {
  auto schur3 = schur_decomposition(3, 2);
  SUdCodeSpec spec{4, 2, {2, 1}, 0, 21};
  auto schur4 = schur_decomposition(4, 2);
  auto unitary = sample_sud_unitary(schur4, spec.seed);

  Rng rng(14);
  CHECK(check_covariance_sud(spec, unitary, schur3, 4, rng) < 1e-9);

  Mat choi = sud_choi_state(spec, unitary, schur3);
  CHECK(std::abs(choi.trace().real() - 1.0) < 1e-11);
  Eigen::SelfAdjointEigenSolver<Mat> es(choi);
  CHECK(es.eigenvalues().minCoeff() > -1e-11);
  Mat r_marginal = partial_trace(choi, {16, 2}, {1});
  CHECK((r_marginal - maximally_mixed(2)).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("stored codes round-trip bit for bit") {
  auto dir = fresh_dir("covqec_serialize_test");

  SUBCASE("u1 code") {
    U1CodeSpec spec{5, 1, 2, 4242};
    auto unitary = sample_u1_unitary(spec.n, spec.seed);
    auto path = (dir / "code.cvqc").string();
    save_u1_code(spec, unitary, path);
    auto loaded = load_u1_code(path);
    CHECK(loaded.spec.n == spec.n);
    CHECK(loaded.spec.k == spec.k);
    CHECK(loaded.spec.alpha == spec.alpha);
    CHECK(loaded.spec.seed == spec.seed);
    CHECK(loaded.unitary.kind == unitary.kind);
    REQUIRE(loaded.unitary.blocks.size() == unitary.blocks.size());
    for (std::size_t w = 0; w < unitary.blocks.size(); ++w) {
      CHECK((loaded.unitary.blocks[w] - unitary.blocks[w]).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK((loaded.unitary.assembled - unitary.assembled).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("sud code") {
    auto schur = schur_decomposition(4, 2);
    SUdCodeSpec spec{4, 2, {2, 1}, 1, 11};
    auto unitary = sample_sud_unitary(schur, spec.seed);
    auto path = (dir / "sud.cvqc").string();
    save_sud_code(spec, unitary, path);
    auto loaded = load_sud_code(path);
    CHECK(loaded.spec.lambda == spec.lambda);
    CHECK(loaded.spec.psi_index == spec.psi_index);
    CHECK((loaded.unitary.assembled - unitary.assembled).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("schur decomposition and its cache") {
    auto schur = schur_decomposition(3, 2);
    auto path = (dir / "schur.cvqc").string();
    save_schur_decomposition(schur, path);
    auto loaded = load_schur_decomposition(path);
    REQUIRE(loaded.blocks.size() == schur.blocks.size());
    for (std::size_t i = 0; i < schur.blocks.size(); ++i) {
      CHECK(loaded.blocks[i].shape == schur.blocks[i].shape);
      CHECK((loaded.blocks[i].isometry - schur.blocks[i].isometry).cwiseAbs().maxCoeff() == 0.0);
    }

    auto cache = (dir / "cache").string();
    auto first = schur_decomposition_cached(3, 2, cache);
    CHECK(std::filesystem::exists(std::filesystem::path(cache) / "schur_n3_d2.cvqc"));
    auto second = schur_decomposition_cached(3, 2, cache);
    for (std::size_t i = 0; i < first.blocks.size(); ++i) {
      CHECK((first.blocks[i].isometry - second.blocks[i].isometry).cwiseAbs().maxCoeff() == 0.0);
      CHECK((first.blocks[i].isometry - schur.blocks[i].isometry).cwiseAbs().maxCoeff() == 0.0);
    }
  }

  SUBCASE("malformed files are rejected with the path in the message") {
    auto path = (dir / "broken.cvqc").string();
    {
      std::ofstream out(path, std::ios::binary);
      out << "not a container";
    }
    CHECK_THROWS_WITH_AS(load_u1_code(path), doctest::Contains("broken.cvqc"),
                         std::runtime_error);

    // Wrong payload tag: a stored schur decomposition is not a u1 code.
    auto schur_path = (dir / "tagged.cvqc").string();
    save_schur_decomposition(schur_decomposition(2, 2), schur_path);
    CHECK_THROWS_AS(load_u1_code(schur_path), std::runtime_error);

    // Truncation is detected.
    auto full_path = (dir / "full.cvqc").string();
    U1CodeSpec spec{4, 1, 1, 1};
    save_u1_code(spec, sample_u1_unitary(4, 1), full_path);
    auto bytes_size = std::filesystem::file_size(full_path);
    std::filesystem::resize_file(full_path, bytes_size / 2);
    CHECK_THROWS_AS(load_u1_code(full_path), std::runtime_error);

    CHECK_THROWS_AS(load_u1_code((dir / "missing.cvqc").string()), std::runtime_error);
  }
}
