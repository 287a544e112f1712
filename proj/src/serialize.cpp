#include "covqec/serialize.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace covqec {

namespace {

constexpr char kMagic[4] = {'C', 'V', 'Q', 'C'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kTagSchur = 1;
constexpr std::uint32_t kTagU1Code = 2;
constexpr std::uint32_t kTagSudCode = 3;

class Writer {
 public:
  explicit Writer(const std::string& path) : path_(path), out_(path + ".tmp", std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path + ".tmp");
  }

  void raw(const char* data, std::streamsize size) { out_.write(data, size); }

  void u32(std::uint32_t v) {
    char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out_.write(buf, 4);
  }

  void u64(std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out_.write(buf, 8);
  }

  void i64(long long v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  void matrix(const Mat& m) {
    i64(m.rows());
    i64(m.cols());
    for (long long c = 0; c < m.cols(); ++c) {
      for (long long r = 0; r < m.rows(); ++r) {
        f64(m(r, c).real());
        f64(m(r, c).imag());
      }
    }
  }

  void partition(const Partition& lambda) {
    u64(lambda.size());
    for (int row : lambda) i64(row);
  }

  void finish() {
    out_.flush();
    if (!out_) throw std::runtime_error("write failed: " + path_ + ".tmp");
    out_.close();
    std::filesystem::rename(path_ + ".tmp", path_);
  }

 private:
  std::string path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw std::runtime_error("cannot open for reading: " + path);
  }

  std::uint32_t u32() {
    char buf[4];
    in_.read(buf, 4);
    require_good();
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
    return v;
  }

  std::uint64_t u64() {
    char buf[8];
    in_.read(buf, 8);
    require_good();
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
    return v;
  }

  long long i64() { return static_cast<long long>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }

  Mat matrix() {
    long long rows = i64();
    long long cols = i64();
    if (rows < 0 || cols < 0 || rows > (1LL << 24) || cols > (1LL << 24)) {
      throw std::runtime_error("corrupt matrix header in " + path_);
    }
    Mat m(rows, cols);
    for (long long c = 0; c < cols; ++c) {
      for (long long r = 0; r < rows; ++r) {
        double re = f64();
        double im = f64();
        m(r, c) = cx(re, im);
      }
    }
    return m;
  }

  Partition partition() {
    std::uint64_t count = u64();
    if (count > 4096) throw std::runtime_error("corrupt partition header in " + path_);
    Partition lambda(count);
    for (auto& row : lambda) row = static_cast<int>(i64());
    return lambda;
  }

  void header(std::uint32_t expected_tag) {
    char magic[4];
    in_.read(magic, 4);
    require_good();
    if (std::memcmp(magic, kMagic, 4) != 0) {
      throw std::runtime_error("bad magic in " + path_);
    }
    std::uint32_t version = u32();
    if (version != kVersion) {
      std::ostringstream msg;
      msg << "unsupported container version " << version << " in " << path_;
      throw std::runtime_error(msg.str());
    }
    std::uint32_t tag = u32();
    if (tag != expected_tag) {
      std::ostringstream msg;
      msg << "payload tag " << tag << " in " << path_ << ", expected " << expected_tag;
      throw std::runtime_error(msg.str());
    }
  }

  void expect_eof() {
    in_.peek();
    if (!in_.eof()) throw std::runtime_error("trailing bytes in " + path_);
  }

 private:
  void require_good() {
    if (!in_) throw std::runtime_error("truncated file: " + path_);
  }

  std::string path_;
  std::ifstream in_;
};

void write_header(Writer& w, std::uint32_t tag) {
  w.raw(kMagic, 4);
  w.u32(kVersion);
  w.u32(tag);
}

void write_unitary(Writer& w, const CommutantUnitary& unitary) {
  w.u32(unitary.kind == CommutantUnitary::Kind::weight_sectors ? 0 : 1);
  w.u64(unitary.blocks.size());
  for (const Mat& block : unitary.blocks) w.matrix(block);
  w.matrix(unitary.assembled);
}

CommutantUnitary read_unitary(Reader& r) {
  CommutantUnitary unitary;
  unitary.kind = r.u32() == 0 ? CommutantUnitary::Kind::weight_sectors
                              : CommutantUnitary::Kind::multiplicity_blocks;
  std::uint64_t count = r.u64();
  if (count > 4096) throw std::runtime_error("corrupt unitary block count");
  unitary.blocks.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) unitary.blocks.push_back(r.matrix());
  unitary.assembled = r.matrix();
  return unitary;
}

}  // namespace

void save_schur_decomposition(const SchurDecomposition& schur, const std::string& path) {
  Writer w(path);
  write_header(w, kTagSchur);
  w.u32(static_cast<std::uint32_t>(schur.n));
  w.u32(static_cast<std::uint32_t>(schur.d));
  w.u64(schur.blocks.size());
  for (const SchurBlock& block : schur.blocks) {
    w.partition(block.shape);
    w.i64(block.unitary_dim);
    w.i64(block.standard_dim);
    w.matrix(block.isometry);
  }
  w.finish();
}

SchurDecomposition load_schur_decomposition(const std::string& path) {
  Reader r(path);
  r.header(kTagSchur);
  SchurDecomposition schur;
  schur.n = static_cast<int>(r.u32());
  schur.d = static_cast<int>(r.u32());
  std::uint64_t count = r.u64();
  if (count > 4096) throw std::runtime_error("corrupt block count in " + path);
  schur.blocks.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    SchurBlock block;
    block.shape = r.partition();
    block.unitary_dim = r.i64();
    block.standard_dim = r.i64();
    block.isometry = r.matrix();
    schur.blocks.push_back(std::move(block));
  }
  r.expect_eof();
  return schur;
}

SchurDecomposition schur_decomposition_cached(int n, int d, const std::string& cache_dir) {
  std::ostringstream name;
  name << cache_dir << "/schur_n" << n << "_d" << d << ".cvqc";
  if (std::filesystem::exists(name.str())) {
    SchurDecomposition loaded = load_schur_decomposition(name.str());
    if (loaded.n != n || loaded.d != d) {
      throw std::runtime_error("cache file " + name.str() + " holds a different (n, d)");
    }
    return loaded;
  }
  SchurDecomposition schur = schur_decomposition(n, d);
  std::filesystem::create_directories(cache_dir);
  save_schur_decomposition(schur, name.str());
  return schur;
}

void save_u1_code(const U1CodeSpec& spec, const CommutantUnitary& unitary,
                  const std::string& path) {
  Writer w(path);
  write_header(w, kTagU1Code);
  w.u32(static_cast<std::uint32_t>(spec.n));
  w.u32(static_cast<std::uint32_t>(spec.k));
  w.u32(static_cast<std::uint32_t>(spec.alpha));
  w.u64(spec.seed);
  write_unitary(w, unitary);
  w.finish();
}

StoredU1Code load_u1_code(const std::string& path) {
  Reader r(path);
  r.header(kTagU1Code);
  StoredU1Code stored;
  stored.spec.n = static_cast<int>(r.u32());
  stored.spec.k = static_cast<int>(r.u32());
  stored.spec.alpha = static_cast<int>(r.u32());
  stored.spec.seed = r.u64();
  stored.unitary = read_unitary(r);
  r.expect_eof();
  return stored;
}

void save_sud_code(const SUdCodeSpec& spec, const CommutantUnitary& unitary,
                   const std::string& path) {
  Writer w(path);
  write_header(w, kTagSudCode);
  w.u32(static_cast<std::uint32_t>(spec.n));
  w.u32(static_cast<std::uint32_t>(spec.d));
  w.partition(spec.lambda);
  w.u32(static_cast<std::uint32_t>(spec.psi_index));
  w.u64(spec.seed);
  write_unitary(w, unitary);
  w.finish();
}

StoredSudCode load_sud_code(const std::string& path) {
  Reader r(path);
  r.header(kTagSudCode);
  StoredSudCode stored;
  stored.spec.n = static_cast<int>(r.u32());
  stored.spec.d = static_cast<int>(r.u32());
  stored.spec.lambda = r.partition();
  stored.spec.psi_index = static_cast<int>(r.u32());
  stored.spec.seed = r.u64();
  stored.unitary = read_unitary(r);
  r.expect_eof();
  return stored;
}

}  // namespace covqec
