#include "pickless/basis/cache.hpp"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pickless/common/errors.hpp"
#include "pickless/common/hash.hpp"

namespace pickless::basis {

namespace {

constexpr char kMagic[8] = {'P', 'K', 'L', 'S', 'B', 'A', 'S', 'E'};

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}
  template <class T>
  void pod(const T& v) {
    os_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  template <class T>
  void vec(const std::vector<T>& v) {
    pod<uint64_t>(v.size());
    os_.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
  }
  template <class M>
  void mat(const M& m) {
    pod<int64_t>(m.rows());
    pod<int64_t>(m.cols());
    os_.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(m.size() * sizeof(typename M::Scalar)));
  }

 private:
  std::ostream& os_;
};

class Reader {
 public:
  explicit Reader(std::istream& is) : is_(is) {}
  template <class T>
  T pod() {
    T v;
    read(&v, sizeof(T));
    return v;
  }
  template <class T>
  std::vector<T> vec() {
    const auto n = pod<uint64_t>();
    if (n > (1ULL << 32)) throw IoError("basis cache: implausible array length");
    std::vector<T> v(n);
    read(v.data(), n * sizeof(T));
    return v;
  }
  template <class M>
  M mat() {
    const auto r = pod<int64_t>(), c = pod<int64_t>();
    if (r < 0 || c < 0 || r * c > (1LL << 32)) throw IoError("basis cache: implausible matrix shape");
    M m(r, c);
    read(m.data(), static_cast<size_t>(r * c) * sizeof(typename M::Scalar));
    return m;
  }

 private:
  void read(void* dst, size_t n) {
    is_.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (!is_) throw IoError("basis cache: truncated file");
  }
  std::istream& is_;
};

}  // namespace

class PswfSerializer {
 public:
  static void write(const PswfBasis& b, std::ostream& os) {
    Writer w(os);
    os.write(kMagic, sizeof(kMagic));
    w.pod(kBasisCacheVersion);
    const auto& p = b.params_;
    w.pod(p.c);
    w.pod<int32_t>(p.L);
    w.pod<int32_t>(p.ell_max);
    w.pod(p.pswf_threshold);
    w.vec(p.S_of_ell);
    w.vec(b.n_count_);
    for (const auto& per_n : b.coeffs_) {
      for (const auto& v : per_n) w.mat(v);
    }
    for (const auto& l : b.lambda_) w.vec(l);
    w.vec(b.alpha_);
    w.mat(b.psi_);
    w.vec(b.rnodes_);
    w.vec(b.rweights_);
    w.mat(b.rsamples_);
  }

  static PswfBasis read(std::istream& is, const BandlimitParams& expect) {
    char magic[sizeof(kMagic)];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw IoError("basis cache: bad magic");
    Reader r(is);
    if (r.pod<uint32_t>() != kBasisCacheVersion) throw IoError("basis cache: unsupported version");
    const double c = r.pod<double>();
    const int L = r.pod<int32_t>();
    const int ell_max = r.pod<int32_t>();
    const double thr = r.pod<double>();
    const auto S = r.vec<int>();
    require(c == expect.c && L == expect.L && ell_max == expect.ell_max && thr == expect.pswf_threshold &&
                S == expect.S_of_ell,
            "basis cache: stored parameters do not match the request");
    PswfBasis b;
    b.params_ = expect;
    b.n_count_ = r.vec<int>();
    for (int N = 0; N < static_cast<int>(b.n_count_.size()); ++N) {
      std::vector<RealVector> per_n;
      for (int n = 0; n < b.n_count_[N]; ++n) per_n.push_back(r.mat<RealMatrix>());
      b.coeffs_.push_back(std::move(per_n));
    }
    for (size_t N = 0; N < b.n_count_.size(); ++N) b.lambda_.push_back(r.vec<double>());
    b.alpha_ = r.vec<cdouble>();
    b.psi_ = r.mat<ComplexMatrix>();
    b.rnodes_ = r.vec<double>();
    b.rweights_ = r.vec<double>();
    b.rsamples_ = r.mat<RealMatrix>();
    const int Nm = b.N_max();
    for (int N = -Nm; N <= Nm; ++N) {
      for (int n = 0; n < b.n_count(N); ++n) b.entries_.push_back({N, n});
    }
    if (b.alpha_.size() != b.entries_.size() || b.psi_.cols() != static_cast<int>(b.entries_.size()) ||
        b.psi_.rows() != L * L) {
      throw IoError("basis cache: inconsistent table sizes");
    }
    return b;
  }
};

std::string basis_cache_key(const BandlimitParams& p, int radial_nodes) {
  std::ostringstream os;
  os.precision(17);
  os << "v" << kBasisCacheVersion << ";c=" << p.c << ";L=" << p.L << ";ell=" << p.ell_max
     << ";thr=" << p.pswf_threshold << ";nodes=" << radial_nodes << ";S=";
  for (int s : p.S_of_ell) os << s << ",";
  return "basis_L" + std::to_string(p.L) + "_ell" + std::to_string(p.ell_max) + "_" + to_hex(fnv1a64(os.str()));
}

void save_basis(const PswfBasis& basis, const std::filesystem::path& path) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot write basis cache " + tmp.string());
    PswfSerializer::write(basis, os);
    if (!os) throw IoError("failed writing basis cache " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

PswfBasis load_basis(const std::filesystem::path& path, const BandlimitParams& params) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open basis cache " + path.string());
  return PswfSerializer::read(is, params);
}

std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("PICKLESS_CACHE_DIR"); env && *env) return env;
  return ".pickless-cache";
}

PswfBasis load_or_build_basis(const BandlimitParams& params, const std::filesystem::path& dir, bool* hit) {
  const auto path = dir / (basis_cache_key(params) + ".bin");
  if (std::filesystem::exists(path)) {
    if (hit) *hit = true;
    return load_basis(path, params);
  }
  if (hit) *hit = false;
  auto b = build_pswf_basis(params);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create cache directory " + dir.string());
  save_basis(b, path);
  return b;
}

}  // namespace pickless::basis
