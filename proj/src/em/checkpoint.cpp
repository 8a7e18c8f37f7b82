#include "pickless/em/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pickless/common/errors.hpp"
#include "pickless/common/hash.hpp"

namespace pickless::em {

namespace {

constexpr char kMagic[8] = {'P', 'K', 'L', 'S', 'C', 'K', 'P', 'T'};

class Writer {
 public:
  template <class T>
  void pod(const T& v) {
    buf_.append(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void str(const std::string& s) {
    pod<uint64_t>(s.size());
    buf_ += s;
  }
  void doubles(const double* d, size_t n) {
    pod<uint64_t>(n);
    buf_.append(reinterpret_cast<const char*>(d), n * sizeof(double));
  }
  const std::string& data() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(const std::string& d, std::string path) : d_(d), path_(std::move(path)) {}
  template <class T>
  T pod() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, d_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string str() {
    const uint64_t n = pod<uint64_t>();
    need(n);
    std::string s = d_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::vector<double> doubles() {
    const uint64_t n = pod<uint64_t>();
    need(n * sizeof(double));
    std::vector<double> v(n);
    std::memcpy(v.data(), d_.data() + pos_, n * sizeof(double));
    pos_ += n * sizeof(double);
    return v;
  }
  size_t pos() const { return pos_; }

 private:
  void need(uint64_t n) {
    if (n > d_.size() - pos_) throw IoError("checkpoint " + path_ + " is truncated");
  }
  const std::string& d_;
  std::string path_;
  size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const std::string& path, const EmState& st) {
  Writer w;
  w.pod(kCheckpointVersion);
  w.pod<uint64_t>(st.config_hash);
  w.pod<int32_t>(st.k);
  w.pod<int32_t>(st.stage);
  w.pod<int32_t>(st.stage_iter);
  w.pod<uint8_t>(st.finished ? 1 : 0);
  const auto& lay = st.x.layout;
  w.pod<int32_t>(lay.ell_max());
  for (int l = 0; l <= lay.ell_max(); ++l) w.pod<int32_t>(lay.S(l));
  w.doubles(reinterpret_cast<const double*>(st.x.x.data()), 2 * static_cast<size_t>(st.x.x.size()));
  w.doubles(st.rho.data(), st.rho.size());
  w.pod<uint64_t>(st.history.size());
  for (const auto& r : st.history) {
    w.pod<int32_t>(r.k);
    w.pod<int32_t>(r.stage);
    w.pod<int32_t>(r.ell_max);
    w.pod<int32_t>(r.batch);
    for (double d : {r.loglik, r.q_old, r.q_new, r.validation, r.seconds}) w.pod(d);
    w.pod<uint8_t>(r.ridge ? 1 : 0);
  }
  std::ostringstream rs;
  rs << st.rng;
  w.str(rs.str());
  w.pod<uint64_t>(st.validation_idx.size());
  for (int i : st.validation_idx) w.pod<int32_t>(i);
  const std::string& body = w.data();
  const uint64_t check = fnv1a64(body);

  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write checkpoint " + tmp);
    f.write(kMagic, sizeof(kMagic));
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    f.write(reinterpret_cast<const char*>(&check), sizeof(check));
    if (!f) throw IoError("write failed for checkpoint " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("cannot rename checkpoint to " + path);
}

EmState load_checkpoint(const std::string& path, uint64_t expected_hash) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open checkpoint " + path);
  std::string all((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (all.size() < sizeof(kMagic) + 8 || std::memcmp(all.data(), kMagic, sizeof(kMagic)) != 0) {
    throw IoError(path + " is not a checkpoint file");
  }
  const std::string body = all.substr(sizeof(kMagic), all.size() - sizeof(kMagic) - 8);
  uint64_t check;
  std::memcpy(&check, all.data() + all.size() - 8, 8);
  if (check != fnv1a64(body)) throw IoError("checkpoint " + path + " failed its checksum");

  Reader r(body, path);
  const auto version = r.pod<uint32_t>();
  if (version != kCheckpointVersion) {
    throw IoError("checkpoint " + path + " has version " + std::to_string(version) + ", expected " +
                  std::to_string(kCheckpointVersion));
  }
  EmState st;
  st.config_hash = r.pod<uint64_t>();
  if (expected_hash != 0 && st.config_hash != expected_hash) {
    throw ValidationError("checkpoint " + path + " was written with a different configuration (hash " +
                          to_hex(st.config_hash) + ", current " + to_hex(expected_hash) + ")");
  }
  st.k = r.pod<int32_t>();
  st.stage = r.pod<int32_t>();
  st.stage_iter = r.pod<int32_t>();
  st.finished = r.pod<uint8_t>() != 0;
  const int lmax = r.pod<int32_t>();
  if (lmax < 0 || lmax > 1000) throw IoError("checkpoint " + path + " has a corrupt layout");
  std::vector<int> S(lmax + 1);
  for (auto& s : S) s = r.pod<int32_t>();
  st.x = forward::VolumeCoefficients(forward::CoeffLayout(lmax, S));
  const auto xs = r.doubles();
  if (xs.size() != 2 * static_cast<size_t>(st.x.x.size())) throw IoError("checkpoint " + path + ": size mismatch");
  for (Eigen::Index i = 0; i < st.x.x.size(); ++i) st.x.x[i] = cdouble(xs[2 * i], xs[2 * i + 1]);
  const auto rho = r.doubles();
  st.rho = Eigen::Map<const RealVector>(rho.data(), static_cast<Eigen::Index>(rho.size()));
  const auto nh = r.pod<uint64_t>();
  for (uint64_t i = 0; i < nh; ++i) {
    IterationRecord rec;
    rec.k = r.pod<int32_t>();
    rec.stage = r.pod<int32_t>();
    rec.ell_max = r.pod<int32_t>();
    rec.batch = r.pod<int32_t>();
    rec.loglik = r.pod<double>();
    rec.q_old = r.pod<double>();
    rec.q_new = r.pod<double>();
    rec.validation = r.pod<double>();
    rec.seconds = r.pod<double>();
    rec.ridge = r.pod<uint8_t>() != 0;
    st.history.push_back(rec);
  }
  std::istringstream rs(r.str());
  rs >> st.rng;
  if (!rs) throw IoError("checkpoint " + path + " has a corrupt RNG state");
  const auto nv = r.pod<uint64_t>();
  for (uint64_t i = 0; i < nv; ++i) st.validation_idx.push_back(r.pod<int32_t>());
  return st;
}

}  // namespace pickless::em
