#include "pickless/io/mrc.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "pickless/common/errors.hpp"

namespace pickless::io {

static_assert(std::endian::native == std::endian::little, "MRC I/O assumes a little-endian host");

namespace {

constexpr int kHeader = 1024;
constexpr const char* kHashTag = "pickless-config ";

template <class T>
void put(std::array<char, kHeader>& h, int word, T v) {
  std::memcpy(h.data() + 4 * word, &v, sizeof(T));
}

template <class T>
T get(const std::array<char, kHeader>& h, int word) {
  T v;
  std::memcpy(&v, h.data() + 4 * word, sizeof(T));
  return v;
}

}  // namespace

void write_mrc(const std::string& path, const MrcFile& f) {
  require(f.nx > 0 && f.ny > 0 && f.nz > 0, "write_mrc: dimensions must be positive");
  require(f.data.size() == static_cast<size_t>(f.nx) * f.ny * f.nz, "write_mrc: data size mismatch");
  require(f.labels.size() <= 10, "write_mrc: at most 10 labels");
  std::array<char, kHeader> h{};
  put<int32_t>(h, 0, f.nx);
  put<int32_t>(h, 1, f.ny);
  put<int32_t>(h, 2, f.nz);
  put<int32_t>(h, 3, 2);  // mode: float32
  put<int32_t>(h, 7, f.nx);  // sampling
  put<int32_t>(h, 8, f.ny);
  put<int32_t>(h, 9, f.nz);
  put<float>(h, 10, static_cast<float>(f.nx));  // cell in angstrom, 1 per voxel
  put<float>(h, 11, static_cast<float>(f.ny));
  put<float>(h, 12, static_cast<float>(f.nz));
  put<float>(h, 13, 90.0f);
  put<float>(h, 14, 90.0f);
  put<float>(h, 15, 90.0f);
  put<int32_t>(h, 16, 1);
  put<int32_t>(h, 17, 2);
  put<int32_t>(h, 18, 3);
  double mn = 0.0, mx = 0.0, sum = 0.0, sq = 0.0;
  if (!f.data.empty()) {
    mn = mx = f.data[0];
    for (float v : f.data) {
      mn = std::min<double>(mn, v);
      mx = std::max<double>(mx, v);
      sum += v;
    }
  }
  const double mean = sum / f.data.size();
  for (float v : f.data) sq += (v - mean) * (v - mean);
  put<float>(h, 19, static_cast<float>(mn));
  put<float>(h, 20, static_cast<float>(mx));
  put<float>(h, 21, static_cast<float>(mean));
  put<int32_t>(h, 22, f.nz > 1 ? 1 : 0);  // ispg: 1 for volumes, 0 for images
  put<int32_t>(h, 26, 20140);          // nversion
  std::memcpy(h.data() + 208, "MAP ", 4);
  h[212] = 0x44;
  h[213] = 0x44;
  put<float>(h, 54, static_cast<float>(std::sqrt(sq / f.data.size())));
  put<int32_t>(h, 55, static_cast<int32_t>(f.labels.size()));
  for (size_t i = 0; i < f.labels.size(); ++i) {
    const std::string& s = f.labels[i];
    std::memcpy(h.data() + 224 + 80 * i, s.data(), std::min<size_t>(s.size(), 80));
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp);
    out.write(h.data(), kHeader);
    out.write(reinterpret_cast<const char*>(f.data.data()), static_cast<std::streamsize>(f.data.size() * 4));
    if (!out) throw IoError("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("cannot rename " + tmp + " to " + path);
}

MrcFile read_mrc(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::array<char, kHeader> h{};
  if (!in.read(h.data(), kHeader)) throw IoError(path + " is too short for an MRC header");
  if (std::memcmp(h.data() + 208, "MAP ", 4) != 0) throw IoError(path + " is not an MRC2014 file");
  if (h[212] != 0x44) throw IoError(path + " is not little-endian");
  MrcFile f;
  f.nx = get<int32_t>(h, 0);
  f.ny = get<int32_t>(h, 1);
  f.nz = get<int32_t>(h, 2);
  const int mode = get<int32_t>(h, 3);
  if (mode != 2) throw IoError(path + ": only mode 2 (float32) is supported, found mode " + std::to_string(mode));
  if (f.nx <= 0 || f.ny <= 0 || f.nz <= 0) throw IoError(path + ": invalid dimensions");
  const int32_t next = get<int32_t>(h, 23);
  if (next < 0) throw IoError(path + ": invalid extended header size");
  in.seekg(kHeader + next);
  f.data.resize(static_cast<size_t>(f.nx) * f.ny * f.nz);
  if (!in.read(reinterpret_cast<char*>(f.data.data()), static_cast<std::streamsize>(f.data.size() * 4))) {
    throw IoError(path + ": truncated data block");
  }
  const int nlab = std::clamp(get<int32_t>(h, 55), 0, 10);
  for (int i = 0; i < nlab; ++i) {
    std::string s(h.data() + 224 + 80 * i, 80);
    s.erase(std::find(s.begin(), s.end(), '\0'), s.end());
    while (!s.empty() && s.back() == ' ') s.pop_back();
    f.labels.push_back(s);
  }
  return f;
}

void write_image(const std::string& path, const RealImage& img, const std::vector<std::string>& labels) {
  MrcFile f;
  f.nx = static_cast<int>(img.rows());
  f.ny = static_cast<int>(img.cols());
  f.nz = 1;
  f.labels = labels;
  f.data.resize(static_cast<size_t>(f.nx) * f.ny);
  for (int i = 0; i < f.nx; ++i) {
    for (int j = 0; j < f.ny; ++j) f.data[static_cast<size_t>(j) * f.nx + i] = static_cast<float>(img(i, j));
  }
  write_mrc(path, f);
}

void write_volume(const std::string& path, const Volume& vol, const std::vector<std::string>& labels) {
  MrcFile f;
  f.nx = f.ny = f.nz = vol.n;
  f.labels = labels;
  const int n = vol.n;
  f.data.resize(vol.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) f.data[(static_cast<size_t>(k) * n + j) * n + i] = static_cast<float>(vol(i, j, k));
    }
  }
  write_mrc(path, f);
}

RealImage read_image(const std::string& path, std::vector<std::string>* labels) {
  const MrcFile f = read_mrc(path);
  if (f.nz != 1) throw IoError(path + " holds a volume, expected an image");
  RealImage img(f.nx, f.ny);
  for (int i = 0; i < f.nx; ++i) {
    for (int j = 0; j < f.ny; ++j) img(i, j) = f.data[static_cast<size_t>(j) * f.nx + i];
  }
  if (labels) *labels = f.labels;
  return img;
}

Volume read_volume(const std::string& path, std::vector<std::string>* labels) {
  const MrcFile f = read_mrc(path);
  if (f.nx != f.ny || f.ny != f.nz) throw IoError(path + " is not a cubic volume");
  const int n = f.nx;
  Volume v(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) v(i, j, k) = f.data[(static_cast<size_t>(k) * n + j) * n + i];
    }
  }
  if (labels) *labels = f.labels;
  return v;
}

std::string hash_label(const std::string& hex) { return kHashTag + hex; }

std::string find_hash(const std::vector<std::string>& labels) {
  const std::string tag = kHashTag;
  for (const auto& l : labels) {
    if (l.rfind(tag, 0) == 0) return l.substr(tag.size());
  }
  return "";
}

}  // namespace pickless::io
