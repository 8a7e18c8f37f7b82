#pragma once

#include <string>
#include <vector>

#include "pickless/common/types.hpp"

namespace pickless::io {

/// MRC2014, mode 2 (float32), little-endian. Data are stored x fastest.
struct MrcFile {
  int nx = 0, ny = 0, nz = 0;
  std::vector<float> data;          // x + nx * (y + ny * z)
  std::vector<std::string> labels;  // up to 10, 80 characters each
};

void write_mrc(const std::string& path, const MrcFile& file);
MrcFile read_mrc(const std::string& path);

void write_image(const std::string& path, const RealImage& img, const std::vector<std::string>& labels = {});
void write_volume(const std::string& path, const Volume& vol, const std::vector<std::string>& labels = {});
RealImage read_image(const std::string& path, std::vector<std::string>* labels = nullptr);
Volume read_volume(const std::string& path, std::vector<std::string>* labels = nullptr);

/// Label carrying a configuration hash, and its inverse (empty if absent).
std::string hash_label(const std::string& hex);
std::string find_hash(const std::vector<std::string>& labels);

}  // namespace pickless::io
