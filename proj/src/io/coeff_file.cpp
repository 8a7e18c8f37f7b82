#include "pickless/io/coeff_file.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"
#include "pickless/common/errors.hpp"

namespace pickless::io {

using nlohmann::json;

void save_coefficients(const std::string& path, const CoefficientFile& f) {
  json j;
  j["format"] = "pickless-coefficients";
  j["version"] = 1;
  j["c"] = f.c;
  j["L"] = f.L;
  j["ell_max"] = f.x.layout.ell_max();
  j["S"] = f.x.layout.S_of_ell();
  j["config_hash"] = f.config_hash;
  std::vector<double> re(f.x.x.size()), im(f.x.x.size());
  for (Eigen::Index i = 0; i < f.x.x.size(); ++i) {
    re[i] = f.x.x[i].real();
    im[i] = f.x.x[i].imag();
  }
  j["real"] = re;
  j["imag"] = im;
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot write " + tmp);
    out << j.dump() << '\n';
    if (!out) throw IoError("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("cannot rename " + tmp + " to " + path);
}

CoefficientFile load_coefficients(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  CoefficientFile f;
  try {
    const json j = json::parse(in);
    if (j.value("format", "") != "pickless-coefficients") throw IoError(path + " is not a coefficient file");
    if (j.at("version").get<int>() != 1) throw IoError(path + ": unsupported coefficient file version");
    f.c = j.at("c").get<double>();
    f.L = j.at("L").get<int>();
    f.config_hash = j.value("config_hash", "");
    const forward::CoeffLayout lay(j.at("ell_max").get<int>(), j.at("S").get<std::vector<int>>());
    const auto re = j.at("real").get<std::vector<double>>();
    const auto im = j.at("imag").get<std::vector<double>>();
    if (static_cast<int>(re.size()) != lay.size() || im.size() != re.size()) {
      throw IoError(path + ": coefficient count does not match the layout");
    }
    f.x = forward::VolumeCoefficients(lay);
    for (int i = 0; i < lay.size(); ++i) f.x.x[i] = cdouble(re[i], im[i]);
  } catch (const json::exception& e) {
    throw IoError(path + ": malformed coefficient file (" + e.what() + ")");
  }
  return f;
}

void check_compatible(const CoefficientFile& f, const basis::BandlimitParams& params, const std::string& what) {
  if (std::abs(f.c - params.c) > 1e-12 || f.L != params.L) {
    throw ValidationError(what + ": coefficients were made for c = " + std::to_string(f.c) +
                          ", L = " + std::to_string(f.L) + " but the configuration has c = " +
                          std::to_string(params.c) + ", L = " + std::to_string(params.L));
  }
  if (f.x.layout.ell_max() > params.ell_max) {
    throw ValidationError(what + ": coefficient ell_max exceeds the configured basis");
  }
  for (int l = 0; l <= f.x.layout.ell_max(); ++l) {
    if (f.x.layout.S(l) > params.S_of_ell[l]) throw ValidationError(what + ": radial count exceeds the basis");
  }
}

}  // namespace pickless::io
