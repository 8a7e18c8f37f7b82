#include "pickless/io/manifest.hpp"

#include <fstream>

#include "pickless/common/errors.hpp"

namespace pickless::io {

using nlohmann::json;

void save_manifest(const std::string& path, const Manifest& m) {
  json j;
  j["format"] = "pickless-manifest";
  j["version"] = 1;
  j["config_hash"] = m.config_hash;
  j["config"] = m.config;
  j["truth_coefficients"] = m.truth_coefficients;
  j["truth_volume"] = m.truth_volume;
  j["shift_convention"] = "patch corner (u, v), projection corner (x, y): shift = ((u - x) mod 2L, (v - y) mod 2L)";
  j["micrographs"] = json::array();
  for (const auto& e : m.micrographs) {
    json mj = {{"file", e.file}, {"N", e.N}, {"L_proj", e.L_proj}, {"sigma2", e.sigma2}};
    mj["placements"] = json::array();
    for (const auto& p : e.placements) {
      const auto& q = p.rotation.quaternion();
      mj["placements"].push_back({{"x", p.x}, {"y", p.y}, {"quaternion", {q[0], q[1], q[2], q[3]}}, {"energy", p.energy}});
    }
    j["micrographs"].push_back(mj);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(1) << '\n';
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path);
  Manifest m;
  try {
    const json j = json::parse(in);
    if (j.value("format", "") != "pickless-manifest") throw IoError(path + " is not a manifest");
    m.config_hash = j.at("config_hash").get<std::string>();
    m.config = j.at("config");
    m.truth_coefficients = j.value("truth_coefficients", "");
    m.truth_volume = j.value("truth_volume", "");
    for (const auto& mj : j.at("micrographs")) {
      MicrographEntry e;
      e.file = mj.at("file").get<std::string>();
      e.N = mj.at("N").get<int>();
      e.L_proj = mj.at("L_proj").get<int>();
      e.sigma2 = mj.at("sigma2").get<double>();
      for (const auto& pj : mj.at("placements")) {
        simulate::Placement p;
        p.x = pj.at("x").get<int>();
        p.y = pj.at("y").get<int>();
        const auto q = pj.at("quaternion").get<std::vector<double>>();
        if (q.size() != 4) throw IoError(path + ": quaternion needs 4 entries");
        p.rotation = basis::Rotation::from_quaternion(q[0], q[1], q[2], q[3]);
        p.energy = pj.at("energy").get<double>();
        e.placements.push_back(p);
      }
      m.micrographs.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw IoError(path + ": malformed manifest (" + e.what() + ")");
  }
  return m;
}

std::vector<simulate::Micrograph> manifest_micrographs(const Manifest& m) {
  std::vector<simulate::Micrograph> out;
  for (const auto& e : m.micrographs) {
    simulate::Micrograph g;
    g.sigma2 = e.sigma2;
    g.L_proj = e.L_proj;
    g.placements = e.placements;
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace pickless::io
