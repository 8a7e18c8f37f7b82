#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <chrono>
#include <cstring>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "pickless/common/errors.hpp"
#include "pickless/forward/coefficients.hpp"
#include "pickless/io/coeff_file.hpp"
#include "pickless/io/config.hpp"
#include "pickless/io/manifest.hpp"
#include "pickless/io/mrc.hpp"

namespace fs = std::filesystem;
using namespace pickless;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pickless_test_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int run(const std::string& args) {
  const std::string cmd = std::string(PICKLESS_CLI) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("mrc roundtrip") {
  const auto dir = scratch("mrc");
  std::mt19937_64 rng(3);
  std::normal_distribution<float> nd;
  RealImage img(7, 5);
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 5; ++j) img(i, j) = nd(rng);
  }
  const auto path = (dir / "a.mrc").string();
  io::write_image(path, img, {io::hash_label("00ff"), "second"});
  std::vector<std::string> labels;
  const RealImage back = io::read_image(path, &labels);
  REQUIRE(back.rows() == 7);
  REQUIRE(back.cols() == 5);
  CHECK((back - img).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(labels.size() == 2);
  CHECK(io::find_hash(labels) == "00ff");
  CHECK(io::find_hash({"nothing"}).empty());

  const std::string raw = slurp(path);
  REQUIRE(raw.size() == 1024 + 4 * 35);
  CHECK(raw.substr(208, 4) == "MAP ");
  CHECK(static_cast<unsigned char>(raw[212]) == 0x44);
  CHECK(static_cast<unsigned char>(raw[213]) == 0x44);
  int32_t mode = -1;
  std::memcpy(&mode, raw.data() + 12, 4);
  CHECK(mode == 2);

  Volume v(4);
  for (size_t i = 0; i < v.data.size(); ++i) v.data[i] = static_cast<double>(nd(rng));
  io::write_volume((dir / "v.mrc").string(), v);
  const Volume vb = io::read_volume((dir / "v.mrc").string());
  REQUIRE(vb.n == 4);
  CHECK(vb.data == v.data);

  std::ofstream((dir / "bad.mrc").string()) << "short";
  CHECK_THROWS_AS(io::read_image((dir / "bad.mrc").string()), IoError);
  CHECK_THROWS_AS(io::read_image((dir / "missing.mrc").string()), IoError);
}

TEST_CASE("config parsing and overrides") {
  const io::ExperimentConfig d;
  const auto rt = io::from_json(io::to_json(d));
  CHECK(io::to_json(rt) == io::to_json(d));
  CHECK(rt.hash() == d.hash());

  CHECK_THROWS_AS(io::from_json(nlohmann::json{{"basis", {{"Lx", 3}}}}), ValidationError);
  CHECK_THROWS_AS(io::from_json(nlohmann::json{{"basis", {{"L", "nine"}}}}), ValidationError);
  CHECK_THROWS_AS(io::from_json(nlohmann::json{{"bogus", 1}}), ValidationError);

  const auto o = io::apply_overrides(d, {"basis.L=11", "simulate.snr=3.5", "em.stages=[{\"ell_max\":3,\"iterations\":2}]"});
  CHECK(o.basis.L == 11);
  CHECK(o.simulate.sim.snr == doctest::Approx(3.5));
  REQUIRE(o.em.em.stages.size() == 1);
  CHECK(o.em.em.stages[0].ell_max == 3);
  CHECK(o.hash() != d.hash());
  CHECK_THROWS_AS(io::apply_overrides(d, {"basis.nope=1"}), ValidationError);

  // Output location and thread count do not enter the hash.
  auto t = d;
  t.output = "elsewhere";
  t.threads = 3;
  CHECK(t.hash() == d.hash());

  const auto dir = scratch("config");
  io::save_config((dir / "c.json").string(), o);
  CHECK(io::load_config((dir / "c.json").string()).hash() == o.hash());
}

TEST_CASE("coefficient and manifest files") {
  const auto dir = scratch("files");
  const auto params = basis::make_bandlimit_params(0.5, 7, 2);
  const auto x = forward::random_coefficients(forward::CoeffLayout(params), 5);
  io::CoefficientFile f;
  f.x = x;
  f.c = 0.5;
  f.L = 7;
  f.config_hash = "abc";
  io::save_coefficients((dir / "x.json").string(), f);
  const auto back = io::load_coefficients((dir / "x.json").string());
  CHECK(back.config_hash == "abc");
  CHECK(back.x.x == x.x);
  io::check_compatible(back, params, "x");
  CHECK_THROWS_AS(io::check_compatible(back, basis::make_bandlimit_params(0.5, 9, 2), "x"), ValidationError);

  io::Manifest m;
  m.config_hash = "abc";
  m.config = {{"k", 1}};
  m.truth_coefficients = "x.json";
  m.truth_volume = "v.mrc";
  simulate::Placement p;
  p.x = 3;
  p.y = 4;
  p.rotation = basis::Rotation::from_euler_zyz(0.1, 0.2, 0.3);
  p.energy = 2.5;
  m.micrographs.push_back({"m0.mrc", 64, 7, 0.25, {p}});
  io::save_manifest((dir / "m.json").string(), m);
  const auto mb = io::load_manifest((dir / "m.json").string());
  REQUIRE(mb.micrographs.size() == 1);
  const auto& e = mb.micrographs[0];
  CHECK(e.N == 64);
  CHECK(e.sigma2 == 0.25);
  REQUIRE(e.placements.size() == 1);
  CHECK(e.placements[0].x == 3);
  CHECK(e.placements[0].y == 4);
  CHECK((e.placements[0].rotation.matrix() - p.rotation.matrix()).norm() < 1e-14);
}

TEST_CASE("cli smoke run and determinism") {
  const auto dir = scratch("cli");
  const std::string common = " --set basis.L=8 --set simulate.N=64 --set simulate.L_tilde=8 --set simulate.gamma=0.1"
                             " --set em.K=12 --set 'em.stages=[{\"ell_max\":2,\"iterations\":2}]'"
                             " --set cache_dir=" + (dir / "cache").string();
  const auto t0 = std::chrono::steady_clock::now();
  REQUIRE(run("simulate -o " + (dir / "a").string() + common) == 0);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 1.0);
  REQUIRE(run("simulate -o " + (dir / "b").string() + common) == 0);
  CHECK(slurp(dir / "a" / "micrograph_0.mrc") == slurp(dir / "b" / "micrograph_0.mrc"));
  CHECK(slurp(dir / "a" / "truth_volume.mrc") == slurp(dir / "b" / "truth_volume.mrc"));

  const std::string man = (dir / "a" / "manifest.json").string();
  CHECK(run("reconstruct " + man + " -o " + (dir / "a").string() + common) == 0);
  CHECK(fs::exists(dir / "a" / "volume.mrc"));
  CHECK(fs::exists(dir / "a" / "history.csv"));
  CHECK(fs::exists(dir / "a" / "checkpoints" / "iter_0002.bin"));
  CHECK(run("evaluate --no-align -o " + (dir / "a").string() + " " + (dir / "a" / "coefficients.json").string() + " " +
            (dir / "a" / "truth_coefficients.json").string() + common) <= 1);
  CHECK(fs::exists(dir / "a" / "fsc.csv"));

  // Exit codes: validation 1, I/O 3.
  CHECK(run("simulate --set basis.L=-2 -o " + (dir / "c").string()) == 1);
  CHECK(run("reconstruct " + man + " --set basis.L=9 --resume " +
            (dir / "a" / "checkpoints" / "iter_0002.bin").string()) == 1);
  std::ofstream((dir / "bad_manifest.json").string()) << "{";
  CHECK(run("reconstruct " + (dir / "bad_manifest.json").string() + common) == 3);
}
