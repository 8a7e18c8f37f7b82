#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <omp.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "pickless/basis/cache.hpp"
#include "pickless/common/errors.hpp"
#include "pickless/common/hash.hpp"
#include "pickless/em/checkpoint.hpp"
#include "pickless/em/driver.hpp"
#include "pickless/eval/align.hpp"
#include "pickless/eval/fsc.hpp"
#include "pickless/eval/pick.hpp"
#include "pickless/forward/projector.hpp"
#include "pickless/forward/volume.hpp"
#include "pickless/io/coeff_file.hpp"
#include "pickless/io/config.hpp"
#include "pickless/io/manifest.hpp"
#include "pickless/io/mrc.hpp"
#include "pickless/simulate/generate.hpp"
#include "pickless/simulate/phantom.hpp"

namespace fs = std::filesystem;
using namespace pickless;
using nlohmann::json;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  int threads = 0;
  std::string output;
};

io::ExperimentConfig load(const Common& o) {
  io::ExperimentConfig cfg = o.config_path.empty() ? io::ExperimentConfig{} : io::load_config(o.config_path);
  cfg = io::apply_overrides(cfg, o.overrides);
  if (o.threads > 0) cfg.threads = o.threads;
  if (!o.output.empty()) cfg.output = o.output;
  cfg.em.em.threads = cfg.threads;
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
  cfg.validate();
  return cfg;
}

fs::path cache_dir(const io::ExperimentConfig& cfg) {
  return cfg.cache_dir.empty() ? basis::default_cache_dir() : fs::path(cfg.cache_dir);
}

struct Tables {
  basis::BandlimitParams params;
  basis::PswfBasis basis;
  forward::BetaTable beta;
};

Tables tables(const io::ExperimentConfig& cfg) {
  Tables t;
  t.params = cfg.basis.params();
  t.basis = basis::load_or_build_basis(t.params, cache_dir(cfg));
  t.beta = forward::compute_beta_table(t.basis, t.params);
  return t;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p);
  if (!out) throw IoError("cannot write " + p.string());
  out << s;
}

Volume phantom(const io::ExperimentConfig& cfg, int n) {
  const std::string& ph = cfg.simulate.phantom;
  if (ph == "blobs") return simulate::random_blobs(n, cfg.simulate.phantom_seed);
  if (ph == "shepp-logan") return simulate::shepp_logan(n);
  Volume v = io::read_volume(ph);
  if (v.n != n) throw ValidationError("phantom " + ph + " has side " + std::to_string(v.n) + ", expected " + std::to_string(n));
  return v;
}

int cmd_simulate(const Common& o) {
  const auto cfg = load(o);
  const auto t = tables(cfg);
  const std::string hash = cfg.hash_hex();
  const fs::path out(cfg.output);
  fs::create_directories(out);
  const auto& sim = cfg.simulate.sim;
  const int L = cfg.basis.L;
  const int Lproj = sim.downsample_to.value_or(sim.L_tilde);
  if (Lproj != L) {
    throw ValidationError("projection size after generation is " + std::to_string(Lproj) + " but basis.L is " +
                          std::to_string(L));
  }

  const auto x_true = forward::fit_coefficients(phantom(cfg, L), t.params);
  io::save_coefficients((out / "truth_coefficients.json").string(), {x_true, t.params.c, L, hash});
  io::write_volume((out / "truth_volume.mrc").string(), forward::render_volume(x_true, t.params, L),
                   {io::hash_label(hash), "pickless ground truth"});

  io::Manifest man;
  man.config_hash = hash;
  man.config = io::to_json(cfg);
  man.truth_coefficients = "truth_coefficients.json";
  man.truth_volume = "truth_volume.mrc";
  long patches = 0;
  for (int m = 0; m < cfg.simulate.micrographs; ++m) {
    simulate::SimConfig sc = sim;
    sc.seed = derive_seed(sim.seed, 100 + m);
    const simulate::Micrograph mg = sim.method == simulate::Method::ExpandedVolume
                                        ? simulate::generate_method_two(x_true, t.basis, t.beta, sc)
                                        : simulate::generate_method_one(phantom(cfg, sim.L_tilde), sc);
    const std::string name = "micrograph_" + std::to_string(m) + ".mrc";
    io::write_image((out / name).string(), mg.pixels, {io::hash_label(hash)});
    man.micrographs.push_back({name, mg.N(), mg.L_proj, mg.sigma2, mg.placements});
    patches += static_cast<long>(mg.N() / L) * (mg.N() / L);
    std::cerr << name << ": N = " << mg.N() << ", T = " << mg.placements.size() << ", sigma2 = " << mg.sigma2 << '\n';
  }
  io::save_manifest((out / "manifest.json").string(), man);
  std::cout << "micrographs: " << cfg.simulate.micrographs << "\n";
  std::cout << "N_patches: " << patches << "\n";
  std::cout << "config_hash: " << hash << "\n";
  return 0;
}

struct LoadedData {
  io::Manifest manifest;
  std::vector<RealImage> images;
  double sigma2 = 0.0;
};

LoadedData load_data(const std::string& manifest_path) {
  LoadedData d;
  d.manifest = io::load_manifest(manifest_path);
  const fs::path dir = fs::path(manifest_path).parent_path();
  for (const auto& e : d.manifest.micrographs) {
    std::vector<std::string> labels;
    d.images.push_back(io::read_image((dir / e.file).string(), &labels));
    const std::string h = io::find_hash(labels);
    if (h != d.manifest.config_hash) {
      throw ValidationError(e.file + " carries config hash '" + h + "' but the manifest has " + d.manifest.config_hash);
    }
    if (d.sigma2 != 0.0 && e.sigma2 != d.sigma2) throw ValidationError("micrographs disagree on the noise variance");
    d.sigma2 = e.sigma2;
  }
  if (d.images.empty()) throw ValidationError("manifest lists no micrographs");
  return d;
}

em::PatchSet patches_of(const LoadedData& d, int L, em::EdgePolicy edge, double sigma2_override) {
  std::vector<const RealImage*> ptrs;
  for (const auto& im : d.images) ptrs.push_back(&im);
  const double s2 = sigma2_override > 0.0 ? sigma2_override : d.sigma2;
  if (!(s2 > 0.0)) throw ValidationError("noise variance is zero; pass --sigma2");
  return em::partition(ptrs, L, s2, edge);
}

int cmd_reconstruct(const Common& o, const std::string& manifest, const std::string& resume, double sigma2) {
  const auto cfg = load(o);
  const auto t = tables(cfg);
  const auto data = load_data(manifest);
  const em::PatchSet ps = patches_of(data, cfg.basis.L, cfg.em.edge, sigma2);
  const auto grid = basis::build_rotation_grid(cfg.em.K, cfg.em.grid_seed, cfg.em.em.stages.back().ell_max);
  const em::EmContext ctx{&t.basis, &t.beta, &grid};
  const fs::path out(cfg.output);
  const fs::path ck = out / "checkpoints";
  fs::create_directories(ck);
  const uint64_t hash = cfg.hash();
  std::cerr << "patches: " << ps.size() << ", minibatch: " << em::minibatch_size(cfg.em.em.batch_fraction, ps.size())
            << ", K = " << grid.size() << ", config hash " << to_hex(hash) << '\n';

  em::EmState state;
  if (!resume.empty()) {
    state = em::load_checkpoint(resume, hash);
    std::cerr << "resuming after iteration " << state.k << '\n';
  } else {
    state = em::initial_state(ctx, ps, cfg.em.em);
    state.config_hash = hash;
  }
  std::ofstream log(out / "reconstruct.log", std::ios::app);
  const auto final = em::run(ctx, ps, cfg.em.em, state, [&](const em::EmState& st, const em::IterationRecord& r) {
    char line[256];
    std::snprintf(line, sizeof line, "iter %d stage %d ell_max %d batch %d loglik %.6f Q %.6f -> %.6f val %.6f %.2fs%s",
                  r.k, r.stage, r.ell_max, r.batch, r.loglik, r.q_old, r.q_new, r.validation, r.seconds,
                  r.ridge ? " ridge" : "");
    std::cerr << line << '\n';
    log << line << '\n';
    log.flush();
    char name[64];
    std::snprintf(name, sizeof name, "iter_%04d.bin", r.k);
    em::save_checkpoint((ck / name).string(), st);
    return true;
  });

  const std::string hx = to_hex(hash);
  io::save_coefficients((out / "coefficients.json").string(), {final.x, t.params.c, cfg.basis.L, hx});
  io::write_volume((out / "volume.mrc").string(), forward::render_volume(final.x, t.params, cfg.basis.L),
                   {io::hash_label(hx), "pickless reconstruction"});
  std::ostringstream csv;
  csv << "k,stage,ell_max,batch,loglik,q_old,q_new,validation,seconds\n";
  csv.precision(12);
  for (const auto& r : final.history) {
    csv << r.k << ',' << r.stage << ',' << r.ell_max << ',' << r.batch << ',' << r.loglik << ',' << r.q_old << ','
        << r.q_new << ',' << r.validation << ',' << r.seconds << '\n';
  }
  write_text(out / "history.csv", csv.str());
  std::vector<double> rho(final.rho.data(), final.rho.data() + final.rho.size());
  write_text(out / "rho.json", json(rho).dump() + "\n");
  std::cout << "iterations: " << final.k << "\nvolume: " << (out / "volume.mrc").string() << '\n';
  return 0;
}

int cmd_pick(const Common& o, const std::string& manifest, const std::string& coeff_path, const std::string& rho_path,
             double sigma2) {
  const auto cfg = load(o);
  const auto t = tables(cfg);
  const auto data = load_data(manifest);
  const em::PatchSet ps = patches_of(data, cfg.basis.L, cfg.em.edge, sigma2);
  const fs::path mdir = fs::path(manifest).parent_path();
  const std::string cpath = coeff_path.empty() ? (mdir / data.manifest.truth_coefficients).string() : coeff_path;
  const auto cf = io::load_coefficients(cpath);
  io::check_compatible(cf, t.params, cpath);
  const int lmax = cf.x.layout.ell_max();
  const auto grid = basis::build_rotation_grid(cfg.em.K, cfg.em.grid_seed, lmax);
  const auto model = em::make_stage_model(t.basis, t.beta, grid, lmax);
  const auto x = forward::embed(cf.x, model.layout);
  RealVector rho = em::uniform_rho(cfg.basis.L);
  if (!rho_path.empty()) {
    std::ifstream in(rho_path);
    if (!in) throw IoError("cannot open " + rho_path);
    const auto v = json::parse(in).get<std::vector<double>>();
    if (static_cast<int>(v.size()) != rho.size()) throw ValidationError(rho_path + ": wrong number of shifts");
    rho = Eigen::Map<const RealVector>(v.data(), rho.size());
  }
  bool degenerate = false;
  auto picks = eval::pick(model, x, rho, ps, cfg.pick.options, &degenerate);
  const auto truth = eval::ground_truth(ps, io::manifest_micrographs(data.manifest));
  const auto rep = eval::score(std::move(picks), truth, cfg.basis.L, cfg.pick.options, degenerate);

  json j;
  j["config_hash"] = cfg.hash_hex();
  j["f1_empty"] = rep.f1_empty;
  j["precision"] = rep.precision;
  j["recall"] = rep.recall;
  j["localization_accuracy"] = rep.localization_accuracy;
  j["all_empty_f1"] = rep.all_empty_f1;
  j["chance_accuracy"] = rep.chance_accuracy;
  j["uniform_chance_accuracy"] = rep.uniform_chance_accuracy;
  j["half_occupied"] = rep.half_occupied;
  j["degenerate"] = rep.degenerate;
  j["counts"] = {{"tp", rep.true_positive}, {"fp", rep.false_positive}, {"fn", rep.false_negative}, {"tn", rep.true_negative}};
  json pj = json::array();
  for (size_t i = 0; i < rep.picks.size(); ++i) {
    const auto& p = rep.picks[i];
    const auto& org = ps.origins[i];
    pj.push_back({{"micrograph", org.micrograph}, {"x", org.x}, {"y", org.y}, {"shift", {p.shift.x, p.shift.y}},
                  {"empty", p.empty}, {"posterior", p.shift_posterior}});
  }
  j["patches"] = pj;
  const fs::path out(cfg.output);
  fs::create_directories(out);
  write_text(out / "pick_report.json", j.dump(1) + "\n");
  if (degenerate) std::cerr << "warning: all templates vanish; picks follow the prior only\n";
  std::cout << "f1_empty: " << rep.f1_empty << " (all-empty baseline " << rep.all_empty_f1 << ")\n";
  std::cout << "localization_accuracy: " << rep.localization_accuracy << " (chance " << rep.chance_accuracy << ")\n";
  const bool pass = rep.f1_empty >= cfg.pick.min_f1 && rep.localization_accuracy >= cfg.pick.min_accuracy;
  return pass ? 0 : 1;
}

// A volume argument is either a coefficient file (.json) or an MRC volume.
struct VolumeArg {
  std::optional<forward::VolumeCoefficients> x;
  Volume vol;
};

VolumeArg read_volume_arg(const std::string& path, const basis::BandlimitParams& params) {
  VolumeArg a;
  if (fs::path(path).extension() == ".json") {
    const auto cf = io::load_coefficients(path);
    io::check_compatible(cf, params, path);
    a.x = cf.x;
    a.vol = forward::render_volume(cf.x, params, params.L);
  } else {
    a.vol = io::read_volume(path);
  }
  return a;
}

int cmd_evaluate(const Common& o, const std::string& est_path, const std::string& truth_path, int align_flag) {
  const auto cfg = load(o);
  const auto params = cfg.basis.params();
  const auto est = read_volume_arg(est_path, params);
  const auto truth = read_volume_arg(truth_path, params);
  if (est.vol.n != truth.vol.n) {
    throw ValidationError("grid mismatch: " + std::to_string(est.vol.n) + " vs " + std::to_string(truth.vol.n));
  }
  const bool do_align = align_flag < 0 ? cfg.evaluate.align : align_flag > 0;
  Volume a = est.vol;
  json j;
  if (do_align) {
    const auto r = est.x && truth.x
                       ? eval::align_coefficients(*est.x, *truth.x, params, est.vol.n, cfg.evaluate.align_options)
                       : eval::align(est.vol, truth.vol, params, cfg.evaluate.align_options);
    a = r.volume;
    const auto& q = r.rotation.quaternion();
    j["alignment"] = {{"correlation", r.correlation},
                      {"reflected", r.reflected},
                      {"quaternion", {q[0], q[1], q[2], q[3]}},
                      {"translation", {r.translation.x(), r.translation.y(), r.translation.z()}}};
  } else {
    std::cerr << "warning: volumes are not aligned; reporting the raw FSC\n";
  }
  const auto curve = eval::fsc(a, truth.vol);
  const double limit = cfg.evaluate.nyquist_fraction * 0.5 * curve.n;
  const double worst = curve.min_up_to(limit);
  const fs::path out(cfg.output);
  fs::create_directories(out);
  write_text(out / "fsc.csv", eval::fsc_csv(curve));
  if (do_align) io::write_volume((out / "aligned.mrc").string(), a, {io::hash_label(cfg.hash_hex())});
  j["resolution_shell"] = curve.resolution_shell;
  j["resolution_frequency"] = static_cast<double>(curve.resolution_shell) / curve.n;
  j["min_fsc_up_to_limit"] = worst;
  j["limit_shell"] = limit;
  write_text(out / "evaluate.json", j.dump(1) + "\n");
  std::cout << "resolution_shell: " << curve.resolution_shell << " (Nyquist " << curve.nyquist_shell() << ")\n";
  std::cout << "min FSC up to shell " << limit << ": " << worst << '\n';
  return worst >= cfg.evaluate.fsc_threshold ? 0 : 1;
}

int cmd_render_projection(const Common& o, const std::string& coeff_path, const std::vector<double>& euler,
                          const std::string& out_path) {
  const auto cfg = load(o);
  const auto t = tables(cfg);
  const auto cf = io::load_coefficients(coeff_path);
  io::check_compatible(cf, t.params, coeff_path);
  const forward::CoeffLayout lay(t.params);
  const auto x = forward::embed(cf.x, lay);
  if (euler.size() != 3) throw ValidationError("--euler needs three angles");
  const auto R = basis::Rotation::from_euler_zyz(euler[0], euler[1], euler[2]);
  const RealImage img = forward::project(x, R, t.basis, t.beta).image;
  io::write_image(out_path, img, {io::hash_label(cf.config_hash)});
  std::cout << "projection: " << out_path << '\n';
  return 0;
}

int cmd_cache_basis(const Common& o) {
  const auto cfg = load(o);
  const auto params = cfg.basis.params();
  bool hit = false;
  const auto t0 = std::chrono::steady_clock::now();
  const auto b = basis::load_or_build_basis(params, cache_dir(cfg), &hit);
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << (hit ? "cache hit" : "built and cached") << ": " << (cache_dir(cfg) / (basis::basis_cache_key(params) + ".bin")).string()
            << "\nPSWF functions: " << b.size() << ", coefficients: " << params.coefficient_count() << ", " << s
            << " s\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pickless: stochastic approximate EM reconstruction from micrographs without particle picking"};
  app.require_subcommand(1);
  Common o;
  auto add_common = [&](CLI::App* sc) {
    sc->add_option("-c,--config", o.config_path, "JSON configuration file");
    sc->add_option("--set", o.overrides, "Override a config key: dotted.key=value");
    sc->add_option("-o,--output", o.output, "Output directory (overrides config 'output')");
  };
  app.add_option("--threads", o.threads, "Worker threads (0: OpenMP default)")->check(CLI::NonNegativeNumber);

  auto* sim = app.add_subcommand("simulate", "Generate micrographs, ground truth and a manifest");
  add_common(sim);

  std::string manifest, resume, coeffs, rho_path, est, truth, out_path;
  double sigma2 = 0.0;
  std::vector<double> euler;
  auto* rec = app.add_subcommand("reconstruct", "Run EM on the micrographs of a manifest");
  add_common(rec);
  rec->add_option("manifest", manifest, "manifest.json from simulate")->required()->check(CLI::ExistingFile);
  rec->add_option("--resume", resume, "Checkpoint to resume from")->check(CLI::ExistingFile);
  rec->add_option("--sigma2", sigma2, "Noise variance (default: from the manifest)");

  auto* pk = app.add_subcommand("pick", "Particle-picking diagnostic against the manifest's ground truth");
  add_common(pk);
  pk->add_option("manifest", manifest, "manifest.json")->required()->check(CLI::ExistingFile);
  pk->add_option("--coefficients", coeffs, "Coefficient file (default: the ground truth)")->check(CLI::ExistingFile);
  pk->add_option("--rho", rho_path, "Shift distribution JSON (default: uniform)")->check(CLI::ExistingFile);
  pk->add_option("--sigma2", sigma2, "Noise variance (default: from the manifest)");

  int align_flag = -1;
  auto* ev = app.add_subcommand("evaluate", "Align and compute the FSC of two volumes");
  add_common(ev);
  ev->add_option("estimate", est, "Estimate (.json coefficients or .mrc)")->required()->check(CLI::ExistingFile);
  ev->add_option("truth", truth, "Reference (.json coefficients or .mrc)")->required()->check(CLI::ExistingFile);
  ev->add_flag_callback("--align", [&] { align_flag = 1; }, "Align before the FSC");
  ev->add_flag_callback("--no-align", [&] { align_flag = 0; }, "Skip alignment");

  auto* rp = app.add_subcommand("render-projection", "Write the projection of a coefficient file");
  add_common(rp);
  rp->add_option("coefficients", coeffs, "Coefficient file")->required()->check(CLI::ExistingFile);
  rp->add_option("--euler", euler, "ZYZ Euler angles in radians")->expected(3)->default_str("0 0 0");
  rp->add_option("--out", out_path, "Output MRC")->required();

  auto* cb = app.add_subcommand("cache-basis", "Build or load the cached PSWF basis");
  add_common(cb);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  try {
    if (*sim) return cmd_simulate(o);
    if (*rec) return cmd_reconstruct(o, manifest, resume, sigma2);
    if (*pk) return cmd_pick(o, manifest, coeffs, rho_path, sigma2);
    if (*ev) return cmd_evaluate(o, est, truth, align_flag);
    if (*rp) return cmd_render_projection(o, coeffs, euler.empty() ? std::vector<double>{0, 0, 0} : euler, out_path);
    if (*cb) return cmd_cache_basis(o);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 3;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
