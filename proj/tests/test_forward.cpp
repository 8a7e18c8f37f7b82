#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pickless/basis/special.hpp"
#include "pickless/common/errors.hpp"
#include "pickless/forward/beta.hpp"
#include "pickless/forward/patch.hpp"
#include "pickless/forward/projector.hpp"
#include "pickless/forward/volume.hpp"

using namespace pickless;
using namespace pickless::forward;
using pickless::basis::Rotation;

namespace {

struct Setup {
  basis::BandlimitParams params;
  basis::PswfBasis basis;
  BetaTable beta;
};

const Setup& setup11() {
  static const Setup s = [] {
    Setup t;
    t.params = basis::make_bandlimit_params(0.5, 11, 6);
    t.basis = basis::build_pswf_basis(t.params);
    t.beta = compute_beta_table(t.basis, t.params);
    return t;
  }();
  return s;
}

}  // namespace

TEST_CASE("coefficient symmetry and real parameterization") {
  const CoeffLayout lay(basis::make_bandlimit_params(0.5, 9, 4));
  CHECK(lay.size() == 70);
  auto x = random_coefficients(lay, 4);
  CHECK(x.symmetry_defect() == 0.0);
  const ComplexMatrix P = real_parameterization(lay);
  const RealVector th = to_real(lay, x.x);
  CHECK((P * th - x.x).norm() < 1e-14);
  CHECK((from_real(lay, th) - x.x).norm() == 0.0);
  x.at(2, 1, 1) += cdouble(0.3, 0.1);
  CHECK(x.symmetry_defect() > 0.1);
  x.enforce_symmetry();
  CHECK(x.symmetry_defect() < 1e-15);

  const CoeffLayout big(6, {5, 5, 4, 4, 3, 3, 2});
  const auto e = embed(x, big);
  CHECK(e.at(4, -3, 2) == x.at(4, -3, 2));
  CHECK(e.at(5, 0, 1) == 0.0);
  CHECK(e.at(0, 0, 5) == 0.0);
}

TEST_CASE("beta table structure") {
  const auto& s = setup11();
  const auto& b = s.basis;
  for (int l = 0; l <= s.params.ell_max; ++l) {
    for (int e = 0; e < b.size(); ++e) {
      const int N = b.entries()[e].N;
      for (int sidx = 1; sidx <= s.beta.layout().S(l); ++sidx) {
        if (std::abs(N) > l || (l + N) % 2 != 0) CHECK(s.beta(l, sidx, e) == 0.0);
      }
    }
  }
  // Y_1^0(pi/2, 0) = 0.
  CHECK(s.beta(1, 1, b.index(0, 0)) == 0.0);
  CHECK(std::abs(s.beta(0, 1, b.index(0, 0))) > 0.0);
  // beta_hat_{-N} = conj(beta_hat_N).
  for (int e = 0; e < b.size(); ++e) {
    const auto [N, n] = b.entries()[e];
    for (int l = 0; l <= s.params.ell_max; ++l) {
      CHECK(std::abs(s.beta(l, 1, b.index(-N, n)) - std::conj(s.beta(l, 1, e))) < 1e-14);
    }
  }
  // Doubling the radial nodes leaves the table unchanged to 1e-8.
  const auto fine = basis::build_pswf_basis(s.params, 256);
  const auto beta2 = compute_beta_table(fine, s.params);
  const cdouble a = s.beta(0, 1, b.index(0, 0)), c = beta2(0, 1, fine.index(0, 0));
  CHECK(std::abs(a - c) < 1e-8 * std::abs(a));
  for (int l = 0; l <= s.params.ell_max; ++l) {
    CHECK((s.beta.block(l) - beta2.block(l)).norm() < 1e-8 * s.beta.block(0).norm());
  }
}

TEST_CASE("projection basics") {
  const auto& s = setup11();
  const CoeffLayout lay(s.params);
  VolumeCoefficients zero(lay);
  CHECK(project(zero, Rotation(), s.basis, s.beta).image.norm() == 0.0);

  VolumeCoefficients mono(lay);
  for (int sidx = 1; sidx <= lay.S(0); ++sidx) mono.at(0, 0, sidx) = 1.0 / sidx;
  std::mt19937_64 rng(2);
  const RealImage ref = project(mono, Rotation(), s.basis, s.beta).image;
  CHECK(ref.norm() > 0.0);
  for (int t = 0; t < 5; ++t) {
    CHECK((project(mono, Rotation::random(rng), s.basis, s.beta).image - ref).norm() < 1e-12 * ref.norm());
  }

  const auto x = random_coefficients(lay, 1), y = random_coefficients(lay, 2);
  VolumeCoefficients comb(lay);
  comb.x = 2.0 * x.x - 0.5 * y.x;
  const Rotation w = Rotation::random(rng);
  const RealImage lhs = project(comb, w, s.basis, s.beta).image;
  const RealImage rhs = 2.0 * project(x, w, s.basis, s.beta).image - 0.5 * project(y, w, s.basis, s.beta).image;
  CHECK((lhs - rhs).norm() < 1e-12 * lhs.norm());

  VolumeCoefficients bad = x;
  bad.at(3, 2, 1) += cdouble(5.0, 0.0);
  CHECK_THROWS_AS(project(bad, w, s.basis, s.beta), NumericalError);
}

TEST_CASE("projection matches the Fourier-slice oracle") {
  const auto& s = setup11();
  const auto x = fit_coefficients(oracle::blob_phantom(11, 21), s.params);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 4; ++t) {
    const Rotation w = t == 0 ? Rotation() : Rotation::random(rng);
    const RealImage img = project(x, w, s.basis, s.beta).image;
    const RealImage ref = oracle::slice_projection(x, s.params, w, 4);
    const double err = oracle::disk_relative_error(img, ref);
    CHECK(err <= 0.02);
  }
}

TEST_CASE("steerability of projections") {
  const auto& s = setup11();
  const auto x = random_coefficients(CoeffLayout(s.params), 8);
  std::mt19937_64 rng(9);
  const Rotation w = Rotation::random(rng);
  const double gamma = 0.81;
  const basis::WignerSet D0(6, w), D1(6, basis::rotation_z(gamma) * w);
  const ComplexVector a0 = coefficient_map(s.basis, s.beta, D0) * x.x;
  const ComplexVector a1 = coefficient_map(s.basis, s.beta, D1) * x.x;
  for (int e = 0; e < s.basis.size(); ++e) {
    const int N = s.basis.entries()[e].N;
    CHECK(std::abs(a1[e] - std::polar(1.0, -N * gamma) * a0[e]) < 1e-10 * a0.norm());
  }
  // Exact quarter turn on the pixel grid: I'(p) = I(R^-1 p).
  const int L = 11;
  const RealImage i0 = project(x, w, s.basis, s.beta).image;
  const RealImage i1 = project(x, basis::rotation_z(kPi / 2) * w, s.basis, s.beta).image;
  double worst = 0.0;
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) worst = std::max(worst, std::abs(i1(L - 1 - j, i) - i0(i, j)));
  }
  CHECK(worst < 1e-10 * i0.norm());
}

TEST_CASE("patch operator") {
  const int L = 7;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  RealImage proj(L, L);
  for (int i = 0; i < proj.size(); ++i) proj.data()[i] = g(rng);

  CHECK(make_patch(proj, {0, 0}, 0.0, 1) == proj);
  CHECK(make_patch(proj, {L, L}, 0.0, 1).norm() == 0.0);
  CHECK(make_patch(proj, {L, 2}, 0.0, 1).norm() == 0.0);
  for (int a = 0; a < 2 * L; ++a) {
    for (int b = 0; b < 2 * L; ++b) {
      const RealImage dense = crop(circular_shift(zero_pad(proj), {a, b}), L);
      CHECK(make_patch(proj, {a, b}, 0.0, 1) == dense);
    }
  }
  const RealImage pad = zero_pad(proj);
  for (auto [a, b, c, d] : {std::array<int, 4>{3, 5, 9, 13}, {13, 13, 1, 1}, {0, 7, 7, 0}}) {
    const Shift s1{a, b}, s2{c, d};
    const Shift sum{(a + c) % (2 * L), (b + d) % (2 * L)};
    CHECK(circular_shift(circular_shift(pad, s1), s2) == circular_shift(pad, sum));
  }
  RealImage inner = RealImage::Zero(L, L);
  inner.bottomRightCorner(L - 2, L - 2) = proj.bottomRightCorner(L - 2, L - 2);
  for (auto sh : {Shift{0, 0}, Shift{1, 2}, Shift{2, 2}}) {
    CHECK(std::abs(make_patch(inner, sh, 0.0, 1).squaredNorm() - inner.squaredNorm()) < 1e-12);
  }
  CHECK_THROWS_AS(make_patch(proj, {2 * L, 0}, 0.0, 1), ValidationError);
  CHECK(make_patch(proj, {1, 1}, 0.5, 42) == make_patch(proj, {1, 1}, 0.5, 42));
  CHECK(make_patch(proj, {1, 1}, 0.5, 42) != make_patch(proj, {1, 1}, 0.5, 43));
}

TEST_CASE("volume render and fit") {
  const auto p = basis::make_bandlimit_params(0.5, 9, 4);
  const auto x = random_coefficients(CoeffLayout(p), 3);
  const Volume v = render_volume(x, p, 9);
  const auto back = fit_coefficients(v, p);
  CHECK((back.x - x.x).norm() < 1e-9 * x.x.norm());
  CHECK(back.symmetry_defect() == 0.0);
  // The DC value of the rendering is the integral of the volume.
  double sum = 0.0;
  for (double d : v.data) sum += d;
  CHECK(std::abs(sum - evaluate_fourier(x, p, Vec3::Zero()).real()) < 1e-9 * std::abs(sum) + 1e-12);
}
