#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "pickless/basis/cache.hpp"
#include "pickless/basis/params.hpp"
#include "pickless/basis/pswf.hpp"
#include "pickless/basis/rotation.hpp"
#include "pickless/basis/special.hpp"
#include "pickless/basis/wigner.hpp"
#include "pickless/common/errors.hpp"

using namespace pickless;
using namespace pickless::basis;

namespace {

// Polar Gauss-Legendre x uniform-azimuth quadrature on the unit disk.
template <class F>
cdouble disk_integral(F f, int nr = 80, int nphi = 128) {
  const auto q = gauss_legendre(nr, 0.0, 1.0);
  cdouble s = 0.0;
  for (int a = 0; a < nr; ++a) {
    for (int b = 0; b < nphi; ++b) {
      const double phi = 2 * kPi * b / nphi;
      s += q.weights[a] * q.nodes[a] * (2 * kPi / nphi) * f(q.nodes[a], phi);
    }
  }
  return s;
}

const PswfBasis& basis11() {
  static const PswfBasis b = build_pswf_basis(make_bandlimit_params(0.5, 11, 6));
  return b;
}

}  // namespace

TEST_CASE("spherical Bessel zeros") {
  CHECK(std::abs(spherical_bessel_zero(0, 1) - kPi) < 1e-12);
  CHECK(std::abs(spherical_bessel_zero(0, 2) - 2 * kPi) < 1e-12);
  CHECK(std::abs(spherical_bessel_zero(1, 1) - 4.493409457909064) < 1e-12);
  CHECK(std::abs(spherical_bessel_zero(2, 2) - 9.095011330476355) < 1e-12);
  CHECK(std::abs(spherical_bessel_zero(5, 3) - 16.354709639350464) < 1e-11);
  for (int l = 0; l <= 12; ++l) {
    for (int s = 1; s <= 12; ++s) {
      const double u = spherical_bessel_zero(l, s);
      CHECK(std::abs(spherical_bessel(l, u)) < 1e-12);
      CHECK(u < spherical_bessel_zero(l, s + 1));
      if (s == 1) CHECK(u < spherical_bessel_zero(l + 1, 1));
    }
  }
  CHECK_THROWS_AS(spherical_bessel_zero(-1, 1), ValidationError);
  CHECK_THROWS_AS(spherical_bessel_zero(0, 0), ValidationError);
}

TEST_CASE("normalized spherical Bessel") {
  CHECK(std::abs(normalized_spherical_bessel(0, 1, 1.0)) < 1e-14);
  CHECK(normalized_spherical_bessel(2, 1, 0.0) == 0.0);
  // 4 / |j_1(pi)| j_0(pi/2) = 4 pi * 2 / pi.
  CHECK(std::abs(normalized_spherical_bessel(0, 1, 0.5) - 8.0) < 1e-12);
  CHECK(std::abs(normalized_spherical_bessel(2, 2, 0.3) - 10.421777334083599) < 1e-10);
  CHECK_THROWS_AS(normalized_spherical_bessel(0, 1, 1.5), ValidationError);
  CHECK_THROWS_AS(normalized_spherical_bessel(0, 1, -0.1), ValidationError);
}

TEST_CASE("spherical harmonics") {
  CHECK(std::abs(spherical_harmonic(0, 0, 0.3, 1.1) - 1.0 / std::sqrt(4 * kPi)) < 1e-15);
  CHECK(std::abs(spherical_harmonic(1, 0, 0.0, 0.0) - std::sqrt(3.0 / (4 * kPi))) < 1e-15);
  CHECK_THROWS_AS(spherical_harmonic(1, 2, 0.0, 0.0), ValidationError);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const double th = kPi * u(rng), ph = 2 * kPi * u(rng);
    for (int l = 0; l <= 10; ++l) {
      double sum = 0.0;
      for (int m = -l; m <= l; ++m) {
        const cdouble y = spherical_harmonic(l, m, th, ph);
        sum += std::norm(y);
        const cdouble mirror = spherical_harmonic(l, -m, th, ph);
        CHECK(std::abs(mirror - ((m % 2 == 0) ? 1.0 : -1.0) * std::conj(y)) < 1e-13);
      }
      CHECK(std::abs(sum - (2 * l + 1) / (4 * kPi)) < 1e-10);
    }
  }

  // Gauss-Legendre in cos(theta) x uniform azimuth is exact for these degrees.
  const auto q = gauss_legendre(16);
  const int nphi = 32;
  auto inner = [&](int l1, int m1, int l2, int m2) {
    cdouble s = 0.0;
    for (size_t a = 0; a < q.nodes.size(); ++a) {
      for (int b = 0; b < nphi; ++b) {
        const double th = std::acos(q.nodes[a]), ph = 2 * kPi * b / nphi;
        s += q.weights[a] * (2 * kPi / nphi) * std::conj(spherical_harmonic(l1, m1, th, ph)) *
             spherical_harmonic(l2, m2, th, ph);
      }
    }
    return s;
  };
  CHECK(std::abs(inner(2, 1, 2, 1) - 1.0) < 1e-8);
  CHECK(std::abs(inner(3, -2, 3, -2) - 1.0) < 1e-8);
  CHECK(std::abs(inner(2, 1, 3, 1)) < 1e-8);
  CHECK(std::abs(inner(4, 2, 4, -2)) < 1e-8);
}

TEST_CASE("rotations") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const Rotation r = Rotation::random(rng);
    CHECK((r.matrix() * r.matrix().transpose() - Mat3::Identity()).norm() < 1e-12);
    CHECK(std::abs(r.matrix().determinant() - 1.0) < 1e-12);
    const auto [a, b, g] = r.euler_zyz();
    CHECK((Rotation::from_euler_zyz(a, b, g).matrix() - r.matrix()).norm() < 1e-10);
    const Rotation s = Rotation::random(rng);
    CHECK(((r * s).matrix() - r.matrix() * s.matrix()).norm() < 1e-12);
    CHECK(((r * r.inverse()).matrix() - Mat3::Identity()).norm() < 1e-12);
  }
  CHECK_THROWS_AS(Rotation::from_matrix(2.0 * Mat3::Identity()), ValidationError);
}

TEST_CASE("Wigner-D convention, unitarity and homomorphism") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    const Rotation r1 = Rotation::random(rng), r2 = Rotation::random(rng);
    for (int l = 0; l <= 8; ++l) {
      const ComplexMatrix D1 = wigner_d(l, r1), D2 = wigner_d(l, r2);
      const int n = 2 * l + 1;
      CHECK((D1.adjoint() * D1 - ComplexMatrix::Identity(n, n)).norm() < 1e-10);
      CHECK((wigner_d(l, r1 * r2) - D1 * D2).norm() < 1e-10);
    }
    // Y_l^m(R^-1 u) = sum_m' D_{m'm}(R) Y_l^m'(u).
    const double th = kPi * u(rng), ph = 2 * kPi * u(rng);
    const Vec3 v(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
    const Vec3 w = r1.matrix().transpose() * v;
    const double th2 = std::acos(std::clamp(w.z(), -1.0, 1.0)), ph2 = std::atan2(w.y(), w.x());
    for (int l = 0; l <= 6; ++l) {
      const ComplexMatrix D = wigner_d(l, r1);
      for (int m = -l; m <= l; ++m) {
        cdouble rhs = 0.0;
        for (int mp = -l; mp <= l; ++mp) rhs += D(mp + l, m + l) * spherical_harmonic(l, mp, th, ph);
        CHECK(std::abs(spherical_harmonic(l, m, th2, ph2) - rhs) < 1e-10);
      }
    }
  }
  CHECK((wigner_d(1, Rotation()) - ComplexMatrix::Identity(3, 3)).norm() < 1e-14);
  CHECK(std::abs(wigner_d(0, Rotation::random(rng))(0, 0) - 1.0) < 1e-14);
}

TEST_CASE("rotation grid") {
  const auto g1 = build_rotation_grid(552, 99, 4);
  const auto g2 = build_rotation_grid(552, 99, 4);
  REQUIRE(g1.size() == 552);
  for (int k = 0; k < g1.size(); ++k) {
    CHECK(g1.rotations[k].quaternion() == g2.rotations[k].quaternion());
    for (int l = 0; l <= 4; ++l) CHECK(g1.wigner[k][l] == g2.wigner[k][l]);
  }
  const auto id = build_rotation_grid(1, 5, 3, true);
  for (int l = 0; l <= 3; ++l) {
    CHECK((id.wigner[0][l] - ComplexMatrix::Identity(2 * l + 1, 2 * l + 1)).norm() < 1e-14);
  }
  std::mt19937_64 rng(1234);
  Mat3 mean = Mat3::Zero();
  const int n = 100000;
  for (int k = 0; k < n; ++k) mean += Rotation::random(rng).matrix();
  mean /= n;
  CHECK(mean.cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("bandlimit params") {
  const auto p9 = make_bandlimit_params(0.5, 9, 4);
  CHECK(p9.S_of_ell == std::vector<int>{4, 4, 3, 3, 2});
  CHECK(p9.coefficient_count() == 70);
  const auto p11 = make_bandlimit_params(0.5, 11, 6);
  CHECK(p11.coefficient_count() == 154);
  CHECK_THROWS_AS(make_bandlimit_params(0.0, 9, 4), ValidationError);
  CHECK_THROWS_AS(make_bandlimit_params(0.5, 2, 4), ValidationError);
  CHECK_THROWS_AS(make_bandlimit_params(0.5, 9, 2, {1, 0, 1}), ValidationError);
}

TEST_CASE("PSWF eigen-relation and orthonormality") {
  const auto& b = basis11();
  const double cp = b.params().disk_bandlimit();
  const std::pair<int, int> low[] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  for (auto [N, n] : low) {
    const cdouble alpha = b.alpha(b.index(N, n));
    for (double kr : {0.2, 0.55, 0.9}) {
      const double kphi = 0.7;
      const cdouble lhs = disk_integral([&](double r, double phi) {
        return b.evaluate(N, n, r, phi) * std::polar(1.0, cp * r * kr * std::cos(phi - kphi));
      });
      const cdouble rhs = alpha * b.evaluate(N, n, kr, kphi);
      CHECK(std::abs(lhs - rhs) <= 1e-3 * std::abs(rhs));
    }
  }
  for (auto [N1, n1] : low) {
    for (auto [N2, n2] : low) {
      const cdouble ip = disk_integral(
          [&](double r, double phi) { return std::conj(b.evaluate(N1, n1, r, phi)) * b.evaluate(N2, n2, r, phi); });
      const double expect = (N1 == N2 && n1 == n2) ? 1.0 : 0.0;
      CHECK(std::abs(ip - expect) < 1e-6);
    }
  }
  // alpha_{-N} = alpha_N and |alpha| decreases along n.
  for (int N = 0; N <= b.N_max(); ++N) {
    for (int n = 0; n < b.n_count(N); ++n) {
      CHECK(b.alpha(b.index(N, n)) == b.alpha(b.index(-N, n)));
      if (n > 0) CHECK(std::abs(b.lambda(N, n)) < std::abs(b.lambda(N, n - 1)));
    }
  }
}

TEST_CASE("PSWF sampled grid") {
  const auto& b = basis11();
  const int L = 11;
  for (int e = 0; e < b.size(); ++e) {
    const auto [N, n] = b.entries()[e];
    const int mirror = b.index(-N, n);
    CHECK(b.psi().col(mirror) == b.psi().col(e).conjugate());
    const cdouble phase = std::pow(cdouble(0.0, 1.0), ((N % 4) + 4) % 4);
    double worst = 0.0;
    for (int i = 0; i < L; ++i) {
      for (int j = 0; j < L; ++j) {
        double r, phi;
        pixel_to_disk(i, j, L, r, phi);
        if (r > 1.0) CHECK(b.psi()(i * L + j, e) == cdouble(0.0, 0.0));
        // Sampling at the 90-degree rotated pixel multiplies by i^N.
        const cdouble rotated = b.psi()((L - 1 - j) * L + i, e);
        worst = std::max(worst, std::abs(rotated - phase * b.psi()(i * L + j, e)));
      }
    }
    CHECK(worst < 1e-12);
  }
  // Steering at a generic angle through the evaluator.
  const double gamma = 0.37;
  for (int e = 0; e < b.size(); e += 3) {
    const auto [N, n] = b.entries()[e];
    CHECK(std::abs(b.evaluate(N, n, 0.6, 0.2 + gamma) - std::polar(1.0, N * gamma) * b.evaluate(N, n, 0.6, 0.2)) <
          1e-12);
  }
}

TEST_CASE("basis cache is bit-identical") {
  const auto params = make_bandlimit_params(0.5, 7, 3);
  const auto dir = std::filesystem::temp_directory_path() / "pickless_test_cache";
  std::filesystem::remove_all(dir);
  bool hit = true;
  const auto built = load_or_build_basis(params, dir, &hit);
  CHECK_FALSE(hit);
  const auto loaded = load_or_build_basis(params, dir, &hit);
  CHECK(hit);
  CHECK(loaded.psi() == built.psi());
  CHECK(loaded.radial_samples() == built.radial_samples());
  for (int e = 0; e < built.size(); ++e) CHECK(loaded.alpha(e) == built.alpha(e));
  const auto other = make_bandlimit_params(0.5, 7, 2);
  CHECK_THROWS_AS(load_basis(dir / (basis_cache_key(params) + ".bin"), other), ValidationError);
  std::filesystem::remove_all(dir);
}
