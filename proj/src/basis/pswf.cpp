#include "pickless/basis/pswf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "pickless/basis/special.hpp"
#include "pickless/common/errors.hpp"

namespace pickless::basis {

namespace {

// Galerkin size for angular index N at disk bandlimit cp.
int galerkin_size(double cp) { return 40 + static_cast<int>(std::ceil(2.0 * cp)); }

double eval_radial(const RealVector& v, int N, double r) {
  const auto t = zernike_radial(N, static_cast<int>(v.size()) - 1, r);
  double s = 0.0;
  for (int j = 0; j < v.size(); ++j) s += v[j] * t[j];
  return s;
}

struct RadialSolution {
  RealMatrix vectors;  // columns sorted by ascending Sturm-Liouville eigenvalue
};

RadialSolution solve_radial(int N, double cp) {
  const int J = galerkin_size(cp);
  const auto q = gauss_legendre(N + 2 * J + 4, 0.0, 1.0);
  RealMatrix H = RealMatrix::Zero(J, J);
  for (size_t a = 0; a < q.nodes.size(); ++a) {
    const double r = q.nodes[a];
    const auto t = zernike_radial(N, J - 1, r);
    const double w = q.weights[a] * r * r * r * cp * cp;
    for (int i = 0; i < J; ++i) {
      for (int j = 0; j <= i; ++j) H(i, j) += w * t[i] * t[j];
    }
  }
  for (int i = 0; i < J; ++i) {
    for (int j = 0; j < i; ++j) H(j, i) = H(i, j);
    H(i, i) += (N + 2.0 * i) * (N + 2.0 * i + 2.0);
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(H);
  if (es.info() != Eigen::Success) {
    throw NumericalError("PSWF radial eigenproblem did not converge for N = " + std::to_string(N));
  }
  RealMatrix v = es.eigenvectors();
  // Fix sign so that Phi(r) ~ C r^N with C > 0 near the origin.
  for (int col = 0; col < J; ++col) {
    double c0 = 0.0, binom = 1.0;
    for (int j = 0; j < J; ++j) {
      if (j > 0) binom *= static_cast<double>(j + N) / j;
      c0 += v(j, col) * std::sqrt(2.0 * (2 * j + N + 1)) * binom;
    }
    if (c0 < 0) v.col(col) = -v.col(col);
  }
  return {v};
}

}  // namespace

std::vector<double> zernike_radial(int N, int jmax, double r) {
  auto p = jacobi_a0(jmax, N, 1.0 - 2.0 * r * r);
  const double rn = std::pow(r, N);
  for (int j = 0; j <= jmax; ++j) p[j] *= std::sqrt(2.0 * (2 * j + N + 1)) * rn;
  return p;
}

void pixel_to_disk(int i, int j, int L, double& r, double& phi) {
  const double x = centered(i, L) / (0.5 * L);
  const double y = centered(j, L) / (0.5 * L);
  r = std::hypot(x, y);
  phi = std::atan2(y, x);
}

int PswfBasis::n_count(int N) const {
  const int a = std::abs(N);
  return a < static_cast<int>(n_count_.size()) ? n_count_[a] : 0;
}

int PswfBasis::index(int N, int n) const {
  if (n < 0 || n >= n_count(N)) return -1;
  int idx = 0;
  for (int M = -N_max(); M < N; ++M) idx += n_count(M);
  return idx + n;
}

double PswfBasis::lambda(int N, int n) const { return lambda_[std::abs(N)][n]; }

double PswfBasis::radial(int N, int n, double r) const {
  require(r >= 0.0 && r <= 1.0, "PswfBasis::radial: r outside [0, 1]");
  return eval_radial(coeffs_[std::abs(N)][n], std::abs(N), r);
}

cdouble PswfBasis::evaluate(int N, int n, double r, double phi) const {
  if (r > 1.0) return 0.0;
  return radial(N, n, r) * std::polar(1.0, N * phi) / std::sqrt(2.0 * kPi);
}

PswfBasis build_pswf_basis(const BandlimitParams& params, int radial_nodes) {
  params.validate();
  require(radial_nodes >= 8, "build_pswf_basis: need at least 8 radial nodes");
  PswfBasis b;
  b.params_ = params;
  const double cp = params.disk_bandlimit();

  // Rayleigh quotient of the finite Hankel operator on a tensor quadrature.
  const auto lq = gauss_legendre(160, 0.0, 1.0);
  const int nq = static_cast<int>(lq.nodes.size());
  RealVector wr(nq);
  for (int a = 0; a < nq; ++a) wr[a] = lq.weights[a] * lq.nodes[a];

  double lambda00 = 0.0;
  for (int N = 0; N <= params.ell_max; ++N) {
    const auto sol = solve_radial(N, cp);
    RealMatrix K(nq, nq);
    for (int a = 0; a < nq; ++a) {
      for (int c = 0; c < nq; ++c) K(a, c) = std::cyl_bessel_j(N, cp * lq.nodes[a] * lq.nodes[c]);
    }
    std::vector<RealVector> kept;
    std::vector<double> lams;
    for (int n = 0; n < sol.vectors.cols(); ++n) {
      RealVector u(nq);
      for (int a = 0; a < nq; ++a) u[a] = eval_radial(sol.vectors.col(n), N, lq.nodes[a]) * wr[a];
      const double lam = u.dot(K * u);
      if (N == 0 && n == 0) lambda00 = lam;
      if ((lam * lam) / (lambda00 * lambda00) < params.pswf_threshold) break;
      kept.push_back(sol.vectors.col(n));
      lams.push_back(lam);
    }
    if (kept.empty()) break;
    b.coeffs_.push_back(std::move(kept));
    b.lambda_.push_back(std::move(lams));
    b.n_count_.push_back(static_cast<int>(b.coeffs_.back().size()));
  }
  if (b.n_count_.empty() || lambda00 == 0.0) {
    throw NumericalError("PSWF construction produced no retained functions");
  }

  const int Nm = b.N_max();
  for (int N = -Nm; N <= Nm; ++N) {
    for (int n = 0; n < b.n_count(N); ++n) {
      b.entries_.push_back({N, n});
      b.alpha_.push_back(2.0 * kPi * std::pow(cdouble(0.0, 1.0), std::abs(N)) * b.lambda(N, n));
    }
  }

  const int L = params.L;
  const int P = b.size();
  b.psi_ = ComplexMatrix::Zero(L * L, P);
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) {
      double r, phi;
      pixel_to_disk(i, j, L, r, phi);
      if (r > 1.0) continue;
      for (int e = 0; e < P; ++e) {
        const auto [N, n] = b.entries_[e];
        if (N < 0) continue;
        b.psi_(i * L + j, e) = b.evaluate(N, n, r, phi);
      }
    }
  }
  // Negative N columns are exact conjugates.
  for (int e = 0; e < P; ++e) {
    const auto [N, n] = b.entries_[e];
    if (N < 0) b.psi_.col(e) = b.psi_.col(b.index(-N, n)).conjugate();
  }

  const auto rq = gauss_legendre(radial_nodes, 0.0, 1.0);
  b.rnodes_ = rq.nodes;
  b.rweights_ = rq.weights;
  b.rsamples_.resize(radial_nodes, P);
  for (int e = 0; e < P; ++e) {
    const auto [N, n] = b.entries_[e];
    for (int a = 0; a < radial_nodes; ++a) b.rsamples_(a, e) = b.radial(N, n, rq.nodes[a]);
  }
  return b;
}

}  // namespace pickless::basis
