#include "gforge/planewave.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "gforge/error.hpp"

namespace gforge {

namespace {

constexpr double kPi = std::numbers::pi;
using cd = std::complex<double>;

void check_axis(int axis) {
  if (axis < 0 || axis > 2) throw Error(Errc::InvalidArgument, "axis must be 0, 1 or 2");
}

}  // namespace

double PWGrid::length() const { return std::cbrt(Omega); }

std::array<int, 3> PWGrid::nu(int p) const {
  const int h = (n_side - 1) / 2;
  return {p / (n_side * n_side) - h, (p / n_side) % n_side - h, p % n_side - h};
}

std::array<int, 3> PWGrid::alias(std::array<int, 3> v) const {
  const int h = (n_side - 1) / 2;
  for (int& c : v) c = ((c + h) % n_side + n_side) % n_side - h;
  return v;
}

void PWGrid::validate() const {
  if (n_side < 1 || n_side % 2 == 0) throw Error(Errc::InvalidArgument, "n_side must be odd");
  if (!(Omega > 0)) throw Error(Errc::InvalidArgument, "Omega must be positive");
}

Eigen::MatrixXcd pw_force_matrix(const PWGrid& g, double Z, const Eigen::Vector3d& R, int axis) {
  g.validate();
  check_axis(axis);
  if (g.n_side > kPwDenseMax) throw Error(Errc::TooLarge, "dense grids capped at n_side 9");
  const int n = g.size();
  const double kf = 2.0 * kPi / g.length();
  const cd pre = cd(0.0, -4.0 * kPi * Z / g.Omega);

  // depends on q - p only; tabulate over aliased differences
  const int ns = g.n_side;
  std::vector<cd> table(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    const auto v = g.nu(s);
    if (v[0] == 0 && v[1] == 0 && v[2] == 0) continue;
    const Eigen::Vector3d k = kf * Eigen::Vector3d(v[0], v[1], v[2]);
    table[std::size_t(s)] = pre * k(axis) * std::exp(cd(0.0, k.dot(R))) / k.squaredNorm();
  }
  const int h = (ns - 1) / 2;
  Eigen::MatrixXcd F(n, n);
#pragma omp parallel for
  for (int p = 0; p < n; ++p) {
    const auto vp = g.nu(p);
    for (int q = 0; q < n; ++q) {
      const auto vq = g.nu(q);
      const auto d = g.alias({vq[0] - vp[0], vq[1] - vp[1], vq[2] - vp[2]});
      const int s = ((d[0] + h) * ns + d[1] + h) * ns + d[2] + h;
      F(p, q) = table[std::size_t(s)];
    }
  }
  return F;
}

Eigen::MatrixXcd dft_matrix(const PWGrid& g, int sign) {
  g.validate();
  const int n = g.size();
  const double inv = 1.0 / std::sqrt(double(n));
  Eigen::MatrixXcd U(n, n);
  for (int p = 0; p < n; ++p) {
    const auto a = g.nu(p);
    for (int r = 0; r < n; ++r) {
      const auto b = g.nu(r);
      // k_p . r_r = 2 pi nu_p . nu_r / n
      const long dot = long(a[0]) * b[0] + long(a[1]) * b[1] + long(a[2]) * b[2];
      const double ph = sign * 2.0 * kPi * double(dot % g.n_side) / g.n_side;
      U(p, r) = inv * std::exp(cd(0.0, ph));
    }
  }
  return U;
}

double pw_force_eigenvalue(const PWGrid& g, double Z, const Eigen::Vector3d& R, int axis, int r,
                           int sign) {
  check_axis(axis);
  const double L = g.length();
  const double kf = 2.0 * kPi / L;
  const auto vr = g.nu(r);
  const Eigen::Vector3d rr = (L / g.n_side) * Eigen::Vector3d(vr[0], vr[1], vr[2]);
  const Eigen::Vector3d x = R + double(sign) * rr;
  // -(i) k e^{i theta} summed over +-s leaves k sin(theta)
  double s = 0.0;
  for (int t = 0; t < g.size(); ++t) {
    const auto v = g.nu(t);
    if (v[0] == 0 && v[1] == 0 && v[2] == 0) continue;
    const Eigen::Vector3d k = kf * Eigen::Vector3d(v[0], v[1], v[2]);
    s += k(axis) * std::sin(k.dot(x)) / k.squaredNorm();
  }
  return 4.0 * kPi * Z / g.Omega * s;
}

DiagCheck fft_diagonalize_check(const Eigen::MatrixXcd& F, const PWGrid& g, double Z,
                                const Eigen::Vector3d& R, int axis, int sign) {
  const Eigen::MatrixXcd U = dft_matrix(g, sign);
  const Eigen::MatrixXcd D = U.adjoint() * F * U;
  DiagCheck c{0.0, 0.0, 0.0};
  const int n = g.size();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (i == j) {
        c.max_diag_imag = std::max(c.max_diag_imag, std::abs(D(i, i).imag()));
        const double ref = pw_force_eigenvalue(g, Z, R, axis, i, sign);
        c.max_diag_error = std::max(c.max_diag_error, std::abs(D(i, i) - ref));
      } else {
        c.max_offdiag = std::max(c.max_offdiag, std::abs(D(i, j)));
      }
    }
  return c;
}

double pw_commutator(const PWGrid& g, double Z, const Eigen::Vector3d& R, int a, int b) {
  const Eigen::MatrixXcd Fa = pw_force_matrix(g, Z, R, a);
  const Eigen::MatrixXcd Fb = pw_force_matrix(g, Z, R, b);
  return (Fa * Fb - Fb * Fa).cwiseAbs().maxCoeff();
}

namespace {

// sum over one x-slab; fixed iteration order inside
double lambda_slab(const PWGrid& g, const Eigen::Vector3d& d, int ix) {
  const int h = (g.n_side - 1) / 2;
  double s = 0.0;
  for (int iy = -h; iy <= h; ++iy)
    for (int iz = -h; iz <= h; ++iz) {
      if (ix == 0 && iy == 0 && iz == 0) continue;
      const Eigen::Vector3d v(ix, iy, iz);
      s += std::abs(v.dot(d)) / v.squaredNorm();
    }
  return s;
}

// pairwise tree over the slab partials
double tree_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return v[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return tree_sum(v, lo, mid) + tree_sum(v, mid, hi);
}

Eigen::Vector3d unit_direction(const Eigen::Vector3d& R) {
  const double nr = R.norm();
  if (nr == 0.0)
    throw Error(Errc::ZeroPosition, "R_A = 0 has no direction; pass a unit direction instead");
  return R / nr;
}

}  // namespace

double pw_lambda_force(const PWGrid& g, double Z, int eta, const Eigen::Vector3d& R) {
  g.validate();
  const Eigen::Vector3d d = unit_direction(R);
  const int h = (g.n_side - 1) / 2;
  std::vector<double> part(std::size_t(g.n_side));
#pragma omp parallel for schedule(static)
  for (int ix = -h; ix <= h; ++ix) part[std::size_t(ix + h)] = lambda_slab(g, d, ix);
  // |k.d|/|k|^2 = (L / 2 pi) |nu.d|/|nu|^2
  const double scale = g.length() / (2.0 * kPi);
  return 4.0 * kPi * eta * Z / g.Omega * scale * tree_sum(part, 0, part.size());
}

double pw_lambda_force_serial(const PWGrid& g, double Z, int eta, const Eigen::Vector3d& R) {
  g.validate();
  const Eigen::Vector3d d = unit_direction(R);
  const double kf = 2.0 * kPi / g.length();
  double s = 0.0;
  for (int t = 0; t < g.size(); ++t) {
    const auto v = g.nu(t);
    if (v[0] == 0 && v[1] == 0 && v[2] == 0) continue;
    const Eigen::Vector3d k = kf * Eigen::Vector3d(v[0], v[1], v[2]);
    s += std::abs(k.dot(d)) / k.squaredNorm();
  }
  return 4.0 * kPi * eta * Z / g.Omega * s;
}

double momentum_prep_probability(int n) {
  if (n < 1 || n > 11) throw Error(Errc::InvalidArgument, "n must lie in [1, 11]");
  const int a = (1 << (n - 1)) - 1;
  // nu_x > 0 doubled for the sign; y, z folded onto >= 0 with multiplicity
  std::vector<double> part(std::size_t(a + 1), 0.0);
#pragma omp parallel for schedule(dynamic)
  for (int x = 1; x <= a; ++x) {
    double s = 0.0;
    for (int y = 0; y <= a; ++y)
      for (int z = 0; z <= a; ++z) {
        const double w = (y ? 2.0 : 1.0) * (z ? 2.0 : 1.0);
        s += w * x / (double(x) * x + double(y) * y + double(z) * z);
      }
    part[std::size_t(x)] = 2.0 * s;
  }
  double total = 0.0;
  for (double v : part) total += v;
  return std::ldexp(total, -(2 * n + 2));
}

double momentum_prep_integral() {
  auto f = [](double z) {
    const double u = std::sqrt(1.0 + z * z);
    return u * std::atan(1.0 / u);  // arccot u for u > 0
  };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 15, 1e-15);
}

double momentum_prep_constant() {
  const double pi = kPi;
  return 0.25 * (-1.0 - pi / 2.0 + 2.0 * std::sqrt(2.0) * std::atan(1.0 / std::sqrt(2.0)) +
                 std::log(1.5)) +
         0.5 * momentum_prep_integral();
}

}  // namespace gforge
