#include "gforge/nisq_cost.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "gforge/error.hpp"

namespace gforge {

namespace {

void check_sigma(const SigmaMatrix& s) {
  if (!s.allFinite() || (s.size() && s.minCoeff() < 0))
    throw Error(Errc::InvalidArgument, "sigma matrix must be finite and nonnegative");
}

double log_binom(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

double gamma2_parallel(const SigmaMatrix& s) {
  check_sigma(s);
  double acc = 0.0;
  for (long j = 0; j < s.cols(); ++j) acc += s.col(j).norm();
  return acc * acc;
}

double gamma2_separate(const SigmaMatrix& s) {
  check_sigma(s);
  const double t = s.sum();
  return t * t;
}

double gamma2_no_importance(const SigmaMatrix& s) {
  check_sigma(s);
  return double(s.cols()) * s.squaredNorm();
}

double shadow_norm_factor(int n_modes, int k) {
  return std::exp(log_binom(2 * n_modes, 2 * k) - log_binom(n_modes, k));
}

double shadow_variance_bound(const MajoranaPolynomial& m, int n_modes) {
  double v = 0.0;
  for (const auto& t : m.terms) {
    const int deg = t.mu.degree();
    if (deg != 2 && deg != 4) throw Error(Errc::InvalidArgument, "monomial degree must be 2 or 4");
    v += shadow_norm_factor(n_modes, deg / 2) * t.f * t.f;
  }
  return v;
}

static void range_sums(const std::vector<double>& vals, int eta, double& sp, double& sm) {
  if (eta < 0 || eta > 2 * int(vals.size()))
    throw Error(Errc::EtaTooLarge, "eta " + std::to_string(eta) + " exceeds 2 x " + std::to_string(vals.size()));
  std::vector<double> ms;
  for (double f : vals) {
    ms.push_back(f);
    ms.push_back(f);
  }
  std::sort(ms.begin(), ms.end());
  sm = std::accumulate(ms.begin(), ms.begin() + eta, 0.0);
  sp = std::accumulate(ms.end() - eta, ms.end(), 0.0);
}

double brg_sigma_bound(const std::vector<double>& f_values, int eta) {
  double sp, sm;
  range_sums(f_values, eta, sp, sm);
  return 0.5 * std::max(sp * sp, sm * sm);
}

double one_body_sigma_bound(const std::vector<double>& t_values, int eta) {
  double sp, sm;
  range_sums(t_values, eta, sp, sm);
  return 0.5 * (sp - sm);
}

BrgSigmas brg_sigmas(const FermionOp& op, const Factorization& doubled, int eta) {
  if (!doubled.doubled) throw Error(Errc::MissingFactorization, "BRG needs a double factorisation");
  BrgSigmas out;
  for (const auto& f : doubled.factors) {
    std::vector<double> fv(f.f.data(), f.f.data() + f.f.size());
    for (double& v : fv) v /= std::sqrt(2.0);  // V = 1/2 sum_l W_l^2
    out.two_body.push_back(brg_sigma_bound(fv, eta));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.one_body, Eigen::EigenvaluesOnly);
  std::vector<double> t(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  out.one_body = one_body_sigma_bound(t, eta);
  return out;
}

double shots_one_norm(const std::vector<std::vector<double>>& q_norms, double eps) {
  if (!(eps > 0)) throw Error(Errc::InvalidArgument, "eps must be > 0");
  double s = 0.0;
  for (const auto& row : q_norms) {
    double t = 0.0;
    for (double v : row) t += std::abs(v);
    s += std::pow(t, 2.0 / 3.0);
  }
  return s * s * s / (eps * eps);
}

double rms_to_2norm(double rms, int n_atoms) { return rms * std::sqrt(3.0 * n_atoms); }

PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y, int k_last) {
  if (x.size() != y.size()) throw Error(Errc::InvalidArgument, "x and y lengths differ");
  if (k_last < 2 || k_last > int(x.size())) throw Error(Errc::InvalidArgument, "k_last out of range");
  const std::size_t off = x.size() - std::size_t(k_last);
  std::vector<double> lx, ly;
  for (std::size_t i = off; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw Error(Errc::InvalidArgument, "power-law fit needs positive data");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const double n = double(k_last);
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < k_last; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0) throw Error(Errc::InvalidArgument, "degenerate x values");
  const double b = sxy / sxx, a = my - b * mx;
  double ssr = 0;
  for (int i = 0; i < k_last; ++i) {
    const double r = ly[i] - a - b * lx[i];
    ssr += r * r;
  }
  const double se = k_last > 2 ? std::sqrt(ssr / (n - 2) / sxx) : 0.0;
  return {b, se, std::exp(a)};
}

void write_nisq_csv(const std::vector<NisqRow>& rows, std::ostream& out) {
  out << "method,system_size,gamma,shots_at_eps\n";
  out.precision(12);
  for (const auto& r : rows) out << r.method << "," << r.system_size << "," << r.gamma << "," << r.shots_at_eps << "\n";
}

}  // namespace gforge
