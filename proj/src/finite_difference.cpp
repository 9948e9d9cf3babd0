#include "gforge/finite_difference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gforge/error.hpp"

namespace gforge {

namespace {

double log_binom(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

void need_positive(double v, const char* what) {
  if (!(v > 0) || !std::isfinite(v)) throw Error(Errc::InvalidArgument, std::string(what) + " must be positive");
}

// log^p(x) with the log floored at 1 so that the model stays defined for
// arguments below e.
double logpow(double x, double p) { return std::pow(std::max(std::log(x), 1.0), p); }

}  // namespace

void SystemConstants::validate() const {
  need_positive(c, "c");
  need_positive(e_frak, "e_frak");
  need_positive(lambda_H, "lambda_H");
  need_positive(gap, "gap");
  need_positive(max_dH, "max_dH");
  if (n_atoms < 1) throw Error(Errc::InvalidArgument, "n_atoms < 1");
  if (!(a0 > 0 && a0 <= 1) || !(a_min > 0 && a_min <= 1))
    throw Error(Errc::InvalidArgument, "a0 and a_min must lie in (0,1]");
}

std::vector<double> stencil(int m) {
  if (m < 1) throw Error(Errc::InvalidArgument, "stencil order m < 1");
  std::vector<double> a(std::size_t(2 * m + 1), 0.0);
  for (int l = 1; l <= m; ++l) {
    const double mag = std::exp(log_binom(m, l) - log_binom(m + l, l)) / l;
    const double v = (l % 2 == 1) ? mag : -mag;  // (-1)^(l-1)
    a[std::size_t(m + l)] = v;
    a[std::size_t(m - l)] = -v;
  }
  return a;
}

double fd_apply(const std::vector<double>& values, double dR, int m) {
  const auto a = stencil(m);
  need_positive(dR, "dR");
  double s = 0.0;
  if (values.size() == std::size_t(2 * m)) {
    std::size_t k = 0;
    for (int l = -m; l <= m; ++l) {
      if (l == 0) continue;
      s += a[std::size_t(l + m)] * values[k++];
    }
  } else if (values.size() == std::size_t(2 * m + 1)) {
    for (int l = -m; l <= m; ++l) s += a[std::size_t(l + m)] * values[std::size_t(l + m)];
  } else {
    throw Error(Errc::InvalidArgument, "fd_apply expects 2m or 2m+1 energies");
  }
  return s / dR;
}

double eps_fd_bound(int m, double dR, const SystemConstants& k) {
  need_positive(dR, "dR");
  const double x = 8.0 * dR * k.c * m;
  if (!(x < 1.0)) throw Error(Errc::StepTooLarge, "8 dR c m = " + std::to_string(x) + " >= 1");
  return (k.e_frak / dR) * std::pow(x, 2 * m + 1) / (1.0 - x);
}

PeAllocation allocate_pe_time(int m, double dR, double lambda_H, double eps_pe) {
  need_positive(eps_pe, "eps_pe");
  need_positive(dR, "dR");
  const auto a = stencil(m);
  double s23 = 0.0;
  for (double v : a) s23 += std::pow(std::abs(v), 2.0 / 3.0);
  PeAllocation out;
  out.Gamma = std::pow(s23, 1.5);
  const double pref = M_PI * lambda_H / (eps_pe * dR) * 0.5 * std::sqrt(s23);
  out.T_total = 0.0;
  for (double v : a) {
    const double t = pref * std::pow(std::abs(v), 2.0 / 3.0);
    out.T_l.push_back(t);
    out.T_total += t;
  }
  return out;
}

double pe_error(int m, double dR, double lambda_H, const std::vector<double>& T_l) {
  const auto a = stencil(m);
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k] != 0.0) s += a[k] * a[k] / (4.0 * T_l[k] * T_l[k]);
  return M_PI / dR * lambda_H * std::sqrt(s);
}

double choose_dR(int m, const SystemConstants& k, double eps) {
  need_positive(eps, "eps");
  const double t1 = 1.0 / (8.0 * k.c * m) *
                    std::pow(eps / (16.0 * std::sqrt(2.0) * k.e_frak * m * k.c), 1.0 / (2.0 * m));
  const double t2 = 1.0 / (16.0 * k.c * m);
  const double t3 = k.gap / (36.0 * double(m) * m * k.n_atoms * k.max_dH);
  return std::min({t1, t2, t3});
}

double total_queries(int m, const SystemConstants& k, double eps) {
  need_positive(eps, "eps");
  const double pre = 48.0 * std::sqrt(2.0) * std::sqrt(6.0) * k.lambda_H * M_PI * k.c * std::pow(m, 2.5) / eps;
  const double b1 = std::pow(16.0 * std::sqrt(2.0) * k.e_frak * k.c * m / eps, 1.0 / (2.0 * m));
  const double b2 = 4.5 * (1.0 + k.n_atoms * k.max_dH / (k.gap * k.c));
  return pre * std::max(b1, b2);
}

FDPlan optimize_m(const SystemConstants& k, double eps, int m_max) {
  k.validate();
  need_positive(eps, "eps");
  if (m_max < 1) throw Error(Errc::InvalidArgument, "m_max < 1");
  int best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int m = 1; m <= m_max; ++m) {
    const double dR = choose_dR(m, k, eps);
    if (!(8.0 * dR * k.c * m <= 0.5)) continue;
    const double c = total_queries(m, k, eps);
    if (c < best_cost) {
      best_cost = c;
      best = m;
    }
  }
  if (best == 0) throw Error(Errc::NoFeasibleM, "no m in [1, m_max] satisfies 8 dR c m <= 1/2");

  FDPlan p;
  p.m = best;
  p.dR = choose_dR(best, k, eps);
  p.a = stencil(best);
  // error budget split in quadrature, eps^2/2 each
  p.eps_pe = eps / std::sqrt(2.0);
  p.eps_fd = eps_fd_bound(best, p.dR, k);
  const auto alloc = allocate_pe_time(best, p.dR, k.lambda_H, p.eps_pe);
  p.T_l = alloc.T_l;
  p.T_total = alloc.T_total;
  p.Gamma = alloc.Gamma;
  p.query_model = best_cost;
  return p;
}

nlohmann::json to_json(const FDPlan& p) {
  return {{"m", p.m},           {"dR_bohr", p.dR},   {"a", p.a},
          {"T_l", p.T_l},       {"eps_pe", p.eps_pe}, {"eps_fd", p.eps_fd},
          {"T_total", p.T_total}, {"Gamma", p.Gamma}, {"query_model", p.query_model}};
}

double gradient_vector_queries(const SystemConstants& k, double eps_2norm, bool reuse) {
  k.validate();
  need_positive(eps_2norm, "eps");
  const double na = k.n_atoms;
  const double l52 = logpow(k.e_frak, 2.5);
  const double first = l52 * k.c / eps_2norm;
  const double fresh = logpow(1.0 / eps_2norm, 1.0) / (k.a_min * k.gap);
  const double reused = na * k.max_dH * l52 / (eps_2norm * k.gap);
  return k.lambda_H * std::pow(na, 1.5) * (first + (reuse ? reused : fresh));
}

double overlap_stability(double delta1_norm, double delta2_norm, double gap, double max_dH, double delta) {
  need_positive(gap, "gap");
  need_positive(max_dH, "max_dH");
  if (delta1_norm < 0 || delta2_norm < 0 || delta < 0) throw Error(Errc::InvalidArgument, "negative input");
  const double d = std::max(delta1_norm, delta2_norm);
  if (!(d < gap / (4.0 * max_dH)))
    throw Error(Errc::AssumptionViolated, "max ||Delta|| must be below gap / (4 max||dH||)");
  return 1.0 - 3.0 * delta - 6.0 * d * max_dH / gap;
}

SystemConstants system_constants_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(Errc::InvalidArgument, "constants must be a JSON object");
  SystemConstants k;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    try {
      if (key == "c") k.c = it->get<double>();
      else if (key == "e_frak") k.e_frak = it->get<double>();
      else if (key == "lambda_H") k.lambda_H = it->get<double>();
      else if (key == "gap") k.gap = it->get<double>();
      else if (key == "n_atoms") k.n_atoms = it->get<int>();
      else if (key == "max_dH") k.max_dH = it->get<double>();
      else if (key == "a0") k.a0 = it->get<double>();
      else if (key == "a_min") k.a_min = it->get<double>();
      else if (key == "schema_version") continue;
      else throw Error(Errc::InvalidArgument, "unknown key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::InvalidArgument, key + ": " + e.what());
    }
  }
  k.validate();
  return k;
}

}  // namespace gforge
