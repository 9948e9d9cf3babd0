#include "gforge/ft_cost.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gforge/error.hpp"

namespace gforge {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

double floored_log(double x) { return std::max(std::log(x), 1.0); }

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::InvalidArgument, what);
}

}  // namespace

double FTInputs::lambda_i(int i) const {
  return lambda_F_i.empty() ? lambda_F : lambda_F_i[std::size_t(i)];
}

double FTInputs::T_F_at(int i) const { return T_F_i.empty() ? T_F : T_F_i[std::size_t(i)]; }

void FTInputs::validate() const {
  require(N_a >= 1, "N_a must be >= 1");
  require(N >= 0, "N must be >= 0");
  require(lambda_F > 0 && lambda_H > 0, "lambda_F, lambda_H must be positive");
  require(gap > 0, "gap must be positive");
  require(a0 > 0 && a0 <= 1, "a0 must lie in (0, 1]");
  require(c_sgn > 0, "c_sgn must be positive");
  require(delta_z > 0 && delta_z <= 1, "delta_z must lie in (0, 1]");
  require(eps_A > 0 && eps_A <= 2, "eps_A must lie in (0, 2]");
  require(T_F >= 0 && T_H >= 0 && T_phi >= 0, "costs must be non-negative");
  const std::size_t nc = std::size_t(n_components());
  require(lambda_F_i.empty() || lambda_F_i.size() == nc, "lambda_F_i needs 3 N_a entries");
  require(T_F_i.empty() || T_F_i.size() == nc, "T_F_i needs 3 N_a entries");
  require(normalized_gradients.empty() || normalized_gradients.size() == nc,
          "normalized_gradients needs 3 N_a entries");
  for (double l : lambda_F_i)
    require(l > 0 && l <= lambda_F * (1 + 1e-12), "need 0 < lambda_F_i <= lambda_F");
  for (double t : T_F_i) require(t >= 0 && t <= T_F * (1 + 1e-12), "need 0 <= T_F_i <= T_F");
  if (assume_TF_le_TH && T_F > T_H)
    throw Error(Errc::AssumptionViolated, "T_F > T_H while assume_TF_le_TH is set");
}

FTInputs ft_inputs_from_json(const nlohmann::json& j) {
  static const char* known[] = {"lambda_F_i", "lambda_F", "lambda_H", "T_F_i",  "T_F",
                                "T_H",        "T_phi",    "gap",      "a0",     "N",
                                "N_a",        "c_sgn",    "delta_z",  "eps_A",  "normalized_gradients",
                                "assume_TF_le_TH", "reflection", "eps", "norm", "schema_version"};
  if (!j.is_object()) throw Error(Errc::InvalidArgument, "ft-cost inputs must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return it.key() == k; }) == std::end(known))
      throw Error(Errc::InvalidArgument, "unknown key '" + it.key() + "'");
  FTInputs in;
  auto get = [&](const char* k, auto& dst) {
    if (j.contains(k)) j.at(k).get_to(dst);
  };
  try {
    get("lambda_F_i", in.lambda_F_i);
    get("lambda_F", in.lambda_F);
    get("lambda_H", in.lambda_H);
    get("T_F_i", in.T_F_i);
    get("T_F", in.T_F);
    get("T_H", in.T_H);
    get("T_phi", in.T_phi);
    get("gap", in.gap);
    get("a0", in.a0);
    get("N", in.N);
    get("N_a", in.N_a);
    get("c_sgn", in.c_sgn);
    get("delta_z", in.delta_z);
    get("eps_A", in.eps_A);
    get("normalized_gradients", in.normalized_gradients);
    get("assume_TF_le_TH", in.assume_TF_le_TH);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, e.what());
  }
  if (j.contains("reflection")) {
    const std::string m = j.at("reflection").get<std::string>();
    if (m == "simplified")
      in.reflection = ReflectionMode::Simplified;
    else if (m == "full")
      in.reflection = ReflectionMode::Full;
    else
      throw Error(Errc::InvalidArgument, "reflection must be simplified|full");
  }
  in.validate();
  return in;
}

nlohmann::json CostReport::to_json() const {
  nlohmann::json j;
  j["method"] = method;
  j["total"] = total;
  j["breakdown"] = breakdown;
  j["model_flags"] = model_flags;
  return j;
}

double oea_calls(double eps) {
  require(eps > 0, "eps must be positive");
  return 5.0 * kPi / (2.0 * kSqrt2 * eps);
}

double oea_component_cost(int i, double eps_i, const FTInputs& in, double T_R, double T_P_i) {
  if (i < 0 || i >= in.n_components())
    throw Error(Errc::IndexOutOfRange, "component " + std::to_string(i));
  require(eps_i > 0, "eps_i must be positive");
  const double lam = in.lambda_i(i);
  // log term: base 2, unit constant
  return 15.0 * kPi * lam / (kSqrt2 * eps_i) * (in.T_F_at(i) + T_R) + T_P_i +
         std::max(0.0, std::log2(lam / eps_i));
}

std::vector<double> allocate_eps(const std::vector<double>& x, double eps_total, ErrNorm norm) {
  require(eps_total > 0, "eps must be positive");
  require(!x.empty(), "no components");
  const double p = norm == ErrNorm::One ? 0.5 : 1.0 / 3.0;
  std::vector<double> w(x.size());
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] >= 0, "costs must be non-negative");
    w[i] = std::pow(x[i], p);
    s += norm == ErrNorm::One ? w[i] : w[i] * w[i];
  }
  if (s == 0.0) throw Error(Errc::AllZero, "all component costs are zero");
  const double denom = norm == ErrNorm::One ? s : std::sqrt(s);
  for (double& v : w) v = eps_total * v / denom;
  return w;
}

double reflection_cost(const FTInputs& in, double eps_r, ReflectionMode mode) {
  if (mode == ReflectionMode::Simplified) return in.T_H * in.lambda_H / in.gap;
  require(eps_r > 0 && eps_r < 1, "eps_r must lie in (0, 1)");
  return (2.0 * in.N + std::log2(1.0 / in.delta_z) + in.T_H) * in.lambda_H * in.c_sgn / in.gap *
         std::log(1.0 / eps_r);
}

double prep_cost_first(const FTInputs& in, double T_R) {
  return std::log(2.0 / in.eps_A) / in.a0 * (T_R + in.T_phi + in.N);
}

double prep_cost_recycle(double x, double T_R) {
  if (!(std::abs(x) < 1.0))
    throw Error(Errc::DivergentRecycle, "|x| >= 1: recycling cost diverges");
  return (1.0 + 0.5 / (1.0 - x * x)) * T_R;
}

namespace {

double T_R_for(const FTInputs& in, double eps) {
  const double eps_r = std::min(eps, 0.5);
  return reflection_cost(in, eps_r, in.reflection);
}

std::vector<std::string> common_flags(const FTInputs& in) {
  std::vector<std::string> f = {"suppressed log factors set to 1",
                                "T_phi + N prep term kept (not dropped)"};
  f.push_back(in.reflection == ReflectionMode::Simplified
                  ? "T_R simplified to T_H lambda_H / gap"
                  : "T_R full form, eps_r = min(eps, 1/2), delta_z log base 2");
  return f;
}

}  // namespace

double oea_sum_components(const FTInputs& in, const std::vector<double>& eps_i, double T_R) {
  double s = 0.0;
  for (int i = 0; i < in.n_components(); ++i)
    s += oea_component_cost(i, eps_i[std::size_t(i)], in, T_R, 0.0);
  return s;
}

CostReport oea_total_cost(const FTInputs& in, double eps, ErrNorm norm) {
  in.validate();
  require(eps > 0, "eps must be positive");
  const int nc = in.n_components();
  const double T_R = T_R_for(in, eps);

  std::vector<double> x(static_cast<std::size_t>(nc));
  for (int i = 0; i < nc; ++i) x[std::size_t(i)] = in.lambda_i(i) * (in.T_F_at(i) + T_R);

  double agg = 0.0;
  if (norm == ErrNorm::One) {
    for (double v : x) agg += std::sqrt(v);
    agg = agg * agg;
  } else {
    for (double v : x) agg += std::pow(v, 2.0 / 3.0);
    agg = std::pow(agg, 1.5);
  }
  const double chernoff = std::log(12.0 * in.N_a);
  const double leading = 90.0 * kPi * chernoff / (kSqrt2 * eps) * agg;

  const double first = prep_cost_first(in, T_R);
  double recycle = 0.0;
  for (int i = 1; i < nc; ++i) {
    const double xi = in.normalized_gradients.empty() ? 0.0 : in.normalized_gradients[std::size_t(i)];
    recycle += prep_cost_recycle(xi, T_R);
  }

  const std::vector<double> eps_i = allocate_eps(x, eps, norm);
  double logs = 0.0;
  for (int i = 0; i < nc; ++i)
    if (eps_i[std::size_t(i)] > 0) logs += std::max(0.0, std::log2(in.lambda_i(i) / eps_i[std::size_t(i)]));

  CostReport r;
  r.method = norm == ErrNorm::One ? "oea-1norm" : "oea-2norm";
  r.total = leading + first + recycle + logs;
  r.breakdown = {{"leading", leading},
                 {"chernoff_log", chernoff},
                 {"T_R", T_R},
                 {"prep_first", first},
                 {"prep_recycle", recycle},
                 {"log_terms", logs},
                 {"asymptotic",
                  in.lambda_F / eps * std::pow(double(in.N_a), norm == ErrNorm::One ? 2.0 : 1.5) *
                      (in.T_F + in.lambda_H / in.gap * in.T_H)}};
  r.model_flags = common_flags(in);
  r.model_flags.push_back("component log term: log2(lambda_i/eps_i), unit constant");
  r.model_flags.push_back("asymptotic: lambda_F N_a^p (T_F + lambda_H T_H / gap) / eps");
  return r;
}

CostReport gbeve_cost(const FTInputs& in, double eps) {
  in.validate();
  require(eps > 0, "eps must be positive");
  const double T_R = T_R_for(in, eps);
  const double na = in.N_a;
  const double Q = 12.0 * na * in.lambda_F / eps;
  const double T_time = std::sqrt(3.0 * na) * in.T_F;
  const double prep = prep_cost_first(in, T_R);

  CostReport r;
  r.method = "gbeve";
  r.total = prep + Q * (T_R + T_time);
  const double asym = in.T_H * in.lambda_H / in.gap * na * in.lambda_F / eps;
  r.breakdown = {{"prep", prep}, {"Q", Q}, {"T_R", T_R}, {"T_time", T_time}, {"asymptotic", asym}};

  const CostReport oea = oea_total_cost(in, eps, ErrNorm::Two);
  r.breakdown["ratio_oea_over_gbeve"] = oea.total / r.total;
  r.breakdown["ratio_asymptotic"] = oea.breakdown.at("asymptotic") / asym;
  r.model_flags = common_flags(in);
  r.model_flags.push_back("Q = 12 N_a lambda_F / eps: derived model constant, not printed");
  r.model_flags.push_back("T_time = sqrt(3 N_a) T_F");
  r.model_flags.push_back("asymptotic: T_H lambda_H N_a lambda_F / (gap eps)");
  return r;
}

nlohmann::json TauReport::to_json() const {
  return {{"tau_oea", tau_oea}, {"tau_gbev", tau_gbev}, {"tau_fd1", tau_fd1},
          {"tau_fd2", tau_fd2}, {"tau_fd3", tau_fd3},   {"fd_dominant", fd_dominant},
          {"verdict", verdict}};
}

TauReport tau_report(const SystemConstants& k, double lambda_F, double eps) {
  k.validate();
  require(eps > 0 && lambda_F > 0, "eps and lambda_F must be positive");
  TauReport t;
  const double l52 = std::pow(floored_log(k.e_frak), 2.5);
  t.tau_oea = lambda_F / (eps * k.gap);
  t.tau_gbev = t.tau_oea / std::sqrt(double(k.n_atoms));
  t.tau_fd1 = k.c * l52 / eps;
  t.tau_fd2 = k.n_atoms * k.max_dH / (eps * k.gap);
  t.tau_fd3 = floored_log(1.0 / eps) / (k.a_min * k.gap) * l52;
  t.fd_dominant = std::max(t.tau_fd1, std::min(t.tau_fd2, t.tau_fd3));
  if (t.tau_fd3 < t.tau_fd1)
    t.verdict = "finite-difference likely faster (tau_fd3 < tau_fd1)";
  else if (t.tau_oea < t.fd_dominant)
    t.verdict = "overlap estimation may have the advantage";
  else
    t.verdict = "finite-difference bound is lower";
  return t;
}

}  // namespace gforge
