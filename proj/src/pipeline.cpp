#include "gforge/pipeline.hpp"

#include <cmath>
#include <exception>

#include "gforge/error.hpp"
#include "gforge/factorization.hpp"
#include "gforge/nisq_cost.hpp"
#include "gforge/qubit_rep.hpp"

namespace gforge {

namespace {

Lambdas lambdas_for(const FermionOp& op, const std::string& method) {
  if (method == "sparse") return lambda_sparse(op);
  if (method == "df") return lambda_df(op, double_factorize(single_factorize(op)));
  throw Error(Errc::InvalidArgument, "unknown lambda method '" + method + "'");
}

}  // namespace

std::vector<LambdaRow> lambda_rows(const IntegralBundle& b, const std::vector<std::string>& methods) {
  if (methods.empty()) throw Error(Errc::InvalidArgument, "no lambda methods given");
  // checked up front: nothing may throw inside the parallel loop
  for (const auto& m : methods)
    if (m != "sparse" && m != "df") throw Error(Errc::InvalidArgument, "unknown lambda method '" + m + "'");
  std::vector<FermionOp> ops;
  ops.push_back(build_hamiltonian(b));
  for (auto& f : build_all_force_operators(b)) ops.push_back(std::move(f));

  std::vector<LambdaRow> rows;
  for (const auto& m : methods) {
    std::vector<LambdaRow> part(ops.size());
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < int(ops.size()); ++k) {
      try {
        const Lambdas l = lambdas_for(ops[std::size_t(k)], m);
        part[std::size_t(k)] = {ops[std::size_t(k)].label, m, l.lambda1, l.lambda2, l.total};
      } catch (...) {
#pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

LambdaSummary summarize(const std::vector<LambdaRow>& rows, const std::string& method) {
  LambdaSummary s{0.0, 0.0, 0.0};
  std::vector<double> forces;
  bool have_h = false;
  for (const auto& r : rows) {
    if (r.method != method) continue;
    if (r.label == "H") {
      s.lambda_H = r.total;
      have_h = true;
    } else {
      forces.push_back(r.total);
    }
  }
  if (!have_h) throw Error(Errc::InvalidArgument, "no Hamiltonian row for " + method);
  const MeanStd ms = lambda_force_mean(forces);
  s.lambda_F_mean = ms.mean;
  s.lambda_F_std = ms.stddev;
  return s;
}

NisqGammas nisq_gammas(const std::vector<FermionOp>& forces, int n_electrons) {
  if (forces.empty()) throw Error(Errc::InvalidArgument, "no force operators");
  const std::size_t n = forces.size();
  std::vector<PauliPolynomial> polys(n);
  std::vector<double> shadow(n), brg2(n), brg1(n);
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < int(n); ++i) try {
    const FermionOp& f = forces[std::size_t(i)];
    polys[std::size_t(i)] = jordan_wigner(f);
    const MajoranaPolynomial m = to_majorana(f);
    shadow[std::size_t(i)] = shadow_variance_bound(m, m.n_modes);
    const BrgSigmas bs = brg_sigmas(f, double_factorize(single_factorize(f)), n_electrons);
    double s = 0.0;
    for (double v : bs.two_body) s += v;
    brg2[std::size_t(i)] = s;
    brg1[std::size_t(i)] = bs.one_body;
  } catch (...) {
#pragma omp critical
    if (!err) err = std::current_exception();
  }
  if (err) std::rethrow_exception(err);
  const PauliUnion u = pauli_union(polys);
  const SigmaMatrix sig = u.h.cwiseAbs();

  NisqGammas g{};
  g.separate = gamma2_separate(sig);
  g.parallel = gamma2_parallel(sig);
  g.no_importance = gamma2_no_importance(sig);
  double sh = 0.0, b2 = 0.0, b1 = 0.0, l1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sh += shadow[i];
    b2 += brg2[i];
    b1 += brg1[i];
    l1 += induced_one_norm(polys[i]);
  }
  g.shadow = sh;
  g.brg = b2 * b2;
  g.brg_with_one_body = (b2 + b1) * (b2 + b1);
  g.sum_induced_one_norm = l1;
  return g;
}

NisqGammas nisq_gammas(const IntegralBundle& b) {
  return nisq_gammas(build_all_force_operators(b), b.n_electrons);
}

}  // namespace gforge
