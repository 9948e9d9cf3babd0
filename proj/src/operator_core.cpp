#include "gforge/operator_core.hpp"

#include <algorithm>
#include <cmath>

#include "gforge/error.hpp"

namespace gforge {

namespace {

// A_pqrs = sum_t M_pt X_tqrs
Tensor4 contract_first(const Eigen::MatrixXd& m, const Tensor4& x) {
  const int n = x.n;
  const long n3 = long(n) * n * n;
  Tensor4 out(n);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> xm(
      x.data.data(), n, n3);
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> om(
      out.data.data(), n, n3);
  om.noalias() = m * xm;
  return out;
}

}  // namespace

std::string force_label(int i) {
  static const char axes[] = {'x', 'y', 'z'};
  return "F[A=" + std::to_string(i / 3) + ",axis=" + axes[i % 3] + "]";
}

Tensor4 chemist_tensor(const FermionOp& op) {
  Tensor4 g = op.two_body;
  for (double& v : g.data) v *= 2.0;
  return g;
}

FermionOp from_integrals(const Eigen::MatrixXd& h, const Tensor4& g, double shift,
                         std::string label) {
  const int n = int(h.rows());
  FermionOp op;
  op.shift = shift;
  op.label = std::move(label);
  op.one_body = h;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      double c = 0.0;
      for (int r = 0; r < n; ++r) c += g(p, r, r, q);
      op.one_body(p, q) -= 0.5 * c;
    }
  op.two_body = g;
  for (double& v : op.two_body.data) v *= 0.5;
  return op;
}

FermionOp build_hamiltonian(const IntegralBundle& b) {
  return from_integrals(b.h, b.g, 0.0, "H");
}

void pulay_integrals(const IntegralBundle& b, int i, Eigen::MatrixXd& dh_t, Tensor4& dg_t) {
  if (i < 0 || i >= b.n_derivs())
    throw Error(Errc::IndexOutOfRange,
                "derivative index " + std::to_string(i) + " not in [0," +
                    std::to_string(b.n_derivs()) + ")");
  const Eigen::MatrixXd& dS = b.dS[i];
  dh_t = b.dh[i] - 0.5 * (dS * b.h + b.h * dS);

  const int n = b.n_spatial;
  const Tensor4 a = contract_first(dS, b.g);
  dg_t = b.dg[i];
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s)
          dg_t(p, q, r, s) -=
              0.5 * (a(p, q, r, s) + a(q, p, r, s) + a(r, s, p, q) + a(s, r, p, q));
}

FermionOp build_force_operator(const IntegralBundle& b, int i) {
  Eigen::MatrixXd dh_t;
  Tensor4 dg_t;
  pulay_integrals(b, i, dh_t, dg_t);
  return from_integrals(dh_t, dg_t, 0.0, force_label(i));
}

std::vector<FermionOp> build_all_force_operators(const IntegralBundle& b) {
  const int nd = b.n_derivs();
  std::vector<FermionOp> ops(static_cast<std::size_t>(nd));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < nd; ++i) ops[std::size_t(i)] = build_force_operator(b, i);
  return ops;
}

double max_symmetry_violation(const FermionOp& op) {
  const double one = op.one_body.size()
                         ? (op.one_body - op.one_body.transpose()).cwiseAbs().maxCoeff()
                         : 0.0;
  return std::max(one, eightfold_violation(op.two_body));
}

}  // namespace gforge
